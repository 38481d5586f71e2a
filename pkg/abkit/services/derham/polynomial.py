import typing
import logging
from fractions import Fraction
from abkit.services.scalars.scalar_rings import RATIONALS, render_terms, render_monomial, specialize
from abkit.services.series.truncated_series import scalar_term
from abkit.utils.errors import ScalarRingMismatchError, ArityMismatchError

logger = logging.getLogger(__name__)

Exponent = typing.Tuple[int, ...]

DEFAULT_NAMES = {2: ("x", "y"), 3: ("x", "y", "z")}


def variable_names(count: int) -> typing.Tuple[str, ...]:
    if count in DEFAULT_NAMES:
        return DEFAULT_NAMES[count]
    return tuple(f"x{i}" for i in range(count))


class Polynomial:
    """
    Polynomial in x_0..x_n with coefficients in a scalar ring (rationals or a truncated
    parameter ring). Stored as {exponent: coefficient}, zero coefficients removed.
    """
    __slots__ = ("terms", "nvars", "ring", "names")

    def __init__(self, terms: typing.Dict[Exponent, typing.Any], nvars: int, ring=RATIONALS,
                 names: typing.Sequence[str] = None):
        canonical = {}
        for exponent, coefficient in terms.items():
            exponent = tuple(exponent)
            if len(exponent) != nvars:
                raise ArityMismatchError(f"exponent {exponent} does not match {nvars} variables")
            coefficient = ring.coerce(coefficient)
            if not ring.is_zero(coefficient):
                canonical[exponent] = coefficient
        self.terms = canonical
        self.nvars = nvars
        self.ring = ring
        self.names = tuple(names) if names is not None else variable_names(nvars)

    @classmethod
    def zero(cls, nvars: int, ring=RATIONALS, names=None) -> "Polynomial":
        return cls({}, nvars, ring, names)

    @classmethod
    def constant(cls, value, nvars: int, ring=RATIONALS, names=None) -> "Polynomial":
        return cls({(0,) * nvars: value}, nvars, ring, names)

    @classmethod
    def variable(cls, index: int, nvars: int, ring=RATIONALS, names=None) -> "Polynomial":
        exponent = tuple(1 if i == index else 0 for i in range(nvars))
        return cls({exponent: ring.one()}, nvars, ring, names)

    def like(self, terms: typing.Dict[Exponent, typing.Any]) -> "Polynomial":
        return Polynomial(terms, self.nvars, self.ring, self.names)

    def _check(self, other: "Polynomial"):
        if self.ring != other.ring:
            raise ScalarRingMismatchError(f"{self.ring!r} does not match {other.ring!r}")
        if self.nvars != other.nvars:
            raise ArityMismatchError(f"{self.nvars} and {other.nvars} variables")

    def _promote(self, other) -> "Polynomial":
        if isinstance(other, Polynomial):
            self._check(other)
            return other
        return Polynomial.constant(other, self.nvars, self.ring, self.names)

    def is_zero(self) -> bool:
        return not self.terms

    def coefficient(self, exponent: Exponent):
        return self.terms.get(tuple(exponent), self.ring.zero())

    def __add__(self, other):
        other = self._promote(other)
        result = dict(self.terms)
        for exponent, c in other.terms.items():
            result[exponent] = result[exponent] + c if exponent in result else c
        return self.like(result)

    __radd__ = __add__

    def __neg__(self):
        return self.like({e: -c for e, c in self.terms.items()})

    def __sub__(self, other):
        return self + (-self._promote(other))

    def __rsub__(self, other):
        return self._promote(other) - self

    def __mul__(self, other):
        other = self._promote(other)
        result = {}
        for e1, c1 in self.terms.items():
            for e2, c2 in other.terms.items():
                exponent = tuple(p + q for p, q in zip(e1, e2))
                value = c1 * c2
                result[exponent] = result[exponent] + value if exponent in result else value
        return self.like(result)

    __rmul__ = __mul__

    def __pow__(self, power: int) -> "Polynomial":
        if power < 0:
            raise ValueError("negative powers of polynomials are not defined")
        result = Polynomial.constant(self.ring.one(), self.nvars, self.ring, self.names)
        for _ in range(power):
            result = result * self
        return result

    def scale(self, value) -> "Polynomial":
        return self.like({e: c * value for e, c in self.terms.items()})

    def derivative(self, index: int) -> "Polynomial":
        result = {}
        for exponent, c in self.terms.items():
            power = exponent[index]
            if power:
                lowered = exponent[:index] + (power - 1,) + exponent[index + 1:]
                result[lowered] = c * power
        return self.like(result)

    def gradient(self) -> typing.List["Polynomial"]:
        return [self.derivative(i) for i in range(self.nvars)]

    def euler(self, weights: typing.Sequence[Fraction]) -> "Polynomial":
        """E(f) with E = sum w_i x_i d/dx_i: each monomial scaled by its weight."""
        return self.like({e: c * monomial_weight(e, weights) for e, c in self.terms.items()})

    def degree(self) -> int:
        return max((sum(e) for e in self.terms), default=-1)

    def order(self) -> typing.Optional[int]:
        """Lowest total degree of a monomial."""
        return min((sum(e) for e in self.terms), default=None)

    def weighted_part(self, weights: typing.Sequence[Fraction], weight: Fraction) -> "Polynomial":
        return self.like({e: c for e, c in self.terms.items() if monomial_weight(e, weights) == weight})

    def map_coefficients(self, fn: typing.Callable, ring=None) -> "Polynomial":
        ring = ring or self.ring
        return Polynomial({e: fn(c) for e, c in self.terms.items()}, self.nvars, ring, self.names)

    def specialize(self, point: typing.Sequence) -> "Polynomial":
        """Coefficients evaluated at a parameter point; result over the rationals."""
        return self.map_coefficients(lambda c: specialize(c, point), RATIONALS)

    def recenter(self, point: typing.Sequence) -> "Polynomial":
        if self.ring == RATIONALS:
            return self
        return self.map_coefficients(lambda c: self.ring.recenter(c, point))

    def evaluate(self, values: typing.Sequence):
        total = self.ring.zero()
        for exponent, c in self.terms.items():
            term = c
            for value, power in zip(values, exponent):
                term = term * Fraction(value) ** power
            total = total + term
        return total

    def __eq__(self, other):
        if not isinstance(other, Polynomial):
            return NotImplemented
        return self.ring == other.ring and self.nvars == other.nvars and self.terms == other.terms

    def __hash__(self):
        return hash((self.nvars, frozenset(self.terms.items())))

    def render(self) -> str:
        ordered = sorted(self.terms.items(), key=lambda item: (sum(item[0]), tuple(-p for p in item[0])))
        return render_terms(scalar_term(c, render_monomial(e, self.names)) for e, c in ordered)

    def __str__(self):
        return self.render()

    def __repr__(self):
        return f"Polynomial({self.render()})"


def monomial_weight(exponent: Exponent, weights: typing.Sequence[Fraction]) -> Fraction:
    return sum((Fraction(w) * p for w, p in zip(weights, exponent)), Fraction(0))


def monomials_below(weights: typing.Sequence[Fraction], bound: Fraction) -> typing.List[Exponent]:
    """
    Every exponent m with weight w(m) < bound, sorted by (weight, exponent)
    """
    weights = [Fraction(w) for w in weights]
    if any(w <= 0 for w in weights):
        raise ValueError("weights must be positive")
    result = []

    def extend(prefix: typing.List[int], index: int, used: Fraction):
        if index == len(weights):
            result.append(tuple(prefix))
            return
        power = 0
        while used + power * weights[index] < bound:
            prefix.append(power)
            extend(prefix, index + 1, used + power * weights[index])
            prefix.pop()
            power += 1

    extend([], 0, Fraction(0))
    return sorted(result, key=lambda e: (monomial_weight(e, weights), e))
