import typing
import random
import logging
from functools import lru_cache
from fractions import Fraction
from abkit.services.scalars.scalar_rings import RATIONALS, render_terms
from abkit.services.series.truncated_series import TruncatedSeries, scalar_term
from abkit.utils.errors import TruncationMismatchError

logger = logging.getLogger(__name__)

Term = typing.Tuple[int, int]


@lru_cache(maxsize=None)
def a_power_times_b_power(k: int, j: int) -> typing.Tuple[typing.Tuple[Term, int], ...]:
    """
    Left-b normal form of a^k * b^j with integer coefficients
    :param k: power of a on the left
    :param j: power of b on the right
    :return: pairs ((p, q), c) meaning c * b^p * a^q
    """
    if j == 0:
        return (((0, k), 1),)
    result: typing.Dict[Term, int] = {}
    for (p, q), c in a_power_times_b_power(k, j - 1):
        # a^q * b = sum_m b^(m+1) * q!/(q-m)! * a^(q-m)
        falling = 1
        for m in range(q + 1):
            key = (p + m + 1, q - m)
            result[key] = result.get(key, 0) + c * falling
            falling *= q - m
    return tuple(sorted(result.items()))


class ABElement:
    """
    Element sum_j b^j * P_j(a) of the algebra generated by a and b with a*b - b*a = b^2,
    known modulo b^Nb and modulo the monomials b^j a^k with j + k >= Na (Na=None: polynomial in a).
    Terms are stored as {(j, k): scalar}.
    """
    __slots__ = ("terms", "b_truncation", "a_truncation", "ring")

    def __init__(self, terms: typing.Dict[Term, typing.Any], b_truncation: int,
                 a_truncation: typing.Optional[int] = None, ring=RATIONALS):
        if b_truncation < 1:
            raise ValueError("b_truncation must be positive")
        if a_truncation is not None and a_truncation < 1:
            raise ValueError("a_truncation must be positive")
        canonical = {}
        for (j, k), c in terms.items():
            if j < 0 or k < 0:
                raise ValueError(f"negative exponent in term b^{j}*a^{k}")
            if j >= b_truncation or (a_truncation is not None and j + k >= a_truncation):
                continue
            c = ring.coerce(c)
            if not ring.is_zero(c):
                canonical[(j, k)] = c
        self.terms = canonical
        self.b_truncation = b_truncation
        self.a_truncation = a_truncation
        self.ring = ring

    @classmethod
    def zero(cls, b_truncation: int, a_truncation=None, ring=RATIONALS) -> "ABElement":
        return cls({}, b_truncation, a_truncation, ring)

    @classmethod
    def scalar(cls, value, b_truncation: int, a_truncation=None, ring=RATIONALS) -> "ABElement":
        return cls({(0, 0): value}, b_truncation, a_truncation, ring)

    @classmethod
    def one(cls, b_truncation: int, a_truncation=None, ring=RATIONALS) -> "ABElement":
        return cls.scalar(ring.one(), b_truncation, a_truncation, ring)

    @classmethod
    def monomial(cls, j: int, k: int, b_truncation: int, a_truncation=None, ring=RATIONALS,
                 value=1) -> "ABElement":
        return cls({(j, k): value}, b_truncation, a_truncation, ring)

    @classmethod
    def generator_a(cls, b_truncation: int, a_truncation=None, ring=RATIONALS) -> "ABElement":
        return cls.monomial(0, 1, b_truncation, a_truncation, ring)

    @classmethod
    def generator_b(cls, b_truncation: int, a_truncation=None, ring=RATIONALS) -> "ABElement":
        return cls.monomial(1, 0, b_truncation, a_truncation, ring)

    @classmethod
    def from_components(cls, components: typing.Sequence[TruncatedSeries], b_truncation: int,
                        a_truncation=None, ring=RATIONALS) -> "ABElement":
        terms = {}
        for j, component in enumerate(components):
            for k, c in enumerate(component.coefficients):
                terms[(j, k)] = c
        return cls(terms, b_truncation, a_truncation, ring)

    def like(self, terms: typing.Dict[Term, typing.Any]) -> "ABElement":
        return ABElement(terms, self.b_truncation, self.a_truncation, self.ring)

    def check_compatible(self, other: "ABElement"):
        if (self.b_truncation, self.a_truncation) != (other.b_truncation, other.a_truncation):
            raise TruncationMismatchError(
                f"truncations (Nb={self.b_truncation}, Na={self.a_truncation}) and "
                f"(Nb={other.b_truncation}, Na={other.a_truncation}) differ"
            )
        if self.ring != other.ring:
            raise TruncationMismatchError(f"coefficient rings {self.ring!r} and {other.ring!r} differ")

    @property
    def components(self) -> typing.List[TruncatedSeries]:
        """P_0(a), ..., P_{Nb-1}(a); component j is known modulo a^(Na - j)."""
        result = []
        for j in range(self.b_truncation):
            order = None if self.a_truncation is None else max(self.a_truncation - j, 0)
            degree = max((k for (p, k) in self.terms if p == j), default=-1)
            coefficients = [self.terms.get((j, k), self.ring.zero()) for k in range(degree + 1)]
            result.append(TruncatedSeries(coefficients, order, self.ring, var="a"))
        return result

    def is_zero(self) -> bool:
        return not self.terms

    def b_valuation(self) -> typing.Optional[int]:
        return min((j for j, _ in self.terms), default=None)

    def total_valuation(self) -> typing.Optional[int]:
        return min((j + k for j, k in self.terms), default=None)

    def __add__(self, other):
        if not isinstance(other, ABElement):
            other = ABElement.scalar(other, self.b_truncation, self.a_truncation, self.ring)
        self.check_compatible(other)
        result = dict(self.terms)
        for key, c in other.terms.items():
            result[key] = result.get(key, self.ring.zero()) + c
        return self.like(result)

    __radd__ = __add__

    def __neg__(self):
        return self.like({key: -c for key, c in self.terms.items()})

    def __sub__(self, other):
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, ABElement):
            return nf_mul(self, other)
        return self.scale(other)

    def __rmul__(self, other):
        return self.scale(other)

    def scale(self, value) -> "ABElement":
        value = self.ring.coerce(value)
        return self.like({key: value * c for key, c in self.terms.items()})

    def __pow__(self, power: int):
        if power < 0:
            raise ValueError("negative powers are not defined in the algebra")
        result = ABElement.one(self.b_truncation, self.a_truncation, self.ring)
        for _ in range(power):
            result = nf_mul(result, self)
        return result

    def __eq__(self, other):
        if not isinstance(other, ABElement):
            return NotImplemented
        return (self.b_truncation == other.b_truncation and self.a_truncation == other.a_truncation
                and self.ring == other.ring and self.terms == other.terms)

    def __hash__(self):
        return hash((self.b_truncation, self.a_truncation, frozenset(self.terms.items())))

    def render(self) -> str:
        terms = []
        for (j, k), c in sorted(self.terms.items()):
            factors = []
            if j:
                factors.append("b" if j == 1 else f"b^{j}")
            if k:
                factors.append("a" if k == 1 else f"a^{k}")
            terms.append(scalar_term(c, "*".join(factors)))
        return render_terms(terms)

    def __str__(self):
        return self.render()

    def __repr__(self):
        return f"ABElement({self.render()!r}, Nb={self.b_truncation}, Na={self.a_truncation})"


def nf_mul(x: ABElement, y: ABElement) -> ABElement:
    """
    Product in left-b normal form: b^i a^k * b^j a^l = b^i (a^k b^j) a^l with a^k b^j rewritten
    :param x: left factor
    :param y: right factor
    :return: x*y modulo the common truncation
    """
    x.check_compatible(y)
    Nb, Na, ring = x.b_truncation, x.a_truncation, x.ring
    result: typing.Dict[Term, typing.Any] = {}
    for (i, k), c1 in x.terms.items():
        for (j, l), c2 in y.terms.items():
            # total degree is preserved by the rewriting, so whole products can be skipped early
            if Na is not None and i + k + j + l >= Na:
                continue
            if i + j >= Nb:
                continue
            product = c1 * c2
            for (p, q), c in a_power_times_b_power(k, j):
                key = (i + p, q + l)
                if key[0] >= Nb:
                    continue
                result[key] = result.get(key, ring.zero()) + product * c
    return x.like(result)


def left_mul_a(x: ABElement) -> ABElement:
    return nf_mul(ABElement.generator_a(x.b_truncation, x.a_truncation, x.ring), x)


def left_mul_b(x: ABElement) -> ABElement:
    return x.like({(j + 1, k): c for (j, k), c in x.terms.items()})


def right_mul_a(x: ABElement) -> ABElement:
    return x.like({(j, k + 1): c for (j, k), c in x.terms.items()})


def right_mul_b(x: ABElement) -> ABElement:
    return nf_mul(x, ABElement.generator_b(x.b_truncation, x.a_truncation, x.ring))


def random_element(rng: random.Random, b_truncation: int, a_truncation=None, ring=RATIONALS,
                   terms: int = 4, max_degree: int = 4, max_coefficient: int = 5) -> ABElement:
    """
    Random element with small rational coefficients, for property batteries
    """
    result = {}
    for _ in range(terms):
        j = rng.randint(0, max_degree)
        k = rng.randint(0, max_degree - j)
        numerator = rng.randint(-max_coefficient, max_coefficient)
        denominator = rng.randint(1, 3)
        result[(j, k)] = ring.coerce(Fraction(numerator, denominator))
    return ABElement(result, b_truncation, a_truncation, ring)
