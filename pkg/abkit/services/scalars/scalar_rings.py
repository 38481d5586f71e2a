import typing
import logging
import itertools
from fractions import Fraction
from math import comb
from abkit.utils.errors import ScalarRingMismatchError, NonUnitError, ArityMismatchError

logger = logging.getLogger(__name__)

Rational = Fraction
Exponent = typing.Tuple[int, ...]


def render_rational(value: Fraction) -> str:
    value = Fraction(value)
    if value.denominator == 1:
        return str(value.numerator)
    return f"{value.numerator}/{value.denominator}"


def render_monomial(exponent: Exponent, names: typing.Sequence[str]) -> str:
    factors = []
    for name, power in zip(names, exponent):
        if power == 1:
            factors.append(name)
        elif power > 1:
            factors.append(f"{name}^{power}")
    return "*".join(factors)


def render_terms(terms: typing.Iterable[typing.Tuple[Fraction, str]]) -> str:
    """
    Join (coefficient, monomial) pairs into "1 + 2*s - 1/3*s^2"
    :param terms: pairs in display order; an empty monomial string is a constant
    :return: rendered sum, "0" when empty
    """
    pieces = []
    for coefficient, monomial in terms:
        sign = "-" if coefficient < 0 else "+"
        magnitude = abs(coefficient)
        if not monomial:
            body = render_rational(magnitude)
        elif magnitude == 1:
            body = monomial
        else:
            body = f"{render_rational(magnitude)}*{monomial}"
        if not pieces:
            pieces.append(body if sign == "+" else f"-{body}")
        else:
            pieces.append(f" {sign} {body}")
    return "".join(pieces) if pieces else "0"


class RationalRing:
    """
    The rationals, presented through the same protocol as the truncated parameter rings
    so that linear algebra and module code never branch on the coefficient type.
    """
    arity = 0
    order = None
    names: typing.Tuple[str, ...] = ()

    def __eq__(self, other):
        return isinstance(other, RationalRing)

    def __hash__(self):
        return hash("RationalRing")

    def __repr__(self):
        return "RationalRing()"

    def coerce(self, value) -> Fraction:
        if isinstance(value, ParamScalar):
            raise ScalarRingMismatchError(f"Cannot use {value.ring!r} element as a rational")
        return Fraction(value)

    def zero(self) -> Fraction:
        return Fraction(0)

    def one(self) -> Fraction:
        return Fraction(1)

    def is_zero(self, value) -> bool:
        return value == 0

    def is_unit(self, value) -> bool:
        return value != 0

    def inverse(self, value) -> Fraction:
        if value == 0:
            raise NonUnitError("0 is not invertible")
        return 1 / Fraction(value)

    def constant_term(self, value) -> Fraction:
        return Fraction(value)

    def specialize(self, value, point: typing.Sequence = ()) -> Fraction:
        if len(point) != 0:
            raise ArityMismatchError(f"Rational scalars take no parameters, got {len(point)}")
        return Fraction(value)

    def basis(self) -> typing.List[Exponent]:
        return [()]

    def to_vector(self, value) -> typing.Dict[Exponent, Fraction]:
        return {(): Fraction(value)} if value != 0 else {}

    def from_vector(self, vector: typing.Dict[Exponent, Fraction]) -> Fraction:
        return Fraction(vector.get((), 0))

    def render(self, value) -> str:
        return render_rational(value)


RATIONALS = RationalRing()


class ParamRing:
    """
    The truncated parameter ring Q[s1..sr]/(s)^m.
    """

    def __init__(self, arity: int, order: int, names: typing.Sequence[str] = None):
        if arity < 1:
            raise ValueError("ParamRing needs at least one parameter")
        if order < 1:
            raise ValueError("truncation order must be positive")
        self.arity = arity
        self.order = order
        if names is None:
            names = ("s",) if arity == 1 else tuple(f"s{i + 1}" for i in range(arity))
        if len(names) != arity:
            raise ArityMismatchError(f"{len(names)} names given for {arity} parameters")
        self.names = tuple(names)
        self._basis = sorted(
            (e for e in itertools.product(range(order), repeat=arity) if sum(e) < order),
            key=lambda e: (sum(e), tuple(-x for x in e)),
        )

    def __eq__(self, other):
        return isinstance(other, ParamRing) and (self.arity, self.order) == (other.arity, other.order)

    def __hash__(self):
        return hash(("ParamRing", self.arity, self.order))

    def __repr__(self):
        return f"ParamRing(arity={self.arity}, order={self.order})"

    def element(self, coefficients: typing.Dict[Exponent, typing.Any]) -> "ParamScalar":
        return ParamScalar(self, coefficients)

    def constant(self, value) -> "ParamScalar":
        return ParamScalar(self, {(0,) * self.arity: Fraction(value)})

    def variable(self, index: int = 0) -> "ParamScalar":
        exponent = tuple(1 if i == index else 0 for i in range(self.arity))
        return ParamScalar(self, {exponent: Fraction(1)})

    def coerce(self, value) -> "ParamScalar":
        if isinstance(value, ParamScalar):
            if value.ring != self:
                raise ScalarRingMismatchError(f"{value.ring!r} does not match {self!r}")
            return value
        return self.constant(value)

    def zero(self) -> "ParamScalar":
        return ParamScalar(self, {})

    def one(self) -> "ParamScalar":
        return self.constant(1)

    def is_zero(self, value) -> bool:
        return self.coerce(value).is_zero()

    def is_unit(self, value) -> bool:
        return self.constant_term(value) != 0

    def constant_term(self, value) -> Fraction:
        return self.coerce(value).coefficients.get((0,) * self.arity, Fraction(0))

    def inverse(self, value) -> "ParamScalar":
        return invert(self.coerce(value))

    def specialize(self, value, point: typing.Sequence) -> Fraction:
        return specialize(self.coerce(value), point)

    def basis(self) -> typing.List[Exponent]:
        return list(self._basis)

    def to_vector(self, value) -> typing.Dict[Exponent, Fraction]:
        return dict(self.coerce(value).coefficients)

    def from_vector(self, vector: typing.Dict[Exponent, Fraction]) -> "ParamScalar":
        return ParamScalar(self, vector)

    def render(self, value) -> str:
        return str(self.coerce(value))

    def recenter(self, value, point: typing.Sequence) -> "ParamScalar":
        """
        Substitute s = point + t and re-truncate in t
        :param value: element read as an exact polynomial in s
        :param point: rational coordinates of the new origin
        :return: element of the same ring in the shifted parameter
        """
        value = self.coerce(value)
        if len(point) != self.arity:
            raise ArityMismatchError(f"point has {len(point)} coordinates, ring has {self.arity}")
        result = {}
        for exponent, coefficient in value.coefficients.items():
            expansions = [
                [(k, comb(e, k) * Fraction(p) ** (e - k)) for k in range(e + 1)]
                for e, p in zip(exponent, point)
            ]
            for choice in itertools.product(*expansions):
                shifted = tuple(k for k, _ in choice)
                if sum(shifted) >= self.order:
                    continue
                factor = coefficient
                for _, c in choice:
                    factor *= c
                result[shifted] = result.get(shifted, 0) + factor
        return ParamScalar(self, result)


class ParamScalar:
    """
    Element of Q[s]/(s)^m stored as {exponent: coefficient}. Canonical on construction:
    zero coefficients and exponents of total degree >= m are removed, so equality is structural.
    """
    __slots__ = ("ring", "coefficients")

    def __init__(self, ring: ParamRing, coefficients: typing.Dict[Exponent, typing.Any]):
        canonical = {}
        for exponent, coefficient in coefficients.items():
            exponent = tuple(exponent)
            if len(exponent) != ring.arity:
                raise ArityMismatchError(f"exponent {exponent} does not match arity {ring.arity}")
            if sum(exponent) >= ring.order:
                continue
            coefficient = Fraction(coefficient)
            if coefficient != 0:
                canonical[exponent] = coefficient
        object.__setattr__(self, "ring", ring)
        object.__setattr__(self, "coefficients", canonical)

    def __setattr__(self, key, value):
        raise AttributeError("ParamScalar is immutable")

    def is_zero(self) -> bool:
        return not self.coefficients

    def _other(self, other) -> "ParamScalar":
        if isinstance(other, ParamScalar):
            if other.ring != self.ring:
                raise ScalarRingMismatchError(f"{other.ring!r} does not match {self.ring!r}")
            return other
        if isinstance(other, (int, Fraction)):
            return self.ring.constant(other)
        return NotImplemented

    def __add__(self, other):
        other = self._other(other)
        if other is NotImplemented:
            return other
        result = dict(self.coefficients)
        for exponent, coefficient in other.coefficients.items():
            result[exponent] = result.get(exponent, 0) + coefficient
        return ParamScalar(self.ring, result)

    __radd__ = __add__

    def __neg__(self):
        return ParamScalar(self.ring, {e: -c for e, c in self.coefficients.items()})

    def __sub__(self, other):
        other = self._other(other)
        if other is NotImplemented:
            return other
        return self + (-other)

    def __rsub__(self, other):
        other = self._other(other)
        if other is NotImplemented:
            return other
        return other + (-self)

    def __mul__(self, other):
        other = self._other(other)
        if other is NotImplemented:
            return other
        result = {}
        order = self.ring.order
        for e1, c1 in self.coefficients.items():
            d1 = sum(e1)
            for e2, c2 in other.coefficients.items():
                if d1 + sum(e2) >= order:
                    continue
                exponent = tuple(a + b for a, b in zip(e1, e2))
                result[exponent] = result.get(exponent, 0) + c1 * c2
        return ParamScalar(self.ring, result)

    __rmul__ = __mul__

    def __truediv__(self, other):
        other = self._other(other)
        if other is NotImplemented:
            return other
        return self * invert(other)

    def __rtruediv__(self, other):
        other = self._other(other)
        if other is NotImplemented:
            return other
        return other * invert(self)

    def __pow__(self, power: int):
        if power < 0:
            return invert(self) ** (-power)
        result = self.ring.one()
        for _ in range(power):
            result = result * self
        return result

    def __eq__(self, other):
        if isinstance(other, (int, Fraction)):
            other = self.ring.constant(other)
        if not isinstance(other, ParamScalar):
            return NotImplemented
        return self.ring == other.ring and self.coefficients == other.coefficients

    def __hash__(self):
        return hash((self.ring, frozenset(self.coefficients.items())))

    def __repr__(self):
        return f"ParamScalar({self})"

    def __str__(self):
        ordered = sorted(self.coefficients.items(), key=lambda item: (sum(item[0]), tuple(-x for x in item[0])))
        return render_terms((c, render_monomial(e, self.ring.names)) for e, c in ordered)


Scalar = typing.Union[Fraction, ParamScalar]


def ring_of(value) -> typing.Union[RationalRing, ParamRing]:
    if isinstance(value, ParamScalar):
        return value.ring
    return RATIONALS


def _check_same_ring(x, y):
    if isinstance(x, ParamScalar) and isinstance(y, ParamScalar) and x.ring != y.ring:
        raise ScalarRingMismatchError(f"{x.ring!r} does not match {y.ring!r}")


def add(x: Scalar, y: Scalar) -> Scalar:
    _check_same_ring(x, y)
    return x + y


def mul(x: Scalar, y: Scalar) -> Scalar:
    _check_same_ring(x, y)
    return x * y


def invert(x: Scalar) -> Scalar:
    """
    Inverse in the truncated ring: c0*(1 + n) inverts to c0^-1 * sum (-n)^k, n nilpotent
    :param x: a unit
    :return: the two-sided inverse
    """
    if not isinstance(x, ParamScalar):
        if x == 0:
            raise NonUnitError("0 is not invertible")
        return 1 / Fraction(x)
    ring = x.ring
    c0 = ring.constant_term(x)
    if c0 == 0:
        raise NonUnitError(f"{x} is not a unit (zero constant term)")
    nilpotent = x * (1 / c0) - 1
    result = ring.one()
    power = ring.one()
    for _ in range(1, ring.order):
        power = power * (-nilpotent)
        result = result + power
    return result * (1 / c0)


def specialize(x: Scalar, point: typing.Sequence) -> Fraction:
    if not isinstance(x, ParamScalar):
        return RATIONALS.specialize(x, point)
    if len(point) != x.ring.arity:
        raise ArityMismatchError(f"point has {len(point)} coordinates, ring has {x.ring.arity}")
    total = Fraction(0)
    for exponent, coefficient in x.coefficients.items():
        term = coefficient
        for p, e in zip(point, exponent):
            term *= Fraction(p) ** e
        total += term
    return total
