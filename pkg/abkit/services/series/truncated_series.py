import typing
import logging
from fractions import Fraction
from abkit.services.scalars.scalar_rings import RATIONALS, render_terms, render_monomial, ParamScalar
from abkit.utils.errors import NonUnitError, TruncationInsufficientError

logger = logging.getLogger(__name__)


class TruncatedSeries:
    """
    One-variable power series c_0 + c_1*v + ... known modulo v^order.
    order=None means the coefficients are exact (a polynomial).
    """
    __slots__ = ("coefficients", "order", "ring", "var")

    def __init__(self, coefficients: typing.Sequence = (), order: typing.Optional[int] = None,
                 ring=RATIONALS, var: str = "b"):
        if order is not None and order < 0:
            order = 0
        coefficients = [ring.coerce(c) for c in coefficients]
        if order is not None:
            coefficients = coefficients[:order]
        while coefficients and ring.is_zero(coefficients[-1]):
            coefficients.pop()
        self.coefficients = coefficients
        self.order = order
        self.ring = ring
        self.var = var

    @classmethod
    def zero(cls, order=None, ring=RATIONALS, var="b") -> "TruncatedSeries":
        return cls((), order, ring, var)

    @classmethod
    def constant(cls, value, order=None, ring=RATIONALS, var="b") -> "TruncatedSeries":
        return cls((value,), order, ring, var)

    @classmethod
    def monomial(cls, value, power: int, order=None, ring=RATIONALS, var="b") -> "TruncatedSeries":
        return cls([ring.zero()] * power + [value], order, ring, var)

    def _like(self, coefficients, order="same") -> "TruncatedSeries":
        return TruncatedSeries(coefficients, self.order if order == "same" else order, self.ring, self.var)

    @staticmethod
    def _min_order(x: typing.Optional[int], y: typing.Optional[int]) -> typing.Optional[int]:
        if x is None:
            return y
        if y is None:
            return x
        return min(x, y)

    def is_zero(self) -> bool:
        return not self.coefficients

    def degree(self) -> int:
        return len(self.coefficients) - 1

    def coefficient(self, n: int):
        if 0 <= n < len(self.coefficients):
            return self.coefficients[n]
        return self.ring.zero()

    def valuation(self) -> typing.Optional[int]:
        for n, c in enumerate(self.coefficients):
            if not self.ring.is_zero(c):
                return n
        return None

    def __add__(self, other):
        if not isinstance(other, TruncatedSeries):
            other = self._like((other,), None)
        size = max(len(self.coefficients), len(other.coefficients))
        coefficients = [self.coefficient(n) + other.coefficient(n) for n in range(size)]
        return self._like(coefficients, self._min_order(self.order, other.order))

    __radd__ = __add__

    def __neg__(self):
        return self._like([-c for c in self.coefficients])

    def __sub__(self, other):
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if not isinstance(other, TruncatedSeries):
            return self.scale(other)
        order = self._min_order(self.order, other.order)
        size = len(self.coefficients) + len(other.coefficients) - 1
        if order is not None:
            size = min(size, order)
        coefficients = [self.ring.zero() for _ in range(max(size, 0))]
        for i, c1 in enumerate(self.coefficients):
            if i >= size or self.ring.is_zero(c1):
                continue
            for j, c2 in enumerate(other.coefficients):
                if i + j >= size:
                    break
                coefficients[i + j] = coefficients[i + j] + c1 * c2
        return self._like(coefficients, order)

    def __rmul__(self, other):
        return self.scale(other)

    def scale(self, value) -> "TruncatedSeries":
        return self._like([value * c for c in self.coefficients])

    def shift(self, power: int) -> "TruncatedSeries":
        """Multiply by var^power; the known order does not move."""
        return self._like([self.ring.zero()] * power + list(self.coefficients))

    def derivative(self) -> "TruncatedSeries":
        order = None if self.order is None else max(self.order - 1, 0)
        return self._like([n * c for n, c in enumerate(self.coefficients)][1:], order)

    def truncate(self, order: typing.Optional[int]) -> "TruncatedSeries":
        return self._like(self.coefficients, self._min_order(self.order, order))

    def with_order(self, order: typing.Optional[int]) -> "TruncatedSeries":
        return self._like(self.coefficients, order)

    def map_coefficients(self, fn: typing.Callable, ring=None) -> "TruncatedSeries":
        ring = ring or self.ring
        return TruncatedSeries([fn(c) for c in self.coefficients], self.order, ring, self.var)

    def inverse(self) -> "TruncatedSeries":
        if self.order is None:
            raise TruncationInsufficientError("cannot invert an exact polynomial series; give it an order")
        c0 = self.coefficient(0)
        if not self.ring.is_unit(c0):
            raise NonUnitError(f"series {self} has no unit constant term")
        inv0 = self.ring.inverse(c0)
        result = [inv0]
        for n in range(1, self.order):
            total = self.ring.zero()
            for k in range(1, n + 1):
                total = total + self.coefficient(k) * result[n - k]
            result.append(-total * inv0)
        return self._like(result)

    def __pow__(self, power: int):
        result = self._like((self.ring.one(),))
        for _ in range(power):
            result = result * self
        return result

    def __eq__(self, other):
        if not isinstance(other, TruncatedSeries):
            return NotImplemented
        return (self.order == other.order and self.var == other.var
                and self.coefficients == other.coefficients)

    def __hash__(self):
        return hash((self.order, self.var, tuple(self.coefficients)))

    def agrees_with(self, other: "TruncatedSeries", order: int = None) -> bool:
        """Equality of the coefficients both operands know (below the common order)."""
        bound = self._min_order(self._min_order(self.order, other.order), order)
        size = max(len(self.coefficients), len(other.coefficients))
        if bound is not None:
            size = min(size, bound)
        return all(self.coefficient(n) == other.coefficient(n) for n in range(size))

    def render(self) -> str:
        terms = []
        for n, c in enumerate(self.coefficients):
            if self.ring.is_zero(c):
                continue
            monomial = "" if n == 0 else (self.var if n == 1 else f"{self.var}^{n}")
            terms.append(scalar_term(c, monomial))
        return render_terms(terms)

    def __str__(self):
        return self.render()

    def __repr__(self):
        return f"TruncatedSeries({self.render()!r}, order={self.order})"


def scalar_term(value, monomial: str) -> typing.Tuple[Fraction, str]:
    """
    Fold a scalar coefficient into a (rational, monomial) pair for render_terms;
    multi-term parameter coefficients are parenthesized.
    """
    if not isinstance(value, ParamScalar):
        return Fraction(value), monomial
    if len(value.coefficients) == 1:
        (exponent, coefficient), = value.coefficients.items()
        factors = [f for f in (render_monomial(exponent, value.ring.names), monomial) if f]
        return coefficient, "*".join(factors)
    factors = [f"({value})"] + ([monomial] if monomial else [])
    return Fraction(1), "*".join(factors)
