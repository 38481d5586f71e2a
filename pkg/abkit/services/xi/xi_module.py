import typing
import random
import logging
from math import factorial, lcm
from fractions import Fraction
from abkit.services.scalars.scalar_rings import RATIONALS
from abkit.services.series.truncated_series import TruncatedSeries
from abkit.utils.errors import SingularChangeOfBasisError, TruncationMismatchError

logger = logging.getLogger(__name__)

Generator = typing.Tuple[Fraction, int, int]


class XiShape:
    """
    Free [[b]]-module on generators e_j(lambda), one block of k+1 generators per lambda in Lambda,
    replicated `copies` times (tensor factor V on which a and b act as the identity).
    """

    def __init__(self, lambdas: typing.Iterable, k: int, b_truncation: int, ring=RATIONALS, copies: int = 1):
        lambdas = sorted({Fraction(value) for value in lambdas})
        for value in lambdas:
            if not 0 < value <= 1:
                raise ValueError(f"exponent {value} is not in ]0, 1]")
        if k < 0:
            raise ValueError("log-degree k must be non-negative")
        if b_truncation < 1:
            raise ValueError("b_truncation must be positive")
        if copies < 0:
            raise ValueError("copies must be non-negative")
        self.lambdas = tuple(lambdas)
        self.k = k
        self.b_truncation = b_truncation
        self.ring = ring
        self.copies = copies
        self.generators: typing.List[Generator] = [
            (value, j, copy) for value in self.lambdas for copy in range(copies) for j in range(k + 1)
        ]

    @property
    def rank(self) -> int:
        return len(self.generators)

    def __eq__(self, other):
        if not isinstance(other, XiShape):
            return NotImplemented
        return ((self.lambdas, self.k, self.b_truncation, self.ring, self.copies)
                == (other.lambdas, other.k, other.b_truncation, other.ring, other.copies))

    def __hash__(self):
        return hash((self.lambdas, self.k, self.b_truncation, self.copies))

    def __repr__(self):
        return (f"XiShape(lambdas={[str(v) for v in self.lambdas]}, k={self.k}, "
                f"b_truncation={self.b_truncation}, copies={self.copies})")

    def series(self, coefficients: typing.Sequence = ()) -> TruncatedSeries:
        return TruncatedSeries(coefficients, self.b_truncation, self.ring)

    def generator(self, value, j: int, copy: int = 0) -> "XiElement":
        return XiElement(self, {(Fraction(value), j, copy): self.series([self.ring.one()])})


class XiElement:
    __slots__ = ("shape", "coefficients")

    def __init__(self, shape: XiShape, coefficients: typing.Dict[Generator, TruncatedSeries]):
        allowed = set(shape.generators)
        canonical = {}
        for generator, series in coefficients.items():
            generator = (Fraction(generator[0]), generator[1], generator[2] if len(generator) > 2 else 0)
            if generator not in allowed:
                raise ValueError(f"generator {generator} is not part of {shape!r}")
            if not isinstance(series, TruncatedSeries):
                series = shape.series(series)
            series = series.with_order(shape.b_truncation)
            if not series.is_zero():
                canonical[generator] = series
        self.shape = shape
        self.coefficients = canonical

    @classmethod
    def zero(cls, shape: XiShape) -> "XiElement":
        return cls(shape, {})

    def _check(self, other: "XiElement"):
        if self.shape != other.shape:
            raise TruncationMismatchError(f"{self.shape!r} and {other.shape!r} differ")

    def is_zero(self) -> bool:
        return not self.coefficients

    def coefficient(self, generator: Generator) -> TruncatedSeries:
        return self.coefficients.get(generator, self.shape.series())

    def b_valuation(self) -> typing.Optional[int]:
        return min((s.valuation() for s in self.coefficients.values()), default=None)

    def __add__(self, other: "XiElement") -> "XiElement":
        self._check(other)
        result = dict(self.coefficients)
        for generator, series in other.coefficients.items():
            result[generator] = result[generator] + series if generator in result else series
        return XiElement(self.shape, result)

    def __neg__(self):
        return XiElement(self.shape, {g: -s for g, s in self.coefficients.items()})

    def __sub__(self, other: "XiElement") -> "XiElement":
        return self + (-other)

    def scale(self, value) -> "XiElement":
        return XiElement(self.shape, {g: s.scale(value) for g, s in self.coefficients.items()})

    def mul_series(self, series: TruncatedSeries) -> "XiElement":
        """S(b)*x, the free [[b]]-module structure."""
        return XiElement(self.shape, {g: series * s for g, s in self.coefficients.items()})

    def __eq__(self, other):
        if not isinstance(other, XiElement):
            return NotImplemented
        return self.shape == other.shape and self.coefficients == other.coefficients

    def __hash__(self):
        return hash((self.shape, frozenset(self.coefficients.items())))

    def to_json(self) -> typing.List[typing.Dict[str, str]]:
        return [
            {"lambda": str(value), "j": str(j), "copy": str(copy), "series": series.render()}
            for (value, j, copy), series in sorted(self.coefficients.items())
        ]

    def __repr__(self):
        return f"XiElement({self.to_json()})"


def act_a(x: XiElement) -> XiElement:
    """
    a(S(b).e_j) = S(b).(lambda.b.e_j + b.e_{j-1}) + b^2.S'(b).e_j
    """
    shape = x.shape
    result: typing.Dict[Generator, TruncatedSeries] = {}

    def accumulate(generator, series):
        result[generator] = result[generator] + series if generator in result else series

    for (value, j, copy), series in x.coefficients.items():
        accumulate((value, j, copy), series.shift(1).scale(value))
        accumulate((value, j, copy), series.derivative().with_order(shape.b_truncation).shift(2))
        if j >= 1:
            accumulate((value, j - 1, copy), series.shift(1))
    return XiElement(shape, result)


def act_b(x: XiElement) -> XiElement:
    return XiElement(x.shape, {g: s.shift(1) for g, s in x.coefficients.items()})


def _apply_step(value: Fraction, p: int, vector: typing.Dict[int, typing.Any], k: int, ring) -> typing.Dict[int, typing.Any]:
    # (M_p y)_j = (lambda + p) y_j + y_{j+1}
    factor = value + p
    return {j: vector.get(j, ring.zero()) * factor + vector.get(j + 1, ring.zero()) for j in range(k + 1)}


def _solve_step(value: Fraction, p: int, vector: typing.Dict[int, typing.Any], k: int, ring) -> typing.Dict[int, typing.Any]:
    factor = value + p
    if factor == 0:
        raise SingularChangeOfBasisError(f"lambda + {p} vanishes for lambda = {value}")
    inverse = 1 / factor
    solution = {}
    above = ring.zero()
    for j in range(k, -1, -1):
        above = (vector.get(j, ring.zero()) - above) * inverse
        solution[j] = above
    return solution


def _blocks(coefficients: typing.Dict[Generator, TruncatedSeries]):
    blocks: typing.Dict[typing.Tuple[Fraction, int], typing.Dict[int, TruncatedSeries]] = {}
    for (value, j, copy), series in coefficients.items():
        blocks.setdefault((value, copy), {})[j] = series
    return blocks


def to_a_basis(x: XiElement, a_truncation: int) -> typing.Dict[Generator, TruncatedSeries]:
    """
    Rewrite x as sum_m a^m.c_{m,g}.e_g; exact since a^m.e_j = b^m.M_{m-1}...M_0.e_j with
    M_p = (lambda + p) + (e_j -> e_{j-1})
    :param x: element in the b-basis
    :param a_truncation: number of a-powers to produce
    :return: {generator: series in a of order min(Na, Nb)}
    """
    shape = x.shape
    ring = shape.ring
    order = min(a_truncation, shape.b_truncation)
    result: typing.Dict[Generator, typing.List] = {}
    for (value, copy), block in _blocks(x.coefficients).items():
        for m in range(order):
            vector = {j: series.coefficient(m) for j, series in block.items()}
            if all(ring.is_zero(c) for c in vector.values()):
                continue
            for p in range(m - 1, -1, -1):
                vector = _solve_step(value, p, vector, shape.k, ring)
            for j, c in vector.items():
                if ring.is_zero(c):
                    continue
                coefficients = result.setdefault((value, j, copy), [ring.zero()] * order)
                coefficients[m] = c
    return {g: TruncatedSeries(c, order, ring, var="a") for g, c in result.items()}


def from_a_basis(shape: XiShape, expansion: typing.Dict[Generator, TruncatedSeries]) -> XiElement:
    ring = shape.ring
    blocks = _blocks(expansion)
    result: typing.Dict[Generator, typing.List] = {}
    for (value, copy), block in blocks.items():
        order = min([shape.b_truncation] + [s.order for s in block.values() if s.order is not None])
        for m in range(order):
            vector = {j: series.coefficient(m) for j, series in block.items()}
            if all(ring.is_zero(c) for c in vector.values()):
                continue
            for p in range(m):
                vector = _apply_step(value, p, vector, shape.k, ring)
            for j, c in vector.items():
                coefficients = result.setdefault((value, j, copy), [ring.zero()] * order)
                coefficients[m] = coefficients[m] + c
    return XiElement(shape, {g: TruncatedSeries(c, shape.b_truncation, ring) for g, c in result.items()})


class MonodromyData:
    """
    Monodromy of Log x -> Log x + tau: e_j(lambda) -> exp(tau.lambda).sum_i tau^(j-i)/(j-i)!.e_i(lambda).
    The semisimple factor is kept as the rational label lambda mod 1; tau is a formal variable.
    """

    def __init__(self, shape: XiShape):
        self.shape = shape
        self.eigenvalue_labels = {value: value % 1 for value in shape.lambdas}
        size = shape.k + 1
        self.block = [
            [
                TruncatedSeries.monomial(Fraction(1, factorial(j - i)), j - i, var="tau") if i <= j
                else TruncatedSeries.zero(var="tau")
                for j in range(size)
            ]
            for i in range(size)
        ]

    @property
    def block_size(self) -> int:
        return self.shape.k + 1

    @property
    def semisimple_order(self) -> int:
        return lcm(*[label.denominator for label in self.eigenvalue_labels.values()]) if self.eigenvalue_labels else 1

    def semisimple_power_is_identity(self, q: int) -> bool:
        return all((q * label).denominator == 1 for label in self.eigenvalue_labels.values())

    def is_unipotent_block(self) -> bool:
        one = TruncatedSeries.constant(1, var="tau")
        for i, row in enumerate(self.block):
            for j, entry in enumerate(row):
                if i == j and entry != one:
                    return False
                if i > j and not entry.is_zero():
                    return False
        return True

    def unipotent_matrix(self) -> typing.List[typing.List[TruncatedSeries]]:
        """Block-diagonal matrix over Q[tau] on shape.generators (columns are images)."""
        generators = self.shape.generators
        index = {g: n for n, g in enumerate(generators)}
        size = len(generators)
        matrix = [[TruncatedSeries.zero(var="tau") for _ in range(size)] for _ in range(size)]
        for (value, j, copy) in generators:
            for i in range(j + 1):
                matrix[index[(value, i, copy)]][index[(value, j, copy)]] = self.block[i][j]
        return matrix

    def to_json(self) -> typing.Dict:
        return {
            "eigenvalue_labels": {str(value): str(label) for value, label in self.eigenvalue_labels.items()},
            "block": [[entry.render() for entry in row] for row in self.block],
            "semisimple_order": str(self.semisimple_order),
        }


def monodromy(shape: XiShape) -> MonodromyData:
    return MonodromyData(shape)


def tensor_with_V(shape: XiShape, dim: int) -> XiShape:
    if dim < 0:
        raise ValueError("dimension of V must be non-negative")
    return XiShape(shape.lambdas, shape.k, shape.b_truncation, shape.ring, shape.copies * dim)


def random_xi_element(rng: random.Random, shape: XiShape, terms: int = 4, max_coefficient: int = 5) -> XiElement:
    coefficients: typing.Dict[Generator, TruncatedSeries] = {}
    for _ in range(terms):
        generator = rng.choice(shape.generators)
        values = [Fraction(rng.randint(-max_coefficient, max_coefficient), rng.randint(1, 3))
                  for _ in range(rng.randint(1, shape.b_truncation))]
        series = shape.series(values)
        coefficients[generator] = coefficients[generator] + series if generator in coefficients else series
    return XiElement(shape, coefficients)


def verify_xi(lambdas: typing.Iterable, k: int, a_truncation: int, b_truncation: int, elements: int = 500,
              seed: int = 0, semisimple_power: int = 6) -> typing.Dict[str, typing.Any]:
    """
    Commutation relation on random elements, exact round trip through the free [[a]]-basis,
    and quasi-unipotent monodromy
    :return: {check name: {"passed": bool, ...details}}
    """
    rng = random.Random(seed)
    shape = XiShape(lambdas, k, b_truncation)
    commuting = 0
    round_trips = 0
    for _ in range(elements):
        x = random_xi_element(rng, shape)
        if act_a(act_b(x)) - act_b(act_a(x)) == act_b(act_b(x)):
            commuting += 1
        if from_a_basis(shape, to_a_basis(x, a_truncation)) == x:
            round_trips += 1
    data = monodromy(shape)
    report = {
        "xi_commutation": {"passed": commuting == elements, "elements": elements, "agreeing": commuting},
        "xi_a_basis_round_trip": {"passed": round_trips == elements, "elements": elements, "agreeing": round_trips},
        "xi_monodromy": {
            "passed": data.is_unipotent_block() and data.semisimple_power_is_identity(semisimple_power),
            "semisimple_order": data.semisimple_order,
            "power": semisimple_power,
        },
    }
    failed = [name for name, check in report.items() if not check["passed"]]
    if failed:
        logger.warning(f"Xi battery failures: {failed}")
    return report
