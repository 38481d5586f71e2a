import typing
import logging
from fractions import Fraction
from sympy import Poly, Symbol, QQ
from sympy.polys.matrices import DomainMatrix
from abkit.core.config import Config
from abkit.services.scalars.scalar_rings import RATIONALS, RationalRing
from abkit.services.series.truncated_series import TruncatedSeries
from abkit.services.linalg.exact_linalg import echelon, solve, to_qq
from abkit.utils.errors import (
    SingularChangeOfBasisError,
    TruncationInsufficientError,
    TruncationMismatchError,
    ScalarRingMismatchError,
)

logger = logging.getLogger(__name__)

Matrix = typing.List[typing.List[TruncatedSeries]]
Vector = typing.List[TruncatedSeries]

GEOMETRIC = "geometric"
NOT_GEOMETRIC = "not-geometric"
INDETERMINATE = "indeterminate"


class ABModule:
    """
    Free [[b]]-module of finite rank with an a-action; column i of a_matrix is a(e_i).
    a extends to all of [[b]]^k through a(S(b).x) = S(b).a(x) + b^2.S'(b).x.
    """

    def __init__(self, a_matrix: typing.Sequence[typing.Sequence], b_truncation: int, ring=RATIONALS):
        rank = len(a_matrix)
        if any(len(row) != rank for row in a_matrix):
            raise ValueError("a_matrix must be square")
        if b_truncation < 1:
            raise ValueError("b_truncation must be positive")
        self.rank = rank
        self.b_truncation = b_truncation
        self.ring = ring
        self.a_matrix: Matrix = [
            [self._series(entry) for entry in row]
            for row in a_matrix
        ]

    def _series(self, entry) -> TruncatedSeries:
        if isinstance(entry, TruncatedSeries):
            if entry.ring != self.ring:
                raise ScalarRingMismatchError(f"entry over {entry.ring!r} in a module over {self.ring!r}")
            return entry.with_order(self.b_truncation)
        return TruncatedSeries(entry, self.b_truncation, self.ring)

    def __eq__(self, other):
        if not isinstance(other, ABModule):
            return NotImplemented
        return (self.b_truncation, self.ring, self.a_matrix) == (other.b_truncation, other.ring, other.a_matrix)

    def __repr__(self):
        return f"ABModule(rank={self.rank}, b_truncation={self.b_truncation}, a_matrix={self.to_json()['a_matrix']})"

    def zero_vector(self) -> Vector:
        return [TruncatedSeries.zero(self.b_truncation, self.ring) for _ in range(self.rank)]

    def basis_vector(self, i: int) -> Vector:
        vector = self.zero_vector()
        vector[i] = TruncatedSeries.constant(self.ring.one(), self.b_truncation, self.ring)
        return vector

    def coefficient_matrix(self, n: int) -> typing.List[typing.List]:
        """Q-coefficient of b^n in a_matrix."""
        return [[entry.coefficient(n) for entry in row] for row in self.a_matrix]

    def truncated(self, b_truncation: int) -> "ABModule":
        return ABModule([[e.with_order(b_truncation) for e in row] for row in self.a_matrix], b_truncation, self.ring)

    def to_json(self) -> typing.Dict:
        return {
            "rank": str(self.rank),
            "b_truncation": str(self.b_truncation),
            "a_matrix": [[entry.render() for entry in row] for row in self.a_matrix],
        }


def _check_vector(module: ABModule, x: Vector):
    if len(x) != module.rank:
        raise TruncationMismatchError(f"vector of length {len(x)} for a module of rank {module.rank}")


def act_a(module: ABModule, x: Vector) -> Vector:
    _check_vector(module, x)
    T = module.b_truncation
    result = []
    for r in range(module.rank):
        total = x[r].derivative().with_order(T).shift(2)
        for i in range(module.rank):
            if not x[i].is_zero():
                total = total + module.a_matrix[r][i] * x[i]
        result.append(total.with_order(T))
    return result


def act_b(module: ABModule, x: Vector) -> Vector:
    _check_vector(module, x)
    return [component.shift(1) for component in x]


def is_simple_pole(module: ABModule) -> bool:
    return all(entry.is_zero() or entry.valuation() >= 1 for row in module.a_matrix for entry in row)


def change_basis(module: ABModule, Q: Matrix, shift: int = 0) -> ABModule:
    """
    a-matrix in the basis b^-shift.Q (columns of Q): A' solves Q.A' = A.Q + b^2.Q' - shift.b.Q
    :param module: module in its current basis
    :param Q: k x k matrix of series whose columns span b^shift times the new lattice
    :param shift: power of b divided out
    :return: module over the new basis, known modulo b^(T - shift)
    """
    T, k, ring = module.b_truncation, module.rank, module.ring
    T_out = T - shift
    if T_out < 1:
        raise TruncationInsufficientError(f"shift {shift} leaves no precision at b_truncation {T}")
    Q = [[entry.with_order(T) for entry in row] for row in Q]
    columns_out = []
    for c in range(k):
        rhs = []
        for p in range(k):
            total = Q[p][c].derivative().with_order(T).shift(2) - Q[p][c].shift(1).scale(shift)
            for r in range(k):
                total = total + module.a_matrix[p][r] * Q[r][c]
            rhs.append(total)
        unknowns = [(r, n) for n in range(T) for r in range(k)]
        equations = []
        for p in range(k):
            for n in range(T):
                row = {}
                for r in range(k):
                    for m in range(n + 1):
                        q = Q[p][r].coefficient(m)
                        if not ring.is_zero(q):
                            row[(r, n - m)] = row.get((r, n - m), ring.zero()) + q
                equations.append((row, rhs[p].coefficient(n)))
        solution = solve(equations, unknowns, ring)
        if solution is None:
            logger.error(f"column {c} of the new a-matrix has no solution")
            raise SingularChangeOfBasisError(f"Q does not span a lattice containing a(column {c})")
        columns_out.append([
            TruncatedSeries([solution.get((r, n), ring.zero()) for n in range(T_out)], T_out, ring)
            for r in range(k)
        ])
    matrix = [[columns_out[c][r] for c in range(k)] for r in range(k)]
    return ABModule(matrix, T_out, ring)


class SaturationResult(typing.NamedTuple):
    module: ABModule
    stabilized: bool
    steps: int
    depth: int


def _polar_image(A: typing.List[typing.List[typing.List]], vector: typing.Dict, k: int) -> typing.Dict:
    # b^-1.a(b^-m.e_i) = b^-(m+1).A.e_i - m.b^-m.e_i, polar part only
    result = {}
    for (m, i), c in vector.items():
        for n in range(min(m + 1, len(A))):
            for r in range(k):
                value = A[n][r][i]
                if value:
                    key = (m + 1 - n, r)
                    result[key] = result.get(key, 0) + c * value
        result[(m, i)] = result.get((m, i), 0) - m * c
    return {key: c for key, c in result.items() if c}


def _b_closure(rows: typing.List[typing.Dict]) -> typing.List[typing.Dict]:
    closed = []
    for row in rows:
        while row:
            closed.append(row)
            row = {(m - 1, i): c for (m, i), c in row.items() if m > 1}
    return closed


def _lattice_columns(polar_rows: typing.List[typing.Dict], depth: int, k: int, T: int) -> Matrix:
    """
    [[b]]-basis of b^depth times the saturated lattice, chosen by leading vectors level by level
    """
    columns = [(n, i) for n in range(depth) for i in range(k)]
    rows = [{(depth - m, i): c for (m, i), c in row.items()} for row in polar_rows]
    form = echelon(rows, columns)
    chosen_rows = []
    leading = []
    for level in range(depth + 1):
        candidates = []
        if level < depth:
            candidates = [
                form.pivot_rows[pivot] for pivot in form.pivot_columns if pivot[0] == level
            ]
        else:
            candidates = [{(depth, i): Fraction(1)} for i in range(k)]
        for row in candidates:
            head = {i: c for (n, i), c in row.items() if n == level}
            if echelon(leading + [head], list(range(k))).rank > len(leading):
                leading.append(head)
                chosen_rows.append(row)
        if len(leading) == k:
            break
    Q = [[None] * k for _ in range(k)]
    for c, row in enumerate(chosen_rows):
        for r in range(k):
            Q[r][c] = TruncatedSeries(
                [row.get((n, r), 0) for n in range(depth + 1)], T, RATIONALS
            )
    return Q


def saturate(module: ABModule, max_steps: int = None) -> SaturationResult:
    """
    Smallest b^-1.a-stable lattice containing E, computed in the polar space b^-S.E/E
    :param module: module over the rationals
    :param max_steps: number of b^-1.a applications allowed
    :return: SaturationResult; stabilized=False when the lattice kept growing or poles exceeded the precision
    """
    if not isinstance(module.ring, RationalRing):
        raise ScalarRingMismatchError("saturation works over the rationals; specialize the family first")
    max_steps = Config.DEFAULT_MAX_STEPS if max_steps is None else max_steps
    T, k = module.b_truncation, module.rank
    A = [module.coefficient_matrix(n) for n in range(T)]
    seeds = [
        {(1, r): A[0][r][i] for r in range(k) if A[0][r][i]}
        for i in range(k)
    ]
    seeds = [seed for seed in seeds if seed]
    if not seeds:
        logger.info("module has a simple pole; already saturated")
        return SaturationResult(module, True, 0, 0)
    depth_cap = min(max_steps + 1, T - 3)
    if depth_cap < 1:
        raise TruncationInsufficientError(f"b_truncation {T} is too small to saturate")
    columns = [(m, i) for m in range(depth_cap, 0, -1) for i in range(k)]
    form = echelon(_b_closure(seeds), columns)
    steps = 0
    stabilized = False
    while steps < max_steps:
        rows = list(form.pivot_rows.values())
        images = [_polar_image(A, row, k) for row in rows]
        steps += 1
        if any(m > depth_cap for image in images for (m, _) in image):
            logger.warning(f"saturation poles exceed depth {depth_cap} after {steps} steps")
            break
        extended = echelon(_b_closure(rows + images), columns)
        if extended.rank == form.rank:
            stabilized = True
            break
        form = extended
    if not stabilized:
        logger.warning(f"saturation did not stabilize within {max_steps} steps at b_truncation {T}")
        return SaturationResult(module, False, steps, depth_cap)
    rows = list(form.pivot_rows.values())
    depth = max(m for row in rows for (m, _) in row)
    Q = _lattice_columns(rows, depth, k, T)
    saturated = change_basis(module, Q, depth)
    logger.info(f"saturated in {steps} steps with pole depth {depth}; precision now {saturated.b_truncation}")
    return SaturationResult(saturated, True, steps, depth)


class SpectralData(typing.NamedTuple):
    eigenvalues: typing.List[typing.Tuple[Fraction, int]]
    jordan_blocks: typing.Dict[Fraction, typing.List[int]]
    rational: bool
    irrational_factors: typing.List[str]
    determined: bool
    saturation_steps: int

    @property
    def values(self) -> typing.List[Fraction]:
        return [value for value, multiplicity in self.eigenvalues for _ in range(multiplicity)]

    def to_json(self) -> typing.Dict:
        return {
            "spectrum": [[str(value), str(multiplicity)] for value, multiplicity in self.eigenvalues],
            "jordan_blocks": {str(value): [str(s) for s in sizes] for value, sizes in self.jordan_blocks.items()},
            "rational": self.rational,
            "irrational_factors": self.irrational_factors,
            "determined": self.determined,
            "saturation_steps": str(self.saturation_steps),
        }


def _domain_matrix(rows: typing.List[typing.List]) -> DomainMatrix:
    k = len(rows)
    return DomainMatrix([[to_qq(value) for value in row] for row in rows], (k, k), QQ)


def _jordan_sizes(matrix: typing.List[typing.List], value: Fraction, multiplicity: int) -> typing.List[int]:
    k = len(matrix)
    shifted = _domain_matrix([
        [matrix[r][c] - (value if r == c else 0) for c in range(k)] for r in range(k)
    ])
    ranks = [k]
    power = DomainMatrix.eye(k, QQ)
    for _ in range(multiplicity):
        power = power * shifted
        ranks.append(power.rank())
    at_least = [ranks[p - 1] - ranks[p] for p in range(1, len(ranks))]
    sizes = []
    for p in range(len(at_least)):
        exactly = at_least[p] - (at_least[p + 1] if p + 1 < len(at_least) else 0)
        sizes.extend([p + 1] * exactly)
    return sorted(sizes, reverse=True)


def residue_spectrum(matrix: typing.List[typing.List], steps: int = 0) -> SpectralData:
    """
    Eigenvalues of a rational matrix by factoring its characteristic polynomial over Q
    """
    k = len(matrix)
    if k == 0:
        return SpectralData([], {}, True, [], True, steps)
    x = Symbol("x")
    coefficients = _domain_matrix(matrix).charpoly()
    _, factors = Poly.from_list(list(coefficients), x, domain=QQ).factor_list()
    eigenvalues = []
    irrational = []
    for factor, multiplicity in factors:
        if factor.degree() == 1:
            c1, c0 = factor.all_coeffs()
            root = -c0 / c1
            eigenvalues.append((Fraction(int(root.p), int(root.q)), multiplicity))
        else:
            irrational.append(f"({factor.as_expr()})^{multiplicity}")
    eigenvalues.sort()
    jordan = {value: _jordan_sizes(matrix, value, multiplicity) for value, multiplicity in eigenvalues}
    return SpectralData(eigenvalues, jordan, not irrational, irrational, True, steps)


def spectrum(module: ABModule, max_steps: int = None) -> SpectralData:
    """
    Eigenvalues of b^-1.a on E#/b.E#, E# the saturation
    :param module: module over the rationals
    :param max_steps: saturation budget
    :return: SpectralData; determined=False when the saturation did not stabilize
    """
    saturation = saturate(module, max_steps)
    if not saturation.stabilized:
        return SpectralData([], {}, False, [], False, saturation.steps)
    saturated = saturation.module
    if not is_simple_pole(saturated):
        logger.error("saturated module does not have a simple pole")
        raise SingularChangeOfBasisError("saturation produced a module without a simple pole")
    if saturated.b_truncation < 2:
        raise TruncationInsufficientError("saturated module has no b^1 coefficient left")
    residue = saturated.coefficient_matrix(1)
    data = residue_spectrum(residue, saturation.steps)
    logger.info(f"spectrum {[(str(v), m) for v, m in data.eigenvalues]} (rational={data.rational})")
    return data


class GeometricVerdict(typing.NamedTuple):
    verdict: str
    regular: typing.Optional[bool]
    rational: typing.Optional[bool]
    positive: typing.Optional[bool]
    spectrum: SpectralData

    @property
    def failed_clauses(self) -> typing.List[str]:
        return [name for name in ("regular", "rational", "positive") if getattr(self, name) is False]

    def to_json(self) -> typing.Dict:
        return {
            "verdict": self.verdict,
            "regular": self.regular,
            "rational": self.rational,
            "positive": self.positive,
            "failed_clauses": self.failed_clauses,
        }


def is_geometric(module: ABModule, max_steps: int = None) -> GeometricVerdict:
    """
    Regular (saturation stabilizes), rational spectrum and positive spectrum
    """
    data = spectrum(module, max_steps)
    if not data.determined:
        logger.warning("geometric verdict indeterminate: saturation did not stabilize at this truncation")
        return GeometricVerdict(INDETERMINATE, None, None, None, data)
    if not data.rational:
        return GeometricVerdict(NOT_GEOMETRIC, True, False, None, data)
    positive = all(value > 0 for value, _ in data.eigenvalues)
    verdict = GEOMETRIC if positive else NOT_GEOMETRIC
    return GeometricVerdict(verdict, True, True, positive, data)

