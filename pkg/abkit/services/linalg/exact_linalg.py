import typing
import logging
from fractions import Fraction
from sympy import QQ
from sympy.polys.matrices import DomainMatrix
from abkit.services.scalars.scalar_rings import RATIONALS, RationalRing
from abkit.utils.errors import NonFlatFamilyError

logger = logging.getLogger(__name__)

Vector = typing.Dict[typing.Hashable, typing.Any]

_RHS = ("__rhs__",)


def to_qq(value):
    value = Fraction(value)
    return QQ(value.numerator, value.denominator)


def from_qq(value) -> Fraction:
    return Fraction(int(value.numerator), int(value.denominator))


class EchelonForm:
    """
    Reduced row echelon form of a set of sparse rows. Pivot rows are normalized to 1 at
    their pivot and vanish on every other pivot column, so reduction is a single pass.
    """

    def __init__(self, pivot_rows: typing.Dict[typing.Hashable, Vector], columns: typing.Sequence, ring=RATIONALS):
        self.pivot_rows = pivot_rows
        self.columns = list(columns)
        self.ring = ring
        position = {c: i for i, c in enumerate(self.columns)}
        self.pivot_columns = sorted(pivot_rows, key=lambda c: position[c])

    @property
    def rank(self) -> int:
        return len(self.pivot_rows)

    def free_columns(self, columns: typing.Sequence = None) -> typing.List:
        columns = self.columns if columns is None else columns
        return [c for c in columns if c not in self.pivot_rows]

    def reduce(self, vector: Vector) -> Vector:
        ring = self.ring
        residual = {c: v for c, v in vector.items() if not ring.is_zero(v)}
        for column in self.pivot_columns:
            value = residual.get(column)
            if value is None:
                continue
            for c, entry in self.pivot_rows[column].items():
                updated = residual.get(c, ring.zero()) - value * entry
                if ring.is_zero(updated):
                    residual.pop(c, None)
                else:
                    residual[c] = updated
        return residual

    def contains(self, vector: Vector) -> bool:
        return not self.reduce(vector)


def _rational_echelon(rows: typing.Sequence[Vector], columns: typing.Sequence) -> EchelonForm:
    index = {c: i for i, c in enumerate(columns)}
    data = {}
    for row in rows:
        entries = {index[c]: to_qq(v) for c, v in row.items() if v != 0}
        if entries:
            data[len(data)] = entries
    if not data:
        return EchelonForm({}, columns, RATIONALS)
    matrix = DomainMatrix(data, (len(data), len(columns)), QQ)
    reduced, pivots = matrix.rref()
    sparse = reduced.to_sparse().rep
    pivot_rows = {}
    for i, pivot in enumerate(pivots):
        pivot_rows[columns[pivot]] = {columns[j]: from_qq(v) for j, v in sparse.get(i, {}).items() if v}
    logger.debug(f"rref of {len(data)}x{len(columns)} rational system: rank {len(pivots)}")
    return EchelonForm(pivot_rows, columns, RATIONALS)


def _local_echelon(rows: typing.Sequence[Vector], columns: typing.Sequence, ring) -> EchelonForm:
    """
    Gaussian elimination over a truncated parameter ring: only units are used as pivots.
    Rows that end up non-zero but without a unit entry mean the quotient is not free.
    """
    remaining = []
    for row in rows:
        entries = {c: ring.coerce(v) for c, v in row.items() if not ring.is_zero(v)}
        if entries:
            remaining.append(entries)
    pivot_rows: typing.Dict[typing.Hashable, Vector] = {}
    for column in columns:
        chosen = None
        for i, row in enumerate(remaining):
            value = row.get(column)
            if value is not None and ring.is_unit(value):
                chosen = i
                break
        if chosen is None:
            continue
        pivot = remaining.pop(chosen)
        inverse = ring.inverse(pivot[column])
        pivot = {c: v * inverse for c, v in pivot.items()}
        pivot = {c: v for c, v in pivot.items() if not ring.is_zero(v)}
        for row in remaining + list(pivot_rows.values()):
            factor = row.get(column)
            if factor is None:
                continue
            for c, entry in pivot.items():
                updated = row.get(c, ring.zero()) - factor * entry
                if ring.is_zero(updated):
                    row.pop(c, None)
                else:
                    row[c] = updated
        remaining = [row for row in remaining if row]
        pivot_rows[column] = pivot
    if remaining:
        logger.error(f"{len(remaining)} rows without unit pivots remain after elimination over {ring!r}")
        raise NonFlatFamilyError(
            f"elimination over {ring!r} left {len(remaining)} rows with only nilpotent entries"
        )
    return EchelonForm(pivot_rows, columns, ring)


def echelon(rows: typing.Sequence[Vector], columns: typing.Sequence, ring=RATIONALS) -> EchelonForm:
    """
    Row-reduce sparse rows; earlier columns are preferred as pivots
    :param rows: sparse rows {column: scalar}
    :param columns: every column key, in pivot preference order
    :param ring: RATIONALS or a ParamRing
    :return: EchelonForm
    """
    if isinstance(ring, RationalRing):
        return _rational_echelon(rows, columns)
    return _local_echelon(rows, columns, ring)


def rank(rows: typing.Sequence[Vector], columns: typing.Sequence, ring=RATIONALS) -> int:
    return echelon(rows, columns, ring).rank


def nullspace(rows: typing.Sequence[Vector], columns: typing.Sequence, ring=RATIONALS) -> typing.List[Vector]:
    """
    Basis of {x : row . x = 0 for every row}, one vector per free column
    """
    form = echelon(rows, columns, ring)
    basis = []
    for free in form.free_columns():
        vector = {free: ring.one()}
        for pivot, row in form.pivot_rows.items():
            entry = row.get(free)
            if entry is not None:
                vector[pivot] = -entry
        basis.append(vector)
    return basis


def kernel_of_map(images: typing.Dict[typing.Hashable, Vector], domain: typing.Sequence,
                  ring=RATIONALS) -> typing.List[Vector]:
    """
    Kernel of the linear map sending basis vector v to images[v]
    :param images: image vector of each domain basis element
    :param domain: domain basis, in order
    :return: basis of the kernel as vectors over the domain basis
    """
    equations: typing.Dict[typing.Hashable, Vector] = {}
    for variable in domain:
        for output, value in images.get(variable, {}).items():
            if ring.is_zero(value):
                continue
            equations.setdefault(output, {})[variable] = value
    return nullspace(list(equations.values()), domain, ring)


def solve(equations: typing.Sequence[typing.Tuple[Vector, typing.Any]], unknowns: typing.Sequence,
          ring=RATIONALS) -> typing.Optional[Vector]:
    """
    One solution of a linear system, free unknowns set to zero
    :param equations: pairs (row, right-hand side)
    :param unknowns: unknown keys in pivot preference order
    :return: solution vector, or None when the system is inconsistent
    """
    rows = []
    for row, rhs in equations:
        augmented = dict(row)
        if not ring.is_zero(rhs):
            augmented[_RHS] = rhs
        rows.append(augmented)
    form = echelon(rows, list(unknowns) + [_RHS], ring)
    if _RHS in form.pivot_rows:
        return None
    return {
        pivot: row[_RHS]
        for pivot, row in form.pivot_rows.items()
        if _RHS in row
    }


def span_contains(basis: typing.Sequence[Vector], vector: Vector, columns: typing.Sequence,
                  ring=RATIONALS) -> bool:
    return echelon(basis, columns, ring).contains(vector)


def columns_of(vectors: typing.Iterable[Vector], key=None) -> typing.List:
    seen = set()
    for vector in vectors:
        seen.update(vector)
    return sorted(seen, key=key)
