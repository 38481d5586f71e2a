import typing
import logging
from fractions import Fraction
from abkit.services.scalars.scalar_rings import RATIONALS
from abkit.services.linalg.exact_linalg import echelon, EchelonForm
from abkit.services.derham.forms import PolyForm, FormKey, form_weight

logger = logging.getLogger(__name__)

Mapper = typing.Callable[..., typing.Iterable]

WHOLE = "whole"


class WindowedQuotient:
    """
    Span of monomial forms below the weight window modulo a span of relation rows. When every
    row is weighted-homogeneous the quotient splits into independent graded pieces.
    """

    def __init__(self, columns: typing.Sequence[FormKey], pieces: typing.Dict[typing.Any, EchelonForm],
                 weights: typing.Sequence[Fraction], graded: bool, ring=RATIONALS):
        self.columns = list(columns)
        self.pieces = pieces
        self.weights = tuple(weights)
        self.graded = graded
        self.ring = ring
        self._members = set(self.columns)
        self.standard = [c for c in self.columns if not self._is_pivot(c)]

    def piece_of(self, key: FormKey):
        return form_weight(key, self.weights) if self.graded else WHOLE

    def _is_pivot(self, key: FormKey) -> bool:
        form = self.pieces.get(self.piece_of(key))
        return form is not None and key in form.pivot_rows

    @property
    def dimension(self) -> int:
        return len(self.standard)

    def reduce(self, vector: typing.Dict[FormKey, typing.Any]) -> typing.Dict[FormKey, typing.Any]:
        """Normal form on the standard columns; entries outside the window are dropped."""
        grouped: typing.Dict[typing.Any, typing.Dict] = {}
        for key, c in vector.items():
            if key in self._members and not self.ring.is_zero(c):
                grouped.setdefault(self.piece_of(key), {})[key] = c
        result = {}
        for piece, part in grouped.items():
            form = self.pieces.get(piece)
            result.update(form.reduce(part) if form is not None else part)
        return result

    def reduce_form(self, omega: PolyForm) -> typing.Dict[FormKey, typing.Any]:
        return self.reduce(omega.terms)


def build_quotient(columns: typing.Sequence[FormKey], sources: typing.Sequence,
                   row_of: typing.Callable[[typing.Any], typing.Dict[FormKey, typing.Any]],
                   source_piece: typing.Callable[[typing.Any], Fraction],
                   weights: typing.Sequence[Fraction], graded: bool, ring=RATIONALS,
                   mapper: Mapper = map) -> WindowedQuotient:
    """
    Eliminate relation rows against monomial columns, piece by piece when graded
    :param columns: monomial forms below the window, in pivot preference order
    :param sources: generators of the relations, turned into rows by row_of
    :param source_piece: weight of the row a source produces (used only when graded)
    :param mapper: map-like callable; an executor's map runs the pieces concurrently
    :return: WindowedQuotient
    """
    weights = tuple(weights)
    column_groups: typing.Dict[typing.Any, typing.List[FormKey]] = {}
    for key in columns:
        column_groups.setdefault(form_weight(key, weights) if graded else WHOLE, []).append(key)
    source_groups: typing.Dict[typing.Any, typing.List] = {}
    for source in sources:
        piece = source_piece(source) if graded else WHOLE
        if piece in column_groups:
            source_groups.setdefault(piece, []).append(source)
    order = sorted(source_groups, key=lambda piece: (0, piece) if graded else (0, 0))

    def eliminate(piece):
        members = set(column_groups[piece])
        rows = []
        for source in source_groups[piece]:
            row = {key: c for key, c in row_of(source).items() if key in members}
            if row:
                rows.append(row)
        return piece, echelon(rows, column_groups[piece], ring)

    pieces = dict(mapper(eliminate, order))
    logger.debug(f"{len(sources)} relations over {len(columns)} monomial forms in {len(pieces)} pieces")
    return WindowedQuotient(columns, pieces, weights, graded, ring)
