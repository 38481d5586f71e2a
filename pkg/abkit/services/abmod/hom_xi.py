import typing
import logging
from fractions import Fraction
from abkit.services.series.truncated_series import TruncatedSeries
from abkit.services.linalg.exact_linalg import echelon, nullspace
from abkit.services.xi.xi_module import XiShape, XiElement, act_a as xi_act_a
from abkit.services.abmod.ab_module import ABModule, spectrum
from abkit.utils.errors import ScalarRingMismatchError

logger = logging.getLogger(__name__)


class HomResult(typing.NamedTuple):
    dimension: int
    maps: typing.List[typing.List[XiElement]]
    missing_lambdas: typing.List[Fraction]
    rank: int

    @property
    def sufficient(self) -> bool:
        return self.dimension >= self.rank

    def to_json(self) -> typing.Dict:
        return {
            "dimension": str(self.dimension),
            "rank": str(self.rank),
            "sufficient": self.sufficient,
            "missing_lambdas": [str(value) for value in self.missing_lambdas],
            "maps": [[image.to_json() for image in images] for images in self.maps],
        }


def _fractional(value: Fraction) -> Fraction:
    remainder = value % 1
    return remainder if remainder else Fraction(1)


def hom_to_xi(module: ABModule, shape: XiShape) -> HomResult:
    """
    A-linear maps phi: E -> Xi, phi(e_i) = sum_g S_{i,g}(b).g, from a(phi(e_i)) = phi(a(e_i))
    :param module: module over the rationals
    :param shape: target; its b_truncation is matched to the module's
    :return: HomResult with the maps known below order T - 1
    """
    if module.ring != shape.ring:
        raise ScalarRingMismatchError(f"module over {module.ring!r}, target over {shape.ring!r}")
    T = min(module.b_truncation, shape.b_truncation)
    if shape.b_truncation != T:
        shape = XiShape(shape.lambdas, shape.k, T, shape.ring, shape.copies)
    k = module.rank
    generators = shape.generators
    unknowns = [(i, g, n) for n in range(T) for i in range(k) for g in generators]
    ring = module.ring

    # a(phi(e_i)) - sum_r A_ri.phi(e_r), as a linear form in the unknown coefficients
    equations: typing.Dict[typing.Tuple, typing.Dict] = {}
    for i in range(k):
        for g in generators:
            for n in range(T):
                basis_element = XiElement(shape, {g: TruncatedSeries.monomial(ring.one(), n, T, ring)})
                for target, series in xi_act_a(basis_element).coefficients.items():
                    for order, c in enumerate(series.coefficients):
                        row = equations.setdefault((i, target, order), {})
                        row[(i, g, n)] = row.get((i, g, n), 0) + c
                for r in range(k):
                    entry = module.a_matrix[i][r]
                    for m, c in enumerate(entry.coefficients):
                        if m + n >= T:
                            break
                        row = equations.setdefault((r, g, m + n), {})
                        row[(i, g, n)] = row.get((i, g, n), 0) - c
    solutions = nullspace([row for row in equations.values() if row], unknowns, ring)

    reliable = [u for u in unknowns if u[2] < T - 1]
    projected = [{u: c for u, c in vector.items() if u[2] < T - 1} for vector in solutions]
    form = echelon([v for v in projected if v], reliable, ring)
    maps = []
    for row in form.pivot_rows.values():
        images = []
        for i in range(k):
            coefficients = {}
            for (source, g, n), c in row.items():
                if source == i:
                    coefficients.setdefault(g, [ring.zero()] * T)[n] = c
            images.append(XiElement(shape, {g: TruncatedSeries(c, T, ring) for g, c in coefficients.items()}))
        maps.append(images)

    missing = []
    data = spectrum(module)
    if data.determined and data.rational:
        missing = sorted({_fractional(value) for value, _ in data.eigenvalues} - set(shape.lambdas))
    if form.rank < k:
        logger.warning(f"only {form.rank} maps into {shape!r} for a module of rank {k}; missing {missing}")
    return HomResult(form.rank, maps, missing, k)


def intertwines(module: ABModule, images: typing.Sequence[XiElement], order: int = None) -> bool:
    """
    Re-check a(phi(e_i)) == phi(a(e_i)) below the given order
    """
    shape = images[0].shape if images else None
    if shape is None:
        return True
    T = shape.b_truncation
    order = T - 1 if order is None else order
    for i in range(module.rank):
        lhs = xi_act_a(images[i])
        rhs = XiElement.zero(shape)
        for r in range(module.rank):
            rhs = rhs + images[r].mul_series(module.a_matrix[r][i].with_order(T))
        difference = lhs - rhs
        if any(not s.truncate(order).is_zero() for s in difference.coefficients.values()):
            return False
    return True
