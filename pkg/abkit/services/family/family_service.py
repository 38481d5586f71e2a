import typing
import logging
from fractions import Fraction
from abkit.core.config import Config
from abkit.services.scalars.scalar_rings import RATIONALS, ParamRing
from abkit.services.linalg.exact_linalg import echelon
from abkit.services.abmod.ab_module import SpectralData, GeometricVerdict, GEOMETRIC, spectrum, is_geometric
from abkit.services.abmod.smallness import SmallnessReport, is_S_small
from abkit.services.derham.polynomial import Polynomial
from abkit.services.derham.weights import detect_weights
from abkit.services.derham.brieskorn import BrieskornResult, Operator, operators_equal
from abkit.services.derham.derham_service import DerhamService
from abkit.utils.errors import AbkitError, ArityMismatchError, NonIsolatedSingularityError

logger = logging.getLogger(__name__)

Point = typing.Tuple[Fraction, ...]


def render_point(point: Point, names: typing.Sequence[str]) -> str:
    return ", ".join(f"{name}={value}" for name, value in zip(names, point)) or "-"


class FamilySpec(typing.NamedTuple):
    """f with coefficients in Q[s]/(s)^m and the parameter points to specialize at"""
    f: Polynomial
    points: typing.List[Point]
    max_degree: int = Config.DEFAULT_MAX_DEGREE
    b_order: int = Config.DEFAULT_B_ORDER

    @property
    def parametric(self) -> bool:
        return isinstance(self.f.ring, ParamRing)

    @property
    def arity(self) -> int:
        return self.f.ring.arity if self.parametric else 0

    @property
    def parameter_names(self) -> typing.Tuple[str, ...]:
        return self.f.ring.names if self.parametric else ()

    def fiber(self, point: Point) -> Polynomial:
        return self.f.specialize(point) if self.parametric else self.f

    def recentered(self, point: Point) -> Polynomial:
        return self.f.recenter(point)

    def checked_points(self) -> typing.List[Point]:
        points = [tuple(Fraction(p) for p in point) for point in self.points] or [(Fraction(0),) * self.arity]
        for point in points:
            if len(point) != self.arity:
                raise ArityMismatchError(f"point {point} has {len(point)} coordinates, family has {self.arity}")
        return points


def _specialize_operator(operator: Operator, ring, point: Point) -> Operator:
    if ring == RATIONALS:
        return operator
    specialized = {}
    for label, image in operator.items():
        values = {target: ring.specialize(q, point) for target, q in image.items()}
        specialized[label] = {target: value for target, value in values.items() if value != 0}
    return specialized


def _coker_dimension(operator: Operator, labels: typing.Sequence) -> int:
    image = echelon([v for v in operator.values() if v], list(labels), RATIONALS)
    return len(labels) - image.rank


class PointReport(typing.NamedTuple):
    point: Point
    mu_specialized: int
    mu_direct: int
    coker_b_specialized: int
    coker_b_direct: int
    matrices_equal: bool
    operators_equal: bool
    spectrum_specialized: SpectralData
    spectrum_direct: SpectralData
    weight_spectrum: typing.List[Fraction]
    geometric: GeometricVerdict
    stamps: typing.Tuple[str, str]

    @property
    def agree(self) -> bool:
        return (self.mu_specialized == self.mu_direct
                and self.coker_b_specialized == self.coker_b_direct
                and self.matrices_equal and self.operators_equal
                and self.spectrum_specialized.values == self.spectrum_direct.values)

    def to_json(self) -> typing.Dict:
        return {
            "agree": self.agree,
            "mu": {"specialized": str(self.mu_specialized), "direct": str(self.mu_direct)},
            "coker_b_dimension": {"specialized": str(self.coker_b_specialized), "direct": str(self.coker_b_direct)},
            "a_matrix_equal": self.matrices_equal,
            "b_operator_equal": self.operators_equal,
            "spectrum": {
                "specialized": [str(v) for v in self.spectrum_specialized.values],
                "direct": [str(v) for v in self.spectrum_direct.values],
            },
            "weight_spectrum": [str(v) for v in self.weight_spectrum],
            "geometric": self.geometric.to_json(),
            "stamp": {"specialized": self.stamps[0], "direct": self.stamps[1]},
        }


class FamilySmallnessReport(typing.NamedTuple):
    smallness: SmallnessReport
    per_point: typing.List[PointReport]
    names: typing.Tuple[str, ...]

    @property
    def geometric(self) -> bool:
        return all(report.geometric.verdict == GEOMETRIC for report in self.per_point)

    @property
    def weight_spectra_coincide(self) -> bool:
        return len({tuple(report.weight_spectrum) for report in self.per_point}) <= 1

    @property
    def saturation_spectra_coincide(self) -> bool:
        return len({tuple(report.spectrum_direct.values) for report in self.per_point}) <= 1

    @property
    def agree(self) -> bool:
        return all(report.agree for report in self.per_point)

    def to_json(self) -> typing.Dict:
        return {
            "points": [render_point(r.point, self.names) for r in self.per_point],
            "agree": self.agree,
            "geometric": self.geometric,
            "small": self.smallness.small,
            "smallness": self.smallness.to_json(),
            "weight_spectra_coincide": self.weight_spectra_coincide,
            "saturation_spectra_coincide": self.saturation_spectra_coincide,
            "per_point": {render_point(r.point, self.names): r.to_json() for r in self.per_point},
        }


class FamilyService:
    """
    Runs the Brieskorn construction over the parameter ring and at parameter points, and
    compares the two orders of specialization.
    """

    def __init__(self, derham_service: DerhamService):
        self.derham_service = derham_service

    def _brieskorn(self, spec: FamilySpec, f: Polynomial, weights) -> BrieskornResult:
        return self.derham_service.brieskorn_module(f, spec.max_degree, spec.b_order, weights)

    def family_weights(self, spec: FamilySpec) -> typing.Tuple[Fraction, ...]:
        return detect_weights(spec.f).weights

    def specialize_run(self, spec: FamilySpec, point: typing.Sequence, weights=None) -> PointReport:
        """
        (A) re-center at the point, build over the parameter ring, specialize the outputs;
        (B) specialize f, build over the rationals
        :param spec: the family
        :param point: parameter values
        :param weights: shared weights, the family's own when omitted
        :return: PointReport comparing both
        """
        point = tuple(Fraction(p) for p in point)
        if len(point) != spec.arity:
            raise ArityMismatchError(f"point {point} has {len(point)} coordinates, family has {spec.arity}")
        weights = weights or self.family_weights(spec)
        rendered = render_point(point, spec.parameter_names)
        logger.info(f"family run for {spec.f.render()} at {rendered}")
        try:
            direct = self._brieskorn(spec, spec.fiber(point), weights)
            recentered = self._brieskorn(spec, spec.recentered(point), weights)
        except NonIsolatedSingularityError as e:
            logger.error(f"fiber at {rendered} is not isolated: {e}")
            raise NonIsolatedSingularityError(f"non-isolated singularity at {rendered}: {e}") from e
        except AbkitError:
            raise
        except Exception as e:
            logger.error(f"Error running family point {rendered}: {e}")
            raise RuntimeError(f"Family run failed at {rendered}") from e

        origin = (Fraction(0),) * spec.arity
        module = recentered.specialize(origin)
        b_specialized = _specialize_operator(recentered.b_operator, recentered.ring, origin)
        spectrum_specialized = spectrum(module, self.derham_service.max_steps)
        verdict = is_geometric(direct.module, self.derham_service.max_steps)
        report = PointReport(
            point=point,
            mu_specialized=recentered.mu,
            mu_direct=direct.mu,
            coker_b_specialized=_coker_dimension(b_specialized, recentered.basis),
            coker_b_direct=direct.coker_b_dimension(),
            matrices_equal=module == direct.module,
            operators_equal=recentered.basis == direct.basis and operators_equal(b_specialized, direct.b_operator, RATIONALS),
            spectrum_specialized=spectrum_specialized,
            spectrum_direct=verdict.spectrum,
            weight_spectrum=direct.weight_spectrum,
            geometric=verdict,
            stamps=(recentered.stamp, direct.stamp),
        )
        if not report.agree:
            logger.warning(f"specialization does not commute at {rendered}: {report.to_json()}")
        return report

    def run_points(self, spec: FamilySpec) -> typing.List[PointReport]:
        points = spec.checked_points()
        weights = self.family_weights(spec)
        with self.derham_service.mapper() as mapper:
            return list(mapper(lambda point: self.specialize_run(spec, point, weights), points))

    def family_smallness(self, spec: FamilySpec) -> FamilySmallnessReport:
        """
        S-smallness of the family Brieskorn module and the geometric verdict at every point
        :param spec: the family
        :return: FamilySmallnessReport
        """
        weights = self.family_weights(spec)
        family = self._brieskorn(spec, spec.f, weights)
        smallness = is_S_small(family.module)
        per_point = self.run_points(spec)
        report = FamilySmallnessReport(smallness, per_point, spec.parameter_names)
        if not report.saturation_spectra_coincide:
            # a Brieskorn lattice that is not quasi-homogeneous is not saturated; its saturation
            # spectrum shifts by integers and does not depend on the cutoff
            logger.warning(f"saturation spectra of {spec.f.render()} differ across points; "
                           "compare weight spectra instead")
        logger.info(f"family {spec.f.render()}: small={smallness.small}, geometric={report.geometric}")
        return report
