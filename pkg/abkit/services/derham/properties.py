import typing
import logging
from abkit.services.series.truncated_series import TruncatedSeries
from abkit.services.linalg.exact_linalg import kernel_of_map
from abkit.services.abmod.ab_module import act_a
from abkit.services.abmod.presentation import nilpotency_index
from abkit.services.derham.forms import PolyForm, basis_form
from abkit.services.derham.brieskorn import BrieskornResult, Operator, BasisLabel
from abkit.services.derham.complexes import TruncatedComplex, _span
from abkit.utils.errors import TruncationInsufficientError

logger = logging.getLogger(__name__)


class NullstellensatzReport(typing.NamedTuple):
    N_KI: int
    N_ab: int
    by_degree: typing.Dict[int, int]

    def to_json(self) -> typing.Dict:
        return {
            "N_KI": str(self.N_KI),
            "N_ab": str(self.N_ab),
            "by_degree": {str(p): str(n) for p, n in sorted(self.by_degree.items())},
        }


def _top_degree_exponent(result: BrieskornResult) -> int:
    """Smallest N with f^N in the Jacobian ideal, read in the local Jacobian quotient."""
    milnor = result.milnor
    f = result.f
    n = f.nvars
    window = milnor.window
    weights = result.weights.weights
    for N in range(1, milnor.mu + 2):
        power = f ** N
        if all(not milnor.jacobian.reduce_form(
                basis_form((m, tuple(range(n))), n, f.ring, f.names).mul_polynomial(power).truncate(weights, window))
               for m in milnor.standard_monomials):
            return N
    raise TruncationInsufficientError("no power of f up to mu + 1 lies in the Jacobian ideal at this cutoff")


def _lower_degree_exponent(complex_: TruncatedComplex, p: int, limit: int) -> int:
    """Smallest N with f^N.K^p in I^p on the pieces whose image stays in the window."""
    f = complex_.f
    for N in range(0, limit + 1):
        power = f ** N
        holds = True
        for weight, piece in complex_.pieces.items():
            target = complex_.pieces.get(weight + N)
            if target is None:
                continue
            span = _span(target.I[p], target.forms[p])
            for vector in piece.K[p]:
                form = PolyForm(vector, p, f.nvars, f.ring, f.names).mul_polynomial(power)
                if not span.contains(form.terms):
                    holds = False
                    break
            if not holds:
                break
        if holds:
            return N
    raise TruncationInsufficientError(f"no power of f up to {limit} maps K^{p} into I^{p} at this cutoff")


def _a_power_in_b_image(result: BrieskornResult, limit: int) -> int:
    operator = result.a_operator
    generators = [(j, 0) for j in range(result.mu)]
    sigmas = result.milnor.sigmas()
    for N in range(1, limit + 1):
        if max(sigmas) + N >= result.milnor.window:
            break
        images = {label: {label: result.ring.one()} for label in generators}
        for _ in range(N):
            images = {label: _apply_operator(operator, image, result.ring) for label, image in images.items()}
        if all(k >= 1 for image in images.values() for (_, k) in image):
            return N
    raise TruncationInsufficientError(f"a^N.E is not inside b.E for N <= {limit} below the window")


def _apply_operator(operator: Operator, vector: typing.Dict[BasisLabel, typing.Any], ring) -> typing.Dict:
    result = {}
    for label, c in vector.items():
        for target, q in operator[label].items():
            value = result.get(target, ring.zero()) + c * q
            if ring.is_zero(value):
                result.pop(target, None)
            else:
                result[target] = value
    return result


def nullstellensatz_exponents(result: BrieskornResult, complex_: TruncatedComplex = None) -> NullstellensatzReport:
    """
    N_KI: smallest N with f^N.K^p in I^p for every degree; N_ab: smallest N with a^N.E in b.E
    :param result: Brieskorn lattice of f
    :param complex_: graded complex of f, for the degrees below the top
    :return: NullstellensatzReport
    """
    by_degree = {result.f.nvars: _top_degree_exponent(result)}
    if complex_ is not None and complex_.system.quasi_homogeneous:
        for p in range(1, complex_.top):
            by_degree[p] = _lower_degree_exponent(complex_, p, result.mu + 1)
    n_ab = _a_power_in_b_image(result, result.mu + 1)
    report = NullstellensatzReport(max(by_degree.values()), n_ab, by_degree)
    logger.info(f"nullstellensatz exponents N_KI={report.N_KI}, N_ab={report.N_ab}")
    return report


class QuotientTorsion(typing.NamedTuple):
    r: int
    a_nilpotency: typing.Optional[int]
    b_nilpotency: typing.Optional[int]

    @property
    def consistent(self) -> bool:
        if self.a_nilpotency is None or self.b_nilpotency is None:
            return False
        return self.b_nilpotency <= 2 * self.a_nilpotency

    def to_json(self) -> typing.Dict:
        return {
            "r": str(self.r),
            "N": None if self.a_nilpotency is None else str(self.a_nilpotency),
            "N_prime": None if self.b_nilpotency is None else str(self.b_nilpotency),
            "b_torsion_killed_by_b_2N": self.consistent,
        }


class TorsionPropertiesReport(typing.NamedTuple):
    a_torsion_dimension: int
    b_torsion_dimension: int
    separated: bool
    b_nilpotency_index: typing.Optional[int]
    quotients: typing.List[QuotientTorsion]

    @property
    def passed(self) -> bool:
        return (self.a_torsion_dimension == 0 and self.b_torsion_dimension == 0 and self.separated
                and all(q.consistent for q in self.quotients))

    def to_json(self) -> typing.Dict:
        return {
            "passed": self.passed,
            "a_torsion_dimension": str(self.a_torsion_dimension),
            "b_torsion_dimension": str(self.b_torsion_dimension),
            "separated": self.separated,
            "b_nilpotency_index": None if self.b_nilpotency_index is None else str(self.b_nilpotency_index),
            "quotients": [q.to_json() for q in self.quotients],
        }


def _reliable_kernel(result: BrieskornResult, operator: Operator, power: int) -> int:
    labels = [label for label in result.basis if result.in_window(label, power)]
    images = {label: {label: result.ring.one()} for label in labels}
    for _ in range(power):
        images = {label: _apply_operator(operator, image, result.ring) for label, image in images.items()}
    return len(kernel_of_map(images, labels, result.ring))


def quotient_torsion(result: BrieskornResult, r: int) -> QuotientTorsion:
    """a and b on E/b^r.E, from the assembled module reduced mod b^r"""
    if r > result.b_order:
        raise TruncationInsufficientError(f"E/b^{r}E needs b-order {r}, module has {result.b_order}")
    module = result.module.truncated(r)
    ring = module.ring
    labels = [(i, k) for k in range(r) for i in range(module.rank)]

    def image(label):
        i, k = label
        vector = module.zero_vector()
        vector[i] = TruncatedSeries.monomial(ring.one(), k, r, ring)
        return vector

    def flatten(vector) -> typing.Dict:
        return {(i, k): c for i, series in enumerate(vector) for k, c in enumerate(series.coefficients)
                if not ring.is_zero(c)}

    a_images = {label: flatten(act_a(module, image(label))) for label in labels}
    b_images = {label: flatten([s.shift(1) for s in image(label)]) for label in labels}
    basis = [{label: ring.one()} for label in labels]
    limit = r * module.rank + 1
    return QuotientTorsion(r, nilpotency_index(basis, a_images, limit), nilpotency_index(basis, b_images, limit))


def torsion_properties_check(result: BrieskornResult) -> TorsionPropertiesReport:
    """
    a- and b-torsion of the Brieskorn lattice over the reliable range, b-separation, and the
    exponents witnessed on the quotients E/b.E and E/b^2.E
    """
    a_torsion = _reliable_kernel(result, result.a_operator, 1)
    b_torsion = result.b_kernel_dimension()
    separated = all(
        result.b_operator[label] == {(label[0], label[1] + 1): result.ring.one()}
        for label in result.basis if result.in_window(label, 1)
    )
    everything = [{label: result.ring.one()} for label in result.basis]
    b_index = nilpotency_index(everything, result.b_operator, len(result.basis) + 1)
    quotients = [quotient_torsion(result, r) for r in (1, 2) if r <= result.b_order]
    report = TorsionPropertiesReport(a_torsion, b_torsion, separated, b_index, quotients)
    if not report.passed:
        logger.warning(f"torsion properties fail for {result.f.render()}: {report.to_json()}")
    return report
