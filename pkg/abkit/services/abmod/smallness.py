import typing
import logging
from abkit.services.series.truncated_series import TruncatedSeries
from abkit.services.linalg.exact_linalg import echelon, kernel_of_map
from abkit.services.abmod.ab_module import ABModule, act_a
from abkit.services.abmod.presentation import (
    FinitePresentation,
    PresentedModule,
    materialize,
    operator_power,
    stable_part,
    span_contains_all,
    nilpotency_index,
    render_monomial_vector,
    EXACT,
)

logger = logging.getLogger(__name__)

CONDITIONS = ("separation_in_a_torsion", "b_torsion_in_a_torsion", "a_torsion_nilpotent", "ker_coker_b_coherent")


class SmallnessReport(typing.NamedTuple):
    small: typing.Optional[bool]
    conditions: typing.Dict[str, typing.Optional[bool]]
    consequences: typing.Dict[str, typing.Optional[bool]]
    N: typing.Optional[int]
    details: typing.Dict[str, typing.Any]

    @property
    def failed(self) -> typing.List[str]:
        return [name for name, value in {**self.conditions, **self.consequences}.items() if value is False]

    def to_json(self) -> typing.Dict:
        return {
            "small": self.small,
            "conditions": self.conditions,
            "consequences": self.consequences,
            "N": None if self.N is None else str(self.N),
            "failed": self.failed,
            "details": self.details,
        }


def _free_domain(module: ABModule):
    ring = module.ring
    return [(n, i, e) for n in range(module.b_truncation - 1) for i in range(module.rank) for e in ring.basis()]


def _free_vector(module: ABModule, key) -> typing.List[TruncatedSeries]:
    n, i, e = key
    ring = module.ring
    value = ring.from_vector({e: 1})
    vector = module.zero_vector()
    vector[i] = TruncatedSeries.monomial(value, n, module.b_truncation, ring)
    return vector


def _expand_free(module: ABModule, vector: typing.List[TruncatedSeries]) -> typing.Dict:
    ring = module.ring
    result = {}
    for i, series in enumerate(vector):
        for n, c in enumerate(series.coefficients):
            for e, q in ring.to_vector(c).items():
                result[(n, i, e)] = q
    return result


def free_part_report(module: ABModule, max_power: int) -> typing.Dict[str, typing.Any]:
    """
    Torsion data of the free part, expanded over Q on b-degrees below T - 1
    """
    domain = _free_domain(module)
    a_images = {}
    for key in domain:
        vector = _free_vector(module, key)
        for _ in range(max_power):
            vector = act_a(module, vector)
        a_images[key] = _expand_free(module, vector)
    a_torsion = kernel_of_map(a_images, domain)
    b_images = {key: _expand_free(module, [s.shift(1) for s in _free_vector(module, key)]) for key in domain}
    b_kernel = kernel_of_map(b_images, domain)
    return {
        "a_torsion_dimension": len(a_torsion),
        "b_kernel_dimension": len(b_kernel),
        "coker_b_generators": [f"e{i + 1}" for i in range(module.rank)],
    }


def torsion_part_report(presented: PresentedModule) -> typing.Dict[str, typing.Any]:
    dimension = presented.dimension
    columns = list(presented.standard)
    power = max(dimension, 1)
    a_power = operator_power(presented, "a", power)
    b_power = operator_power(presented, "b", power)
    a_step = operator_power(presented, "a", 1)
    b_step = operator_power(presented, "b", 1)
    a_torsion = kernel_of_map(a_power, columns)
    b_torsion = kernel_of_map(b_power, columns)
    separated = [v for v in b_power.values() if v]
    b_kernel = kernel_of_map(b_step, columns)
    b_image = echelon([v for v in b_step.values() if v], columns)
    coker_generators = [m for m in columns if not b_image.contains({m: 1})]
    coker_dimension = dimension - b_image.rank
    N = nilpotency_index(a_torsion, a_step, power)
    stable = stable_part(presented, a_torsion)
    names = presented.ring.names
    return {
        "dimension": dimension,
        "a_torsion": a_torsion,
        "b_torsion": b_torsion,
        "separated_part": separated,
        "a_step": a_step,
        "b_step": b_step,
        "stable_a_torsion": stable,
        "N": N,
        "b_torsion_a_nilpotency": nilpotency_index(b_torsion, a_step, power),
        "b_kernel_generators": [render_monomial_vector(v, names) for v in b_kernel],
        "coker_b_generators": [render_monomial_vector({m: 1}, names) for m in coker_generators],
        "coker_b_dimension": coker_dimension,
        "columns": columns,
    }


def is_S_small(module: typing.Optional[ABModule] = None, torsion_part: typing.Optional[FinitePresentation] = None,
               degree: int = 8, max_power: int = 1) -> SmallnessReport:
    """
    Check the four smallness conditions on E = (free module) + (presented torsion part)
    :param module: free part over the rationals or a parameter ring
    :param torsion_part: presentation of the finite part
    :param degree: total-degree cutoff for the presentation
    :param max_power: power of a used for the a-torsion of the free part
    :return: SmallnessReport; conditions are None when the presentation is only known at cutoff
    """
    conditions: typing.Dict[str, typing.Optional[bool]] = {name: True for name in CONDITIONS}
    consequences: typing.Dict[str, typing.Optional[bool]] = {
        "b_torsion_equals_stable_a_torsion": True,
        "b_torsion_killed_by_b_2N": True,
        "b_torsion_killed_by_a_power": True,
    }
    details: typing.Dict[str, typing.Any] = {}
    N = 0

    if module is not None:
        free = free_part_report(module, max_power)
        details["free"] = {key: str(value) if isinstance(value, int) else value for key, value in free.items()}
        if free["b_kernel_dimension"] != 0:
            conditions["ker_coker_b_coherent"] = False
        # b injective on the free part: B = 0, and the stable part of A lies in B by the a-gives-b identity

    if torsion_part is not None:
        presented = materialize(torsion_part, degree)
        if presented.stamp != EXACT:
            logger.warning(f"torsion part not finite at degree {degree}; smallness indeterminate")
            undecided = {name: None for name in CONDITIONS}
            return SmallnessReport(None, undecided, {name: None for name in consequences}, None,
                                   {"torsion": {"stamp": presented.stamp, "dimension": str(presented.dimension)}})
        report = torsion_part_report(presented)
        columns = report["columns"]
        a_torsion, b_torsion = report["a_torsion"], report["b_torsion"]
        if not span_contains_all(a_torsion, report["separated_part"], columns):
            conditions["separation_in_a_torsion"] = False
        if not span_contains_all(a_torsion, b_torsion, columns):
            conditions["b_torsion_in_a_torsion"] = False
        # a_torsion is Ker(a^dim) of a finite-dimensional module, so a is nilpotent on it and
        # a_torsion_nilpotent holds by construction; N is its index
        N = max(N, report["N"])
        stable = report["stable_a_torsion"]
        if not (span_contains_all(stable, b_torsion, columns) and span_contains_all(b_torsion, stable, columns)):
            consequences["b_torsion_equals_stable_a_torsion"] = False
        if nilpotency_index(b_torsion, report["b_step"], 2 * max(N, 1)) is None:
            consequences["b_torsion_killed_by_b_2N"] = False
        if report["b_torsion_a_nilpotency"] is None:
            consequences["b_torsion_killed_by_a_power"] = False
        names = presented.ring.names
        details["torsion"] = {
            "stamp": presented.stamp,
            "dimension": str(report["dimension"]),
            "a_torsion": [render_monomial_vector(v, names) for v in a_torsion],
            "b_torsion": [render_monomial_vector(v, names) for v in b_torsion],
            "ker_b_generators": report["b_kernel_generators"],
            "coker_b_generators": report["coker_b_generators"],
        }

    small = all(conditions.values())
    if not small:
        failed = [name for name, value in conditions.items() if value is False]
        logger.info(f"module is not small: {failed}")
    return SmallnessReport(small, conditions, consequences, N, details)
