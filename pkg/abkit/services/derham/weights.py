import typing
import logging
from fractions import Fraction
from abkit.services.linalg.exact_linalg import solve, nullspace
from abkit.services.derham.polynomial import Polynomial, monomial_weight
from abkit.utils.errors import NotCriticalPointError

logger = logging.getLogger(__name__)

QUASI_HOMOGENEOUS = "quasi-homogeneous"
SEMI_QUASI_HOMOGENEOUS = "semi-quasi-homogeneous"
GENERAL = "general"


class WeightSystem(typing.NamedTuple):
    weights: typing.Tuple[Fraction, ...]
    kind: str
    principal_part: Polynomial

    @property
    def quasi_homogeneous(self) -> bool:
        return self.kind == QUASI_HOMOGENEOUS

    @property
    def minimum(self) -> Fraction:
        return min(self.weights)

    @property
    def total(self) -> Fraction:
        return sum(self.weights, Fraction(0))

    def window(self, max_degree: int) -> Fraction:
        """Weight bound W = (D+1).w_min + sum(w): every top form x^m.dx of degree <= D lies below it."""
        return (max_degree + 1) * self.minimum + self.total

    def sigma(self, exponent) -> Fraction:
        return monomial_weight(exponent, self.weights) + self.total

    def to_json(self) -> typing.Dict:
        return {
            "weights": [str(w) for w in self.weights],
            "kind": self.kind,
            "principal_part": self.principal_part.render(),
        }


def check_critical_point(f: Polynomial):
    if f.nvars < 2:
        raise ValueError("at least two variables are required")
    zero = (0,) * f.nvars
    if not f.ring.is_zero(f.coefficient(zero)):
        logger.error(f"{f.render()} does not vanish at the origin")
        raise NotCriticalPointError(f"{f.render()} does not vanish at the origin")
    for i in range(f.nvars):
        linear = tuple(1 if j == i else 0 for j in range(f.nvars))
        if not f.ring.is_zero(f.coefficient(linear)):
            logger.error(f"{f.render()} has a linear term in {f.names[i]}")
            raise NotCriticalPointError(f"the origin is not a critical point of {f.render()}")
    if f.is_zero():
        raise NotCriticalPointError("the zero polynomial has no isolated critical point")


def _classify(f: Polynomial, weights: typing.Sequence[Fraction]) -> typing.Optional[str]:
    values = [monomial_weight(e, weights) for e in f.terms]
    if all(v == 1 for v in values):
        return QUASI_HOMOGENEOUS
    if all(v >= 1 for v in values):
        return SEMI_QUASI_HOMOGENEOUS if _principal_has_all_pure_powers(f, weights) else GENERAL
    return None


def _principal_has_all_pure_powers(f: Polynomial, weights: typing.Sequence[Fraction]) -> bool:
    principal = f.weighted_part(weights, Fraction(1))
    return all(
        any(e[i] > 0 and sum(e) == e[i] for e in principal.terms)
        for i in range(f.nvars)
    )


def _solve_quasi_homogeneous(f: Polynomial) -> typing.Optional[typing.Tuple[Fraction, ...]]:
    unknowns = list(range(f.nvars))
    equations = [({i: Fraction(p) for i, p in enumerate(e) if p}, Fraction(1)) for e in f.terms]
    solution = solve(equations, unknowns)
    if solution is None or nullspace([row for row, _ in equations], unknowns):
        return None
    weights = tuple(Fraction(solution.get(i, 0)) for i in unknowns)
    if any(w <= 0 for w in weights):
        return None
    return weights


def _pure_power_weights(f: Polynomial) -> typing.Optional[typing.Tuple[Fraction, ...]]:
    weights = []
    for i in range(f.nvars):
        powers = [e[i] for e in f.terms if sum(e) == e[i] and e[i] > 0]
        if not powers:
            return None
        weights.append(Fraction(1, min(powers)))
    return tuple(weights)


def detect_weights(f: Polynomial, weights: typing.Sequence = None) -> WeightSystem:
    """
    Weights making f quasi-homogeneous, else semi-quasi-homogeneous, else 1/ord(f)
    :param f: polynomial with a critical point at the origin
    :param weights: explicit weights; classified but not searched
    :return: WeightSystem with the kind and the weight-1 principal part
    """
    check_critical_point(f)
    if weights is not None:
        weights = tuple(Fraction(w) for w in weights)
        if len(weights) != f.nvars or any(w <= 0 for w in weights):
            raise ValueError(f"{len(weights)} weights given for {f.nvars} variables; all must be positive")
        candidates = [weights]
    else:
        candidates = [_solve_quasi_homogeneous(f), _pure_power_weights(f)]
        order = f.order()
        candidates.append(tuple(Fraction(1, order) for _ in range(f.nvars)))
    for candidate in candidates:
        if candidate is None:
            continue
        kind = _classify(f, candidate)
        if kind is None:
            continue
        system = WeightSystem(candidate, kind, f.weighted_part(candidate, Fraction(1)))
        logger.info(f"weights {[str(w) for w in candidate]} for {f.render()}: {kind}")
        return system
    raise ValueError(f"weights {[str(w) for w in weights]} give {f.render()} monomials of weight below 1")
