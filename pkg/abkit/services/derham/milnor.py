import typing
import logging
from fractions import Fraction
from abkit.services.scalars.scalar_rings import render_monomial
from abkit.services.derham.polynomial import Polynomial, Exponent
from abkit.services.derham.forms import FormKey, forms_below, form_weight, basis_form, wedge_df
from abkit.services.derham.weights import WeightSystem, detect_weights
from abkit.services.derham.graded import WindowedQuotient, build_quotient, Mapper
from abkit.utils.errors import NonIsolatedSingularityError, TruncationInsufficientError

logger = logging.getLogger(__name__)


class MilnorData(typing.NamedTuple):
    mu: int
    standard_monomials: typing.List[Exponent]
    weights: WeightSystem
    window: Fraction
    jacobian: WindowedQuotient

    def sigmas(self) -> typing.List[Fraction]:
        return [self.weights.sigma(m) for m in self.standard_monomials]

    def to_json(self, names: typing.Sequence[str]) -> typing.Dict:
        return {
            "mu": str(self.mu),
            "standard_monomials": [render_monomial(m, names) or "1" for m in self.standard_monomials],
            "window": str(self.window),
            **self.weights.to_json(),
        }


def top_columns(weights: typing.Sequence[Fraction], window: Fraction) -> typing.List[FormKey]:
    return forms_below(len(weights), window, weights)


def jacobian_quotient(f: Polynomial, system: WeightSystem, window: Fraction, mapper: Mapper = map) -> WindowedQuotient:
    """Omega^{n+1} / (df ^ Omega^n + forms of weight >= window)"""
    weights = system.weights
    n = f.nvars
    sources = forms_below(n - 1, window - 1, weights)

    def row_of(key: FormKey):
        return wedge_df(basis_form(key, n, f.ring, f.names), f, weights, window).terms

    return build_quotient(top_columns(weights, window), sources, row_of,
                          lambda key: form_weight(key, weights) + 1,
                          weights, system.quasi_homogeneous, f.ring, mapper)


def milnor_number(f: Polynomial, max_degree: int, weights: typing.Sequence = None, mapper: Mapper = map,
                  system: WeightSystem = None) -> MilnorData:
    """
    Dimension of the local Jacobian algebra, read off the quotient below the weight window
    :param f: polynomial with a critical point at the origin
    :param max_degree: D; the window contains every top form of degree <= D
    :param weights: explicit weights, detected when omitted
    :param mapper: map-like callable for the graded pieces
    :return: MilnorData with the local standard monomials (lowest weight pivots first)
    """
    system = system or detect_weights(f, weights)
    window = system.window(max_degree)
    if window - 1 <= system.total:
        raise TruncationInsufficientError(f"max degree {max_degree} leaves no room below the weight window")
    quotient = jacobian_quotient(f, system, window, mapper)
    standard = [exponent for exponent, _ in quotient.standard]
    unstable = [m for m in standard if system.sigma(m) >= window - 1]
    if unstable:
        rendered = [render_monomial(m, f.names) or "1" for m in unstable[:3]]
        logger.error(f"Jacobian quotient of {f.render()} reaches the window at {rendered}")
        raise NonIsolatedSingularityError(
            f"Jacobian quotient of {f.render()} does not stabilize below degree {max_degree} (e.g. {rendered})"
        )
    logger.info(f"milnor number of {f.render()}: {len(standard)}")
    return MilnorData(len(standard), standard, system, window, quotient)
