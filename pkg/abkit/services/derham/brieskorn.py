import typing
import logging
from fractions import Fraction
from abkit.services.scalars.scalar_rings import RATIONALS, render_monomial
from abkit.services.series.truncated_series import TruncatedSeries
from abkit.services.linalg.exact_linalg import echelon
from abkit.services.abmod.ab_module import ABModule, SpectralData, spectrum
from abkit.services.derham.polynomial import Polynomial, Exponent
from abkit.services.derham.forms import (
    PolyForm,
    FormKey,
    forms_below,
    form_weight,
    basis_form,
    wedge_df,
    d_rel,
    graded_primitive,
)
from abkit.services.derham.weights import WeightSystem, detect_weights, SEMI_QUASI_HOMOGENEOUS
from abkit.services.derham.graded import WindowedQuotient, build_quotient, Mapper
from abkit.services.derham.milnor import MilnorData, milnor_number, top_columns
from abkit.utils.errors import TruncationInsufficientError, NonIsolatedSingularityError

logger = logging.getLogger(__name__)

EXACT = "exact"
AT_CUTOFF = "at-cutoff"

# (j, k) stands for b^k.omega_j
BasisLabel = typing.Tuple[int, int]
Operator = typing.Dict[BasisLabel, typing.Dict[BasisLabel, typing.Any]]


def b_action_top(omega: PolyForm, f: Polynomial, weights: typing.Sequence[Fraction],
                 bound: Fraction = None) -> PolyForm:
    """
    b[omega] = [df ^ xi] with xi = iota_E(omega)/weight on each graded piece, so d(xi) = omega
    """
    if omega.degree != omega.nvars:
        raise ValueError("b acts on top-degree forms")
    if omega.is_zero():
        return omega
    return wedge_df(graded_primitive(omega, weights), f, weights, bound)


def brieskorn_quotient(f: Polynomial, system: WeightSystem, window: Fraction, mapper: Mapper = map) -> WindowedQuotient:
    """Omega^{n+1} / (df ^ d Omega^{n-1} + forms of weight >= window)"""
    weights = system.weights
    n = f.nvars
    sources = forms_below(n - 2, window - 1, weights)

    def row_of(key: FormKey):
        return wedge_df(d_rel(basis_form(key, n, f.ring, f.names)), f, weights, window).terms

    return build_quotient(top_columns(weights, window), sources, row_of,
                          lambda key: form_weight(key, weights) + 1,
                          weights, system.quasi_homogeneous, f.ring, mapper)


def _apply(operator: Operator, vector: typing.Dict[BasisLabel, typing.Any], ring) -> typing.Dict[BasisLabel, typing.Any]:
    result = {}
    for label, c in vector.items():
        for target, q in operator[label].items():
            value = result.get(target, ring.zero()) + c * q
            if ring.is_zero(value):
                result.pop(target, None)
            else:
                result[target] = value
    return result


def compose(first: Operator, second: Operator, ring) -> Operator:
    """second after first"""
    return {label: _apply(second, image, ring) for label, image in first.items()}


def operators_equal(left: Operator, right: Operator, ring) -> bool:
    for label in set(left) | set(right):
        difference = dict(left.get(label, {}))
        for target, q in right.get(label, {}).items():
            difference[target] = difference.get(target, ring.zero()) - q
        if any(not ring.is_zero(c) for c in difference.values()):
            return False
    return True


def commutator_relation_holds(a_op: Operator, b_op: Operator, ring) -> bool:
    """a.b - b.a == b^2 as operators"""
    ab = compose(b_op, a_op, ring)
    ba = compose(a_op, b_op, ring)
    bb = compose(b_op, b_op, ring)
    difference = {label: dict(image) for label, image in ab.items()}
    for label, image in ba.items():
        for target, q in image.items():
            difference[label][target] = difference[label].get(target, ring.zero()) - q
    return operators_equal(difference, bb, ring)


class BrieskornResult:
    """
    The Brieskorn lattice cut at the weight window: the quotient Q, its basis b^k.omega_j,
    the operators of a and b on Q, and the (a,b)-module they assemble into.
    """

    def __init__(self, f: Polynomial, milnor: MilnorData, quotient: WindowedQuotient, basis: typing.List[BasisLabel],
                 forms: typing.Dict[BasisLabel, PolyForm], a_operator: Operator, b_operator: Operator,
                 module: ABModule, requested_b_order: int, stamp: str):
        self.f = f
        self.milnor = milnor
        self.quotient = quotient
        self.basis = basis
        self.forms = forms
        self.a_operator = a_operator
        self.b_operator = b_operator
        self.module = module
        self.requested_b_order = requested_b_order
        self.stamp = stamp
        self._spectral_data = None

    @property
    def weights(self) -> WeightSystem:
        return self.milnor.weights

    @property
    def ring(self):
        return self.f.ring

    @property
    def mu(self) -> int:
        return self.milnor.mu

    @property
    def b_order(self) -> int:
        return self.module.b_truncation

    @property
    def weight_spectrum(self) -> typing.List[Fraction]:
        return sorted(self.milnor.sigmas())

    def b_matrix(self) -> typing.List[typing.List[TruncatedSeries]]:
        T = self.b_order
        return [[TruncatedSeries.monomial(self.ring.one(), 1, T, self.ring) if i == j
                 else TruncatedSeries.zero(T, self.ring)
                 for j in range(self.mu)] for i in range(self.mu)]

    def coker_b_dimension(self) -> int:
        """dim Q/bQ, read from the operator b on Q"""
        labels = list(self.basis)
        image = echelon([v for v in self.b_operator.values() if v], labels, self.ring)
        return len(labels) - image.rank

    def b_kernel_dimension(self, reliable: bool = True) -> int:
        """Kernel of b on the basis elements whose image still lies in the window."""
        labels = [label for label in self.basis if not reliable or self.in_window(label, 1)]
        rows = {}
        for label in labels:
            for target, q in self.b_operator[label].items():
                rows.setdefault(target, {})[label] = q
        return len(labels) - echelon(list(rows.values()), labels, self.ring).rank

    def in_window(self, label: BasisLabel, raise_by: int) -> bool:
        j, k = label
        return self.weights.sigma(self.milnor.standard_monomials[j]) + k + raise_by < self.milnor.window

    def relation_holds(self) -> bool:
        return commutator_relation_holds(self.a_operator, self.b_operator, self.ring)

    def diagonal_weights_hold(self) -> bool:
        """a = sigma(m).b on every omega_j (quasi-homogeneous f)"""
        ring = self.ring
        sigmas = self.milnor.sigmas()
        for j in range(self.mu):
            for i in range(self.mu):
                expected = TruncatedSeries.monomial(ring.coerce(sigmas[j]), 1, self.b_order, ring) if i == j \
                    else TruncatedSeries.zero(self.b_order, ring)
                if self.module.a_matrix[i][j] != expected:
                    return False
        return True

    def spectral_data(self, max_steps: int = None) -> SpectralData:
        if self.ring != RATIONALS:
            raise ValueError("specialize the family before asking for its spectrum")
        if self._spectral_data is None:
            self._spectral_data = spectrum(self.module, max_steps)
        return self._spectral_data

    def specialize(self, point: typing.Sequence) -> ABModule:
        T = self.b_order
        matrix = [[entry.map_coefficients(lambda c: self.ring.specialize(c, point), RATIONALS) for entry in row]
                  for row in self.module.a_matrix]
        return ABModule(matrix, T, RATIONALS)

    def to_json(self) -> typing.Dict:
        names = self.f.names
        return {
            "polynomial": self.f.render(),
            "mu": str(self.mu),
            "rank": str(self.module.rank),
            "b_order": str(self.b_order),
            "requested_b_order": str(self.requested_b_order),
            "stamp": self.stamp,
            "basis": [f"{render_monomial(m, names) or '1'}*{'^'.join('d' + v for v in names)}"
                      for m in self.milnor.standard_monomials],
            "weight_spectrum": [str(value) for value in self.weight_spectrum],
            "a_matrix": self.module.to_json()["a_matrix"],
            "b_matrix": [[entry.render() for entry in row] for row in self.b_matrix()],
            "quotient_dimension": str(self.quotient.dimension),
            "coker_b_dimension": str(self.coker_b_dimension()),
            "b_kernel_dimension": str(self.b_kernel_dimension()),
            "relation_holds": self.relation_holds(),
            "weights": self.weights.to_json(),
        }


def _effective_b_order(milnor: MilnorData, requested: int) -> int:
    counts = []
    for sigma in milnor.sigmas():
        k = 0
        while sigma + k < milnor.window:
            k += 1
        counts.append(k)
    return min([requested] + counts)


def _inverse_coordinates(quotient: WindowedQuotient, vectors: typing.Dict[BasisLabel, typing.Dict], ring):
    """
    Coordinates of every standard column in the candidate basis, or None when the candidates
    are not a basis of the quotient.
    """
    if len(vectors) != quotient.dimension:
        return None
    tags = [("basis", label) for label in vectors]
    rows = []
    for label, vector in vectors.items():
        row = dict(vector)
        row[("basis", label)] = ring.one()
        rows.append(row)
    form = echelon(rows, list(quotient.standard) + tags, ring)
    if any(column not in form.pivot_rows for column in quotient.standard):
        return None
    return {
        column: {tag[1]: q for tag, q in form.pivot_rows[column].items() if isinstance(tag, tuple) and tag[:1] == ("basis",)}
        for column in quotient.standard
    }


def brieskorn_module(f: Polynomial, max_degree: int, b_order: int, weights: typing.Sequence = None,
                     mapper: Mapper = map) -> BrieskornResult:
    """
    a (multiplication by f) and b on the Brieskorn lattice, cut at the weight window
    :param f: polynomial over the rationals or a parameter ring
    :param max_degree: D
    :param b_order: requested b-order J of the assembled module
    :param weights: explicit weights, detected when omitted
    :param mapper: map-like callable for the graded pieces
    :return: BrieskornResult
    """
    system = detect_weights(f, weights)
    milnor = milnor_number(f, max_degree, mapper=mapper, system=system)
    window = milnor.window
    J = _effective_b_order(milnor, b_order)
    if J < 2:
        raise TruncationInsufficientError(f"only b-order {J} fits below degree {max_degree}; raise the degree")
    ring = f.ring
    n = f.nvars
    quotient = brieskorn_quotient(f, system, window, mapper)

    forms: typing.Dict[BasisLabel, PolyForm] = {}
    for j, exponent in enumerate(milnor.standard_monomials):
        current = basis_form((exponent, tuple(range(n))), n, ring, f.names)
        k = 0
        while system.sigma(exponent) + k < window:
            forms[(j, k)] = current
            current = b_action_top(current, f, system.weights, window)
            k += 1
    basis = sorted(forms, key=lambda label: (label[1], label[0]))
    vectors = {label: quotient.reduce_form(forms[label]) for label in basis}
    inverse = _inverse_coordinates(quotient, vectors, ring)
    if inverse is None:
        logger.error(f"{len(basis)} candidates for a quotient of dimension {quotient.dimension}")
        raise TruncationInsufficientError(
            f"the b-saturated monomial basis does not stabilize at degree {max_degree}"
        )

    def coordinates(omega: PolyForm) -> typing.Dict[BasisLabel, typing.Any]:
        result = {}
        for column, c in quotient.reduce_form(omega).items():
            for label, q in inverse[column].items():
                value = result.get(label, ring.zero()) + c * q
                if ring.is_zero(value):
                    result.pop(label, None)
                else:
                    result[label] = value
        return result

    a_operator = {label: coordinates(forms[label].mul_polynomial(f).truncate(system.weights, window)) for label in basis}
    b_operator = {label: coordinates(b_action_top(forms[label], f, system.weights, window)) for label in basis}

    matrix = [[TruncatedSeries([a_operator[(j, 0)].get((i, k), ring.zero()) for k in range(J)], J, ring)
               for j in range(milnor.mu)] for i in range(milnor.mu)]
    module = ABModule(matrix, J, ring)
    stamp = _stamp(f, system, milnor, max_degree, mapper)
    logger.info(f"Brieskorn lattice of {f.render()}: rank {milnor.mu}, b-order {J}, {stamp}")
    return BrieskornResult(f, milnor, quotient, basis, forms, a_operator, b_operator, module, b_order, stamp)


def _stamp(f: Polynomial, system: WeightSystem, milnor: MilnorData, max_degree: int, mapper: Mapper) -> str:
    if system.quasi_homogeneous:
        return EXACT
    if system.kind == SEMI_QUASI_HOMOGENEOUS:
        try:
            principal = milnor_number(system.principal_part, max_degree, system.weights, mapper)
        except NonIsolatedSingularityError:
            return AT_CUTOFF
        if principal.mu == milnor.mu:
            return EXACT
    return AT_CUTOFF
