import typing
import logging
import itertools
from fractions import Fraction
from abkit.services.scalars.scalar_rings import RATIONALS, render_terms, render_monomial
from abkit.services.series.truncated_series import scalar_term
from abkit.services.derham.polynomial import Polynomial, Exponent, monomial_weight, monomials_below, variable_names
from abkit.utils.errors import ScalarRingMismatchError, ArityMismatchError

logger = logging.getLogger(__name__)

Index = typing.Tuple[int, ...]
FormKey = typing.Tuple[Exponent, Index]


def insert_index(i: int, index: Index) -> typing.Optional[typing.Tuple[int, Index]]:
    """
    dx_i ^ dx_I = sign * dx_J with J = I + {i} sorted; None when i is already in I
    """
    if i in index:
        return None
    position = sum(1 for j in index if j < i)
    sign = -1 if position % 2 else 1
    return sign, index[:position] + (i,) + index[position:]


def form_weight(key: FormKey, weights: typing.Sequence[Fraction]) -> Fraction:
    exponent, index = key
    return monomial_weight(exponent, weights) + sum((Fraction(weights[i]) for i in index), Fraction(0))


class PolyForm:
    """
    Differential p-form sum g_I(x).dx_I with I strictly increasing. d never touches the
    parameters, which live inside the scalar ring.
    """
    __slots__ = ("terms", "degree", "nvars", "ring", "names")

    def __init__(self, terms: typing.Dict[FormKey, typing.Any], degree: int, nvars: int, ring=RATIONALS,
                 names: typing.Sequence[str] = None):
        if not 0 <= degree <= nvars:
            raise ValueError(f"form degree {degree} outside [0, {nvars}]")
        canonical = {}
        for (exponent, index), c in terms.items():
            exponent, index = tuple(exponent), tuple(index)
            if len(exponent) != nvars:
                raise ArityMismatchError(f"exponent {exponent} does not match {nvars} variables")
            if len(index) != degree or list(index) != sorted(set(index)):
                raise ValueError(f"index {index} is not a strictly increasing {degree}-tuple")
            c = ring.coerce(c)
            if not ring.is_zero(c):
                key = (exponent, index)
                canonical[key] = canonical[key] + c if key in canonical else c
        self.terms = {key: c for key, c in canonical.items() if not ring.is_zero(c)}
        self.degree = degree
        self.nvars = nvars
        self.ring = ring
        self.names = tuple(names) if names is not None else variable_names(nvars)

    @classmethod
    def zero(cls, degree: int, nvars: int, ring=RATIONALS, names=None) -> "PolyForm":
        return cls({}, degree, nvars, ring, names)

    @classmethod
    def from_polynomial(cls, g: Polynomial, index: Index = ()) -> "PolyForm":
        return cls({(e, tuple(index)): c for e, c in g.terms.items()}, len(index), g.nvars, g.ring, g.names)

    @classmethod
    def volume(cls, nvars: int, ring=RATIONALS, names=None) -> "PolyForm":
        return cls({((0,) * nvars, tuple(range(nvars))): ring.one()}, nvars, nvars, ring, names)

    def like(self, terms: typing.Dict[FormKey, typing.Any], degree: int = None) -> "PolyForm":
        return PolyForm(terms, self.degree if degree is None else degree, self.nvars, self.ring, self.names)

    def _check(self, other: "PolyForm"):
        if other.ring != self.ring:
            raise ScalarRingMismatchError(f"{other.ring!r} does not match {self.ring!r}")
        if (other.degree, other.nvars) != (self.degree, self.nvars):
            raise ValueError(f"cannot add a {other.degree}-form to a {self.degree}-form")

    def is_zero(self) -> bool:
        return not self.terms

    def __add__(self, other: "PolyForm") -> "PolyForm":
        self._check(other)
        result = dict(self.terms)
        for key, c in other.terms.items():
            result[key] = result[key] + c if key in result else c
        return self.like(result)

    def __neg__(self):
        return self.like({key: -c for key, c in self.terms.items()})

    def __sub__(self, other: "PolyForm") -> "PolyForm":
        return self + (-other)

    def scale(self, value) -> "PolyForm":
        return self.like({key: c * value for key, c in self.terms.items()})

    def mul_polynomial(self, g: Polynomial) -> "PolyForm":
        result = {}
        for (exponent, index), c in self.terms.items():
            for e, q in g.terms.items():
                key = (tuple(p + r for p, r in zip(exponent, e)), index)
                value = c * q
                result[key] = result[key] + value if key in result else value
        return self.like(result)

    def truncate(self, weights: typing.Sequence[Fraction], bound: Fraction) -> "PolyForm":
        """Drop every term of weight >= bound."""
        return self.like({key: c for key, c in self.terms.items() if form_weight(key, weights) < bound})

    def weights_present(self, weights: typing.Sequence[Fraction]) -> typing.List[Fraction]:
        return sorted({form_weight(key, weights) for key in self.terms})

    def homogeneous_part(self, weights: typing.Sequence[Fraction], weight: Fraction) -> "PolyForm":
        return self.like({key: c for key, c in self.terms.items() if form_weight(key, weights) == weight})

    def __eq__(self, other):
        if not isinstance(other, PolyForm):
            return NotImplemented
        return (self.degree, self.nvars, self.ring, self.terms) == (other.degree, other.nvars, other.ring, other.terms)

    def __hash__(self):
        return hash((self.degree, self.nvars, frozenset(self.terms.items())))

    def render(self) -> str:
        pieces = []
        for (exponent, index), c in sorted(self.terms.items(), key=lambda item: (item[0][1], item[0][0])):
            factors = [f for f in (render_monomial(exponent, self.names),
                                   "^".join(f"d{self.names[i]}" for i in index)) if f]
            pieces.append(scalar_term(c, "*".join(factors)))
        return render_terms(pieces)

    def __repr__(self):
        return f"PolyForm({self.render()})"


def _wedge_dx(i: int, g_terms: typing.Iterable[typing.Tuple[Exponent, typing.Any]], index: Index,
              result: typing.Dict[FormKey, typing.Any]):
    inserted = insert_index(i, index)
    if inserted is None:
        return
    sign, target = inserted
    for exponent, c in g_terms:
        key = (exponent, target)
        value = c if sign > 0 else -c
        result[key] = result[key] + value if key in result else value


def wedge_df(omega: PolyForm, f: Polynomial, weights: typing.Sequence[Fraction] = None,
             bound: Fraction = None) -> PolyForm:
    """
    df ^ omega, terms of weight >= bound dropped when a bound is given
    """
    if omega.degree >= omega.nvars:
        raise ValueError("df ^ omega is only defined below top degree")
    if f.ring != omega.ring:
        raise ScalarRingMismatchError(f"{f.ring!r} does not match {omega.ring!r}")
    result: typing.Dict[FormKey, typing.Any] = {}
    for i, partial in enumerate(f.gradient()):
        if partial.is_zero():
            continue
        for (exponent, index), c in omega.terms.items():
            products = [(tuple(p + q for p, q in zip(exponent, e)), c * v) for e, v in partial.terms.items()]
            _wedge_dx(i, products, index, result)
    form = omega.like(result, omega.degree + 1)
    if bound is not None:
        form = form.truncate(weights, bound)
    return form


def d_rel(omega: PolyForm) -> PolyForm:
    """Exterior derivative in the x-variables; parameters are constants."""
    if omega.degree >= omega.nvars:
        raise ValueError("d is only defined below top degree")
    result: typing.Dict[FormKey, typing.Any] = {}
    for (exponent, index), c in omega.terms.items():
        for i in range(omega.nvars):
            power = exponent[i]
            if not power:
                continue
            lowered = exponent[:i] + (power - 1,) + exponent[i + 1:]
            _wedge_dx(i, [(lowered, c * power)], index, result)
    return omega.like(result, omega.degree + 1)


def euler_contract(omega: PolyForm, weights: typing.Sequence[Fraction]) -> PolyForm:
    """
    Interior product with E = sum w_i x_i d/dx_i
    """
    if omega.degree == 0:
        raise ValueError("cannot contract a 0-form")
    result: typing.Dict[FormKey, typing.Any] = {}
    for (exponent, index), c in omega.terms.items():
        for position, i in enumerate(index):
            raised = exponent[:i] + (exponent[i] + 1,) + exponent[i + 1:]
            key = (raised, index[:position] + index[position + 1:])
            value = c * Fraction(weights[i])
            if position % 2:
                value = -value
            result[key] = result[key] + value if key in result else value
    return omega.like(result, omega.degree - 1)


def graded_primitive(omega: PolyForm, weights: typing.Sequence[Fraction]) -> PolyForm:
    """
    xi with d(xi) = omega for a closed form of positive degree: iota_E(omega_w)/w on each
    weighted-homogeneous part.
    """
    primitive = PolyForm.zero(omega.degree - 1, omega.nvars, omega.ring, omega.names)
    for weight in omega.weights_present(weights):
        if weight <= 0:
            raise ValueError("closed forms of weight 0 have no graded primitive")
        part = omega.homogeneous_part(weights, weight)
        primitive = primitive + euler_contract(part, weights).scale(Fraction(1) / weight)
    return primitive


def forms_of_weight(degree: int, weight: Fraction, weights: typing.Sequence[Fraction],
                    monomials: typing.Dict[Fraction, typing.List[Exponent]]) -> typing.List[FormKey]:
    """
    Monomial p-forms of exact weight, given the monomials grouped by weight
    """
    keys = []
    for index in itertools.combinations(range(len(weights)), degree):
        rest = weight - sum((Fraction(weights[i]) for i in index), Fraction(0))
        for exponent in monomials.get(rest, ()):
            keys.append((exponent, index))
    return sorted(keys, key=lambda key: (key[1], key[0]))


def forms_below(degree: int, bound: Fraction, weights: typing.Sequence[Fraction]) -> typing.List[FormKey]:
    """
    Monomial p-forms of weight < bound, ascending weight
    """
    keys = []
    for index in itertools.combinations(range(len(weights)), degree):
        shift = sum((Fraction(weights[i]) for i in index), Fraction(0))
        for exponent in monomials_below(weights, bound - shift):
            keys.append((exponent, index))
    return sorted(keys, key=lambda key: (form_weight(key, weights), key[1], key[0]))


def group_monomials(weights: typing.Sequence[Fraction], bound: Fraction) -> typing.Dict[Fraction, typing.List[Exponent]]:
    grouped: typing.Dict[Fraction, typing.List[Exponent]] = {}
    for exponent in monomials_below(weights, bound):
        grouped.setdefault(monomial_weight(exponent, weights), []).append(exponent)
    return grouped


def basis_form(key: FormKey, nvars: int, ring=RATIONALS, names=None) -> PolyForm:
    return PolyForm({key: ring.one()}, len(key[1]), nvars, ring, names)
