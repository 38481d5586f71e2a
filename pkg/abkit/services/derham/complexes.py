import typing
import logging
import itertools
from fractions import Fraction
from abkit.services.scalars.scalar_rings import RATIONALS
from abkit.services.linalg.exact_linalg import echelon, kernel_of_map
from abkit.services.derham.polynomial import Polynomial
from abkit.services.derham.forms import (
    PolyForm,
    FormKey,
    form_weight,
    forms_of_weight,
    group_monomials,
    basis_form,
    wedge_df,
    d_rel,
    graded_primitive,
)
from abkit.services.derham.weights import WeightSystem, detect_weights
from abkit.services.derham.graded import Mapper
from abkit.services.derham.milnor import MilnorData, milnor_number
from abkit.utils.errors import TruncationInsufficientError

logger = logging.getLogger(__name__)

EXACT = "exact"
AT_CUTOFF = "at-cutoff"

Vector = typing.Dict[typing.Hashable, typing.Any]
ChainKey = typing.Tuple[int, FormKey]


def _combine(vector: Vector, images: typing.Dict[typing.Hashable, Vector]) -> Vector:
    result = {}
    for key, c in vector.items():
        for target, q in images[key].items():
            result[target] = result.get(target, 0) + c * q
    return {key: q for key, q in result.items() if q}


def _span(vectors: typing.Iterable[Vector], columns: typing.Sequence):
    return echelon([v for v in vectors if v], columns)


class BChainElement:
    """
    sum_j b^j.omega_j with forms of one degree; lies in the b-complex when df ^ omega_0 = 0
    """

    def __init__(self, components: typing.Sequence[PolyForm]):
        if not components:
            raise ValueError("a chain needs at least one component")
        degrees = {omega.degree for omega in components}
        if len(degrees) != 1:
            raise ValueError(f"chain components have degrees {sorted(degrees)}")
        self.components = list(components)
        self.degree = components[0].degree

    @classmethod
    def bottom(cls, omega: PolyForm) -> "BChainElement":
        return cls([omega])

    def component(self, j: int) -> PolyForm:
        first = self.components[0]
        if j < len(self.components):
            return self.components[j]
        return PolyForm.zero(self.degree, first.nvars, first.ring, first.names)

    def satisfies_constraint(self, f: Polynomial) -> bool:
        if self.degree == f.nvars:
            return True
        return wedge_df(self.components[0], f).is_zero()

    def shift(self) -> "BChainElement":
        """b.X"""
        return BChainElement([PolyForm.zero(self.degree, self.components[0].nvars, self.components[0].ring,
                                            self.components[0].names)] + self.components)

    def to_vector(self) -> Vector:
        return {(j, key): c for j, omega in enumerate(self.components) for key, c in omega.terms.items()}

    @classmethod
    def from_vector(cls, vector: Vector, degree: int, nvars: int, ring=RATIONALS, names=None) -> "BChainElement":
        length = max((j for j, _ in vector), default=0) + 1
        terms: typing.List[typing.Dict] = [{} for _ in range(length)]
        for (j, key), c in vector.items():
            terms[j][key] = c
        return cls([PolyForm(t, degree, nvars, ring, names) for t in terms])

    def __repr__(self):
        return f"BChainElement({[omega.render() for omega in self.components]})"


def D(chain: BChainElement, f: Polynomial) -> BChainElement:
    """(D X)_j = d(x_j) - df ^ x_{j+1}"""
    first = chain.components[0]
    if chain.degree >= first.nvars:
        raise ValueError("D is only defined below top degree")
    result = []
    for j in range(len(chain.components)):
        term = d_rel(chain.components[j])
        if j + 1 < len(chain.components):
            term = term - wedge_df(chain.components[j + 1], f)
        result.append(term)
    return BChainElement(result)


class ComplexPiece:
    """
    One weighted-graded piece: monomial forms of every degree, K^p = ker(df ^), I^p = df ^ Omega^{p-1}.
    """

    def __init__(self, weight: Fraction, f: Polynomial, weights: typing.Sequence[Fraction],
                 monomials: typing.Dict[Fraction, typing.List]):
        self.weight = weight
        self.f = f
        self.weights = tuple(weights)
        self.monomials = monomials
        n = f.nvars
        self.forms = {p: forms_of_weight(p, weight, self.weights, monomials) for p in range(n + 1)}
        self.K: typing.Dict[int, typing.List[Vector]] = {}
        self.I: typing.Dict[int, typing.List[Vector]] = {}
        for p in range(n + 1):
            if p == n:
                self.K[p] = [{key: 1} for key in self.forms[p]]
            else:
                images = {key: self._df(key) for key in self.forms[p]}
                self.K[p] = kernel_of_map(images, self.forms[p])
            lower = forms_of_weight(p - 1, weight - 1, self.weights, monomials) if p >= 1 else []
            self.I[p] = list(_span([self._df(key) for key in lower], self.forms[p]).pivot_rows.values())

    def _df(self, key: FormKey) -> Vector:
        return wedge_df(basis_form(key, self.f.nvars, self.f.ring, self.f.names), self.f).terms

    def _d(self, key: FormKey) -> Vector:
        return d_rel(basis_form(key, self.f.nvars, self.f.ring, self.f.names)).terms

    def dimensions(self, p: int) -> typing.Dict[str, int]:
        k, i = len(self.K[p]), len(self.I[p])
        return {"K": k, "I": i, "quotient": k - i}

    def d_on(self, vectors: typing.List[Vector]) -> typing.List[Vector]:
        images = {}
        result = []
        for vector in vectors:
            for key in vector:
                if key not in images:
                    images[key] = self._d(key)
            result.append(_combine(vector, images))
        return result

    def closed_K(self, p: int) -> typing.List[Vector]:
        """K^p intersected with ker d"""
        basis = self.K[p]
        if p == self.f.nvars:
            return basis
        images = dict(enumerate(self.d_on(basis)))
        kernel = kernel_of_map(images, list(range(len(basis))))
        return [_combine(combination, dict(enumerate(basis))) for combination in kernel]

    def K_cohomology(self, p: int) -> typing.Tuple[typing.List[Vector], typing.List[Vector]]:
        """(cycles, boundaries) of (K, d) in degree p"""
        cycles = self.closed_K(p)
        boundaries = self.d_on(self.K[p - 1]) if p >= 1 else []
        return cycles, [b for b in boundaries if b]


class TruncatedComplex:
    """
    (K, d), I and K/I in every degree, one graded piece per weight below the window
    """

    def __init__(self, f: Polynomial, system: WeightSystem, milnor: MilnorData, window: Fraction,
                 pieces: typing.Dict[Fraction, ComplexPiece], b_order: int, stamp: str):
        self.f = f
        self.system = system
        self.milnor = milnor
        self.window = window
        self.pieces = pieces
        self.b_order = b_order
        self.stamp = stamp
        self.monomials = group_monomials(system.weights, window + 1)

    @property
    def weights(self) -> typing.Tuple[Fraction, ...]:
        return self.system.weights

    @property
    def top(self) -> int:
        return self.f.nvars

    def dimensions(self) -> typing.Dict[int, typing.Dict[str, int]]:
        totals = {p: {"K": 0, "I": 0, "quotient": 0} for p in range(self.top + 1)}
        for piece in self.pieces.values():
            for p in range(self.top + 1):
                for name, value in piece.dimensions(p).items():
                    totals[p][name] += value
        return totals

    def forms_at(self, degree: int, weight: Fraction) -> typing.List[FormKey]:
        if degree < 0 or weight < 0:
            return []
        return forms_of_weight(degree, weight, self.weights, self.monomials)

    def chain_columns(self, degree: int, weight: Fraction) -> typing.List[ChainKey]:
        columns = []
        j = 0
        while weight - j >= 0:
            columns.extend((j, key) for key in self.forms_at(degree, weight - j))
            j += 1
        return columns

    def chain_length(self, degree: int, weight: Fraction) -> int:
        return max((j + 1 for j, _ in self.chain_columns(degree, weight)), default=0)

    def is_clean(self, degree: int, weight: Fraction) -> bool:
        """Chains of this piece fit in the b-order without truncation."""
        degrees = [q for q in (degree - 1, degree, degree + 1) if 0 <= q <= self.top]
        return all(self.chain_length(q, weight) <= self.b_order for q in degrees)

    def to_json(self) -> typing.Dict:
        return {
            "polynomial": self.f.render(),
            "mu": str(self.milnor.mu),
            "stamp": self.stamp,
            "window": str(self.window),
            "pieces": str(len(self.pieces)),
            "dimensions": {str(p): {name: str(v) for name, v in dims.items()} for p, dims in self.dimensions().items()},
        }


def build_complex(f: Polynomial, max_degree: int, b_order: int, weights: typing.Sequence = None,
                  mapper: Mapper = map) -> TruncatedComplex:
    """
    Graded pieces of K, I and K/I for every weight tau with tau + 1 below the window
    :param f: polynomial with an isolated critical point at the origin
    :param max_degree: D
    :param b_order: J, bound on the length of b-chains
    :param weights: explicit weights, detected when omitted
    :param mapper: map-like callable over the pieces
    :return: TruncatedComplex, stamped exact for quasi-homogeneous f
    """
    system = detect_weights(f, weights)
    milnor = milnor_number(f, max_degree, mapper=mapper, system=system)
    window = milnor.window
    if not system.quasi_homogeneous:
        logger.warning(f"{f.render()} is not quasi-homogeneous; graded pieces use its principal part weights")
    if f.ring != RATIONALS:
        raise TruncationInsufficientError("the graded complex is built over the rationals; specialize first")
    monomials = group_monomials(system.weights, window)
    piece_weights = sorted({
        weight + sum((system.weights[i] for i in index), Fraction(0))
        for weight in monomials
        for p in range(f.nvars + 1)
        for index in itertools.combinations(range(f.nvars), p)
    })
    piece_weights = [w for w in piece_weights if w < window - 1]
    graded_f = f if system.quasi_homogeneous else system.principal_part

    def build(weight):
        return weight, ComplexPiece(weight, graded_f, system.weights, monomials)

    pieces = dict(mapper(build, piece_weights))
    stamp = EXACT if system.quasi_homogeneous else AT_CUTOFF
    logger.info(f"complex of {f.render()}: {len(pieces)} graded pieces below weight {window - 1}")
    return TruncatedComplex(f, system, milnor, window, pieces, b_order, stamp)


def _require_graded(complex_: TruncatedComplex):
    if not complex_.system.quasi_homogeneous:
        raise TruncationInsufficientError("graded checks need quasi-homogeneous weights")


def chain_D_images(complex_: TruncatedComplex, degree: int, weight: Fraction) -> typing.Dict[ChainKey, Vector]:
    f = complex_.f
    n = f.nvars
    images = {}
    for j, key in complex_.chain_columns(degree, weight):
        form = basis_form(key, n, f.ring, f.names)
        image = {}
        if degree < n:
            image.update({(j, k): c for k, c in d_rel(form).terms.items()})
            if j >= 1:
                for k, c in wedge_df(form, f).terms.items():
                    image[(j - 1, k)] = image.get((j - 1, k), 0) - c
        images[(j, key)] = {k: c for k, c in image.items() if c}
    return images


def constrained_chains(complex_: TruncatedComplex, degree: int, weight: Fraction) -> typing.List[Vector]:
    """Basis of the chains of this piece with df ^ x_0 = 0"""
    f = complex_.f
    columns = complex_.chain_columns(degree, weight)
    if degree >= f.nvars:
        return [{column: 1} for column in columns]
    images = {}
    for j, key in columns:
        if j == 0:
            images[(j, key)] = wedge_df(basis_form(key, f.nvars, f.ring, f.names), f).terms
        else:
            images[(j, key)] = {}
    return kernel_of_map(images, columns)


def chain_cohomology(complex_: TruncatedComplex, degree: int, weight: Fraction):
    """(cycles, boundaries, columns) of the b-complex in one degree and weight"""
    columns = complex_.chain_columns(degree, weight)
    domain = constrained_chains(complex_, degree, weight)
    if degree < complex_.top:
        images = chain_D_images(complex_, degree, weight)
        mapped = {t: _combine(v, images) for t, v in enumerate(domain)}
        kernel = kernel_of_map(mapped, list(range(len(domain))))
        cycles = [_combine(c, dict(enumerate(domain))) for c in kernel]
    else:
        cycles = domain
    boundaries = []
    if degree >= 1:
        lower_images = chain_D_images(complex_, degree - 1, weight)
        boundaries = [v for v in (_combine(u, lower_images) for u in constrained_chains(complex_, degree - 1, weight)) if v]
    return cycles, boundaries, columns


def reduce_to_bottom(complex_: TruncatedComplex, vector: Vector, degree: int) -> typing.Tuple[Vector, Vector]:
    """
    Subtract D(b^j.zeta) from the top component down, with d(zeta) = x_j, until only x_0 remains
    :return: (bottom chain, U) with X - D(U) = bottom and U_0 = 0
    """
    f = complex_.f
    n = f.nvars
    chain = BChainElement.from_vector(vector, degree, n, f.ring, f.names) if vector else None
    if chain is None:
        return {}, {}
    components = [omega for omega in chain.components]
    u_terms: Vector = {}
    for j in range(len(components) - 1, 0, -1):
        x_j = components[j]
        if x_j.is_zero():
            continue
        zeta = graded_primitive(x_j, complex_.weights)
        for key, c in zeta.terms.items():
            u_terms[(j, key)] = c
        components[j] = PolyForm.zero(degree, n, f.ring, f.names)
        components[j - 1] = components[j - 1] + wedge_df(zeta, f)
    bottom = {(0, key): c for key, c in components[0].terms.items()}
    return bottom, u_terms


def _D_of(complex_: TruncatedComplex, vector: Vector, degree: int) -> Vector:
    if not vector:
        return {}
    f = complex_.f
    chain = BChainElement.from_vector(vector, degree, f.nvars, f.ring, f.names)
    return D(chain, f).to_vector()


class PieceReport(typing.NamedTuple):
    weight: Fraction
    K_dimension: int
    chain_dimension: int
    induced_rank: int
    eta_verified: bool

    @property
    def isomorphic(self) -> bool:
        return self.K_dimension == self.chain_dimension == self.induced_rank

    def to_json(self) -> typing.Dict:
        return {
            "weight": str(self.weight),
            "K_cohomology": str(self.K_dimension),
            "chain_cohomology": str(self.chain_dimension),
            "induced_rank": str(self.induced_rank),
            "isomorphic": self.isomorphic,
            "eta_verified": self.eta_verified,
        }


class QuasiIsoReport(typing.NamedTuple):
    degree: int
    pieces: typing.List[PieceReport]
    skipped: typing.List[Fraction]
    stamp: str

    @property
    def isomorphic(self) -> bool:
        return all(piece.isomorphic and piece.eta_verified for piece in self.pieces)

    def totals(self) -> typing.Tuple[int, int]:
        return (sum(piece.K_dimension for piece in self.pieces),
                sum(piece.chain_dimension for piece in self.pieces))

    def to_json(self) -> typing.Dict:
        k_total, chain_total = self.totals()
        return {
            "degree": str(self.degree),
            "isomorphic": self.isomorphic,
            "K_cohomology": str(k_total),
            "chain_cohomology": str(chain_total),
            "pieces": [piece.to_json() for piece in self.pieces],
            "skipped_weights": [str(w) for w in self.skipped],
            "stamp": self.stamp,
        }


def _piece_quasi_iso(complex_: TruncatedComplex, degree: int, weight: Fraction) -> PieceReport:
    piece = complex_.pieces[weight]
    k_cycles, k_boundaries = piece.K_cohomology(degree)
    form_columns = piece.forms[degree]
    k_dimension = len(k_cycles) - _span(k_boundaries, form_columns).rank

    cycles, boundaries, columns = chain_cohomology(complex_, degree, weight)
    boundary_form = _span(boundaries, columns)
    chain_dimension = len(cycles) - boundary_form.rank

    lifted = [{(0, key): c for key, c in z.items()} for z in k_cycles]
    induced_rank = _span(lifted + boundaries, columns).rank - boundary_form.rank

    verified = True
    for cycle in cycles:
        bottom, u = reduce_to_bottom(complex_, cycle, degree)
        difference = dict(cycle)
        for key, c in bottom.items():
            difference[key] = difference.get(key, 0) - c
        if u:
            for key, c in _D_of(complex_, u, degree - 1).items():
                difference[key] = difference.get(key, 0) - c
        bottom_form = PolyForm({key: c for (_, key), c in bottom.items()}, degree, complex_.f.nvars)
        closed = degree >= complex_.top or (d_rel(bottom_form).is_zero() and wedge_df(bottom_form, complex_.f).is_zero())
        if any(difference.values()) or not closed:
            verified = False
            logger.warning(f"bottom reduction failed at weight {weight}, degree {degree}")
            break
    return PieceReport(weight, k_dimension, chain_dimension, induced_rank, verified)


def quasi_iso_check(complex_: TruncatedComplex, degree: int, mapper: Mapper = map) -> QuasiIsoReport:
    """
    Compare H^p(K, d) with H^p of the b-complex through u0: x -> (x, 0, ...), piece by piece
    :param complex_: graded complex of a quasi-homogeneous polynomial
    :param degree: p in [0, n+1]
    :param mapper: map-like callable over the pieces
    :return: QuasiIsoReport; pieces whose chains exceed the b-order are skipped
    """
    _require_graded(complex_)
    if not 0 <= degree <= complex_.top:
        raise ValueError(f"degree {degree} outside [0, {complex_.top}]")
    clean = [w for w in sorted(complex_.pieces) if complex_.is_clean(degree, w)]
    skipped = [w for w in sorted(complex_.pieces) if w not in clean]
    reports = list(mapper(lambda w: _piece_quasi_iso(complex_, degree, w), clean))
    if skipped:
        logger.info(f"{len(skipped)} pieces exceed b-order {complex_.b_order} and were skipped")
    report = QuasiIsoReport(degree, reports, skipped, complex_.stamp)
    if not report.isomorphic:
        logger.warning(f"u0 is not an isomorphism in degree {degree} at this cutoff")
    return report


class ImageOfBResult(typing.NamedTuple):
    in_b_image: bool
    bottom_in_I_plus_dK: bool

    @property
    def agree(self) -> bool:
        return self.in_b_image == self.bottom_in_I_plus_dK


def _homogeneous_pieces(chain: BChainElement, weights: typing.Sequence[Fraction]) -> typing.Dict[Fraction, Vector]:
    pieces: typing.Dict[Fraction, Vector] = {}
    for j, omega in enumerate(chain.components):
        for key, c in omega.terms.items():
            pieces.setdefault(form_weight(key, weights) + j, {})[(j, key)] = c
    return pieces


def image_of_b_test(chain: BChainElement, complex_: TruncatedComplex) -> ImageOfBResult:
    """
    [X] in b.E^p versus x_0 in I^p + d K^{p-1}, both decided by exact membership, per weight
    :param chain: a D-closed chain of the b-complex
    :param complex_: graded complex that materializes the weights of the chain
    :return: both sides; the test passes when they agree
    """
    _require_graded(complex_)
    p = chain.degree
    lhs, rhs = True, True
    for weight, vector in sorted(_homogeneous_pieces(chain, complex_.weights).items()):
        if weight not in complex_.pieces or not complex_.is_clean(p, weight):
            raise TruncationInsufficientError(f"weight {weight} is outside the materialized window")
        columns = complex_.chain_columns(p, weight)
        lower_cycles, _, _ = chain_cohomology(complex_, p, weight - 1) if weight - 1 >= 0 else ([], [], [])
        shifted = [{(j + 1, key): c for (j, key), c in y.items()} for y in lower_cycles]
        _, boundaries, _ = chain_cohomology(complex_, p, weight)
        lhs = lhs and _span(shifted + boundaries, columns).contains(vector)

        piece = complex_.pieces[weight]
        bottom = {key: c for (j, key), c in vector.items() if j == 0}
        exact_part = piece.d_on(piece.K[p - 1]) if p >= 1 else []
        rhs = rhs and _span(piece.I[p] + exact_part, piece.forms[p]).contains(bottom)
    return ImageOfBResult(lhs, rhs)


def random_closed_chains(complex_: TruncatedComplex, degree: int, count: int, rng) -> typing.List[BChainElement]:
    """Random combinations of D-closed chains over the clean pieces, small integer coefficients."""
    f = complex_.f
    clean = [w for w in sorted(complex_.pieces) if complex_.is_clean(degree, w)]
    if not clean:
        raise TruncationInsufficientError(f"no clean piece in degree {degree}; raise the b-order")
    cycles_by_weight = {w: chain_cohomology(complex_, degree, w)[0] for w in clean}
    clean = [w for w in clean if cycles_by_weight[w]]
    chains = []
    while len(chains) < count and clean:
        weight = rng.choice(clean)
        vector = {}
        for cycle in cycles_by_weight[weight]:
            factor = rng.randint(-3, 3)
            for key, c in cycle.items():
                vector[key] = vector.get(key, 0) + factor * c
        vector = {key: c for key, c in vector.items() if c}
        if vector:
            chains.append(BChainElement.from_vector(vector, degree, f.nvars, f.ring, f.names))
    return chains


class DegreeOneReport(typing.NamedTuple):
    K_equals_I: bool
    closed_dimensions: typing.Dict[Fraction, int]

    @property
    def passed(self) -> bool:
        return self.K_equals_I and all(v <= 1 for v in self.closed_dimensions.values())

    def to_json(self) -> typing.Dict:
        return {
            "passed": self.passed,
            "K_equals_I": self.K_equals_I,
            "closed_dimensions": {str(w): str(v) for w, v in sorted(self.closed_dimensions.items())},
        }


def degree_one_check(complex_: TruncatedComplex) -> DegreeOneReport:
    """K^1 = I^1 = O.df, and the d-closed part of K^1 is at most a line in each weight"""
    _require_graded(complex_)
    equal = True
    closed = {}
    for weight, piece in sorted(complex_.pieces.items()):
        dims = piece.dimensions(1)
        if dims["K"] != dims["I"]:
            equal = False
        closed[weight] = len(piece.closed_K(1))
    return DegreeOneReport(equal, closed)
