import typing
import logging
from abkit.services.scalars.scalar_rings import RATIONALS, render_terms
from abkit.services.series.truncated_series import scalar_term
from abkit.services.ncab.ab_algebra import ABElement, nf_mul
from abkit.services.linalg.exact_linalg import echelon, kernel_of_map, EchelonForm
from abkit.utils.errors import TruncationInsufficientError

logger = logging.getLogger(__name__)

EXACT = "exact"
AT_CUTOFF = "at-cutoff"

# (generator, b-power, a-power, parameter monomial)
Monomial = typing.Tuple[int, int, int, typing.Tuple[int, ...]]


class FinitePresentation:
    """
    Left module over the polynomial algebra in a, b: free on `generators`, modulo the left
    submodule spanned by the relators. A relator is a list of ABElement, one per generator.
    """

    def __init__(self, generators: int, relations: typing.Sequence[typing.Sequence[ABElement]], ring=RATIONALS):
        if generators < 0:
            raise ValueError("number of generators must be non-negative")
        for relator in relations:
            if len(relator) != generators:
                raise ValueError(f"relator has {len(relator)} entries for {generators} generators")
            for entry in relator:
                if entry.ring != ring:
                    raise ValueError(f"relator entry over {entry.ring!r} in a presentation over {ring!r}")
        self.generators = generators
        self.relations = [list(relator) for relator in relations]
        self.ring = ring

    def relator_degree(self, relator: typing.Sequence[ABElement]) -> int:
        return max((j + k for entry in relator for (j, k) in entry.terms), default=0)

    def __repr__(self):
        rendered = [[entry.render() for entry in relator] for relator in self.relations]
        return f"FinitePresentation(generators={self.generators}, relations={rendered})"


def render_monomial_vector(vector: typing.Dict[Monomial, typing.Any], names: typing.Sequence[str] = ()) -> str:
    terms = []
    for (g, j, k, e), c in sorted(vector.items()):
        factors = []
        for name, power in zip(names, e):
            if power:
                factors.append(name if power == 1 else f"{name}^{power}")
        if j:
            factors.append("b" if j == 1 else f"b^{j}")
        if k:
            factors.append("a" if k == 1 else f"a^{k}")
        factors.append(f"g{g + 1}")
        terms.append(scalar_term(c, "*".join(factors)))
    return render_terms(terms)


class PresentedModule:
    """
    The presented module cut at total degree T, expanded to a vector space over Q: coordinates are
    monomials s^e.b^j.a^k.g with j + k < T.
    """

    def __init__(self, presentation: FinitePresentation, degree: int):
        if degree < 2:
            raise TruncationInsufficientError("presentation degree must be at least 2")
        self.presentation = presentation
        self.degree = degree
        self.ring = presentation.ring
        self.parameter_basis = self.ring.basis()
        self.monomials: typing.List[Monomial] = sorted(
            ((g, j, d - j, e)
             for g in range(presentation.generators)
             for d in range(degree)
             for j in range(d + 1)
             for e in self.parameter_basis),
            key=lambda m: (-(m[1] + m[2]), -sum(m[3]), m[0], m[1], m[3]),
        )
        self.relations_form = self._relations_form(degree)
        self.standard = [m for m in self.monomials if m not in self.relations_form.pivot_rows]
        self._lower_dimension = None

    def _expand(self, element: ABElement, generator: int, parameter: typing.Tuple[int, ...]) -> typing.Dict[Monomial, typing.Any]:
        ring = self.ring
        vector = {}
        for (j, k), c in element.terms.items():
            value = c
            if parameter and any(parameter):
                value = ring.coerce(c) * ring.element({parameter: 1})
            for e, q in ring.to_vector(value).items():
                key = (generator, j, k, e)
                vector[key] = vector.get(key, 0) + q
        return {key: q for key, q in vector.items() if q}

    def _relations_form(self, degree: int) -> EchelonForm:
        presentation = self.presentation
        rows = []
        for relator in presentation.relations:
            relator_degree = presentation.relator_degree(relator)
            for d in range(degree - relator_degree):
                for j in range(d + 1):
                    multiplier = ABElement.monomial(j, d - j, degree, degree, self.ring)
                    for e in self.parameter_basis:
                        row = {}
                        for g, entry in enumerate(relator):
                            if entry.is_zero():
                                continue
                            product = nf_mul(multiplier, ABElement(entry.terms, degree, degree, self.ring))
                            for key, q in self._expand(product, g, e).items():
                                row[key] = row.get(key, 0) + q
                        row = {key: q for key, q in row.items() if q}
                        if row:
                            rows.append(row)
        columns = [m for m in self.monomials if m[1] + m[2] < degree]
        logger.debug(f"presentation at degree {degree}: {len(rows)} relation rows, {len(columns)} monomials")
        return echelon(rows, columns)

    @property
    def dimension(self) -> int:
        return len(self.standard)

    def lower_dimension(self) -> int:
        if self._lower_dimension is None:
            self._lower_dimension = PresentedModule(self.presentation, self.degree - 1).dimension
        return self._lower_dimension

    @property
    def stamp(self) -> str:
        top = max((j + k for (_, j, k, _) in self.standard), default=-1)
        if self.lower_dimension() == self.dimension and top < self.degree - 1:
            return EXACT
        return AT_CUTOFF

    def reduce(self, vector: typing.Dict[Monomial, typing.Any]) -> typing.Dict[Monomial, typing.Any]:
        """Coordinates on the standard monomials."""
        return self.relations_form.reduce(vector)

    def apply(self, word: ABElement, monomial: Monomial) -> typing.Dict[Monomial, typing.Any]:
        """word * (s^e.b^j.a^k.g) reduced to standard coordinates"""
        g, j, k, e = monomial
        element = ABElement.monomial(j, k, self.degree, self.degree, self.ring)
        word = ABElement(word.terms, self.degree, self.degree, self.ring)
        return self.reduce(self._expand(nf_mul(word, element), g, e))

    def operator(self, letter: str, power: int = 1, domain: typing.Sequence[Monomial] = None) -> typing.Dict[Monomial, typing.Dict]:
        """Images of domain monomials under a^power or b^power."""
        domain = self.standard if domain is None else domain
        j, k = (0, power) if letter == "a" else (power, 0)
        word = ABElement.monomial(j, k, self.degree, self.degree, self.ring)
        return {m: self.apply(word, m) for m in domain}

    def reliable_domain(self, power: int) -> typing.List[Monomial]:
        return [m for m in self.standard if m[1] + m[2] + power < self.degree]


class TorsionResult(typing.NamedTuple):
    which: str
    power: int
    dimension: int
    basis: typing.List[typing.Dict[Monomial, typing.Any]]
    stamp: str
    module_dimension: int

    def to_json(self, names: typing.Sequence[str] = ()) -> typing.Dict:
        return {
            "which": self.which,
            "power": str(self.power),
            "dimension": str(self.dimension),
            "basis": [render_monomial_vector(v, names) for v in self.basis],
            "stamp": self.stamp,
            "module_dimension": str(self.module_dimension),
        }


def materialize(presentation: FinitePresentation, degree: int) -> PresentedModule:
    module = PresentedModule(presentation, degree)
    logger.info(f"presented module at degree {degree}: dimension {module.dimension}, {module.stamp}")
    return module


def _combine(basis_vector: typing.Dict[Monomial, typing.Any], images: typing.Dict[Monomial, typing.Dict]) -> typing.Dict:
    result = {}
    for m, c in basis_vector.items():
        for key, q in images[m].items():
            result[key] = result.get(key, 0) + c * q
    return {key: q for key, q in result.items() if q}


def operator_power(module: PresentedModule, letter: str, power: int) -> typing.Dict[Monomial, typing.Dict]:
    """x^power on the standard monomials, as an exact matrix when the module is exact."""
    if module.stamp == EXACT:
        step = module.operator(letter, 1)
        images = {m: {m: 1} for m in module.standard}
        for _ in range(power):
            images = {m: _combine(v, step) for m, v in images.items()}
        return images
    domain = module.reliable_domain(power)
    return module.operator(letter, power, domain)


def torsion(presentation: FinitePresentation, which: str, power: int, degree: int,
            module: PresentedModule = None) -> TorsionResult:
    """
    Ker(x^N) of the presented module, x in {a, b}
    :param presentation: the presentation
    :param which: "a" or "b"
    :param power: N
    :param degree: total-degree cutoff T of the free cover
    :param module: an already materialized module at that degree
    :return: TorsionResult stamped exact, or at-cutoff when the kernel is degree-bounded
    """
    if which not in ("a", "b"):
        raise ValueError(f"torsion is taken for a or b, not {which!r}")
    if power < 1:
        raise ValueError("power must be positive")
    module = module or materialize(presentation, degree)
    images = operator_power(module, which, power)
    domain = list(images)
    kernel = kernel_of_map(images, domain)
    stamp = module.stamp
    if stamp != EXACT:
        logger.warning(f"{which}-torsion of order {power} reported at cutoff degree {degree}")
    return TorsionResult(which, power, len(kernel), kernel, stamp, module.dimension)


def stable_part(module: PresentedModule, vectors: typing.List[typing.Dict]) -> typing.List[typing.Dict]:
    """
    Largest subspace of span(vectors) mapped into itself by a and b (exact modules only)
    """
    a_images = module.operator("a", 1)
    b_images = module.operator("b", 1)
    columns = list(module.standard)
    current = vectors
    while True:
        form = echelon(current, columns)
        basis = list(form.pivot_rows.values())
        if not basis:
            return []
        conditions = {}
        for t, v in enumerate(basis):
            residual = {}
            for tag, images in (("a", a_images), ("b", b_images)):
                for key, q in form.reduce(_combine(v, images)).items():
                    residual[(tag, key)] = q
            conditions[t] = residual
        kernel = kernel_of_map(conditions, list(range(len(basis))))
        if len(kernel) == len(basis):
            return basis
        current = []
        for combination in kernel:
            vector = {}
            for t, c in combination.items():
                for key, q in basis[t].items():
                    vector[key] = vector.get(key, 0) + c * q
            current.append({key: q for key, q in vector.items() if q})


def apply_operator(vector: typing.Dict, images: typing.Dict[Monomial, typing.Dict]) -> typing.Dict:
    return _combine(vector, images)


def span_contains_all(container: typing.List[typing.Dict], vectors: typing.List[typing.Dict],
                      columns: typing.Sequence) -> bool:
    form = echelon(container, columns)
    return all(form.contains(v) for v in vectors)


def nilpotency_index(vectors: typing.List[typing.Dict], images: typing.Dict[Monomial, typing.Dict],
                     limit: int) -> typing.Optional[int]:
    """Smallest n <= limit with x^n killing every vector, None when no such n exists."""
    current = [dict(v) for v in vectors]
    for n in range(limit + 1):
        if all(not v for v in current):
            return n
        current = [_combine(v, images) for v in current]
    return None
