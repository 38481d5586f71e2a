import typing
import random
import logging
import contextlib
from concurrent.futures import ThreadPoolExecutor
from abkit.core.config import Config
from abkit.core.computation_config import IMAGE_OF_B_CHAINS
from abkit.services.abmod.ab_module import is_geometric
from abkit.services.derham.polynomial import Polynomial
from abkit.services.derham.milnor import MilnorData, milnor_number
from abkit.services.derham.brieskorn import BrieskornResult, brieskorn_module
from abkit.services.derham.complexes import (
    TruncatedComplex,
    QuasiIsoReport,
    DegreeOneReport,
    build_complex,
    quasi_iso_check,
    image_of_b_test,
    random_closed_chains,
    degree_one_check,
)
from abkit.services.derham.properties import (
    NullstellensatzReport,
    TorsionPropertiesReport,
    nullstellensatz_exponents,
    torsion_properties_check,
)
from abkit.utils.errors import TruncationInsufficientError

logger = logging.getLogger(__name__)


class DerhamService:
    """
    Entry point for the de Rham side: Milnor numbers, graded complexes, Brieskorn lattices and
    the checks run on them. Graded pieces are spread over `max_workers` threads.
    """

    def __init__(self, max_workers: int = None, max_steps: int = None):
        self.max_workers = max_workers or Config.ABKIT_THREADS
        self.max_steps = max_steps or Config.DEFAULT_MAX_STEPS

    @contextlib.contextmanager
    def mapper(self):
        if self.max_workers == 1:
            yield map
            return
        with ThreadPoolExecutor(max_workers=self.max_workers) as executor:
            yield executor.map

    def milnor_number(self, f: Polynomial, max_degree: int = None, weights=None) -> MilnorData:
        with self.mapper() as mapper:
            return milnor_number(f, max_degree or Config.DEFAULT_MAX_DEGREE, weights, mapper)

    def brieskorn_module(self, f: Polynomial, max_degree: int = None, b_order: int = None,
                         weights=None) -> BrieskornResult:
        with self.mapper() as mapper:
            return brieskorn_module(f, max_degree or Config.DEFAULT_MAX_DEGREE,
                                    b_order or Config.DEFAULT_B_ORDER, weights, mapper)

    def build_complex(self, f: Polynomial, max_degree: int = None, b_order: int = None,
                      weights=None) -> TruncatedComplex:
        with self.mapper() as mapper:
            return build_complex(f, max_degree or Config.DEFAULT_MAX_DEGREE,
                                 b_order or Config.DEFAULT_B_ORDER, weights, mapper)

    def quasi_iso(self, complex_: TruncatedComplex, degrees: typing.Iterable[int] = None) -> typing.List[QuasiIsoReport]:
        degrees = [0, complex_.top] if degrees is None else list(degrees)
        with self.mapper() as mapper:
            return [quasi_iso_check(complex_, p, mapper) for p in degrees]

    def image_of_b_battery(self, complex_: TruncatedComplex, count: int = IMAGE_OF_B_CHAINS, degree: int = None,
                           seed: int = None) -> typing.Dict[str, typing.Any]:
        """
        Both sides of the image-of-b criterion on random closed chains and on chains of the
        forms b.Y and bottom-only basis monomials. Chains the truncation cannot decide are
        skipped; the battery only passes when at least `count` chains were decided.
        """
        degree = complex_.top if degree is None else degree
        rng = random.Random(Config.ABKIT_RANDOM_SEED if seed is None else seed)
        chains = random_closed_chains(complex_, degree, count, rng)
        shifted = [chain.shift() for chain in chains[:10]
                   if max(len(chain.components), 1) < complex_.b_order]
        outcomes = []
        skipped = 0
        for chain in chains + shifted:
            try:
                outcomes.append(image_of_b_test(chain, complex_))
            except TruncationInsufficientError:
                skipped += 1
        disagreements = sum(1 for outcome in outcomes if not outcome.agree)
        in_image = sum(1 for outcome in outcomes if outcome.in_b_image)
        sufficient = len(outcomes) >= count
        if disagreements:
            logger.warning(f"image-of-b criterion disagrees on {disagreements} of {len(outcomes)} chains")
        if not sufficient:
            logger.warning(f"image-of-b battery decided {len(outcomes)} of {count} chains, {skipped} skipped")
        return {
            "passed": disagreements == 0 and sufficient,
            "sufficient": sufficient,
            "skipped": str(skipped),
            "chains": str(len(outcomes)),
            "in_b_image": str(in_image),
            "disagreements": str(disagreements),
        }

    def degree_one(self, complex_: TruncatedComplex) -> DegreeOneReport:
        return degree_one_check(complex_)

    def nullstellensatz(self, result: BrieskornResult, complex_: TruncatedComplex = None) -> NullstellensatzReport:
        return nullstellensatz_exponents(result, complex_)

    def torsion_properties(self, result: BrieskornResult) -> TorsionPropertiesReport:
        return torsion_properties_check(result)

    def analyze(self, f: Polynomial, max_degree: int = None, b_order: int = None, weights=None,
                checks: bool = True) -> typing.Dict[str, typing.Any]:
        """
        Brieskorn lattice, spectrum, geometric verdict and, for quasi-homogeneous f, the
        complex-level checks
        :param f: polynomial over the rationals
        :param max_degree: D
        :param b_order: J
        :param weights: explicit weights
        :param checks: run quasi-isomorphism, nullstellensatz and torsion checks
        :return: JSON-ready document
        """
        result = self.brieskorn_module(f, max_degree, b_order, weights)
        verdict = is_geometric(result.module, self.max_steps)
        document = result.to_json()
        document["spectrum"] = [str(value) for value in verdict.spectrum.values]
        document["spectral_data"] = verdict.spectrum.to_json()
        document["geometric"] = verdict.to_json()
        document["milnor"] = result.milnor.to_json(f.names)
        if result.weights.quasi_homogeneous:
            document["diagonal_weights_hold"] = result.diagonal_weights_hold()
        if not checks:
            return document
        report: typing.Dict[str, typing.Any] = {
            "torsion": self.torsion_properties(result).to_json(),
        }
        complex_ = None
        if result.weights.quasi_homogeneous:
            complex_ = self.build_complex(f, max_degree, b_order, result.weights.weights)
            report["complex"] = complex_.to_json()
            report["quasi_iso"] = [r.to_json() for r in self.quasi_iso(complex_)]
            report["degree_one"] = self.degree_one(complex_).to_json()
        report["nullstellensatz"] = self.nullstellensatz(result, complex_).to_json()
        document["checks"] = report
        return document
