import typing
import logging
from pydantic import ValidationError
from abkit.core.config import Config
from abkit.core import computation_config
from abkit.models.models import Command, ABModuleDocument, PresentationDocument
from abkit.services.ncab.ab_algebra import nf_mul
from abkit.services.ncab.ab_identities import verify_identities, rewrite_product
from abkit.services.xi.xi_module import XiShape, verify_xi
from abkit.services.abmod.ab_module import ABModule, GEOMETRIC, INDETERMINATE, is_geometric, is_simple_pole
from abkit.services.abmod.presentation import FinitePresentation, torsion, EXACT
from abkit.services.abmod.smallness import is_S_small
from abkit.services.abmod.hom_xi import hom_to_xi
from abkit.services.derham.derham_service import DerhamService
from abkit.services.family.family_service import FamilyService, FamilySpec
from abkit.utils.expression_parser import parse_poly, parse_word, parse_series
from abkit.utils.errors import (
    AbkitError,
    ExpressionParseError,
    TruncationInsufficientError,
    NonIsolatedSingularityError,
    NotCriticalPointError,
)

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_FAIL = 1
EXIT_USAGE = 2
EXIT_CUTOFF = 3

Outcome = typing.Tuple[int, typing.Dict[str, typing.Any]]


def module_from_document(document: ABModuleDocument) -> ABModule:
    T = document.b_truncation
    return ABModule([[parse_series(entry, T) for entry in row] for row in document.a_matrix], T)


def presentation_from_document(document: PresentationDocument) -> FinitePresentation:
    relations = [[parse_word(word, document.degree + 1) for word in relation] for relation in document.relations]
    return FinitePresentation(document.generators, relations)


def error_document(error: Exception) -> typing.Dict[str, typing.Any]:
    document = {"error": type(error).__name__, "message": str(error)}
    if isinstance(error, ExpressionParseError):
        document["line"] = str(error.line)
        document["column"] = str(error.column)
    return document


class CommandRunner:
    """
    Dispatches a Command to the services and maps the outcome to an exit code:
    0 success, 1 mathematical failure, 2 usage or parse error, 3 undecidable at this truncation.
    """

    def __init__(self, derham_service: DerhamService, family_service: FamilyService):
        self.derham_service = derham_service
        self.family_service = family_service
        self.handlers: typing.Dict[str, typing.Callable[[Command], Outcome]] = {
            "verify-identities": self.verify_identities,
            "mul": self.mul,
            "brieskorn": self.brieskorn,
            "spectrum": self.spectrum,
            "quasi-iso": self.quasi_iso,
            "torsion": self.torsion,
            "family": self.family,
            "hom-xi": self.hom_xi,
        }

    def run_options(self, options: typing.Dict[str, typing.Any]) -> Outcome:
        """Validate raw options (CLI flags or a JSON body) into a Command, then run it."""
        try:
            command = Command(**options)
        except ValidationError as e:
            logger.error(f"Invalid command options: {e}")
            return EXIT_USAGE, {"error": "ValidationError", "message": str(e), "exit_code": EXIT_USAGE}
        return self.run(command)

    def run(self, command: Command) -> Outcome:
        logger.info(f"Running {command.subcommand}")
        try:
            code, document = self.handlers[command.subcommand](command)
        except TruncationInsufficientError as e:
            logger.warning(f"{command.subcommand} undecided at this truncation: {e}")
            code, document = EXIT_CUTOFF, error_document(e)
        except (NonIsolatedSingularityError, NotCriticalPointError) as e:
            logger.error(f"{command.subcommand} rejected the input: {e}")
            code, document = EXIT_FAIL, error_document(e)
        except (ExpressionParseError, ValueError) as e:
            logger.error(f"{command.subcommand} usage error: {e}")
            code, document = EXIT_USAGE, error_document(e)
        except AbkitError as e:
            logger.error(f"{command.subcommand} failed: {e}")
            code, document = EXIT_FAIL, error_document(e)
        except Exception as e:
            logger.error(f"Error running {command.subcommand}: {e}")
            raise RuntimeError(f"Unexpected failure in {command.subcommand}") from e
        document["subcommand"] = command.subcommand
        document["exit_code"] = code
        return code, document

    def _seed(self, command: Command) -> int:
        return Config.ABKIT_RANDOM_SEED if command.seed is None else command.seed

    def _poly(self, command: Command):
        return parse_poly(command.poly, command.vars, command.params, command.param_order)

    def _module(self, command: Command) -> ABModule:
        if command.module_json is not None:
            return module_from_document(command.module_json)
        result = self.derham_service.brieskorn_module(self._poly(command), command.max_degree, command.b_order,
                                                      command.weights)
        return result.module

    def verify_identities(self, command: Command) -> Outcome:
        battery = computation_config.IDENTITY_BATTERY
        shape = computation_config.XI_ACCEPTANCE_SHAPE
        seed = self._seed(command)
        checks = verify_identities(
            max_n=command.max_n,
            seed=seed,
            commutation_pairs=battery["commutation_pairs"],
            associativity_triples=battery["associativity_triples"],
            max_power=battery["max_power"],
            max_action=battery["max_action"],
            b_truncation=command.nb,
            a_truncation=command.na or 10,
        )
        checks.update(verify_xi(shape["lambdas"], shape["k"], shape["a_truncation"], shape["b_truncation"],
                                computation_config.XI_COMMUTATION_ELEMENTS, seed))
        passed = all(check["passed"] for check in checks.values())
        return (EXIT_OK if passed else EXIT_FAIL), {"passed": passed, "checks": checks}

    def mul(self, command: Command) -> Outcome:
        left = parse_word(command.left, command.nb, command.na, command.params, command.param_order)
        right = parse_word(command.right, command.nb, command.na, command.params, command.param_order)
        product = nf_mul(left, right)
        return EXIT_OK, {
            "left": left.render(),
            "right": right.render(),
            "product": product.render(),
            "rewriting_agrees": product == rewrite_product(left, right),
            "b_truncation": command.nb,
            "a_truncation": command.na,
        }

    def brieskorn(self, command: Command) -> Outcome:
        document = self.derham_service.analyze(self._poly(command), command.max_degree, command.b_order,
                                               command.weights, command.checks)
        verdict = document["geometric"]["verdict"]
        if verdict == INDETERMINATE:
            return EXIT_CUTOFF, document
        failed = not document["relation_holds"] or verdict != GEOMETRIC \
            or document.get("diagonal_weights_hold") is False
        checks = document.get("checks", {})
        if checks:
            failed = failed or not checks["torsion"]["passed"]
            failed = failed or any(not report["isomorphic"] for report in checks.get("quasi_iso", []))
            failed = failed or not checks.get("degree_one", {"passed": True})["passed"]
        return (EXIT_FAIL if failed else EXIT_OK), document

    def spectrum(self, command: Command) -> Outcome:
        module = self._module(command)
        verdict = is_geometric(module, command.max_steps)
        document = {
            "spectrum": [str(value) for value in verdict.spectrum.values],
            "spectral_data": verdict.spectrum.to_json(),
            "geometric": verdict.to_json(),
            "simple_pole": is_simple_pole(module),
            "module": module.to_json(),
        }
        if verdict.verdict == INDETERMINATE:
            return EXIT_CUTOFF, document
        return (EXIT_OK if verdict.verdict == GEOMETRIC else EXIT_FAIL), document

    def quasi_iso(self, command: Command) -> Outcome:
        f = self._poly(command)
        complex_ = self.derham_service.build_complex(f, command.max_degree, command.b_order, command.weights)
        reports = self.derham_service.quasi_iso(complex_)
        battery = self.derham_service.image_of_b_battery(complex_, command.chains, seed=self._seed(command))
        degree_one = self.derham_service.degree_one(complex_)
        passed = all(report.isomorphic for report in reports) and battery["passed"] and degree_one.passed
        code = EXIT_OK if passed else EXIT_FAIL
        if not passed and not battery["sufficient"] and battery["disagreements"] == "0" \
                and degree_one.passed and all(report.isomorphic for report in reports):
            code = EXIT_CUTOFF
        return code, {
            "complex": complex_.to_json(),
            "quasi_iso": [report.to_json() for report in reports],
            "image_of_b": battery,
            "degree_one": degree_one.to_json(),
            "passed": passed,
        }

    def torsion(self, command: Command) -> Outcome:
        if command.presentation_json is None:
            result = self.derham_service.brieskorn_module(self._poly(command), command.max_degree, command.b_order,
                                                          command.weights)
            report = self.derham_service.torsion_properties(result)
            exponents = self.derham_service.nullstellensatz(result)
            return (EXIT_OK if report.passed else EXIT_FAIL), {
                "torsion_properties": report.to_json(),
                "nullstellensatz": exponents.to_json(),
                "smallness": is_S_small(result.module).to_json(),
            }
        document = command.presentation_json
        presentation = presentation_from_document(document)
        kernel = torsion(presentation, command.which, command.power, document.degree)
        smallness = is_S_small(torsion_part=presentation, degree=document.degree)
        result = {"torsion": kernel.to_json(), "smallness": smallness.to_json()}
        if kernel.stamp != EXACT or smallness.small is None:
            return EXIT_CUTOFF, result
        return (EXIT_OK if smallness.small else EXIT_FAIL), result

    def family(self, command: Command) -> Outcome:
        if command.poly is None:
            # without --poly, the reference family at its reference points
            f = parse_poly(computation_config.FAMILY_EXAMPLE, command.vars, ["s"], command.param_order)
            points = [tuple(point) for point in command.points] or list(computation_config.FAMILY_POINTS)
        else:
            f = self._poly(command)
            points = [tuple(point) for point in command.points]
        spec = FamilySpec(f, points, command.max_degree, command.b_order)
        report = self.family_service.family_smallness(spec)
        passed = report.agree and report.geometric and report.weight_spectra_coincide
        return (EXIT_OK if passed else EXIT_FAIL), report.to_json()

    def hom_xi(self, command: Command) -> Outcome:
        module = self._module(command)
        shape = XiShape(command.lambdas, command.k, module.b_truncation)
        result = hom_to_xi(module, shape)
        return (EXIT_OK if result.sufficient else EXIT_FAIL), result.to_json()
