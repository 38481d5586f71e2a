import unittest
from unittest.mock import MagicMock
from abkit.core import computation_config
from abkit.core.config import Config
from abkit.services.derham.derham_service import DerhamService
from abkit.services.family.family_service import FamilyService
from abkit.services.runner.command_runner import CommandRunner, EXIT_OK, EXIT_FAIL, EXIT_USAGE, EXIT_CUTOFF
from abkit.utils.errors import TruncationInsufficientError, NonIsolatedSingularityError
from abkit.utils.expression_parser import parse_poly
from abkit.utils.serializers import dumps

GEOMETRIC_DOCUMENT = {
    "relation_holds": True,
    "diagonal_weights_hold": True,
    "geometric": {"verdict": "geometric"},
    "checks": {
        "torsion": {"passed": True},
        "quasi_iso": [{"isomorphic": True}, {"isomorphic": True}],
        "degree_one": {"passed": True},
    },
}


class TestCommandRunner(unittest.TestCase):
    def setUp(self):
        self.derham_service = MagicMock(spec=DerhamService)
        self.family_service = MagicMock(spec=FamilyService)
        self.runner = CommandRunner(self.derham_service, self.family_service)

    def test_missing_inputs_are_usage_errors(self):
        code, document = self.runner.run_options({"subcommand": "brieskorn"})
        self.assertEqual(code, EXIT_USAGE)
        self.assertEqual(document["error"], "ValidationError")

    def test_floats_are_not_rationals(self):
        code, _ = self.runner.run_options({"subcommand": "brieskorn", "poly": "x^3 + y^2", "weights": [0.5, 0.5]})
        self.assertEqual(code, EXIT_USAGE)

    def test_unknown_options_are_rejected(self):
        code, _ = self.runner.run_options({"subcommand": "mul", "left": "a", "right": "b", "colour": "red"})
        self.assertEqual(code, EXIT_USAGE)

    def test_mul(self):
        code, document = self.runner.run_options({"subcommand": "mul", "left": "a", "right": "b", "nb": 4})
        self.assertEqual(code, EXIT_OK)
        self.assertEqual(document["product"], "b*a + b^2")
        self.assertTrue(document["rewriting_agrees"])
        self.assertEqual((document["subcommand"], document["exit_code"]), ("mul", EXIT_OK))

    def test_parse_errors_carry_the_position(self):
        code, document = self.runner.run_options({"subcommand": "mul", "left": "a + $", "right": "b"})
        self.assertEqual(code, EXIT_USAGE)
        self.assertEqual(document["error"], "ExpressionParseError")
        self.assertEqual((document["line"], document["column"]), ("1", "5"))

    def test_brieskorn_exit_codes(self):
        self.derham_service.analyze.return_value = dict(GEOMETRIC_DOCUMENT)
        code, _ = self.runner.run_options({"subcommand": "brieskorn", "poly": "x^3 + y^2", "max_degree": 12})
        self.assertEqual(code, EXIT_OK)
        f, max_degree, b_order, weights, checks = self.derham_service.analyze.call_args[0]
        self.assertEqual((f.render(), max_degree, weights, checks), ("x^3 + y^2", 12, None, True))

        failing = dict(GEOMETRIC_DOCUMENT, checks=dict(GEOMETRIC_DOCUMENT["checks"], degree_one={"passed": False}))
        self.derham_service.analyze.return_value = failing
        code, _ = self.runner.run_options({"subcommand": "brieskorn", "poly": "x^3 + y^2"})
        self.assertEqual(code, EXIT_FAIL)

        self.derham_service.analyze.return_value = dict(GEOMETRIC_DOCUMENT, geometric={"verdict": "indeterminate"})
        code, _ = self.runner.run_options({"subcommand": "brieskorn", "poly": "x^3 + y^2"})
        self.assertEqual(code, EXIT_CUTOFF)

    def test_error_mapping(self):
        options = {"subcommand": "brieskorn", "poly": "x^3 + y^2"}
        self.derham_service.analyze.side_effect = TruncationInsufficientError("window too small")
        code, document = self.runner.run_options(options)
        self.assertEqual((code, document["error"]), (EXIT_CUTOFF, "TruncationInsufficientError"))

        self.derham_service.analyze.side_effect = NonIsolatedSingularityError()
        code, _ = self.runner.run_options(options)
        self.assertEqual(code, EXIT_FAIL)

        self.derham_service.analyze.side_effect = KeyError("relation_holds")
        with self.assertRaises(RuntimeError):
            self.runner.run_options(options)

    def test_spectrum_of_a_module_document(self):
        module = {"a_matrix": [["1/2*b"]], "b_truncation": 6}
        code, document = self.runner.run_options({"subcommand": "spectrum", "module_json": module})
        self.assertEqual(code, EXIT_OK)
        self.assertEqual(document["spectrum"], ["1/2"])
        self.assertTrue(document["simple_pole"])

        code, _ = self.runner.run_options({"subcommand": "spectrum", "module_json": {"a_matrix": [["-b"]], "b_truncation": 6}})
        self.assertEqual(code, EXIT_FAIL)

        irregular = {"a_matrix": [["1"]], "b_truncation": 8}
        code, _ = self.runner.run_options({"subcommand": "spectrum", "module_json": irregular, "max_steps": 3})
        self.assertEqual(code, EXIT_CUTOFF)

    def test_module_document_must_be_square(self):
        module = {"a_matrix": [["b", "0"]], "b_truncation": 6}
        code, _ = self.runner.run_options({"subcommand": "spectrum", "module_json": module})
        self.assertEqual(code, EXIT_USAGE)

    def test_torsion_of_a_presentation(self):
        point = {"generators": 1, "relations": [["b"], ["a"]], "degree": 8}
        code, document = self.runner.run_options({"subcommand": "torsion", "presentation_json": point})
        self.assertEqual(code, EXIT_OK)
        self.assertTrue(document["smallness"]["small"])

        unit_a = {"generators": 1, "relations": [["b"], ["a - 1"]], "degree": 8}
        code, _ = self.runner.run_options({"subcommand": "torsion", "presentation_json": unit_a})
        self.assertEqual(code, EXIT_FAIL)

    def test_hom_xi(self):
        module = {"a_matrix": [["1/2*b"]], "b_truncation": 6}
        code, document = self.runner.run_options({"subcommand": "hom-xi", "module_json": module, "lambdas": ["1/2"]})
        self.assertEqual(code, EXIT_OK)
        self.assertEqual(document["dimension"], "1")
        code, _ = self.runner.run_options({"subcommand": "hom-xi", "module_json": module, "lambdas": ["1"]})
        self.assertEqual(code, EXIT_FAIL)

    def test_family(self):
        report = MagicMock(agree=True, geometric=True, weight_spectra_coincide=True)
        report.to_json.return_value = {"agree": True}
        self.family_service.family_smallness.return_value = report
        code, document = self.runner.run_options({
            "subcommand": "family", "poly": "x^3 + y^7 + s*x*y^5", "params": ["s"], "points": [["0"], ["1"]],
        })
        self.assertEqual(code, EXIT_OK)
        self.assertTrue(document["agree"])
        spec = self.family_service.family_smallness.call_args[0][0]
        self.assertEqual(spec.arity, 1)
        self.assertEqual(len(spec.points), 2)

        report.weight_spectra_coincide = False
        code, _ = self.runner.run_options({"subcommand": "family", "poly": "x^3 + y^7 + s*x*y^5", "params": ["s"]})
        self.assertEqual(code, EXIT_FAIL)

    def test_family_defaults_to_the_reference_family(self):
        report = MagicMock(agree=True, geometric=True, weight_spectra_coincide=True)
        report.to_json.return_value = {"agree": True}
        self.family_service.family_smallness.return_value = report
        code, _ = self.runner.run_options({"subcommand": "family"})
        self.assertEqual(code, EXIT_OK)
        spec = self.family_service.family_smallness.call_args[0][0]
        self.assertEqual(spec.f, parse_poly(computation_config.FAMILY_EXAMPLE, params=["s"]))
        self.assertEqual(spec.points, computation_config.FAMILY_POINTS)
        self.assertEqual(spec.max_degree, Config.DEFAULT_MAX_DEGREE)

    def test_short_image_of_b_battery_is_undecided(self):
        self.derham_service.build_complex.return_value = MagicMock()
        self.derham_service.quasi_iso.return_value = [MagicMock(isomorphic=True)]
        self.derham_service.degree_one.return_value = MagicMock(passed=True)
        battery = {"passed": False, "sufficient": False, "skipped": "99", "chains": "1", "in_b_image": "0",
                   "disagreements": "0"}
        self.derham_service.image_of_b_battery.return_value = battery
        code, document = self.runner.run_options({"subcommand": "quasi-iso", "poly": "x^3 + y^2"})
        self.assertEqual(code, EXIT_CUTOFF)
        self.assertEqual(document["image_of_b"]["skipped"], "99")
        self.assertEqual(self.derham_service.image_of_b_battery.call_args[0][1], computation_config.IMAGE_OF_B_CHAINS)

        self.derham_service.image_of_b_battery.return_value = {**battery, "disagreements": "1"}
        code, _ = self.runner.run_options({"subcommand": "quasi-iso", "poly": "x^3 + y^2"})
        self.assertEqual(code, EXIT_FAIL)


def _runner(threads: int) -> CommandRunner:
    derham_service = DerhamService(max_workers=threads)
    return CommandRunner(derham_service, FamilyService(derham_service))


class TestCommandRunnerEndToEnd(unittest.TestCase):
    def test_output_does_not_depend_on_threads(self):
        commands = [
            {"subcommand": "brieskorn", "poly": "x^3 + y^2", "max_degree": 12},
            {"subcommand": "quasi-iso", "poly": "x^3 + y^2", "max_degree": 12, "chains": 20},
            {"subcommand": "family", "poly": "x^3 + y^2 + s*x^2*y", "params": ["s"], "points": [["0"], ["1"]],
             "max_degree": 12},
        ]
        for options in commands:
            outputs = set()
            for threads in (1, 4):
                _, document = _runner(threads).run_options(dict(options))
                outputs.add(dumps(document))
            self.assertEqual(len(outputs), 1, options["subcommand"])

    def test_reference_family_runs_at_default_settings(self):
        code, document = _runner(1).run_options({"subcommand": "family"})
        self.assertEqual(code, EXIT_OK, document.get("message"))
        self.assertTrue(document["agree"])
        self.assertTrue(document["weight_spectra_coincide"])
        self.assertEqual(document["points"], ["s=0", "s=1", "s=-2"])
        self.assertEqual({point["mu"]["direct"] for point in document["per_point"].values()}, {"12"})


if __name__ == "__main__":
    unittest.main()
