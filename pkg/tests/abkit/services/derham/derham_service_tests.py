import unittest
from unittest.mock import patch, MagicMock
from abkit.core.config import Config
from abkit.core.computation_config import IMAGE_OF_B_CHAINS
from abkit.utils.errors import TruncationInsufficientError
from abkit.utils.expression_parser import parse_poly
from abkit.services.derham.derham_service import DerhamService


class TestDerhamService(unittest.TestCase):
    def setUp(self):
        self.service = DerhamService(max_workers=1)
        self.cusp = parse_poly("x^3 + y^2")

    def test_single_worker_maps_in_line(self):
        with self.service.mapper() as mapper:
            self.assertIs(mapper, map)

    def test_thread_pool_mapper(self):
        service = DerhamService(max_workers=2)
        with service.mapper() as mapper:
            self.assertEqual(list(mapper(lambda v: v * v, [1, 2, 3])), [1, 4, 9])

    @patch("abkit.services.derham.derham_service.brieskorn_module")
    def test_defaults_from_config(self, mock_brieskorn):
        mock_brieskorn.return_value = MagicMock()
        self.service.brieskorn_module(self.cusp)
        mock_brieskorn.assert_called_once_with(self.cusp, Config.DEFAULT_MAX_DEGREE, Config.DEFAULT_B_ORDER, None, map)

    def test_analyze(self):
        document = self.service.analyze(self.cusp, max_degree=12, b_order=8)
        self.assertEqual(document["spectrum"], ["5/6", "7/6"])
        self.assertEqual(document["geometric"]["verdict"], "geometric")
        self.assertEqual(document["milnor"]["mu"], "2")
        self.assertEqual(document["milnor"]["standard_monomials"], ["1", "x"])
        self.assertTrue(document["diagonal_weights_hold"])
        checks = document["checks"]
        self.assertTrue(checks["torsion"]["passed"])
        self.assertEqual([report["degree"] for report in checks["quasi_iso"]], ["0", "2"])
        self.assertTrue(all(report["isomorphic"] for report in checks["quasi_iso"]))
        self.assertTrue(checks["degree_one"]["passed"])
        self.assertEqual(checks["nullstellensatz"]["N_KI"], "1")
        self.assertEqual(checks["nullstellensatz"]["N_ab"], "1")

    def test_analyze_without_checks(self):
        document = self.service.analyze(self.cusp, max_degree=12, b_order=8, checks=False)
        self.assertNotIn("checks", document)
        self.assertEqual(document["b_order"], "4")

    def test_image_of_b_battery(self):
        complex_ = self.service.build_complex(self.cusp, 12, 8)
        report = self.service.image_of_b_battery(complex_, count=6, seed=3)
        self.assertTrue(report["passed"])
        self.assertEqual(report["disagreements"], "0")

    def test_image_of_b_battery_at_full_size(self):
        for poly, degree in (("x^3 + y^2", 12), ("x^2 + y^2", 8)):
            complex_ = self.service.build_complex(parse_poly(poly), degree, 8)
            report = self.service.image_of_b_battery(complex_)
            self.assertGreaterEqual(int(report["chains"]), IMAGE_OF_B_CHAINS, poly)
            self.assertEqual(report["disagreements"], "0", poly)
            self.assertTrue(report["sufficient"])
            self.assertTrue(report["passed"])

    @patch("abkit.services.derham.derham_service.image_of_b_test")
    def test_short_battery_does_not_pass(self, mock_test):
        decided = MagicMock(agree=True, in_b_image=False)
        calls = []

        def first_only(chain, complex_):
            calls.append(chain)
            if len(calls) > 1:
                raise TruncationInsufficientError("chain reaches the b-order")
            return decided

        mock_test.side_effect = first_only
        complex_ = self.service.build_complex(self.cusp, 12, 8)
        report = self.service.image_of_b_battery(complex_, count=20, seed=3)
        self.assertEqual(report["chains"], "1")
        self.assertEqual(report["skipped"], str(len(calls) - 1))
        self.assertEqual(report["disagreements"], "0")
        self.assertFalse(report["sufficient"])
        self.assertFalse(report["passed"])


if __name__ == "__main__":
    unittest.main()
