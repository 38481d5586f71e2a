import unittest
from abkit.utils.expression_parser import parse_poly
from abkit.services.derham.brieskorn import brieskorn_module
from abkit.services.derham.complexes import build_complex
from abkit.services.derham.properties import nullstellensatz_exponents, torsion_properties_check, quotient_torsion
from abkit.utils.errors import TruncationInsufficientError


class TestProperties(unittest.TestCase):
    @classmethod
    def setUpClass(cls):
        f = parse_poly("x^3 + y^2")
        cls.result = brieskorn_module(f, 12, 8)
        cls.complex = build_complex(f, 12, 8)

    def test_nullstellensatz(self):
        report = nullstellensatz_exponents(self.result, self.complex)
        self.assertEqual(report.N_KI, 1)
        self.assertEqual(report.N_ab, 1)
        self.assertEqual(report.by_degree, {2: 1, 1: 0})
        self.assertEqual(report.to_json()["by_degree"], {"1": "0", "2": "1"})

    def test_nullstellensatz_without_complex(self):
        report = nullstellensatz_exponents(self.result)
        self.assertEqual(report.by_degree, {2: 1})

    def test_torsion_properties(self):
        report = torsion_properties_check(self.result)
        self.assertTrue(report.passed)
        self.assertEqual((report.a_torsion_dimension, report.b_torsion_dimension), (0, 0))
        self.assertTrue(report.separated)
        self.assertEqual([(q.r, q.a_nilpotency, q.b_nilpotency) for q in report.quotients], [(1, 1, 1), (2, 2, 2)])

    def test_quotient_torsion(self):
        quotient = quotient_torsion(self.result, 3)
        self.assertEqual((quotient.a_nilpotency, quotient.b_nilpotency), (3, 3))
        self.assertTrue(quotient.consistent)
        self.assertEqual(quotient.to_json()["N_prime"], "3")

    def test_quotient_beyond_b_order(self):
        with self.assertRaises(TruncationInsufficientError):
            quotient_torsion(self.result, 5)


if __name__ == "__main__":
    unittest.main()
