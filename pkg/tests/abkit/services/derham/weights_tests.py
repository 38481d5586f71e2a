import unittest
from fractions import Fraction
from abkit.utils.expression_parser import parse_poly
from abkit.services.derham.weights import detect_weights, QUASI_HOMOGENEOUS, SEMI_QUASI_HOMOGENEOUS, GENERAL
from abkit.utils.errors import NotCriticalPointError


class TestWeights(unittest.TestCase):
    def test_quasi_homogeneous(self):
        system = detect_weights(parse_poly("x^3 + y^2"))
        self.assertEqual(system.weights, (Fraction(1, 3), Fraction(1, 2)))
        self.assertEqual(system.kind, QUASI_HOMOGENEOUS)
        self.assertTrue(system.quasi_homogeneous)

    def test_semi_quasi_homogeneous(self):
        system = detect_weights(parse_poly("x^3 + y^7 + x*y^5"))
        self.assertEqual(system.weights, (Fraction(1, 3), Fraction(1, 7)))
        self.assertEqual(system.kind, SEMI_QUASI_HOMOGENEOUS)
        self.assertEqual(system.principal_part, parse_poly("x^3 + y^7"))

    def test_general(self):
        system = detect_weights(parse_poly("x^2*y^2 + x^5 + y^5"))
        self.assertEqual(system.weights, (Fraction(1, 4), Fraction(1, 4)))
        self.assertEqual(system.kind, GENERAL)

    def test_explicit_weights(self):
        system = detect_weights(parse_poly("x^2 + y^2"), [Fraction(1, 2), Fraction(1, 2)])
        self.assertEqual(system.kind, QUASI_HOMOGENEOUS)
        with self.assertRaises(ValueError):
            detect_weights(parse_poly("x^2 + y^2"), [Fraction(1, 2)])
        with self.assertRaises(ValueError):
            detect_weights(parse_poly("x^2 + y^2"), [Fraction(1, 3), Fraction(1, 3)])

    def test_window_and_sigma(self):
        system = detect_weights(parse_poly("x^3 + y^2"))
        self.assertEqual(system.window(12), Fraction(31, 6))
        self.assertEqual(system.sigma((1, 0)), Fraction(7, 6))
        self.assertEqual(system.to_json()["weights"], ["1/3", "1/2"])

    def test_origin_must_be_critical(self):
        with self.assertRaises(NotCriticalPointError):
            detect_weights(parse_poly("x + y^2"))
        with self.assertRaises(NotCriticalPointError):
            detect_weights(parse_poly("1 + x^2 + y^2"))
        with self.assertRaises(ValueError):
            detect_weights(parse_poly("x^2"))


if __name__ == "__main__":
    unittest.main()
