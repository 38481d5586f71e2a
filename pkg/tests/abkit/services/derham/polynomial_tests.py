import unittest
from fractions import Fraction
from abkit.services.scalars.scalar_rings import ParamRing
from abkit.services.derham.polynomial import Polynomial, monomial_weight, monomials_below, variable_names
from abkit.utils.errors import ArityMismatchError, ScalarRingMismatchError


class TestPolynomial(unittest.TestCase):
    def setUp(self):
        self.x = Polynomial.variable(0, 2)
        self.y = Polynomial.variable(1, 2)

    def test_arithmetic_and_render(self):
        self.assertEqual((self.x ** 2 + self.y ** 2).render(), "x^2 + y^2")
        self.assertEqual((-(self.x * self.y)).render(), "-x*y")
        self.assertEqual((self.x + 1) * (self.x - 1), self.x ** 2 - 1)
        self.assertTrue((self.x - self.x).is_zero())

    def test_derivatives(self):
        f = self.x ** 3 + self.y ** 2
        self.assertEqual(f.gradient(), [self.x ** 2 * 3, self.y * 2])
        self.assertEqual(f.euler([Fraction(1, 3), Fraction(1, 2)]), f)

    def test_degree_and_order(self):
        f = self.x ** 3 + self.x * self.y
        self.assertEqual(f.degree(), 3)
        self.assertEqual(f.order(), 2)
        self.assertIsNone(Polynomial.zero(2).order())

    def test_evaluate(self):
        f = self.x ** 3 + self.y ** 2
        self.assertEqual(f.evaluate([1, 2]), Fraction(5))

    def test_weighted_part(self):
        f = self.x ** 3 + self.y ** 7 + self.x * self.y ** 5
        principal = f.weighted_part([Fraction(1, 3), Fraction(1, 7)], Fraction(1))
        self.assertEqual(principal, self.x ** 3 + self.y ** 7)

    def test_parameter_coefficients(self):
        ring = ParamRing(1, 2)
        s = ring.variable(0)
        f = Polynomial({(1, 5): 1 + s, (3, 0): 1}, 2, ring)
        self.assertEqual(f.render(), "x^3 + (1 + s)*x*y^5")
        self.assertEqual(f.specialize([2]), Polynomial({(1, 5): 3, (3, 0): 1}, 2))
        self.assertEqual(f.recenter([1]).coefficient((1, 5)), 2 + s)

    def test_mismatches(self):
        with self.assertRaises(ArityMismatchError):
            Polynomial({(1,): 1}, 2)
        with self.assertRaises(ScalarRingMismatchError):
            self.x + Polynomial.variable(0, 2, ParamRing(1, 2))
        with self.assertRaises(ArityMismatchError):
            self.x + Polynomial.variable(0, 3)

    def test_monomials_below(self):
        half = Fraction(1, 2)
        self.assertEqual(monomials_below([half, half], Fraction(1)), [(0, 0), (0, 1), (1, 0)])
        self.assertEqual(monomial_weight((2, 1), [Fraction(1, 3), Fraction(1, 2)]), Fraction(7, 6))
        with self.assertRaises(ValueError):
            monomials_below([0, 1], Fraction(1))

    def test_variable_names(self):
        self.assertEqual(variable_names(3), ("x", "y", "z"))
        self.assertEqual(variable_names(4), ("x0", "x1", "x2", "x3"))


if __name__ == "__main__":
    unittest.main()
