import random
import unittest
from fractions import Fraction
from math import factorial
import mpmath
from abkit.services.series.truncated_series import TruncatedSeries
from abkit.services.xi.xi_module import (
    XiShape, XiElement, act_a, act_b, to_a_basis, from_a_basis, monodromy, tensor_with_V, random_xi_element, verify_xi
)
from abkit.utils.errors import TruncationMismatchError


def realize(element: XiElement, x) -> mpmath.mpf:
    """
    Value at x of an element read as a function: e_j(lambda) = x^(lambda-1).(log x)^j/j!,
    b = integration from 0, so b^n.g(x) = int_0^x (x-t)^(n-1)/(n-1)!.g(t) dt.
    """
    total = mpmath.mpf(0)
    for (value, j, _), series in element.coefficients.items():
        lam = mpmath.mpf(value.numerator) / value.denominator

        def basis(t, j=j, lam=lam):
            return t ** (lam - 1) * mpmath.log(t) ** j / factorial(j)

        for n, c in enumerate(series.coefficients):
            if c == 0:
                continue
            if n == 0:
                term = basis(x)
            else:
                term = mpmath.quad(lambda t: (x - t) ** (n - 1) / factorial(n - 1) * basis(t), [0, x])
            total += mpmath.mpf(c.numerator) / c.denominator * term
    return total


class TestXiModule(unittest.TestCase):
    def setUp(self):
        self.shape = XiShape([Fraction(1, 3), Fraction(1, 2), 1], 2, 6)

    def test_shape(self):
        self.assertEqual(self.shape.rank, 9)
        with self.assertRaises(ValueError):
            XiShape([0], 1, 4)
        with self.assertRaises(ValueError):
            XiShape([Fraction(3, 2)], 1, 4)
        with self.assertRaises(ValueError):
            self.shape.generator(Fraction(1, 5), 0)
        self.assertEqual(tensor_with_V(self.shape, 2).rank, 18)

    def test_a_action_on_generator(self):
        half = Fraction(1, 2)
        image = act_a(self.shape.generator(half, 1))
        self.assertEqual(image.coefficient((half, 1, 0)), self.shape.series([0, half]))
        self.assertEqual(image.coefficient((half, 0, 0)), self.shape.series([0, 1]))

    def test_commutation(self):
        rng = random.Random(11)
        for _ in range(30):
            x = random_xi_element(rng, self.shape)
            self.assertEqual(act_a(act_b(x)) - act_b(act_a(x)), act_b(act_b(x)))

    def test_b_is_a_over_lambda_on_simple_generators(self):
        shape = XiShape([Fraction(1, 2)], 0, 5)
        element = act_b(shape.generator(Fraction(1, 2), 0))
        expansion = to_a_basis(element, 5)
        self.assertEqual(expansion, {(Fraction(1, 2), 0, 0): TruncatedSeries([0, 2], 5, var="a")})

    def test_a_basis_round_trip(self):
        rng = random.Random(5)
        for _ in range(30):
            x = random_xi_element(rng, self.shape)
            self.assertEqual(from_a_basis(self.shape, to_a_basis(x, 6)), x)

    def test_mismatched_shapes(self):
        other = XiShape([Fraction(1, 2)], 0, 6)
        with self.assertRaises(TruncationMismatchError):
            self.shape.generator(1, 0) + other.generator(Fraction(1, 2), 0)

    def test_monodromy(self):
        data = monodromy(self.shape)
        self.assertTrue(data.is_unipotent_block())
        self.assertEqual(data.semisimple_order, 6)
        self.assertTrue(data.semisimple_power_is_identity(6))
        self.assertFalse(data.semisimple_power_is_identity(3))
        self.assertEqual(data.block[0][2].render(), "1/2*tau^2")
        self.assertEqual(data.to_json()["eigenvalue_labels"], {"1/3": "1/3", "1/2": "1/2", "1": "0"})

    def test_quadrature_model(self):
        x = mpmath.mpf("0.35")
        with mpmath.workdps(30):
            for value in (Fraction(1, 3), Fraction(1, 2), Fraction(1)):
                for j in range(3):
                    for element in (self.shape.generator(value, j), act_b(self.shape.generator(value, j))):
                        expected = x * realize(element, x)
                        self.assertLess(abs(realize(act_a(element), x) - expected), mpmath.mpf("1e-10"))

    def test_battery(self):
        report = verify_xi([Fraction(1, 3), Fraction(1, 2), 1], 2, 10, 10, elements=25, seed=1)
        for name, check in report.items():
            self.assertTrue(check["passed"], name)


if __name__ == "__main__":
    unittest.main()
