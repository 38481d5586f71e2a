import unittest
from fractions import Fraction
from abkit.utils.expression_parser import parse_poly
from abkit.services.derham.forms import PolyForm
from abkit.services.derham.brieskorn import brieskorn_module, b_action_top, EXACT
from abkit.utils.errors import TruncationInsufficientError


class TestBrieskornModule(unittest.TestCase):
    @classmethod
    def setUpClass(cls):
        cls.cusp = brieskorn_module(parse_poly("x^3 + y^2"), 12, 8)

    def test_b_on_the_volume_form(self):
        # b.dx^dy = f.dx^dy / sigma for quasi-homogeneous f
        f = parse_poly("x^3 + y^2")
        weights = [Fraction(1, 3), Fraction(1, 2)]
        image = b_action_top(PolyForm.volume(2), f, weights)
        expected = PolyForm.volume(2).mul_polynomial(f).scale(Fraction(6, 5))
        self.assertEqual(image, expected)

    def test_rank_and_order(self):
        self.assertEqual(self.cusp.mu, 2)
        self.assertEqual(self.cusp.b_order, 4)
        self.assertEqual(self.cusp.requested_b_order, 8)
        self.assertEqual(self.cusp.stamp, EXACT)

    def test_a_is_diagonal_in_the_monomial_basis(self):
        self.assertTrue(self.cusp.diagonal_weights_hold())
        self.assertEqual(self.cusp.module.to_json()["a_matrix"], [["5/6*b", "0"], ["0", "7/6*b"]])

    def test_commutation_relation_on_the_quotient(self):
        self.assertTrue(self.cusp.relation_holds())

    def test_b_structure(self):
        self.assertEqual(self.cusp.coker_b_dimension(), self.cusp.mu)
        self.assertEqual(self.cusp.b_kernel_dimension(), 0)

    def test_spectrum(self):
        self.assertEqual(self.cusp.weight_spectrum, [Fraction(5, 6), Fraction(7, 6)])
        self.assertEqual(self.cusp.spectral_data().values, [Fraction(5, 6), Fraction(7, 6)])

    def test_document(self):
        document = self.cusp.to_json()
        self.assertEqual(document["mu"], "2")
        self.assertEqual(document["basis"], ["1*dx^dy", "x*dx^dy"])
        self.assertEqual(document["b_matrix"], [["b", "0"], ["0", "b"]])
        self.assertTrue(document["relation_holds"])

    def test_parametric_family(self):
        result = brieskorn_module(parse_poly("x^3 + y^7 + s*x*y^5", params=["s"]), 24, 8)
        self.assertEqual(result.mu, 12)
        self.assertTrue(result.relation_holds())
        self.assertEqual(result.specialize([0]), brieskorn_module(parse_poly("x^3 + y^7"), 24, 8).module)

    def test_degree_too_small_for_b_order(self):
        with self.assertRaises(TruncationInsufficientError):
            brieskorn_module(parse_poly("x^3 + y^2"), 2, 8)


if __name__ == "__main__":
    unittest.main()
