import random
import unittest
from fractions import Fraction
from abkit.utils.expression_parser import parse_poly
from abkit.services.derham.forms import PolyForm
from abkit.services.derham.complexes import (
    BChainElement, D, build_complex, quasi_iso_check, image_of_b_test, random_closed_chains, degree_one_check, EXACT
)


class TestChains(unittest.TestCase):
    def setUp(self):
        self.f = parse_poly("x^2 + y^2")
        self.x_dy = PolyForm({((1, 0), (1,)): 1}, 1, 2)

    def test_D(self):
        chain = BChainElement([PolyForm.zero(1, 2), self.x_dy])
        image = D(chain, self.f)
        self.assertEqual(image.component(0), PolyForm({((2, 0), (0, 1)): -2}, 2, 2))
        self.assertEqual(image.component(1), PolyForm.volume(2))
        self.assertTrue(image.component(5).is_zero())

    def test_D_below_top_only(self):
        with self.assertRaises(ValueError):
            D(BChainElement.bottom(PolyForm.volume(2)), self.f)

    def test_constraint(self):
        self.assertFalse(BChainElement.bottom(self.x_dy).satisfies_constraint(self.f))
        euler = PolyForm({((1, 0), (0,)): 1, ((0, 1), (1,)): 1}, 1, 2)
        self.assertTrue(BChainElement.bottom(euler).satisfies_constraint(self.f))
        self.assertTrue(BChainElement.bottom(PolyForm.volume(2)).satisfies_constraint(self.f))

    def test_components_share_a_degree(self):
        with self.assertRaises(ValueError):
            BChainElement([PolyForm.volume(2), self.x_dy])
        with self.assertRaises(ValueError):
            BChainElement([])

    def test_shift(self):
        chain = BChainElement.bottom(PolyForm.volume(2)).shift()
        self.assertTrue(chain.component(0).is_zero())
        self.assertEqual(chain.to_vector(), {(1, ((0, 0), (0, 1))): 1})


class TestComplex(unittest.TestCase):
    @classmethod
    def setUpClass(cls):
        cls.f = parse_poly("x^2 + y^2")
        cls.complex = build_complex(cls.f, 8, 8)
        cls.cusp = build_complex(parse_poly("x^3 + y^2"), 12, 8)

    def test_dimensions(self):
        dims = self.complex.dimensions()
        self.assertEqual(dims[0], {"K": 0, "I": 0, "quotient": 0})
        self.assertEqual(dims[1]["quotient"], 0)
        self.assertEqual(dims[2]["quotient"], 1)
        self.assertEqual(self.cusp.dimensions()[2]["quotient"], 2)

    def test_to_json(self):
        document = self.complex.to_json()
        self.assertEqual(document["mu"], "1")
        self.assertEqual(document["stamp"], EXACT)
        self.assertEqual(document["window"], "11/2")
        self.assertEqual(document["dimensions"]["2"]["quotient"], "1")

    def test_quasi_iso_in_top_degree(self):
        report = quasi_iso_check(self.complex, 2)
        self.assertTrue(report.isomorphic)
        self.assertEqual(report.skipped, [])
        self.assertEqual(report.totals(), (4, 4))
        cusp = quasi_iso_check(self.cusp, 2)
        self.assertTrue(cusp.isomorphic)
        self.assertEqual(cusp.totals(), (7, 7))

    def test_quasi_iso_in_degree_zero(self):
        report = quasi_iso_check(self.complex, 0)
        self.assertTrue(report.isomorphic)
        self.assertEqual(report.totals(), (0, 0))
        self.assertEqual(report.to_json()["degree"], "0")

    def test_quasi_iso_degree_range(self):
        with self.assertRaises(ValueError):
            quasi_iso_check(self.complex, 3)

    def test_image_of_b(self):
        volume = BChainElement.bottom(PolyForm.volume(2))
        outside = image_of_b_test(volume, self.complex)
        self.assertEqual((outside.in_b_image, outside.bottom_in_I_plus_dK), (False, False))
        # x^2.dx^dy = df ^ (x/2.dy)
        jacobian = BChainElement.bottom(PolyForm({((2, 0), (0, 1)): 1}, 2, 2))
        inside = image_of_b_test(jacobian, self.complex)
        self.assertEqual((inside.in_b_image, inside.bottom_in_I_plus_dK), (True, True))

    def test_image_of_b_on_random_chains(self):
        chains = random_closed_chains(self.cusp, 2, 8, random.Random(7))
        self.assertEqual(len(chains), 8)
        for chain in chains:
            self.assertTrue(image_of_b_test(chain, self.cusp).agree, repr(chain))

    def test_degree_one(self):
        report = degree_one_check(self.complex)
        self.assertTrue(report.passed)
        self.assertEqual(report.closed_dimensions[Fraction(1)], 1)
        self.assertEqual(report.closed_dimensions[Fraction(3, 2)], 0)
        self.assertTrue(degree_one_check(self.cusp).passed)


if __name__ == "__main__":
    unittest.main()
