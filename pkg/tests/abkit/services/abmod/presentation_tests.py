import unittest
from abkit.services.ncab.ab_algebra import ABElement
from abkit.services.abmod.presentation import (
    FinitePresentation, materialize, torsion, render_monomial_vector, nilpotency_index, EXACT, AT_CUTOFF
)
from abkit.utils.errors import TruncationInsufficientError


class TestPresentation(unittest.TestCase):
    def setUp(self):
        self.a = ABElement.generator_a(8)
        self.b = ABElement.generator_b(8)
        # Q.g with b.g = 0 and a.g = g
        self.unit_a = FinitePresentation(1, [[self.b], [self.a - 1]])
        self.point = FinitePresentation(1, [[self.b], [self.a]])

    def test_relator_shape_is_checked(self):
        with self.assertRaises(ValueError):
            FinitePresentation(2, [[self.b]])
        with self.assertRaises(ValueError):
            FinitePresentation(-1, [])

    def test_finite_module_is_exact(self):
        module = materialize(self.unit_a, 8)
        self.assertEqual(module.dimension, 1)
        self.assertEqual(module.standard, [(0, 0, 0, ())])
        self.assertEqual(module.stamp, EXACT)

    def test_free_module_is_at_cutoff(self):
        module = materialize(FinitePresentation(1, []), 4)
        self.assertEqual(module.dimension, 10)
        self.assertEqual(module.stamp, AT_CUTOFF)

    def test_degree_must_leave_room(self):
        with self.assertRaises(TruncationInsufficientError):
            materialize(self.point, 1)

    def test_operators_on_the_quotient(self):
        module = materialize(self.unit_a, 8)
        g = (0, 0, 0, ())
        self.assertEqual(module.operator("a"), {g: {g: 1}})
        self.assertEqual(module.operator("b"), {g: {}})

    def test_torsion(self):
        b_torsion = torsion(self.unit_a, "b", 1, 8)
        self.assertEqual((b_torsion.dimension, b_torsion.stamp, b_torsion.module_dimension), (1, EXACT, 1))
        self.assertEqual(b_torsion.to_json()["basis"], ["g1"])
        self.assertEqual(torsion(self.unit_a, "a", 3, 8).dimension, 0)
        self.assertEqual(torsion(self.point, "a", 1, 8).dimension, 1)

    def test_torsion_arguments(self):
        with self.assertRaises(ValueError):
            torsion(self.point, "c", 1, 8)
        with self.assertRaises(ValueError):
            torsion(self.point, "a", 0, 8)

    def test_render_monomial_vector(self):
        self.assertEqual(render_monomial_vector({(0, 1, 2, ()): 2, (1, 0, 0, ()): -1}), "2*b*a^2*g1 - g2")

    def test_nilpotency_index(self):
        module = materialize(self.point, 8)
        g = (0, 0, 0, ())
        self.assertEqual(nilpotency_index([{g: 1}], module.operator("a"), 3), 1)
        unit = materialize(self.unit_a, 8)
        self.assertIsNone(nilpotency_index([{g: 1}], unit.operator("a"), 3))


if __name__ == "__main__":
    unittest.main()
