import unittest
from fractions import Fraction
from abkit.services.series.truncated_series import TruncatedSeries
from abkit.services.ncab.ab_algebra import ABElement
from abkit.services.abmod.ab_module import ABModule
from abkit.services.abmod.presentation import FinitePresentation
from abkit.services.abmod.smallness import is_S_small, free_part_report, CONDITIONS


class TestSmallness(unittest.TestCase):
    def setUp(self):
        self.a = ABElement.generator_a(8)
        self.b = ABElement.generator_b(8)
        self.module = ABModule([[TruncatedSeries([0, Fraction(1, 2)])]], 6)

    def test_free_module_is_small(self):
        report = is_S_small(module=self.module)
        self.assertTrue(report.small)
        self.assertEqual(report.failed, [])
        self.assertEqual(report.details["free"]["b_kernel_dimension"], "0")

    def test_free_part_report(self):
        report = free_part_report(self.module, 1)
        self.assertEqual(report["a_torsion_dimension"], 0)
        self.assertEqual(report["coker_b_generators"], ["e1"])

    def test_nilpotent_point_is_small(self):
        report = is_S_small(torsion_part=FinitePresentation(1, [[self.b], [self.a]]))
        self.assertTrue(report.small)
        self.assertEqual(report.N, 1)
        self.assertTrue(all(report.consequences.values()))

    def test_invertible_a_on_b_torsion_is_not_small(self):
        # b.g = 0, a.g = g: the b-torsion is not a-torsion
        report = is_S_small(torsion_part=FinitePresentation(1, [[self.b], [self.a - 1]]))
        self.assertFalse(report.small)
        self.assertFalse(report.conditions["b_torsion_in_a_torsion"])
        self.assertTrue(report.conditions["separation_in_a_torsion"])
        self.assertIn("b_torsion_in_a_torsion", report.failed)
        self.assertFalse(report.consequences["b_torsion_equals_stable_a_torsion"])
        self.assertEqual(report.details["torsion"]["b_torsion"], ["g1"])

    def test_a_torsion_is_always_nilpotent(self):
        # g, a.g, a^2.g with a^3.g = 0 and b.g = a^2.g
        a3 = self.a * self.a * self.a
        report = is_S_small(torsion_part=FinitePresentation(1, [[a3], [self.b - self.a * self.a]]))
        self.assertTrue(report.conditions["a_torsion_nilpotent"])
        self.assertEqual(report.N, 3)
        invertible = is_S_small(torsion_part=FinitePresentation(1, [[self.b], [self.a - 1]]))
        self.assertTrue(invertible.conditions["a_torsion_nilpotent"])
        self.assertEqual(invertible.N, 0)

    def test_infinite_torsion_part_is_undecided(self):
        report = is_S_small(torsion_part=FinitePresentation(1, []), degree=4)
        self.assertIsNone(report.small)
        self.assertEqual(report.conditions, {name: None for name in CONDITIONS})
        self.assertEqual(report.to_json()["N"], None)


if __name__ == "__main__":
    unittest.main()
