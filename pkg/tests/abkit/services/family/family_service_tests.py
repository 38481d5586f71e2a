import unittest
from fractions import Fraction
from unittest.mock import MagicMock, patch
from abkit.utils.expression_parser import parse_poly
from abkit.core.computation_config import FAMILY_POINTS
from abkit.services.abmod.ab_module import spectrum
from abkit.services.derham.derham_service import DerhamService
from abkit.services.family.family_service import FamilySpec, FamilyService, render_point
from abkit.utils.errors import ArityMismatchError, NonIsolatedSingularityError


class TestFamilySpec(unittest.TestCase):
    def setUp(self):
        self.f = parse_poly("x^3 + y^2 + s*x^2*y", params=("s",))

    def test_points(self):
        spec = FamilySpec(self.f, [])
        self.assertTrue(spec.parametric)
        self.assertEqual(spec.arity, 1)
        self.assertEqual(spec.checked_points(), [(Fraction(0),)])
        self.assertEqual(FamilySpec(self.f, [("1/2",)]).checked_points(), [(Fraction(1, 2),)])

    def test_arity_is_checked(self):
        with self.assertRaises(ArityMismatchError):
            FamilySpec(self.f, [(1, 2)]).checked_points()

    def test_fiber(self):
        spec = FamilySpec(self.f, [])
        self.assertEqual(spec.fiber((Fraction(0),)), parse_poly("x^3 + y^2"))
        self.assertEqual(spec.fiber((Fraction(1),)), parse_poly("x^3 + y^2 + x^2*y"))

    def test_render_point(self):
        self.assertEqual(render_point((Fraction(1, 2), Fraction(-1)), ("s", "t")), "s=1/2, t=-1")
        self.assertEqual(render_point((), ()), "-")


class TestFamilyService(unittest.TestCase):
    def setUp(self):
        self.f = parse_poly("x^3 + y^2 + s*x^2*y", params=("s",))
        self.spec = FamilySpec(self.f, [(0,)], 12, 8)

    def test_specialization_commutes_at_origin(self):
        service = FamilyService(DerhamService(max_workers=1))
        report = service.specialize_run(self.spec, (0,))
        self.assertTrue(report.agree)
        self.assertEqual((report.mu_specialized, report.mu_direct), (2, 2))
        self.assertEqual(report.weight_spectrum, [Fraction(5, 6), Fraction(7, 6)])
        self.assertEqual(report.to_json()["spectrum"]["direct"], ["5/6", "7/6"])

    def test_point_arity(self):
        service = FamilyService(MagicMock())
        with self.assertRaises(ArityMismatchError):
            service.specialize_run(self.spec, (0, 1))

    def test_non_isolated_fiber_names_the_point(self):
        derham_service = MagicMock()
        derham_service.brieskorn_module.side_effect = NonIsolatedSingularityError("quotient keeps growing")
        service = FamilyService(derham_service)
        with self.assertRaises(NonIsolatedSingularityError) as context:
            service.specialize_run(self.spec, (1,))
        self.assertIn("s=1", str(context.exception))

    def test_unexpected_errors_are_wrapped(self):
        derham_service = MagicMock()
        derham_service.brieskorn_module.side_effect = KeyError("boom")
        service = FamilyService(derham_service)
        with self.assertRaises(RuntimeError):
            service.specialize_run(self.spec, (0,))


class TestSemiQuasiHomogeneousFamily(unittest.TestCase):
    """x^3 + y^7 + s.x.y^5 at s = 0, 1, -2: mu-constant, not quasi-homogeneous away from 0."""

    @classmethod
    def setUpClass(cls):
        f = parse_poly("x^3 + y^7 + s*x*y^5", params=("s",))
        cls.spec = FamilySpec(f, list(FAMILY_POINTS), 30, 8)
        with patch("abkit.services.family.family_service.logger") as mock_logger:
            cls.report = FamilyService(DerhamService(max_workers=1)).family_smallness(cls.spec)
        cls.warnings = [str(c.args[0]) for c in mock_logger.warning.call_args_list]
        cls.weight_spectrum = sorted(Fraction(i, 3) + Fraction(j, 7) for i in (1, 2) for j in range(1, 7))

    def test_specialization_commutes_at_every_point(self):
        self.assertEqual([r.point for r in self.report.per_point], [(0,), (1,), (-2,)])
        for report in self.report.per_point:
            self.assertTrue(report.agree, report.point)
            self.assertEqual((report.mu_specialized, report.mu_direct), (12, 12))
            self.assertTrue(report.matrices_equal)
            self.assertTrue(report.operators_equal)
        self.assertTrue(self.report.agree)

    def test_every_fiber_is_geometric(self):
        self.assertTrue(self.report.geometric)
        self.assertTrue(self.report.to_json()["geometric"])

    def test_weight_spectrum_is_constant(self):
        self.assertTrue(self.report.weight_spectra_coincide)
        for report in self.report.per_point:
            self.assertEqual(report.weight_spectrum, self.weight_spectrum)

    def test_saturation_shifts_one_value_away_from_the_origin(self):
        origin, one, minus_two = self.report.per_point
        self.assertEqual(origin.spectrum_direct.values, self.weight_spectrum)
        shifted = sorted(Fraction(n, 21) for n in (10, 11, 13, 16, 17, 19, 20, 22, 23, 25, 26, 29))
        self.assertEqual(one.spectrum_direct.values, shifted)
        self.assertEqual(minus_two.spectrum_direct.values, shifted)
        self.assertFalse(self.report.saturation_spectra_coincide)
        self.assertTrue(any("compare weight spectra" in line for line in self.warnings))

    def test_saturation_shift_does_not_depend_on_the_cutoff(self):
        service = DerhamService(max_workers=1)
        fiber = self.spec.fiber((Fraction(1),))
        values = [spectrum(service.brieskorn_module(fiber, D, 12).module).values for D in (30, 33)]
        self.assertEqual(values[0], values[1])
        self.assertIn(Fraction(11, 21), values[0])
        self.assertNotIn(Fraction(32, 21), values[0])


if __name__ == "__main__":
    unittest.main()
