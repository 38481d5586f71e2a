import unittest
from fractions import Fraction
from abkit.services.scalars.scalar_rings import RATIONALS, ParamRing, add, mul, invert, specialize, ring_of
from abkit.utils.errors import ScalarRingMismatchError, NonUnitError, ArityMismatchError


class TestScalarRings(unittest.TestCase):
    def setUp(self):
        self.ring = ParamRing(1, 3)
        self.s = self.ring.variable(0)

    def test_rational_arithmetic(self):
        self.assertEqual(add(Fraction(1, 2), Fraction(1, 3)), Fraction(5, 6))
        self.assertEqual(mul(Fraction(2, 3), Fraction(3, 4)), Fraction(1, 2))
        self.assertEqual(invert(Fraction(-2, 5)), Fraction(-5, 2))

    def test_zero_has_no_inverse(self):
        with self.assertRaises(NonUnitError):
            invert(Fraction(0))

    def test_truncation_drops_high_powers(self):
        self.assertEqual((1 + self.s) * (1 - self.s), self.ring.one() - self.s ** 2)
        self.assertTrue((self.s ** 3).is_zero())

    def test_unit_inverse(self):
        inverse = invert(1 + self.s)
        self.assertEqual(inverse, 1 - self.s + self.s ** 2)
        self.assertEqual((1 + self.s) * inverse, self.ring.one())

    def test_nilpotent_is_not_a_unit(self):
        with self.assertRaises(NonUnitError):
            invert(self.s)

    def test_specialize(self):
        value = 1 + 2 * self.s + self.s ** 2
        self.assertEqual(specialize(value, [3]), Fraction(16))
        self.assertEqual(specialize(Fraction(7, 2), []), Fraction(7, 2))

    def test_specialize_checks_arity(self):
        with self.assertRaises(ArityMismatchError):
            specialize(self.s, [1, 2])
        with self.assertRaises(ArityMismatchError):
            RATIONALS.specialize(Fraction(5), [1])

    def test_mixed_rings_are_rejected(self):
        other = ParamRing(1, 2).variable(0)
        with self.assertRaises(ScalarRingMismatchError):
            add(self.s, other)
        with self.assertRaises(ScalarRingMismatchError):
            RATIONALS.coerce(self.s)

    def test_rationals_promote_into_parameters(self):
        value = Fraction(1, 2) + self.s
        self.assertEqual(ring_of(value), self.ring)
        self.assertEqual(self.ring.constant_term(value), Fraction(1, 2))

    def test_render(self):
        value = 1 + 2 * self.s - Fraction(1, 3) * self.s ** 2
        self.assertEqual(str(value), "1 + 2*s - 1/3*s^2")
        self.assertEqual(ParamRing(2, 2).names, ("s1", "s2"))

    def test_recenter(self):
        shifted = self.ring.recenter(self.s ** 2, [1])
        self.assertEqual(shifted, 1 + 2 * self.s + self.s ** 2)
        self.assertEqual(specialize(shifted, [0]), specialize(self.s ** 2, [1]))


if __name__ == "__main__":
    unittest.main()
