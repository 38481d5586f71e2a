import unittest
from fractions import Fraction
from abkit.services.series.truncated_series import TruncatedSeries
from abkit.services.scalars.scalar_rings import ParamRing
from abkit.services.xi.xi_module import XiShape
from abkit.services.abmod.ab_module import ABModule
from abkit.services.abmod.hom_xi import hom_to_xi, intertwines
from abkit.utils.errors import ScalarRingMismatchError


class TestHomXi(unittest.TestCase):
    def setUp(self):
        self.module = ABModule([[TruncatedSeries([0, Fraction(1, 2)])]], 6)

    def test_matching_exponent_embeds(self):
        result = hom_to_xi(self.module, XiShape([Fraction(1, 2)], 0, 6))
        self.assertEqual(result.dimension, 1)
        self.assertTrue(result.sufficient)
        self.assertEqual(result.missing_lambdas, [])
        images = result.maps[0]
        self.assertEqual(images[0].to_json(), [{"lambda": "1/2", "j": "0", "copy": "0", "series": "1"}])
        self.assertTrue(intertwines(self.module, images))

    def test_wrong_exponent_has_no_maps(self):
        result = hom_to_xi(self.module, XiShape([1], 0, 6))
        self.assertEqual(result.dimension, 0)
        self.assertFalse(result.sufficient)
        self.assertEqual(result.missing_lambdas, [Fraction(1, 2)])
        self.assertEqual(result.to_json()["missing_lambdas"], ["1/2"])

    def test_jordan_block_needs_the_log_term(self):
        # a(e1) = b.e1/2, a(e2) = b.e1 + b.e2/2
        half = Fraction(1, 2)
        module = ABModule([
            [TruncatedSeries([0, half]), TruncatedSeries([0, 1])],
            [TruncatedSeries([]), TruncatedSeries([0, half])],
        ], 6)
        result = hom_to_xi(module, XiShape([half], 1, 6))
        self.assertEqual(result.dimension, 2)
        self.assertTrue(result.sufficient)
        self.assertEqual(result.missing_lambdas, [])
        for images in result.maps:
            self.assertTrue(intertwines(module, images))
        degrees = {entry["j"] for images in result.maps for image in images for entry in image.to_json()}
        self.assertIn("1", degrees)
        self.assertEqual(hom_to_xi(module, XiShape([half], 0, 6)).dimension, 1)

    def test_exponents_are_read_modulo_one(self):
        module = ABModule([[TruncatedSeries([0, Fraction(3, 2)])]], 6)
        result = hom_to_xi(module, XiShape([1], 0, 6))
        self.assertEqual(result.missing_lambdas, [Fraction(1, 2)])

    def test_rings_must_match(self):
        with self.assertRaises(ScalarRingMismatchError):
            hom_to_xi(self.module, XiShape([1], 0, 6, ring=ParamRing(1, 2)))


if __name__ == "__main__":
    unittest.main()
