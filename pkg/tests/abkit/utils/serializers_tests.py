import unittest
from fractions import Fraction
from abkit.services.series.truncated_series import TruncatedSeries
from abkit.utils.serializers import to_document, dumps


class Report:
    def to_json(self):
        return {"value": Fraction(2, 4), "items": (1, None)}


class TestSerializers(unittest.TestCase):
    def test_numbers_become_exact_strings(self):
        self.assertEqual(to_document(Fraction(1, 2)), "1/2")
        self.assertEqual(to_document(-3), "-3")
        self.assertIs(to_document(True), True)

    def test_floats_are_refused(self):
        with self.assertRaises(TypeError):
            to_document({"x": 0.5})

    def test_nested_objects(self):
        self.assertEqual(to_document([Report()]), [{"value": "1/2", "items": ["1", None]}])
        self.assertEqual(to_document({1: TruncatedSeries([0, 1], 3)}), {"1": "b"})

    def test_unknown_types(self):
        with self.assertRaises(TypeError):
            to_document(object())

    def test_dumps_sorts_keys(self):
        self.assertEqual(dumps({"b": 1, "a": Fraction(1, 3)}), '{\n  "a": "1/3",\n  "b": "1"\n}')


if __name__ == "__main__":
    unittest.main()
