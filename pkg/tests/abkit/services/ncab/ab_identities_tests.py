import unittest
from abkit.services.series.truncated_series import TruncatedSeries
from abkit.services.ncab.ab_algebra import ABElement, nf_mul
from abkit.services.ncab.ab_identities import (
    LEFTMOST, RIGHTMOST, reduce_word, rewrite_product, rewrite_word_element, powers_identity, lemma_a_gives_b,
    action_polys, action_polys_oracle, action_polys_bounds_hold, verify_identities
)
from abkit.utils.errors import TruncationInsufficientError


class TestABIdentities(unittest.TestCase):
    def test_single_rewrite(self):
        self.assertEqual(reduce_word("ab"), (((1, 1), 1), ((2, 0), 1)))
        self.assertEqual(reduce_word("bba"), (((2, 1), 1),))

    def test_strategies_agree(self):
        for word in ("aabab", "abababa", "aaabbb"):
            self.assertEqual(reduce_word(word, LEFTMOST), reduce_word(word, RIGHTMOST))

    def test_rewriting_matches_normal_form_product(self):
        x = ABElement({(0, 2): 1, (1, 1): -2}, 6, 8)
        y = ABElement({(1, 0): 3, (0, 1): 1}, 6, 8)
        self.assertEqual(rewrite_product(x, y), nf_mul(x, y))
        self.assertEqual(rewrite_product(x, y, RIGHTMOST), nf_mul(x, y))

    def test_word_element(self):
        a = ABElement.generator_a(6)
        b = ABElement.generator_b(6)
        self.assertEqual(rewrite_word_element("aab", 6), a * a * b)

    def test_powers_identity(self):
        for k in range(5):
            self.assertTrue(powers_identity(k, 7))

    def test_lemma_a_gives_b(self):
        # N = 1: b^2 = a b - b a
        self.assertTrue(lemma_a_gives_b(1, 3))
        self.assertTrue(lemma_a_gives_b(3, 7))

    def test_lemma_needs_room_for_b_power(self):
        with self.assertRaises(TruncationInsufficientError):
            lemma_a_gives_b(2, 4)
        with self.assertRaises(ValueError):
            lemma_a_gives_b(0, 4)

    def test_action_polys(self):
        table = action_polys(1, 2)
        self.assertEqual(table[(2, 0)], TruncatedSeries([0, 1], var="a"))
        self.assertEqual(table[(2, 1)], TruncatedSeries.constant(1, var="a"))
        self.assertTrue(table[(1, 1)].is_zero())
        for N in range(5):
            table = action_polys(N, 4)
            self.assertEqual(table, action_polys_oracle(N, 4))
            self.assertTrue(action_polys_bounds_hold(table, N))

    def test_battery(self):
        report = verify_identities(max_n=2, seed=3, commutation_pairs=25, associativity_triples=10,
                                   max_power=3, max_action=3)
        self.assertEqual(set(report), {"commutation", "associativity", "confluence", "lemma_a_gives_b",
                                       "powers_identity", "action_polys"})
        for name, check in report.items():
            self.assertTrue(check["passed"], name)
        self.assertEqual(report["commutation"]["pairs"], 25)


if __name__ == "__main__":
    unittest.main()
