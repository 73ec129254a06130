import math
import unittest
from unittest.mock import patch

import numpy as np

from src.analysis.algebra import GroupAlgebraElement, haagerup_pisier_bound, operator_norm_lower, random_element
from src.common.config import Budget, budget_scope
from src.common.errors import BudgetExceededError, ConfigError, DuplicateElementError
from src.groups.lengths import word_length_psi
from src.groups.words import (
    IDENTITY, Word, apply_homomorphism, format_word, invert, is_reduced, random_word, reduce
)
from src.sidon import sidon_sets
from src.sidon.folding import is_free_basis
from src.sidon.sidon_sets import (
    SymmetricWordSpec, count_index_bound, count_intersection, free_group_ball_size, freeness_bruteforce,
    generate_qn, greedy_lacunary_cover, lambda_infty_witness, pi_homomorphism, qn_image_ball,
    unconditionality_witness
)


class TestQn(unittest.TestCase):
    def test_q2_with_two_indices(self):
        words = generate_qn(SymmetricWordSpec(2, 2))
        self.assertEqual(len(words), 12)
        self.assertEqual(len(set(words)), 12)
        self.assertTrue(all(len(w) == 4 and is_reduced(w) for w in words))
        self.assertIn(Word([1, 2, 2, 1]), words)
        self.assertIn(Word([-2, 1, 1, -2]), words)

    def test_order_is_deterministic(self):
        spec = SymmetricWordSpec(2, 3)
        self.assertEqual(generate_qn(spec), generate_qn(spec))

    def test_q1_is_the_squares(self):
        words = generate_qn(SymmetricWordSpec(1, 2))
        self.assertEqual(sorted(words), sorted([Word([k, k]) for k in (-1, 1, -2, 2)]))

    def test_q2_is_free(self):
        self.assertTrue(is_free_basis(generate_qn(SymmetricWordSpec(2, 2))).free)

    def test_twisted_phi(self):
        spec = SymmetricWordSpec(1, 2, phi={1: 2, 2: 1})
        words = generate_qn(spec)
        self.assertIn(Word([1, 2]), words)
        self.assertIn(Word([-2, -1]), words)
        self.assertEqual(len(words), 4)

    def test_non_reduced_candidates_are_dropped(self):
        # phi(1) = -1 makes g_1 g_phi(1) cancel
        words = generate_qn(SymmetricWordSpec(1, 2, phi={1: -1, 2: 2}))
        self.assertNotIn(IDENTITY, words)
        self.assertEqual(len(words), 2)

    def test_phi_validation(self):
        with self.assertRaises(ConfigError):
            SymmetricWordSpec(1, 2, phi={1: 2, 2: 2})
        with self.assertRaises(ConfigError):
            SymmetricWordSpec(1, 2, phi={1: 1})
        with self.assertRaises(ConfigError):
            SymmetricWordSpec(0, 2)

    def test_sequence_cap(self):
        with self.assertRaises(BudgetExceededError):
            generate_qn(SymmetricWordSpec(3, 4), cap=100)
        with budget_scope(Budget(sequence_cap=10)):
            with self.assertRaises(BudgetExceededError):
                generate_qn(SymmetricWordSpec(2, 2))


class TestBruteForce(unittest.TestCase):
    def test_power_relation(self):
        words = [Word([1]), Word([1, 1])]
        shallow = freeness_bruteforce(words, 2)
        self.assertTrue(shallow.free_up_to_M)
        self.assertFalse(shallow.monotone)
        deep = freeness_bruteforce(words, 3)
        self.assertFalse(deep.free_up_to_M)
        self.assertEqual(len(deep.counterexample), 3)

    def test_word_and_inverse_are_one_factor_class(self):
        report = freeness_bruteforce([Word([1, 2]), Word([-2, -1])], 3)
        self.assertTrue(report.free_up_to_M)
        self.assertTrue(report.monotone)
        # two factors, each followed by anything but its inverse
        self.assertEqual(report.products_checked, 2 + 2)

    def test_relation_through_an_inverse(self):
        # b = a^-1 (ab) is caught as a^-1 (ab) b^-1 = e
        report = freeness_bruteforce([Word([1]), Word([2]), Word([1, 2])], 3)
        self.assertFalse(report.free_up_to_M)
        self.assertEqual(len(report.counterexample), 3)

    def test_free_generators(self):
        report = freeness_bruteforce([Word([1]), Word([2])], 4)
        self.assertTrue(report.free_up_to_M)
        self.assertTrue(report.monotone)
        # 4 * 3^(j-1) reduced products of j factors for j = 2..4
        self.assertEqual(report.products_checked, 12 + 36 + 108)

    def test_agrees_with_folding_on_q2(self):
        words = generate_qn(SymmetricWordSpec(2, 2))[:4]
        self.assertTrue(freeness_bruteforce(words, 3).free_up_to_M)
        self.assertTrue(is_free_basis(words).free)

    def test_arguments(self):
        with self.assertRaises(ValueError):
            freeness_bruteforce([Word([1])], 1)
        with self.assertRaises(BudgetExceededError):
            freeness_bruteforce([Word([k]) for k in range(1, 6)], 6, cap=1000)

    def test_report_dict(self):
        payload = freeness_bruteforce([Word([1]), Word([1, 1])], 3).to_dict()
        self.assertEqual(payload['M'], 3)
        self.assertFalse(payload['free_up_to_M'])
        self.assertTrue(all(isinstance(w, str) for w in payload['counterexample']))


class TestCounting(unittest.TestCase):
    def test_pi_images(self):
        pi = pi_homomorphism()
        self.assertEqual(apply_homomorphism(pi, [2]), (1, 1, 2, -1, -1))
        self.assertEqual(apply_homomorphism(pi, [1, 1]), (1, 2, 2, -1))

    def test_index_bound(self):
        self.assertEqual(count_index_bound(2, 3), 4)
        self.assertEqual(free_group_ball_size(2), 17)

    def test_single_letter_count(self):
        for m in (1, 2, 3, 5):
            self.assertEqual(count_intersection(1, m).count, 2 * (m - 1))

    def test_count_report(self):
        report = count_intersection(2, 2)
        self.assertEqual(report.index_bound, 2)
        self.assertEqual(report.candidates, 12)
        self.assertAlmostEqual(report.ratio_to_mn, report.count / 4)
        self.assertAlmostEqual(report.ball_exponent, math.log(free_group_ball_size(8)) / 8)
        self.assertGreater(report.count, 0)

    def test_images_lie_in_the_ball(self):
        images = qn_image_ball(2, 3)
        self.assertTrue(all(len(w) <= 12 for w in images))
        self.assertEqual(len(images), count_intersection(2, 3).count)

    def test_arguments(self):
        with self.assertRaises(ConfigError):
            count_intersection(0, 2)


class TestGreedyCover(unittest.TestCase):
    def test_parts_are_lacunary(self):
        psi = word_length_psi()
        words = qn_image_ball(1, 4)
        parts = greedy_lacunary_cover(psi, words, 0.5)
        self.assertEqual(sum(len(p) for p in parts), len(words))
        for part in parts:
            values = [psi(w) for w in part]
            self.assertTrue(all(b >= 1.5 * a for a, b in zip(values, values[1:])))

    def test_arguments(self):
        with self.assertRaises(ValueError):
            greedy_lacunary_cover(word_length_psi(), [Word([1])], 0.0)


class TestWitnesses(unittest.TestCase):
    def test_certified_ratios_are_at_most_one(self):
        report = unconditionality_witness([Word([1]), Word([2])], trials=3, R=2)
        self.assertEqual(len(report.ratios), 3)
        self.assertTrue(all(0 < r <= 1 + 1e-9 for r in report.ratios))
        self.assertTrue(report.certified)
        self.assertEqual(report.value, max(report.ratios))

    def test_empirical_pairing(self):
        report = unconditionality_witness([Word([1]), Word([2])], trials=2, R=2, pairing='empirical')
        self.assertFalse(report.certified)
        self.assertEqual(report.pairing, 'empirical')

    def test_seed_reproducibility(self):
        words = [Word([1]), Word([1, 2])]
        first = lambda_infty_witness(words, trials=3, R=2, seed=4)
        second = lambda_infty_witness(words, trials=3, R=2, seed=4)
        self.assertEqual(first.ratios, second.ratios)

    def test_lambda_ratio_bounds(self):
        # ||x|| lies between the column size and the Haagerup-Pisier bound on a free set
        report = lambda_infty_witness([Word([1]), Word([2])], trials=3, R=2, dim=2)
        self.assertTrue(all(1 - 1e-9 <= r <= 2 + 1e-9 for r in report.ratios))
        self.assertEqual(report.kind, 'lambda')

    def test_arguments(self):
        with self.assertRaises(ValueError):
            lambda_infty_witness([Word([1])], trials=0)
        with self.assertRaises(DuplicateElementError):
            unconditionality_witness([Word([1]), Word([1])], trials=1)
        with self.assertRaises(ValueError):
            unconditionality_witness([Word([1])], trials=1, pairing='other')


class TestQnFreenessAcceptance(unittest.TestCase):
    """Q_n is a free subset and the brute-force products grow in length."""

    CASES = ((1, 3), (2, 2), (2, 3), (3, 2))

    def test_folding_certifies_every_case(self):
        for n, m in self.CASES:
            with self.subTest(n=n, m=m):
                words = generate_qn(SymmetricWordSpec(n, m))
                # Q_n is closed under inversion
                self.assertEqual({invert(w) for w in words}, set(words))
                report = is_free_basis(words)
                self.assertTrue(report.free)
                self.assertEqual(report.pairs, len(words) // 2)
                self.assertEqual(report.rank, report.pairs)

    def test_bruteforce_concurs_with_monotone_growth(self):
        for n, m in self.CASES:
            with self.subTest(n=n, m=m):
                words = generate_qn(SymmetricWordSpec(n, m))
                report = freeness_bruteforce(words, 3)
                self.assertTrue(report.free_up_to_M)
                self.assertTrue(report.monotone)
                size = len(words)
                self.assertEqual(report.products_checked, size * (size - 1) + size * (size - 1) ** 2)

    def test_random_small_sets_agree_with_folding(self):
        rng = np.random.default_rng(11)
        for trial in range(50):
            count = int(rng.integers(1, 6))
            words = list(dict.fromkeys(random_word(2, int(rng.integers(1, 7)), rng) for _ in range(count)))
            with self.subTest(trial=trial, words=[format_word(w) for w in words]):
                certified = is_free_basis(words).free
                oracle = freeness_bruteforce(words, 3)
                if certified:
                    self.assertTrue(oracle.free_up_to_M)
                if not oracle.free_up_to_M:
                    self.assertFalse(certified)
                    self.assertEqual(reduce([x for f in reversed(oracle.counterexample) for x in f]), IDENTITY)


class TestHaagerupPisierAcceptance(unittest.TestCase):
    def test_four_q2_words(self):
        words = generate_qn(SymmetricWordSpec(2, 2))[:4]
        x = GroupAlgebraElement.scalar_sum(words)
        self.assertTrue(is_free_basis(words).free)
        lower = operator_norm_lower(x, 8)
        self.assertGreaterEqual(lower, 2.0 - 1e-9)
        self.assertLessEqual(lower, haagerup_pisier_bound(x, True) + 1e-9)
        self.assertAlmostEqual(haagerup_pisier_bound(x, True), 4.0)

    def test_random_matrix_coefficients(self):
        rng = np.random.default_rng(5)
        pool = generate_qn(SymmetricWordSpec(2, 2))
        violations = 0
        for _ in range(20):
            chosen = [pool[i] for i in sorted(rng.choice(len(pool), size=4, replace=False))]
            x = random_element(chosen, 2, rng)
            upper = haagerup_pisier_bound(x, is_free_basis(chosen).free)
            if operator_norm_lower(x, 6) > upper + 1e-9:
                violations += 1
        self.assertEqual(violations, 0)

    def test_certified_witness_uses_the_free_pairing(self):
        words = generate_qn(SymmetricWordSpec(2, 2))[:4]
        with patch.object(sidon_sets, 'haagerup_pisier_bound', wraps=haagerup_pisier_bound) as bound:
            report = unconditionality_witness(words, trials=2, R=4)
        self.assertEqual(bound.call_count, 2)
        # signing keeps both upper bounds, so ratios stay <= 1
        self.assertTrue(all(r <= 1 + 1e-9 for r in report.ratios))
        self.assertTrue(report.certified)


class TestCountingAcceptance(unittest.TestCase):
    def test_single_letter_count_up_to_fifty(self):
        for m in range(2, 51):
            self.assertEqual(count_intersection(1, m).count, 2 * (m - 1), msg=f"m={m}")

    def test_polynomial_count_against_exponential_ball(self):
        reports = [count_intersection(2, m) for m in (4, 8, 16)]
        ratios = [r.count / r.m ** 2 for r in reports]
        self.assertLessEqual(max(ratios), 4 * min(ratios))
        for report in reports:
            self.assertLess(abs(report.ball_exponent - math.log(3)) / math.log(3), 0.05)

    def test_pi_is_injective_on_small_qn(self):
        pi = pi_homomorphism()
        for n in (1, 2):
            for m in range(1, 5):
                words = generate_qn(SymmetricWordSpec(n, m))
                images = {apply_homomorphism(pi, w) for w in words}
                self.assertEqual(len(images), len(words), msg=f"n={n}, m={m}")


if __name__ == '__main__':
    unittest.main()
