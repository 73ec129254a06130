import math
import unittest

import numpy as np

from src.analysis.algebra import GroupAlgebraElement, TruncatedRepresentation, bmo_integrand
from src.analysis.lacunary import c_delta_constant, propose_lacunary_sequence
from src.analysis.semigroup_bmo import (
    bmo_c_estimate, bmo_c_sweep, bmo_estimate, bmo_lower_witness, coefficient_norms, corollary1_check,
    limit_integrand, support_lacunarity, theorem1_certificate, torus_bmo_estimate, torus_bmo_sweep,
    trig_sup
)
from src.common.errors import CertificateError, DimensionMismatchError, RankError
from src.groups.lengths import abs_length, table_length, word_length_psi
from src.groups.words import IDENTITY, Word, power

A = Word([1])
B = Word([2])
GRID = [0.05, 0.2, 1.0, 5.0]


def integer_element(exponents, coefficients=None):
    return GroupAlgebraElement.scalar_sum([power(1, k) for k in exponents], coefficients)


class TestColumnSweep(unittest.TestCase):
    def test_single_generator(self):
        x = GroupAlgebraElement.delta(A)
        sweep = bmo_c_sweep(word_length_psi(), x, GRID, R=2)
        for t, value in zip(GRID, sweep.values):
            self.assertAlmostEqual(value, 1 - math.exp(-t), places=7)
        self.assertAlmostEqual(sweep.value, 1.0, places=7)
        self.assertEqual(sweep.t_star, math.inf)

    def test_without_limit_t_star_is_on_the_grid(self):
        sweep = bmo_c_sweep(word_length_psi(), GroupAlgebraElement.delta(A), GRID, R=2, include_limit=False)
        self.assertEqual(sweep.t_star, 5.0)

    def test_monotone_in_radius(self):
        x = GroupAlgebraElement.scalar_sum([A, Word([2, 2])])
        psi = word_length_psi()
        small = bmo_c_estimate(psi, x, GRID, R=1, include_limit=False)
        large = bmo_c_estimate(psi, x, GRID, R=2, include_limit=False)
        self.assertLessEqual(small, large + 1e-9)

    def test_zero_element(self):
        self.assertEqual(bmo_c_estimate(word_length_psi(), GroupAlgebraElement.zero(), GRID), 0.0)

    def test_bad_grid(self):
        with self.assertRaises(ValueError):
            bmo_c_sweep(word_length_psi(), GroupAlgebraElement.delta(A), [], R=1)
        with self.assertRaises(ValueError):
            bmo_c_sweep(word_length_psi(), GroupAlgebraElement.delta(A), [-1.0], R=1)


class TestLimitIntegrand(unittest.TestCase):
    def test_only_the_kernel_of_psi_survives(self):
        psi = table_length({A: 1.0, Word([-1]): 1.0, B: 1.0, Word([-2]): 1.0,
                            Word([-1, 2]): 0.0, Word([-2, 1]): 0.0})
        x = GroupAlgebraElement.scalar_sum([A, B])
        limit = limit_integrand(psi, x)
        self.assertEqual(set(limit.support), {IDENTITY, Word([-1, 2]), Word([-2, 1])})

    def test_word_length_limit_is_the_trace_part(self):
        limit = limit_integrand(word_length_psi(), GroupAlgebraElement.scalar_sum([A, B]))
        self.assertEqual(limit.support, (IDENTITY,))
        self.assertAlmostEqual(complex(limit.coefficient(IDENTITY)[0, 0]).real, 2.0)


class TestCertificates(unittest.TestCase):
    def test_lacunary_support(self):
        report = support_lacunarity(abs_length(), integer_element([2, 4, 8, 16]))
        self.assertIsNotNone(report)
        self.assertAlmostEqual(report.delta, 0.5)

    def test_uncertifiable_supports(self):
        psi = word_length_psi()
        self.assertIsNone(support_lacunarity(psi, GroupAlgebraElement.scalar_sum([A, B])))
        self.assertIsNone(support_lacunarity(psi, GroupAlgebraElement.scalar_sum([IDENTITY, A])))
        self.assertTrue(support_lacunarity(psi, GroupAlgebraElement.delta(A)).passed)

    def test_theorem_bound(self):
        x = integer_element([2, 4, 8, 16])
        self.assertAlmostEqual(theorem1_certificate(abs_length(), x), math.sqrt(c_delta_constant(0.5) * 4))
        self.assertEqual(theorem1_certificate(abs_length(), GroupAlgebraElement.zero()), 0.0)
        self.assertAlmostEqual(theorem1_certificate(abs_length(), integer_element([3], [2.0])), 2.0)
        self.assertIsNone(theorem1_certificate(word_length_psi(), GroupAlgebraElement.scalar_sum([A, B])))


class TestLowerWitness(unittest.TestCase):
    def test_closed_form(self):
        x = integer_element([1, 2], [1.0, 2.0])
        expected = max((1 - math.exp(-t)) ** 2 + 4 * (1 - math.exp(-2 * t)) ** 2 for t in GRID)
        self.assertAlmostEqual(bmo_lower_witness(abs_length(), x, GRID, include_limit=False), expected)
        self.assertAlmostEqual(bmo_lower_witness(abs_length(), x, GRID), 5.0)

    def test_witness_is_below_the_estimate(self):
        psi = word_length_psi()
        x = GroupAlgebraElement.scalar_sum([A, Word([1, 2]), Word([-2])], [1.0, -0.5, 2.0])
        witness = bmo_lower_witness(psi, x, GRID, include_limit=False)
        estimate = bmo_c_estimate(psi, x, GRID, R=2, include_limit=False)
        self.assertLessEqual(witness, estimate ** 2 + 1e-6)


class TestEstimate(unittest.TestCase):
    def test_lacunary_integer_element(self):
        x = integer_element([2, 4, 8, 16])
        estimate = bmo_estimate(abs_length(), x, GRID, R=8)
        self.assertIsNotNone(estimate.certified_upper)
        self.assertLessEqual(estimate.bmo_lower, estimate.certified_upper)
        self.assertGreaterEqual(estimate.bmo_lower, estimate.bmo_c_lower)
        self.assertEqual(len(estimate.rows), len(GRID))
        self.assertEqual(estimate.radius_used, 8)
        self.assertAlmostEqual(estimate.lacunarity.delta, 0.5)

    def test_free_group_element_without_certificate(self):
        estimate = bmo_estimate(word_length_psi(), GroupAlgebraElement.scalar_sum([A, B]), GRID, R=2)
        self.assertIsNone(estimate.certified_upper)
        self.assertIsNone(estimate.to_dict()['lacunarity'])
        self.assertGreater(estimate.bmo_lower, 0.0)


class TestTorus(unittest.TestCase):
    def test_trig_sup_refines_between_samples(self):
        phase = np.exp(0.3j)
        z = GroupAlgebraElement({A: phase, Word([-1]): np.conj(phase)})
        self.assertAlmostEqual(trig_sup(z, 16), 2.0, places=8)

    def test_trig_sup_of_a_constant(self):
        self.assertAlmostEqual(trig_sup(GroupAlgebraElement.delta(IDENTITY, 0.25), 8), 0.25)

    def test_torus_dominates_the_truncated_bound(self):
        x = integer_element([1, 3], [1.0, -0.5])
        torus = torus_bmo_estimate(x, GRID, n_samples=1024)
        truncated = bmo_c_estimate(abs_length(), x, GRID, R=8)
        self.assertGreaterEqual(torus + 1e-8, truncated)

    def test_single_frequency(self):
        sweep = torus_bmo_sweep(integer_element([2]), GRID, n_samples=64)
        self.assertAlmostEqual(sweep.value, 1.0)
        self.assertEqual(sweep.t_star, math.inf)
        self.assertAlmostEqual(sweep.values[0], 1 - math.exp(-0.1))

    def test_input_checks(self):
        with self.assertRaises(RankError):
            torus_bmo_sweep(GroupAlgebraElement.delta(B), GRID)
        with self.assertRaises(DimensionMismatchError):
            torus_bmo_sweep(GroupAlgebraElement.delta(A, dim=2), GRID)


class TestMomentInequality(unittest.TestCase):
    def test_powers_of_two_at_p_four(self):
        x = integer_element([2 ** k for k in range(1, 9)])
        report = corollary1_check(abs_length(), x, 4)
        self.assertAlmostEqual(report.lhs, math.sqrt(120))
        self.assertAlmostEqual(report.rhs, c_delta_constant(0.5) ** 0.5 * 16 * 8)
        self.assertAlmostEqual(report.rhs, 351.03, places=1)
        self.assertTrue(report.passed)

    def test_schatten_coefficients(self):
        e11 = np.array([[1.0, 0.0], [0.0, 0.0]])
        x = GroupAlgebraElement({power(1, 2): e11, power(1, 4): np.eye(2)}, dim=2)
        column, row = coefficient_norms(x, 4, 'schatten')
        # sum c^dagger c = diag(2, 1), normalized Schatten-2 norm sqrt((4 + 1) / 2)
        self.assertAlmostEqual(column, math.sqrt(2.5))
        self.assertAlmostEqual(row, math.sqrt(2.5))
        operator_column, operator_row = coefficient_norms(x, 4, 'operator')
        self.assertAlmostEqual(operator_column, 2.0)
        self.assertAlmostEqual(operator_row, 2.0)
        self.assertTrue(corollary1_check(abs_length(), x, 4, coefficient_norm='schatten').passed)

    def test_needs_a_lacunary_support(self):
        with self.assertRaises(CertificateError):
            corollary1_check(abs_length(), integer_element([1, -1]), 4)

class TestSweepAcceptance(unittest.TestCase):
    def test_ten_powers_of_two_on_the_circle(self):
        psi = abs_length()
        x = integer_element([2 ** k for k in range(1, 11)])
        witness = bmo_lower_witness(psi, x)
        torus = torus_bmo_estimate(x)
        truncated = bmo_c_sweep(psi, x, R=4096)
        self.assertGreaterEqual(witness, 9.9)
        self.assertGreaterEqual(torus ** 2, 10 * (1 - 1e-6))
        self.assertLessEqual(torus ** 2, 75.21)
        self.assertLess(abs(truncated.value - torus), 0.02)
        self.assertLessEqual(truncated.value, torus + 1e-6)

    def test_sweep_matches_a_dense_compression(self):
        psi = abs_length()
        x = integer_element([1, 3, 7], [1.0, -0.5, 0.25j])
        R = 40
        rep = TruncatedRepresentation(1, R)
        sweep = bmo_c_sweep(psi, x, GRID, R=R, include_limit=False)
        for t, value in zip(GRID, sweep.values):
            matvec = rep.compression(bmo_integrand(psi, t, x))
            dense = np.column_stack([matvec(column) for column in np.eye(rep.size, dtype=complex)])
            top = np.linalg.eigvalsh((dense + dense.conj().T) / 2)[-1]
            self.assertAlmostEqual(value, math.sqrt(max(top, 0.0)), places=5)

    def test_lacunary_sequence_on_the_free_group(self):
        psi = word_length_psi()
        seq, lacunarity = propose_lacunary_sequence(2, psi, 5, seed=3)
        self.assertGreater(lacunarity.delta, 0)
        x = GroupAlgebraElement.scalar_sum(seq)
        estimate = bmo_estimate(psi, x, R=8)
        witness = bmo_lower_witness(psi, x)
        self.assertLessEqual(witness, estimate.bmo_lower ** 2 + 1e-9)
        self.assertLessEqual(estimate.bmo_lower ** 2, lacunarity.c_delta * 5 * (1 + 1e-6))
        self.assertAlmostEqual(estimate.certified_upper, math.sqrt(lacunarity.c_delta * 5))


class TestMomentAcceptance(unittest.TestCase):
    def random_fixture(self, rng):
        K = int(rng.integers(2, 9))
        exponents = [int(rng.integers(1, 6))]
        for _ in range(K - 1):
            exponents.append(int(math.ceil(exponents[-1] * rng.uniform(1.5, 3.0))))
        radii = np.sqrt(rng.uniform(size=K))
        coefficients = radii * np.exp(2j * math.pi * rng.uniform(size=K))
        return integer_element(exponents, list(coefficients))

    def test_random_lacunary_fixtures(self):
        rng = np.random.default_rng(17)
        failures = []
        for trial in range(100):
            x = self.random_fixture(rng)
            for p in (4, 6):
                report = corollary1_check(abs_length(), x, p)
                if not report.passed:
                    failures.append((trial, p, report.lhs, report.rhs))
        self.assertEqual(failures, [])



if __name__ == '__main__':
    unittest.main()
