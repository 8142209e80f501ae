"""
Algebraic properties of the inequality set on random states.
Random states come from seeded numpy generators; the pure identities are fuzzed with hypothesis.
"""

import unittest

import numpy as np
from hypothesis import given, seed, settings as hyp_settings, strategies as st
from hypothesis.extra.numpy import arrays

from tests.helpers import (
    random_antisymmetric, random_gaussian_state, random_hermitian, random_mixed_state, random_pure_state
)

from core.gaussian import quad_triple_moments
from core.inequalities import (
    det_f, eval_n3_det, eval_pair_bound13, eval_prod3, eval_prod4, eval_sum3, eval_sum3_robertson,
    eval_zero_comm, evaluate_all, four_derived,
    lambda_pfaffian_identity
)
from core.moments import MomentSet, moment_set
from core.operators import psd_check

MARGIN_TOL = 1e-9


def _random_tuple_moments(rng: np.random.Generator, n: int) -> MomentSet:
    dim = int(rng.integers(2, 11))
    state = random_pure_state(rng, dim)
    ops = [random_hermitian(rng, dim, f"z{k + 1}") for k in range(n)]
    return moment_set(state, ops)


class TestCorrectInequalitiesHold(unittest.TestCase):
    def test_random_pure_states(self):
        rng = np.random.default_rng(2024)
        for trial in range(1000):
            ms = _random_tuple_moments(rng, 3 if trial % 2 == 0 else 4)
            for report in evaluate_all(ms):
                if report.correct:
                    self.assertGreaterEqual(report.relative_margin, -MARGIN_TOL,
                                            f"{report.id} on trial {trial}: margin {report.margin:.3e}")

    def test_sum_bound_beats_robertson_sum(self):
        rng = np.random.default_rng(7)
        for _ in range(300):
            ms = _random_tuple_moments(rng, 3)
            self.assertGreaterEqual(eval_sum3(ms).rhs, eval_sum3_robertson(ms).rhs - 1e-12)

    def test_pair_bound_dominates_zero_commutator(self):
        rng = np.random.default_rng(8)
        for _ in range(300):
            ms = _random_tuple_moments(rng, 3)
            self.assertGreaterEqual(eval_pair_bound13(ms).rhs, eval_zero_comm(ms, warn=False).rhs - 1e-12)

    def test_psi_dominates_psi_star(self):
        rng = np.random.default_rng(9)
        for _ in range(300):
            d = four_derived(_random_tuple_moments(rng, 4))
            self.assertGreaterEqual(d.Psi, d.PsiStar - 1e-12 * max(1.0, d.Psi))

    def test_gaussian_quadratic_triple(self):
        rng = np.random.default_rng(10)
        for _ in range(500):
            hbar = float(rng.uniform(0.3, 2.0))
            gs = random_gaussian_state(rng, hbar=hbar)
            ms = quad_triple_moments(gs)
            self.assertGreater(ms.X[2, 2], 0.0)
            for report in evaluate_all(ms):
                if report.correct:
                    self.assertGreaterEqual(report.relative_margin, -MARGIN_TOL, report.id)


class TestMomentSetProperties(unittest.TestCase):
    def test_f_is_psd_on_physical_states(self):
        rng = np.random.default_rng(40)
        for trial in range(500):
            dim = int(rng.integers(2, 13))
            if trial % 2 == 0:
                state = random_pure_state(rng, dim)
            else:
                state = random_mixed_state(rng, dim, rank=int(rng.integers(1, dim + 1)))
            n = int(rng.integers(2, 6))
            ms = moment_set(state, [random_hermitian(rng, dim, f"z{k + 1}") for k in range(n)])
            report = psd_check(ms.F, 1e-9)
            self.assertTrue(report.is_psd, f"trial {trial}: min eigenvalue {report.min_eigenvalue:.3e}")

    def test_identity_shift_only_moves_means(self):
        rng = np.random.default_rng(41)
        for _ in range(50):
            dim = int(rng.integers(2, 9))
            state = random_mixed_state(rng, dim, rank=min(3, dim))
            ops = [random_hermitian(rng, dim, f"z{k + 1}") for k in range(3)]
            shifts = rng.uniform(-5.0, 5.0, size=3)
            base = moment_set(state, ops)
            moved = moment_set(state, [op.shifted(c) for op, c in zip(ops, shifts)])
            np.testing.assert_allclose(moved.means, base.means + shifts, atol=1e-12)
            np.testing.assert_allclose(moved.X, base.X, atol=1e-10)
            np.testing.assert_allclose(moved.Y, base.Y, atol=1e-10)

    def test_scaling(self):
        rng = np.random.default_rng(42)
        for lam in (0.5, 2.0, 3.0):
            state = random_pure_state(rng, 6)
            ops = [random_hermitian(rng, 6, f"z{k + 1}") for k in range(4)]
            factors = np.array([lam, 1.0, lam, 1.0 / lam])
            base = moment_set(state, ops)
            scaled = moment_set(state, [op.scaled(f) for op, f in zip(ops, factors)])
            outer = np.outer(factors, factors)
            np.testing.assert_allclose(scaled.means, factors * base.means, rtol=1e-12, atol=1e-14)
            np.testing.assert_allclose(scaled.X, outer * base.X, rtol=1e-12, atol=1e-13)
            np.testing.assert_allclose(scaled.Y, outer * base.Y, rtol=1e-12, atol=1e-13)

    def test_product_forms_are_homogeneous(self):
        rng = np.random.default_rng(43)
        for trial in range(60):
            n = 3 if trial % 2 == 0 else 4
            ms = _random_tuple_moments(rng, n)
            factors = rng.uniform(0.3, 3.0, size=n)
            outer = np.outer(factors, factors)
            scaled = MomentSet(means=factors * ms.means, X=outer * ms.X, Y=outer * ms.Y)
            weight = float(np.prod(factors)) ** 2
            fn = eval_prod3 if n == 3 else eval_prod4
            before, after = fn(ms), fn(scaled)
            self.assertAlmostEqual(after.lhs, weight * before.lhs, delta=1e-9 * weight * abs(before.lhs) + 1e-15)
            self.assertAlmostEqual(after.rhs, weight * before.rhs, delta=1e-9 * weight * abs(before.rhs) + 1e-15)
            self.assertEqual(after.satisfied, before.satisfied)

    def test_triple_determinant_expansion(self):
        rng = np.random.default_rng(44)
        for _ in range(200):
            dim = int(rng.integers(4, 11))
            state = random_pure_state(rng, dim)
            ms = moment_set(state, [random_hermitian(rng, dim, f"z{k + 1}") for k in range(3)])
            det = det_f(ms)
            report = eval_n3_det(ms)
            scale = max(1.0, float(np.max(np.abs(ms.F)))) ** 3
            self.assertGreater(det, 0.0)
            self.assertLessEqual(abs(report.margin - det), 1e-10 * scale)


class TestPfaffianIdentity(unittest.TestCase):
    def test_random_antisymmetric(self):
        rng = np.random.default_rng(11)
        for _ in range(1000):
            Y = random_antisymmetric(rng, 4)
            ms = MomentSet(means=np.zeros(4), X=np.eye(4), Y=Y)
            det_y, lam_sq = lambda_pfaffian_identity(ms)
            self.assertLessEqual(abs(det_y - lam_sq), 1e-9 * max(1.0, lam_sq))

    @seed(1)
    @hyp_settings(max_examples=200, deadline=None)
    @given(arrays(np.float64, (6,), elements=st.floats(min_value=-10.0, max_value=10.0)))
    def test_fuzzed_upper_triangle(self, upper):
        Y = np.zeros((4, 4))
        Y[np.triu_indices(4, k=1)] = upper
        Y -= Y.T
        det_y, lam_sq = lambda_pfaffian_identity(MomentSet(means=np.zeros(4), X=np.eye(4), Y=Y))
        self.assertLessEqual(abs(det_y - lam_sq), 1e-9 * max(1.0, lam_sq))

    def test_zero_commutators(self):
        self.assertEqual(lambda_pfaffian_identity(MomentSet(means=np.zeros(4), X=np.eye(4), Y=np.zeros((4, 4)))),
                         (0.0, 0.0))


_commutator_mean = st.floats(-1e3, 1e3).filter(lambda v: v == 0.0 or abs(v) > 1e-100)


class TestSumInequalityAlgebra(unittest.TestCase):
    @seed(2)
    @hyp_settings(max_examples=200, deadline=None)
    @given(_commutator_mean, _commutator_mean, _commutator_mean)
    def test_sum_bound_dominates_for_any_commutators(self, y12, y23, y13):
        Y = np.array([[0.0, y12, y13], [-y12, 0.0, y23], [-y13, -y23, 0.0]])
        ms = MomentSet(means=np.zeros(3), X=np.eye(3), Y=Y)
        stronger, weaker = eval_sum3(ms).rhs, eval_sum3_robertson(ms).rhs
        self.assertGreaterEqual(stronger * (1 + 1e-12), weaker)
        self.assertLessEqual(stronger, 2.0 * weaker * (1 + 1e-12) + 1e-300)


if __name__ == '__main__':
    unittest.main()
