import io
import math
import unittest
from contextlib import redirect_stderr

import numpy as np

from tests.helpers import random_hermitian, random_pure_state

from core.errors import DegenerateDenominatorError, InvalidIndexError, NonFiniteError, TupleSizeError
from core.gaussian import GaussianState, linear_moments
from core.inequalities import (
    CATALOG, catalog, catalog_entry, det_f, eval_detF, eval_false5, eval_gen3, eval_main4,
    eval_n3_det, eval_pair_bound13, eval_prod3, eval_prod4, eval_prod4_quadratic, eval_prod4_star,
    eval_robertson_det, eval_robertson_pair, eval_schrodinger_pair, eval_sum3, eval_sum3_power,
    eval_sum3_robertson, eval_sum4, eval_zero_comm, evaluate, evaluate_all, four_derived,
    lambda_pfaffian_identity
)
from core.moments import MomentSet, moment_set
from core.states import (
    XPXI_ROWS, CcsParams, Gaussian2dParams, ccs_moments, fock_pair, fock_vacuum,
    gaussian2d_moments, spin_operators, spin_superposition, xpxi_operators
)

SQRT3 = math.sqrt(3.0)


def ccs_triple(hbar: float = 1.0) -> MomentSet:
    gs = ccs_moments(CcsParams(1 / SQRT3, -0.5), hbar)
    return linear_moments(gs, XPXI_ROWS, ("x", "p", "xi"))


def spin1_triple() -> MomentSet:
    return moment_set(spin_superposition((0.5, 0.5 + 0.5j, 0.5j)), list(spin_operators(2)))


def diagonal_set(variances, Y=None) -> MomentSet:
    n = len(variances)
    return MomentSet(means=np.zeros(n), X=np.diag(variances), Y=np.zeros((n, n)) if Y is None else Y)


class TestCatalog(unittest.TestCase):
    def test_ids_unique_and_complete(self):
        ids = [entry.id for entry in catalog()]
        self.assertGreaterEqual(len(ids), 16)
        self.assertEqual(len(ids), len(set(ids)))
        self.assertIn("triple-product-naive-INCORRECT", ids)

    def test_every_entry_has_a_reference(self):
        for entry in catalog():
            self.assertTrue(entry.reference.strip(), entry.id)
        self.assertIn("Robertson", catalog_entry("robertson-pair").reference)

    def test_only_naive_bound_is_incorrect(self):
        incorrect = [entry.id for entry in CATALOG if not entry.correct]
        self.assertEqual(incorrect, ["triple-product-naive-INCORRECT"])

    def test_unknown_id(self):
        with self.assertRaises(KeyError):
            catalog_entry("no-such-bound")
        with self.assertRaises(KeyError):
            evaluate("no-such-bound", ccs_triple())

    def test_every_id_dispatches(self):
        three, four = ccs_triple(), gaussian2d_moments(Gaussian2dParams(1.0, 0.3, 1.0))
        for entry in CATALOG:
            ms = four if entry.n_required == 4 else three
            self.assertEqual(evaluate(entry.id, ms).id, entry.id)


class TestPairBounds(unittest.TestCase):
    def test_vacuum_saturates_both(self):
        pair = fock_pair(40)
        ms = moment_set(fock_vacuum(40), [pair.x, pair.p])
        for fn in (eval_robertson_pair, eval_schrodinger_pair):
            report = fn(ms, 0, 1)
            self.assertAlmostEqual(report.lhs, 0.25, places=12)
            self.assertAlmostEqual(report.rhs, 0.25, places=12)
            self.assertTrue(report.satisfied)
            self.assertEqual(report.indices, (1, 2))

    def test_spin1_robertson_is_useless(self):
        report = eval_robertson_pair(spin1_triple(), 0, 1)
        self.assertAlmostEqual(report.rhs, 0.0, places=12)
        self.assertAlmostEqual(report.lhs, 1 / 16, places=12)

    def test_spin1_schrodinger_is_exact(self):
        report = eval_schrodinger_pair(spin1_triple(), 0, 1)
        self.assertAlmostEqual(report.lhs, 1 / 16, places=12)
        self.assertAlmostEqual(report.rhs, 1 / 16, places=12)
        self.assertLessEqual(abs(report.margin), 1e-9)

    def test_ccs_saturates_schrodinger(self):
        report = eval_schrodinger_pair(ccs_triple(), 0, 1)
        self.assertLessEqual(abs(report.margin), 1e-12)

    def test_random_states(self):
        rng = np.random.default_rng(10)
        for _ in range(50):
            state = random_pure_state(rng, 4)
            ms = moment_set(state, [random_hermitian(rng, 4, "a"), random_hermitian(rng, 4, "b")])
            self.assertTrue(eval_robertson_pair(ms, 0, 1).satisfied)
            self.assertTrue(eval_schrodinger_pair(ms, 1, 0).satisfied)

    def test_index_errors(self):
        ms = ccs_triple()
        with self.assertRaises(InvalidIndexError):
            eval_robertson_pair(ms, 0, 5)
        with self.assertRaises(TupleSizeError):
            eval_schrodinger_pair(ms, 2, 2)

    def test_evaluate_pair_params(self):
        ms = ccs_triple()
        report = evaluate("robertson-pair", ms, (1, 2))
        self.assertEqual(report.indices, (2, 3))
        self.assertEqual(evaluate("robertson-pair", ms).indices, (1, 2))


class TestCounterexample(unittest.TestCase):
    def test_naive_bound_fails(self):
        report = eval_false5(ccs_triple())
        self.assertAlmostEqual(report.lhs, 1 / (3 * SQRT3), places=12)
        self.assertAlmostEqual(report.rhs, SQRT3 / 4, places=12)
        self.assertAlmostEqual(report.rhs / report.lhs, 2.25, places=12)
        self.assertFalse(report.satisfied)
        self.assertFalse(report.correct)

    def test_hbar_cubed_scaling(self):
        report = eval_false5(ccs_triple(hbar=0.7))
        self.assertAlmostEqual(report.lhs, 0.7 ** 3 / (3 * SQRT3), places=12)
        self.assertAlmostEqual(report.rhs / report.lhs, 2.25, places=10)

    def test_determinant_vanishes(self):
        ms = ccs_triple()
        self.assertLessEqual(abs(eval_detF(ms).margin), 1e-9)
        self.assertLessEqual(abs(eval_n3_det(ms).margin), 1e-9)

    def test_triple_product_saturated(self):
        self.assertLessEqual(abs(eval_prod3(ccs_triple()).margin), 1e-9)

    def test_sum_forms(self):
        ms = ccs_triple()
        gen = eval_gen3(ms, (1, 1, 1))
        self.assertAlmostEqual(gen.lhs, SQRT3, places=12)
        self.assertAlmostEqual(gen.rhs, SQRT3, places=12)
        self.assertEqual(gen.lhs, eval_sum3(ms).lhs)
        self.assertEqual(gen.rhs, eval_sum3(ms).rhs)

        robertson = eval_sum3_robertson(ms)
        self.assertAlmostEqual(robertson.rhs, 1.5, places=12)
        self.assertTrue(robertson.satisfied)

        power = eval_sum3_power(ms, 1)
        self.assertAlmostEqual(power.lhs, 1.0, places=12)
        self.assertAlmostEqual(power.rhs, 1.0, places=12)
        self.assertEqual(eval_sum3_power(ms, 0).rhs, eval_sum3(ms).rhs)

    def test_pair_bound_saturated(self):
        report = eval_pair_bound13(ccs_triple())
        self.assertAlmostEqual(report.lhs, 1 / SQRT3, places=12)
        self.assertAlmostEqual(report.details["B"], SQRT3 / 9, places=12)
        self.assertLessEqual(abs(report.margin), 1e-9)


class TestTripleBounds(unittest.TestCase):
    def test_spin1_sum(self):
        report = eval_sum3(spin1_triple())
        self.assertAlmostEqual(report.lhs, 1.0, places=12)
        self.assertAlmostEqual(report.rhs, 1.0, places=12)

    def test_spin1_product(self):
        report = eval_prod3(spin1_triple())
        self.assertAlmostEqual(report.lhs, 0.03125, places=12)
        self.assertAlmostEqual(report.rhs, 1 / 36, places=12)
        self.assertTrue(report.satisfied)

    def test_spin1_zero_commutator(self):
        report = eval_zero_comm(spin1_triple())
        self.assertAlmostEqual(report.lhs, 0.25, places=12)
        self.assertAlmostEqual(report.rhs, 2 / 9, places=12)
        self.assertAlmostEqual(report.lhs / report.rhs, 9 / 8, places=12)

    def test_pair_bound_reduces_to_zero_commutator(self):
        ms = spin1_triple()
        self.assertAlmostEqual(eval_pair_bound13(ms).rhs, eval_zero_comm(ms).rhs, places=12)

    def test_zero_commutator_warns_when_y12_nonzero(self):
        stderr = io.StringIO()
        with redirect_stderr(stderr):
            eval_zero_comm(ccs_triple())
        self.assertIn("zero-commutator-pair", stderr.getvalue())

        quiet = io.StringIO()
        with redirect_stderr(quiet):
            eval_zero_comm(ccs_triple(), warn=False)
            eval_zero_comm(spin1_triple())
        self.assertEqual(quiet.getvalue(), "")

    def test_weighted_sum_with_single_weight(self):
        report = eval_gen3(ccs_triple(), (1, 0, 0))
        self.assertEqual(report.rhs, 0.0)
        self.assertEqual(report.params, (1.0, 0.0, 0.0))

    def test_commuting_tuple(self):
        ms = diagonal_set([1.0, 2.0, 3.0])
        for fn in (eval_false5, eval_prod3, eval_sum3, eval_sum3_robertson, eval_zero_comm):
            report = fn(ms)
            self.assertEqual(report.rhs, 0.0)
            self.assertTrue(report.satisfied)

    def test_degenerate_third_variance(self):
        ms = diagonal_set([1.0, 1.0, 0.0])
        with self.assertRaises(DegenerateDenominatorError):
            eval_pair_bound13(ms)
        with self.assertRaises(DegenerateDenominatorError):
            eval_zero_comm(ms)
        ids = [r.id for r in evaluate_all(ms)]
        self.assertNotIn("triple-pair-bound", ids)

    def test_tuple_size_enforced(self):
        four = gaussian2d_moments(Gaussian2dParams(1.0, 0.0, 1.0))
        for fn in (eval_n3_det, eval_false5, eval_sum3, eval_prod3, eval_pair_bound13):
            with self.assertRaises(TupleSizeError):
                fn(four)
        with self.assertRaises(TupleSizeError):
            eval_gen3(ccs_triple(), (1, 1))

    def test_power_exponent_validation(self):
        with self.assertRaises(ValueError):
            eval_sum3_power(ccs_triple(), -1)

    def test_non_finite_sides(self):
        huge = diagonal_set([1e200, 1e200, 1e200])
        with self.assertRaises(NonFiniteError):
            eval_prod3(huge)


class TestFourObservables(unittest.TestCase):
    def setUp(self):
        self.uncorrelated = gaussian2d_moments(Gaussian2dParams(1.0, 0.0, 1.0))
        self.correlated = gaussian2d_moments(Gaussian2dParams(1.0, 0.8, 1.0))

    def test_derived_uncorrelated(self):
        d = four_derived(self.uncorrelated)
        self.assertAlmostEqual(d.P, 1 / 16, places=12)
        self.assertAlmostEqual(d.Psi, 1 / 8, places=12)
        self.assertAlmostEqual(d.PsiStar, 1 / 8, places=12)
        self.assertAlmostEqual(d.Lambda, 1 / 4, places=12)

    def test_derived_correlated(self):
        d = four_derived(self.correlated)
        self.assertAlmostEqual(d.P, 1 / (16 * 0.36 ** 2), places=10)
        self.assertAlmostEqual(d.Psi, 1 / (8 * 0.36), places=10)
        self.assertAlmostEqual(d.Lambda, 0.25, places=12)

    def test_main_form(self):
        report = eval_main4(self.uncorrelated, (1, 1, 1, 1))
        self.assertAlmostEqual(report.details["g"], 2.0, places=12)
        # V sums all six squared commutator means: Y12^2 + Y34^2
        self.assertAlmostEqual(report.details["V"], 0.5, places=12)
        self.assertAlmostEqual(report.lhs, 4.0, places=12)
        self.assertAlmostEqual(report.rhs, 4.0, places=12)
        self.assertEqual(eval_main4(self.uncorrelated, (1, 0, 1, 1)).rhs, 0.0)

    def test_main_form_matches_sum_form(self):
        main = eval_main4(self.correlated, (1, 1, 1, 1))
        total = eval_sum4(self.correlated)
        self.assertAlmostEqual(main.lhs, total.lhs ** 2, places=9)
        self.assertAlmostEqual(main.rhs, total.rhs ** 2, places=12)

    def test_sum_form(self):
        report = eval_sum4(self.uncorrelated)
        self.assertAlmostEqual(report.lhs, 2.0, places=12)
        self.assertAlmostEqual(report.rhs, 2.0, places=12)

    def test_product_forms_saturate_without_correlation(self):
        for fn in (eval_prod4, eval_prod4_star, eval_prod4_quadratic):
            report = fn(self.uncorrelated)
            self.assertLessEqual(abs(report.margin), 1e-12, fn.__name__)
        self.assertAlmostEqual(eval_prod4(self.uncorrelated).lhs, 0.5, places=12)

    def test_product_forms_with_correlation(self):
        full = eval_prod4(self.correlated)
        star = eval_prod4_star(self.correlated)
        self.assertAlmostEqual(full.lhs, 8 / (16 * 0.36 ** 2), places=10)
        self.assertGreater(full.lhs / full.rhs, 3.0)
        self.assertLess(star.rhs, full.rhs)

    def test_robertson_chain(self):
        report = eval_robertson_det(self.uncorrelated)
        self.assertAlmostEqual(report.lhs, 1 / 16, places=12)
        self.assertAlmostEqual(report.rhs, 1 / 16, places=12)
        self.assertLessEqual(abs(report.margin), 1e-12)

        weak = eval_robertson_det(self.correlated)
        self.assertTrue(weak.satisfied)
        self.assertGreater(weak.lhs / weak.rhs, 7.0)

    def test_robertson_chain_margin_is_the_weaker_link(self):
        # strongly correlated X: prod X_kk - det Y > 0 while det X < det Y
        X = np.array([[4.0, 0.0, 1.9, 0.0], [0.0, 4.0, 0.0, 1.9], [1.9, 0.0, 1.0, 0.0], [0.0, 1.9, 0.0, 1.0]])
        Y = np.zeros((4, 4))
        Y[0, 1] = Y[2, 3] = 1.5
        Y -= Y.T
        report = eval_robertson_det(MomentSet(means=np.zeros(4), X=X, Y=Y))
        self.assertGreater(report.lhs - report.rhs, 0.0)
        self.assertLess(report.margin, 0.0)
        self.assertFalse(report.satisfied)
        self.assertEqual(report.margin, min(report.details["margin_hadamard"], report.details["margin_robertson"]))

        pure = eval_robertson_det(self.correlated)
        self.assertLessEqual(abs(pure.margin), 1e-12)
        self.assertAlmostEqual(pure.details["chain_span"], pure.lhs - pure.rhs, places=14)

    def test_satisfied_follows_margin(self):
        rng = np.random.default_rng(31)
        sets = [self.uncorrelated, self.correlated, spin1_triple(), ccs_triple()]
        for trial in range(20):
            n = 3 + trial % 2
            state = random_pure_state(rng, 6)
            sets.append(moment_set(state, [random_hermitian(rng, 6, f"z{k}") for k in range(n)]))
        with redirect_stderr(io.StringIO()):
            for ms in sets:
                for report in evaluate_all(ms):
                    self.assertEqual(report.satisfied, report.margin >= -1e-9, report.id)

    def test_robertson_chain_useless_for_three(self):
        report = eval_robertson_det(spin1_triple())
        self.assertAlmostEqual(report.rhs, 0.0, places=14)

    def test_pfaffian_identity(self):
        det_y, lam_sq = lambda_pfaffian_identity(self.uncorrelated)
        self.assertAlmostEqual(det_y, 1 / 16, places=12)
        self.assertAlmostEqual(lam_sq, 1 / 16, places=12)

    def test_commuting_tuple(self):
        d = four_derived(diagonal_set([1.0, 2.0, 3.0, 4.0]))
        self.assertEqual((d.Psi, d.PsiStar, d.Lambda), (0.0, 0.0, 0.0))

    def test_wrong_size(self):
        with self.assertRaises(TupleSizeError):
            four_derived(ccs_triple())
        with self.assertRaises(TupleSizeError):
            eval_main4(self.uncorrelated, (1, 1, 1))


class TestSuites(unittest.TestCase):
    def test_evaluate_all_on_triple(self):
        reports = evaluate_all(spin1_triple())
        ids = [r.id for r in reports]
        self.assertEqual(ids.count("robertson-pair"), 3)
        self.assertEqual(ids[-1], "robertson-det-chain")
        self.assertTrue(all(r.satisfied for r in reports if r.correct))

    def test_evaluate_all_on_quad(self):
        ids = {r.id for r in evaluate_all(gaussian2d_moments(Gaussian2dParams(2.0, 0.5, 1.0)))}
        self.assertTrue({"quad-determinant", "quad-sum", "quad-product", "quad-product-star",
                         "quad-product-quadratic"} <= ids)
        self.assertNotIn("triple-product", ids)

    def test_vacuum_xpxi_all_hold(self):
        ms = moment_set(fock_vacuum(40), xpxi_operators(40))
        for report in evaluate_all(ms):
            if report.correct:
                self.assertTrue(report.satisfied, report.id)

    def test_det_f_nonnegative_for_commuting_operators(self):
        rng = np.random.default_rng(11)
        diag_ops = [np.diag(rng.normal(size=5)) for _ in range(3)]
        from core.operators import Operator
        ms = moment_set(random_pure_state(rng, 5), [Operator(d, f"d{k}") for k, d in enumerate(diag_ops)])
        self.assertGreaterEqual(det_f(ms), -1e-12)
        np.testing.assert_allclose(ms.Y, 0.0, atol=1e-14)

    def test_report_serializes(self):
        data = eval_pair_bound13(ccs_triple()).to_dict()
        for key in ("id", "lhs", "rhs", "margin", "satisfied", "params", "relative_margin", "fingerprint"):
            self.assertIn(key, data)
        self.assertIsInstance(data["satisfied"], bool)


if __name__ == '__main__':
    unittest.main()
