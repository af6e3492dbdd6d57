import unittest

import numpy as np
from ddt import data, ddt, unpack

from evpos.discretize import BoundaryCondition, OperatorSpec, build_operator, leading_eigenpair
from evpos.errors import IsolationError, PreconditionError
from evpos.linalg import eig
from evpos.maxprinciple import (LeftVerdict, RightVerdict, SignClass, antimax_equivalence_test, check_kernel_bound,
                                domination_constant, resolvent_sign_sweep)

# eigenvalues 0 (vector (1, 1)) and -2 (vector (1, -1))
TWO_STATE = np.array([[-1.0, 1.0], [1.0, -1.0]])


def neumann(n: int):
    return build_operator(OperatorSpec(order=2, bc=BoundaryCondition.NEUMANN, n=n))


def dirichlet(n: int):
    return build_operator(OperatorSpec(order=2, bc=BoundaryCondition.DIRICHLET, n=n))


@ddt
class TestResolventSignSweep(unittest.TestCase):

    def test_two_state_generator(self):
        profile = resolvent_sign_sweep(TWO_STATE, 0.0, samples=10)
        self.assertAlmostEqual(profile.window, 0.4)
        self.assertEqual(profile.left_window_verdict, LeftVerdict.UNIFORM_ANTI_MAX)
        self.assertEqual(profile.right_window_verdict, RightVerdict.UNIFORM_MAX)
        self.assertEqual(len(profile.samples), 20)
        self.assertEqual(profile.sweep_points, sorted(profile.sweep_points))
        self.assertNotIn(SignClass.NEAR_SINGULAR, profile.classifications)
        self.assertTrue(profile.individual_antimax)
        self.assertTrue(profile.individual_max)
        for s in profile.samples:
            if s.side == "left":
                self.assertLess(s.lam, 0.0)
                self.assertLess(s.max_entry, 0.0)
            else:
                self.assertGreater(s.lam, 0.0)
                self.assertGreater(s.min_entry, 0.0)

    def test_non_positive_eigenvector(self):
        profile = resolvent_sign_sweep(np.diag([0.0, -1.0]), 0.0, samples=8)
        self.assertEqual(profile.left_window_verdict, LeftVerdict.NO_ANTI_MAX)
        self.assertEqual(profile.right_window_verdict, RightVerdict.UNIFORM_MAX)
        self.assertAlmostEqual(profile.individual_left_windows[0], profile.window)
        self.assertIsNone(profile.individual_left_windows[1])
        self.assertFalse(profile.individual_antimax)

    def test_lambda0_is_snapped_to_the_eigenvalue(self):
        profile = resolvent_sign_sweep(TWO_STATE, 1e-12, samples=4)
        self.assertAlmostEqual(profile.lambda0, 0.0, places=12)

    def test_not_an_eigenvalue(self):
        with self.assertRaises(PreconditionError):
            resolvent_sign_sweep(TWO_STATE, -1.0)

    def test_window_contains_another_eigenvalue(self):
        with self.assertRaises(IsolationError):
            resolvent_sign_sweep(TWO_STATE, 0.0, window=3.0)

    def test_threaded_sweep(self):
        A, _ = neumann(30)
        serial = resolvent_sign_sweep(A, 0.0, samples=12)
        threaded = resolvent_sign_sweep(A, 0.0, samples=12, workers=4)
        self.assertEqual(serial.model_dump(), threaded.model_dump())

    def test_dirichlet_anti_maximum_is_not_uniform(self):
        A, _ = dirichlet(60)
        lam, _ = leading_eigenpair(A)
        profile = resolvent_sign_sweep(A, lam)
        self.assertEqual(profile.left_window_verdict, LeftVerdict.NO_ANTI_MAX)
        self.assertEqual(profile.right_window_verdict, RightVerdict.UNIFORM_MAX)
        # the samples nearest to the eigenvalue are still entrywise negative
        nearest_left = max((s for s in profile.samples if s.side == "left"), key=lambda s: s.lam)
        self.assertEqual(nearest_left.classification, SignClass.NONPOS)

    def test_metzler_generators_satisfy_the_maximum_principle(self):
        rng = np.random.default_rng(20240517)
        for _ in range(20):
            A = rng.uniform(0.1, 1.0, size=(5, 5))
            np.fill_diagonal(A, rng.uniform(-3.0, 0.0, size=5))
            profile = resolvent_sign_sweep(A, eig(A).spectral_bound, samples=8)
            right = [s for s in profile.samples if s.side == "right" and s.classification != SignClass.NEAR_SINGULAR]
            self.assertTrue(right)
            for s in right:
                self.assertEqual(s.classification, SignClass.NONNEG)

    @data((0.9, "hadamard"), (None, "neumann"))
    @unpack
    def test_nonnegative_samples_form_an_initial_segment(self, window, name):
        A = hadamard_generator() if name == "hadamard" else neumann(30)[0]
        profile = resolvent_sign_sweep(A, 0.0, window=window, samples=16)
        right = sorted((s for s in profile.samples if s.side == "right"), key=lambda s: s.lam)
        nonneg = [s.classification == SignClass.NONNEG for s in right]
        self.assertTrue(nonneg[0])
        last = max(i for i, ok in enumerate(nonneg) if ok)
        self.assertTrue(all(nonneg[:last + 1]))


@ddt
class TestKernelBound(unittest.TestCase):

    @data(40, 100)
    def test_neumann_holds(self, n):
        A, grid = neumann(n)
        report = check_kernel_bound(A, np.ones(n), 0.0, 1.0, weight=grid.h)
        self.assertTrue(report.holds)
        self.assertLess(report.row_ratio, 2.0)
        self.assertIsNone(report.failing_pair)

    @data(60, 100)
    def test_dirichlet_fails(self, n):
        A, grid = dirichlet(n)
        lam, u = leading_eigenpair(A)
        report = check_kernel_bound(A, u, lam, 0.0, weight=grid.h)
        self.assertFalse(report.holds)
        self.assertGreater(report.row_ratio, 10.0)
        k, j = report.failing_pair
        # the largest constant sits next to the boundary
        self.assertIn(j, (0, n - 1))

    def test_preconditions(self):
        A, grid = neumann(20)
        u = np.ones(20)
        with self.assertRaisesRegex(PreconditionError, "symmetric"):
            check_kernel_bound([[0.0, 1.0], [0.0, 0.0]], [1.0, 1.0], 0.0, 1.0)
        with self.assertRaisesRegex(PreconditionError, "strictly positive"):
            check_kernel_bound(A, np.zeros(20), 0.0, 1.0)
        with self.assertRaisesRegex(PreconditionError, "mu1 > lambda0"):
            check_kernel_bound(A, u, 0.0, -1.0)
        with self.assertRaisesRegex(PreconditionError, "not an eigenvalue"):
            check_kernel_bound(A, u, -0.5, 1.0)
        with self.assertRaisesRegex(PreconditionError, ">= 0 fails"):
            check_kernel_bound(hadamard_generator(), np.ones(4), 0.0, 10.0)
        with self.assertRaisesRegex(PreconditionError, "not >= c u"):
            check_kernel_bound(np.diag([0.0, -1.0]), [1.0, 1.0], 0.0, 1.0)

    def test_domination_constant(self):
        C, spread = domination_constant(np.eye(3), np.ones(3))
        self.assertEqual((C, spread), (1.0, 1.0))
        C, spread = domination_constant(np.diag([1.0, 2.0, 40.0]), np.ones(3))
        self.assertEqual(C, 40.0)
        self.assertEqual(spread, 20.0)


class TestAntimaxEquivalence(unittest.TestCase):

    def test_neumann_both_hold(self):
        A, grid = neumann(40)
        report = antimax_equivalence_test(A, np.ones(40), 0.0, 1.0, weight=grid.h, samples=12)
        self.assertTrue(report.i_holds)
        self.assertTrue(report.ii_holds)
        self.assertTrue(report.consistent)
        self.assertEqual(report.resolvent_power, 1)

    def test_dirichlet_neither_holds(self):
        A, grid = dirichlet(60)
        lam, u = leading_eigenpair(A)
        report = antimax_equivalence_test(A, u, lam, 0.0, weight=grid.h, samples=12)
        self.assertFalse(report.i_holds)
        self.assertFalse(report.ii_holds)
        self.assertTrue(report.consistent)

    def test_resolvent_power(self):
        A, grid = neumann(40)
        report = antimax_equivalence_test(A, np.ones(40), 0.0, 1.0, weight=grid.h, samples=8, resolvent_power=2)
        self.assertEqual(report.resolvent_power, 2)
        with self.assertRaises(PreconditionError):
            antimax_equivalence_test(A, np.ones(40), 0.0, 1.0, resolvent_power=0)


def hadamard_generator() -> np.ndarray:
    q2 = np.array([1.0, 1.0, -1.0, -1.0]) / 2.0
    q3 = np.array([1.0, -1.0, 1.0, -1.0]) / 2.0
    q4 = np.array([1.0, -1.0, -1.0, 1.0]) / 2.0
    return -(np.outer(q2, q2) + np.outer(q3, q3)) - 4.0 * np.outer(q4, q4)
