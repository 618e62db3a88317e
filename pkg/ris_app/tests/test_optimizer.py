import math
from dataclasses import replace
from unittest import mock

import numpy as np
from django.test import SimpleTestCase, tag

from ris_app.channel import PhaseVector, RisChannel, apply
from ris_app.exceptions import ArgumentError
from ris_app.optimizer import (
    STOP_ZERO_TARGET,
    AlmParams,
    alm_solve,
    augmented_lagrangian,
    clip,
    grad_phi_euclidean,
    grad_x,
    initial_point,
    objective,
    rcg_solve,
    riemannian_grad_phi,
)
from ris_app.numerics import Rng, gaussian_complex
from ris_app.precoding import SlpProblem, solve

from .factories import feasible_target, random_channel, random_phase, random_x, scalar_channel

FD_STEP = 1e-5


def _fd_gradient(func, z: np.ndarray) -> np.ndarray:
    """Diferencias centrales: df/dRe + j df/dIm."""

    out = np.zeros_like(z)
    for i in range(z.size):
        for unit in (1.0, 1j):
            step = np.zeros_like(z)
            step[i] = unit * FD_STEP
            slope = (func(z + step) - func(z - step)) / (2 * FD_STEP)
            out[i] += slope * unit
    return out


def _rel_error(a: np.ndarray, b: np.ndarray) -> float:
    return float(np.linalg.norm(a - b) / max(np.linalg.norm(b), 1e-12))


class ObjectiveTests(SimpleTestCase):
    def test_constructed_zero_residual(self):
        ch = random_channel(0, 2, 4, 3)
        x, phase = random_x(Rng(1), 2), random_phase(Rng(2), 4)
        self.assertAlmostEqual(objective(ch, apply(ch, phase, x), x, phase), 0.0, places=20)

    def test_zero_x(self):
        ch = random_channel(1, 2, 4, 3)
        target = np.array([1.0, 2j, -1.0])
        self.assertAlmostEqual(objective(ch, target, np.zeros(2), PhaseVector.ones(4)), 6.0)

    def test_scalar_half_turn(self):
        value = objective(scalar_channel(), [1.0], [1.0], PhaseVector.from_angles([np.pi]))
        self.assertAlmostEqual(value, 4.0)


class AugmentedLagrangianTests(SimpleTestCase):
    def test_inactive_penalty(self):
        x = np.array([1.0, 0.0])
        self.assertEqual(augmented_lagrangian(3.0, x, 0.0, 1.0), 3.0)

    def test_active_penalty(self):
        x = np.array([math.sqrt(1.5), 0.0])
        self.assertAlmostEqual(augmented_lagrangian(3.0, x, 1.0, 2.0), 4.0)

    def test_negative_excess_is_clipped(self):
        self.assertEqual(augmented_lagrangian(3.0, np.zeros(2), 0.0, 10.0), 3.0)


class GradientTests(SimpleTestCase):
    def test_penalty_only(self):
        ch = random_channel(2, 2, 3, 3, power=0.0)
        x = np.array([1.0, 1.0j])
        g = grad_x(ch, np.zeros(3), x, PhaseVector.ones(3), 0.0, 1.0)
        np.testing.assert_allclose(g, 2 * x)

    def test_stationary_at_constructed_minimum(self):
        ch = random_channel(3, 2, 8, 4)
        target, x0, phase0 = feasible_target(ch, Rng(4), 0.8)
        gx = grad_x(ch, target, x0, phase0, 0.0, 1.0)
        gphi = riemannian_grad_phi(ch, target, x0, phase0)
        self.assertLess(math.sqrt(np.linalg.norm(gx) ** 2 + gphi.norm**2), 1e-8)

    def test_phase_gradient_vanishes_without_effective_channel(self):
        ch = random_channel(5, 2, 3, 3)
        g = grad_phi_euclidean(ch, np.ones(3), np.zeros(2), random_phase(Rng(6), 3))
        np.testing.assert_allclose(g, np.zeros(3), atol=1e-15)

    def test_riemannian_gradient_is_tangent(self):
        ch = random_channel(7, 2, 6, 4)
        phase = random_phase(Rng(8), 6)
        g = riemannian_grad_phi(ch, np.ones(4), random_x(Rng(9), 2), phase)
        self.assertTrue(np.all(np.abs(np.real(g.z * np.conj(phase.phi))) < 1e-10))

    def test_finite_difference_oracle(self):
        checked_penalty = 0
        for instance in range(10):
            rng = Rng(100, (instance,))
            m, n, k = 1 + instance % 4, 1 + instance % 8, 1 + instance % 6
            ch = random_channel(instance, m, n, k, direct_path=instance % 2 == 0, power=1.0 + instance)
            target = gaussian_complex(rng.child(0), k, 1)[:, 0]
            for point in range(10):
                prng = rng.child(1, point)
                x = random_x(prng.child(0), m, norm=0.3 + 0.15 * point)
                phase = random_phase(prng.child(1), n)
                lam = float(prng.child(2).uniform(0.0, 3.0, 1)[0])
                rho = float(prng.child(3).uniform(0.5, 5.0, 1)[0])
                excess = lam / rho + float(np.vdot(x, x).real) - 1.0
                if abs(excess) < 1e-3:
                    continue
                checked_penalty += excess > 0

                def lagrangian_of_x(z):
                    return augmented_lagrangian(objective(ch, target, z, phase), z, lam, rho)

                def objective_of_phi(z):
                    return objective(ch, target, x, PhaseVector.from_unit(z))

                self.assertLess(
                    _rel_error(grad_x(ch, target, x, phase, lam, rho), _fd_gradient(lagrangian_of_x, x)), 1e-6
                )
                self.assertLess(
                    _rel_error(grad_phi_euclidean(ch, target, x, phase), _fd_gradient(objective_of_phi, phase.phi)),
                    1e-6,
                )
        self.assertGreater(checked_penalty, 0)


class ClipTests(SimpleTestCase):
    def test_values(self):
        self.assertEqual(clip(5, 0, 3), 3)
        self.assertEqual(clip(-1, 0, 3), 0)
        self.assertEqual(clip(2, 0, 3), 2)

    def test_bad_interval(self):
        with self.assertRaises(ArgumentError):
            clip(1, 3, 0)


class AlmParamsTests(SimpleTestCase):
    def test_defaults_shrink_tolerance(self):
        params = AlmParams()
        self.assertLess(params.theta_eps, 1.0)
        self.assertAlmostEqual(params.theta_eps**30, 1e-3)

    def test_unknown_key(self):
        with self.assertRaises(ArgumentError):
            AlmParams.from_dict({"eps": 1})

    def test_invalid_values(self):
        with self.assertRaises(ArgumentError):
            AlmParams(theta_rho=0.5)

    def test_round_trip(self):
        params = AlmParams(eps_min=1e-8)
        self.assertEqual(AlmParams.from_dict(params.to_dict()), params)


class RcgSolveTests(SimpleTestCase):
    def test_stationary_start_returns_immediately(self):
        ch = random_channel(10, 2, 8, 4)
        target, x0, phase0 = feasible_target(ch, Rng(11), 0.8)
        result = rcg_solve(ch, target, (x0, phase0), 0.0, 1.0, 1e-6, AlmParams())
        self.assertEqual(result.iters, 0)
        self.assertFalse(result.stalled)

    def test_converges_to_stationary_point(self):
        ch = random_channel(12, 2, 8, 4)
        target, _, _ = feasible_target(ch, Rng(13), 0.8)
        start = initial_point(Rng(14), 2, 8)
        params = AlmParams(max_inner_iters=5000)
        result = rcg_solve(ch, target, start, 0.0, 1.0, 1e-6, params)
        self.assertFalse(result.stalled)
        self.assertLess(result.grad_norm, 1e-6)
        self.assertLess(
            objective(ch, target, result.x, result.phase), objective(ch, target, start[0], start[1])
        )

    def test_trajectory_decreases_and_stays_on_circle(self):
        # Cortar en max_inner_iters = j reproduce los primeros j pasos de la misma trayectoria.
        ch = random_channel(30, 2, 6, 4, direct_path=True)
        target = np.exp(1j * Rng(31).uniform(-np.pi, np.pi, 4))
        start = initial_point(Rng(32), 2, 6)
        lam, rho = 0.5, 2.0

        def lagrangian(x, phase):
            return augmented_lagrangian(objective(ch, target, x, phase), x, lam, rho)

        values = []
        for cut in range(25):
            step = rcg_solve(ch, target, start, lam, rho, 1e-12, AlmParams(max_inner_iters=cut))
            self.assertFalse(step.stalled)
            self.assertLess(np.max(np.abs(np.abs(step.phase.phi) - 1.0)), 1e-12)
            values.append(lagrangian(step.x, step.phase))

        for before, after in zip(values, values[1:]):
            self.assertLessEqual(after, before)
        self.assertLess(values[-1], values[0])

    def test_first_step_satisfies_armijo(self):
        ch = random_channel(33, 2, 5, 3)
        target = np.exp(1j * Rng(34).uniform(-np.pi, np.pi, 3))
        x0, phase0 = initial_point(Rng(35), 2, 5)
        lam, rho = 1.0, 1.0
        params = AlmParams(max_inner_iters=1)
        first = rcg_solve(ch, target, (x0, phase0), lam, rho, 1e-12, params)

        gx = grad_x(ch, target, x0, phase0, lam, rho)
        gphi = riemannian_grad_phi(ch, target, x0, phase0)
        grad_sq = float(np.vdot(gx, gx).real) + gphi.norm**2
        # El primer paso va por -grad, así que alpha se lee del desplazamiento en X.
        alpha = float(np.linalg.norm(first.x - x0) / np.linalg.norm(gx))
        self.assertGreater(alpha, 0.0)
        before = augmented_lagrangian(objective(ch, target, x0, phase0), x0, lam, rho)
        after = augmented_lagrangian(objective(ch, target, first.x, first.phase), first.x, lam, rho)
        self.assertLessEqual(after, before - params.armijo_c * alpha * grad_sq + 1e-12)

    def test_least_squares_without_ris(self):
        rng = Rng(15)
        f = gaussian_complex(rng.child(0), 4, 2)
        ch = RisChannel(h=np.zeros((4, 0)), g=np.zeros((0, 2)), f=f, power=2.0)
        x0 = random_x(rng.child(1), 2, norm=0.3)
        target = ch.amplitude * f @ x0 + 1e-6 * gaussian_complex(rng.child(2), 4, 1)[:, 0]
        expected = np.linalg.lstsq(ch.amplitude * f, target, rcond=None)[0]

        start = (np.zeros(2, dtype=complex), PhaseVector.ones(0))
        result = rcg_solve(ch, target, start, 0.0, 1.0, 1e-10, AlmParams())
        self.assertLess(np.linalg.norm(result.x - expected), 1e-8)

    def test_line_search_failure_is_flagged(self):
        ch = random_channel(16, 2, 4, 3)
        start = initial_point(Rng(17), 2, 4)
        params = AlmParams(alpha_init=1e6, max_backtracks=1)
        result = rcg_solve(ch, np.ones(3), start, 1.0, 1.0, 1e-9, params)
        self.assertTrue(result.stalled)
        np.testing.assert_array_equal(result.x, start[0])


class AlmSolveTests(SimpleTestCase):
    def test_zero_target(self):
        ch = random_channel(18, 2, 4, 3)
        sol = alm_solve(ch, np.zeros(3), rng=Rng(0))
        np.testing.assert_array_equal(sol.x, np.zeros(2))
        self.assertEqual(sol.residual, 0.0)
        self.assertEqual(sol.stop_reason, STOP_ZERO_TARGET)

    def test_requires_start_or_rng(self):
        ch = random_channel(19, 2, 4, 3)
        with self.assertRaises(ArgumentError):
            alm_solve(ch, np.ones(3))

    def test_feasible_instance(self):
        ch = random_channel(20, 2, 8, 4)
        target, _, _ = feasible_target(ch, Rng(21), 0.8)
        records = []
        sol = solve(SlpProblem(channel=ch, target=target), restarts=4, rng=Rng(22), on_outer=records.append)
        self.assertTrue(sol.feasible)
        self.assertLessEqual(float(np.vdot(sol.x, sol.x).real), 1 + 1e-6)
        self.assertTrue(records)
        params = AlmParams()
        for record in records:
            self.assertGreaterEqual(record["lambda"], 0.0)
            self.assertLessEqual(record["lambda"], params.lambda_max)
            self.assertEqual(
                set(record), {"k", "residual", "x_norm2", "lambda", "rho", "eps", "inner_iters", "restart"}
            )

    def test_infeasible_instance(self):
        ch = random_channel(23, 2, 4, 4)
        target = np.exp(1j * Rng(24).uniform(-np.pi, np.pi, 4))
        sol = alm_solve(ch, target, rng=Rng(25))
        self.assertGreaterEqual(sol.residual, 1e-3)
        self.assertFalse(sol.feasible)

    def test_early_stall_is_kept(self):
        ch = random_channel(29, 2, 6, 4)
        target = np.exp(1j * Rng(30).uniform(-np.pi, np.pi, 4))
        calls = []

        def stall_first(*args, **kwargs):
            result = rcg_solve(*args, **kwargs)
            calls.append(result)
            return replace(result, stalled=True) if len(calls) == 1 else result

        with mock.patch("ris_app.optimizer.rcg_solve", side_effect=stall_first):
            sol = alm_solve(ch, target, rng=Rng(31), params=AlmParams(max_outer_iters=5))
        self.assertGreater(len(calls), 1)
        self.assertFalse(calls[-1].stalled)
        self.assertTrue(sol.stalled)

    def test_deterministic(self):
        ch = random_channel(26, 2, 6, 4)
        target = np.exp(1j * Rng(27).uniform(-np.pi, np.pi, 4))
        a = alm_solve(ch, target, rng=Rng(28))
        b = alm_solve(ch, target, rng=Rng(28))
        np.testing.assert_array_equal(a.x, b.x)
        np.testing.assert_array_equal(a.phase.phi, b.phase.phi)
        self.assertEqual(a.inner_iters, b.inner_iters)


@tag("slow")
class AlmSolveStatisticalTests(SimpleTestCase):
    def test_feasible_instances_are_solved(self):
        solved = 0
        for instance in range(100):
            ch = random_channel(1000 + instance, 2, 8, 4)
            target, _, _ = feasible_target(ch, Rng(2000, (instance,)), 0.9)
            sol = solve(SlpProblem(channel=ch, target=target), restarts=4, rng=Rng(3000, (instance,)))
            self.assertLessEqual(float(np.vdot(sol.x, sol.x).real), 1 + 1e-6)
            solved += sol.residual < 1e-3
        self.assertGreaterEqual(solved, 90)
