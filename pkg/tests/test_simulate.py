"""Integrators, divergence handling, and the convergence detector."""

import math

import numpy as np
import pytest

from umbilic.plants import build_system, make_params, standard_feedback
from umbilic.simulate import (
    CONVERGED,
    DIVERGED,
    UNDECIDED,
    SolverConfig,
    Trajectory,
    Verdict,
    detect_convergence,
    integrate,
)

# ccf with a1=2, a2=1 and no feedback is x'' + 2x' + x = 0; from (1, 0) the
# output is (1 + t) * exp(-t).
ANALYTIC_Y1 = 2.0 * math.exp(-1.0)


def _damped_oscillator():
    params = make_params("ccf", {"a1": 2.0, "a2": 1.0})
    return build_system("ccf", params)


def _unstable_diagonal(rate=1.0):
    params = make_params("jordan", {"rho1": rate, "rho2": rate})
    return build_system("jordan", params)


def _fig4_system(a2):
    params = make_params("ccf", {"a1": 1.0, "a2": a2})
    laws = standard_feedback("ccf", (4.0, -4.0, -6.0), params=params)
    return build_system("ccf", params, controllers=laws)


class TestAccuracy:
    def test_rk4_matches_analytic_solution(self):
        system = _damped_oscillator()
        cfg = SolverConfig(method="rk4_fixed", step=0.01, t_end=1.0)
        traj = integrate(system, (1.0, 0.0), cfg)
        assert abs(traj.output[-1] - ANALYTIC_Y1) < 1e-9

    def test_adaptive_matches_analytic_solution(self):
        system = _damped_oscillator()
        cfg = SolverConfig(method="rk45_adaptive", t_end=1.0)
        traj = integrate(system, (1.0, 0.0), cfg)
        assert abs(traj.output[-1] - ANALYTIC_Y1) < 1e-6

    def test_rk4_is_fourth_order(self):
        system = _damped_oscillator()
        errors = []
        for step in (0.02, 0.01):
            cfg = SolverConfig(method="rk4_fixed", step=step, t_end=1.0)
            traj = integrate(system, (1.0, 0.0), cfg)
            errors.append(abs(traj.output[-1] - ANALYTIC_Y1))
        factor = errors[0] / errors[1]
        assert 12.0 <= factor <= 20.0

    def test_solvers_agree_on_smooth_problem(self):
        system = _fig4_system(a2=2.0)
        x0 = (0.05, 0.0)
        fixed = integrate(
            system, x0, SolverConfig(method="rk4_fixed", step=0.001, t_end=5.0)
        )
        adaptive = integrate(
            system, x0, SolverConfig(method="rk45_adaptive", t_end=5.0)
        )
        assert np.max(np.abs(fixed.states[-1] - adaptive.states[-1])) < 1e-6


class TestTimeGrid:
    def test_rk4_times_come_from_multiplication(self):
        system = _damped_oscillator()
        cfg = SolverConfig(method="rk4_fixed", step=0.1, t_end=1.0)
        traj = integrate(system, (1.0, 0.0), cfg)
        assert np.array_equal(traj.times, np.array([i * 0.1 for i in range(11)]))

    def test_long_run_times_strictly_increase(self):
        system = _damped_oscillator()
        cfg = SolverConfig(
            method="rk4_fixed", step=1e-3, t_end=50.0, max_rows=10000
        )
        traj = integrate(system, (1.0, 0.0), cfg)
        assert np.all(np.diff(traj.times) > 0)

    def test_partial_final_step_lands_on_t_end(self):
        system = _damped_oscillator()
        cfg = SolverConfig(method="rk4_fixed", step=0.3, t_end=1.0)
        traj = integrate(system, (1.0, 0.0), cfg)
        assert traj.times[-1] == 1.0

    def test_record_every_thins_but_keeps_endpoints(self):
        system = _damped_oscillator()
        cfg = SolverConfig(method="rk4_fixed", step=0.01, t_end=1.0, record_every=10)
        traj = integrate(system, (1.0, 0.0), cfg)
        assert traj.times[0] == 0.0
        assert traj.times[-1] == 1.0
        assert len(traj.times) == 11

    def test_max_rows_caps_output(self):
        system = _damped_oscillator()
        cfg = SolverConfig(method="rk4_fixed", step=1e-3, t_end=1.0, max_rows=100)
        traj = integrate(system, (1.0, 0.0), cfg)
        assert len(traj.times) <= 100
        assert traj.times[0] == 0.0
        assert traj.times[-1] == 1.0


class TestDivergence:
    def test_unstable_system_truncates(self):
        system = _unstable_diagonal()
        cfg = SolverConfig(method="rk45_adaptive", t_end=30.0)
        traj = integrate(system, (1.0, 1.0), cfg)
        assert traj.diverged
        assert traj.times[-1] < 30.0
        assert np.all(np.isfinite(traj.states))
        assert np.max(np.abs(traj.states[-1])) >= 1e6

    def test_rk4_truncates_too(self):
        system = _unstable_diagonal()
        cfg = SolverConfig(method="rk4_fixed", step=0.01, t_end=30.0)
        traj = integrate(system, (1.0, 1.0), cfg)
        assert traj.diverged
        assert traj.times[-1] < 30.0

    def test_divergence_norm_is_configurable(self):
        system = _unstable_diagonal()
        cfg = SolverConfig(method="rk4_fixed", step=0.01, t_end=30.0,
                           divergence_norm=100.0)
        traj = integrate(system, (1.0, 1.0), cfg)
        assert traj.diverged
        # e^t reaches 100 just past t = ln(100)
        assert traj.times[-1] < math.log(100.0) + 0.1


class TestDeterminism:
    def test_repeat_integration_is_bitwise_identical(self):
        system = _fig4_system(a2=-9.5)
        cfg = SolverConfig(method="rk45_adaptive", t_end=91.0)
        first = integrate(system, (0.05, 0.0), cfg)
        second = integrate(system, (0.05, 0.0), cfg)
        assert first.times.tobytes() == second.times.tobytes()
        assert first.states.tobytes() == second.states.tobytes()


class TestDetectConvergence:
    def _flat_trajectory(self, point, n=50):
        times = np.linspace(0.0, 10.0, n)
        states = np.tile(np.asarray(point, dtype=float), (n, 1))
        return Trajectory(
            times=times, states=states, output=states[:, 0].copy(), diverged=False
        )

    def test_constant_trajectory_settles_immediately(self):
        traj = self._flat_trajectory((0.875, 0.0))
        verdict = detect_convergence(traj, [(0.875, 0.0)], tol=1e-3, window=5.0)
        assert verdict.kind == CONVERGED
        assert verdict.equilibrium_index == 0
        assert verdict.settle_time == 0.0

    def test_lowest_index_wins_ties(self):
        traj = self._flat_trajectory((1.0, 1.0))
        verdict = detect_convergence(
            traj, [(1.0, 1.0), (1.0, 1.0)], tol=1e-3, window=5.0
        )
        assert verdict.equilibrium_index == 0

    def test_real_run_picks_the_offset_point(self):
        system = _fig4_system(a2=-9.5)
        cfg = SolverConfig(method="rk45_adaptive", t_end=91.0)
        traj = integrate(system, (0.05, 0.0), cfg)
        verdict = detect_convergence(
            traj, [(0.0, 0.0), (0.875, 0.0)], tol=1e-3, window=9.1
        )
        assert verdict.kind == CONVERGED
        assert verdict.equilibrium_index == 1
        assert verdict.settle_time is not None and verdict.settle_time > 0.0

    def test_diverged_flag_dominates(self):
        system = _unstable_diagonal()
        traj = integrate(system, (1.0, 1.0), SolverConfig(t_end=30.0))
        verdict = detect_convergence(traj, [(0.0, 0.0)], tol=1e-3, window=5.0)
        assert verdict.kind == DIVERGED
        assert verdict.equilibrium_index is None

    def test_no_candidates_is_undecided(self):
        traj = self._flat_trajectory((0.0, 0.0))
        verdict = detect_convergence(traj, [], tol=1e-3, window=5.0)
        assert verdict.kind == UNDECIDED

    def test_far_candidate_is_undecided(self):
        traj = self._flat_trajectory((5.0, 5.0))
        verdict = detect_convergence(traj, [(0.0, 0.0)], tol=1e-3, window=5.0)
        assert verdict.kind == UNDECIDED
        assert verdict.final_state == (5.0, 5.0)

    def test_accepts_equilibrium_objects(self):
        system = _fig4_system(a2=2.0)
        from umbilic.equilibria import closed_form_equilibria

        candidates = closed_form_equilibria(system)
        traj = integrate(system, (0.05, 0.0), SolverConfig(t_end=91.0))
        verdict = detect_convergence(traj, candidates, tol=1e-3, window=9.1)
        assert verdict.kind == CONVERGED
        assert candidates[verdict.equilibrium_index].source == "origin"

    def test_tolerance_validation(self):
        traj = self._flat_trajectory((0.0, 0.0))
        with pytest.raises(ValueError, match="tol must be positive"):
            detect_convergence(traj, [(0.0, 0.0)], tol=0.0, window=5.0)
        with pytest.raises(ValueError, match="window must be positive"):
            detect_convergence(traj, [(0.0, 0.0)], tol=1e-3, window=0.0)


class TestValidation:
    def test_solver_config_rejects_bad_fields(self):
        with pytest.raises(ValueError, match="unknown method"):
            SolverConfig(method="euler")
        with pytest.raises(ValueError, match="step must be positive"):
            SolverConfig(step=0.0)
        with pytest.raises(ValueError, match="t_end must be positive"):
            SolverConfig(t_end=-1.0)
        with pytest.raises(ValueError, match="rel_tol"):
            SolverConfig(rel_tol=0.5)
        with pytest.raises(ValueError, match="record_every"):
            SolverConfig(record_every=0)
        with pytest.raises(ValueError, match="max_rows"):
            SolverConfig(max_rows=1)

    def test_solver_config_round_trips_through_json_obj(self):
        cfg = SolverConfig(method="rk4_fixed", step=0.25, t_end=17.0)
        assert SolverConfig.from_obj(cfg.to_obj()) == cfg

    def test_x0_length_checked(self):
        system = _damped_oscillator()
        with pytest.raises(ValueError, match="x0 needs 2 components"):
            integrate(system, (1.0,), SolverConfig())

    def test_x0_must_be_finite(self):
        system = _damped_oscillator()
        with pytest.raises(ValueError, match="finite"):
            integrate(system, (float("nan"), 0.0), SolverConfig())

    def test_trajectory_shape_checked(self):
        with pytest.raises(ValueError, match="equal length"):
            Trajectory(
                times=np.array([0.0, 1.0]),
                states=np.zeros((3, 2)),
                output=np.zeros(3),
                diverged=False,
            )
        with pytest.raises(ValueError, match="strictly increasing"):
            Trajectory(
                times=np.array([0.0, 0.0]),
                states=np.zeros((2, 2)),
                output=np.zeros(2),
                diverged=False,
            )

    def test_verdict_invariant(self):
        with pytest.raises(ValueError, match="equilibrium_index"):
            Verdict(kind=CONVERGED, equilibrium_index=None,
                    final_state=(0.0,), settle_time=0.0)
