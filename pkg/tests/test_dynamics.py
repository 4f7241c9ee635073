"""Logistic dynamics, the RK4 integrator, crossing detection, growth rates."""

from __future__ import annotations

import dataclasses
import math
import os
import subprocess
import sys

import numpy as np
import pytest

from anai import (
    ClampViolation,
    CouplingFunction,
    DegenerateTrajectory,
    FeedbackParams,
    LogisticParams,
    NonFiniteState,
    ScenarioConfig,
    TimeGrid,
    Trajectory,
    crossing_time,
    growth_decomposition,
    integrate,
    logistic_closed_form,
    simulate,
    simulate_decoupled,
    simulate_feedback,
)

from conftest import make_scenario

P_A = LogisticParams(0.5, 0.9, 0.1)
P_I = LogisticParams(0.3, 0.8, 0.05)

# closed-form inversion: time at which the symmetric product of two
# (0.5, 0.9, 0.1) logistics reaches 0.5, i.e. logistic(t) = sqrt(0.5)
SYMMETRIC_CROSSING = math.log((0.8 / 0.1) * (math.sqrt(0.5) / (0.9 - math.sqrt(0.5)))) / 0.5
# time at which that logistic reaches half capacity: ln((K - x0)/x0) / rate
HALF_CAPACITY_TIME = math.log(8.0) / 0.5


class TestClosedForm:
    def test_initial_condition(self):
        assert logistic_closed_form(P_A, 0.0) == pytest.approx(0.1, abs=1e-15)

    def test_carrying_capacity_limit(self):
        assert logistic_closed_form(P_A, 100.0) == pytest.approx(0.9, abs=1e-9)

    def test_half_capacity_time(self):
        assert HALF_CAPACITY_TIME == pytest.approx(4.1588830833596715)
        assert logistic_closed_form(P_A, HALF_CAPACITY_TIME) == pytest.approx(0.45, abs=1e-5)

    def test_zero_fixed_point(self):
        p = LogisticParams(0.5, 0.9, 0.0)
        assert logistic_closed_form(p, 3.0) == 0.0
        assert np.all(logistic_closed_form(p, np.linspace(0, 50, 7)) == 0.0)

    def test_capacity_fixed_point(self):
        p = LogisticParams(0.5, 0.9, 0.9)
        assert logistic_closed_form(p, 17.0) == 0.9

    def test_array_input(self):
        t = np.linspace(0.0, 10.0, 11)
        vals = logistic_closed_form(P_A, t)
        assert vals.shape == t.shape
        assert np.all(np.diff(vals) > 0)


class TestValidation:
    def test_logistic_params(self):
        with pytest.raises(ValueError, match="rate"):
            LogisticParams(0.0, 0.9, 0.1)
        with pytest.raises(ValueError, match="capacity"):
            LogisticParams(0.5, 1.2, 0.1)
        with pytest.raises(ValueError, match="x0"):
            LogisticParams(0.5, 0.9, 0.95)
        with pytest.raises(ValueError, match="x0"):
            LogisticParams(0.5, 0.9, -0.1)

    def test_time_grid(self):
        with pytest.raises(ValueError, match="t_end"):
            TimeGrid(5.0, 5.0, 0.1)
        with pytest.raises(ValueError, match="dt"):
            TimeGrid(0.0, 1.0, -0.1)
        with pytest.raises(ValueError, match="step"):
            TimeGrid(0.0, 1e-6, 1.0)
        assert TimeGrid(0.0, 1.0, 0.1).n_steps == 10

    def test_feedback_params(self):
        with pytest.raises(ValueError, match="kappa_e"):
            FeedbackParams(kappa_e=0.0, beta_f=0.1, gamma_c=0.1, c0=1.0)
        with pytest.raises(ValueError, match="c0"):
            FeedbackParams(kappa_e=1.0, beta_f=0.1, gamma_c=0.1, c0=0.0)
        with pytest.raises(ValueError, match="c_half"):
            FeedbackParams(kappa_e=1.0, beta_f=0.1, gamma_c=0.1, c0=1.0, c_half=-1.0)
        fb = FeedbackParams(kappa_e=1.0, beta_f=0.1, gamma_c=0.1, c0=1.0)
        assert fb.coupling is CouplingFunction.SATURATING
        assert fb.c_half == 1.0  # implied default for the saturating form

    def test_scenario_tau(self):
        with pytest.raises(ValueError, match="tau"):
            make_scenario(tau=1.5)


class TestIntegrate:
    def test_constant_zero_rhs(self):
        grid = TimeGrid(0.0, 1.0, 0.1)
        t, states = integrate(lambda _t, y: np.zeros_like(y), grid, [0.3, 0.7])
        assert states.shape == (11, 2)
        assert np.all(states == [0.3, 0.7])
        assert t[0] == 0.0 and t[-1] == pytest.approx(1.0)

    def test_matches_closed_form(self):
        grid = TimeGrid(0.0, 50.0, 0.01)

        def rhs(_t, y):
            return P_A.rate * y * (1.0 - y / P_A.capacity)

        t, states = integrate(rhs, grid, [P_A.x0], lower=[0.0], upper=[P_A.capacity])
        err = np.max(np.abs(states[:, 0] - logistic_closed_form(P_A, t)))
        assert err < 1e-6

    def test_coarse_step_on_stiff_rate_fails_loudly(self):
        grid = TimeGrid(0.0, 10.0, 0.5)

        def rhs(_t, y):
            return 30.0 * y * (1.0 - y / 0.9)

        with pytest.raises((ClampViolation, NonFiniteState)):
            integrate(rhs, grid, [0.5], lower=[0.0], upper=[0.9])

    def test_non_finite_state(self):
        grid = TimeGrid(0.0, 2.0, 0.1)
        with pytest.raises(NonFiniteState):
            integrate(lambda _t, y: y * np.inf, grid, [1.0])


class TestSimulateDecoupled:
    def test_zero_initial_autonomy_never_crosses(self):
        config = make_scenario(x0_a=0.0)
        traj = simulate_decoupled(config)
        assert np.all(traj.aix == 0.0)
        assert np.all(traj.ttp == 0.0)
        assert traj.crossing is None

    def test_symmetric_crossing_matches_inversion_oracle(self, symmetric_scenario):
        traj = simulate_decoupled(symmetric_scenario)
        assert traj.crossing is not None
        assert traj.crossing.t_cross == pytest.approx(SYMMETRIC_CROSSING, abs=1e-4)

    def test_capacity_product_below_tau_never_crosses(self):
        config = make_scenario(cap_a=0.6, x0_a=0.1, cap_i=0.6, x0_i=0.1, tau=0.5, t_end=200.0)
        assert simulate_decoupled(config).crossing is None

    def test_product_identity_is_exact(self, symmetric_scenario):
        traj = simulate_decoupled(symmetric_scenario)
        assert np.array_equal(traj.ttp, traj.aix * traj.icc)

    def test_bounded_and_strictly_increasing(self):
        config = make_scenario(rate_i=0.3, cap_i=0.8, x0_i=0.05, t_end=50.0)
        traj = simulate_decoupled(config)
        assert np.all(traj.aix <= 0.9) and np.all(traj.aix >= 0.0)
        assert np.all(traj.icc <= 0.8) and np.all(traj.icc >= 0.0)
        assert np.all(np.diff(traj.aix) > 0)
        assert np.all(np.diff(traj.icc) > 0)

    def test_matches_generic_integrator(self):
        config = make_scenario(rate_i=0.3, cap_i=0.8, x0_i=0.05, t_end=10.0)

        def rhs(_t, y):
            return np.array(
                [
                    0.5 * y[0] * (1.0 - y[0] / 0.9),
                    0.3 * y[1] * (1.0 - y[1] / 0.8),
                ]
            )

        _t, states = integrate(rhs, config.grid, [0.1, 0.05])
        traj = simulate_decoupled(config)
        assert np.max(np.abs(states[:, 0] - traj.aix)) < 1e-12
        assert np.max(np.abs(states[:, 1] - traj.icc)) < 1e-12

    def test_deterministic_bit_identical(self, symmetric_scenario):
        a = simulate_decoupled(symmetric_scenario)
        b = simulate_decoupled(symmetric_scenario)
        assert np.array_equal(a.aix, b.aix)
        assert np.array_equal(a.icc, b.icc)
        assert a.crossing == b.crossing

    def test_rejects_feedback_scenario(self):
        config = make_scenario(
            feedback=FeedbackParams(kappa_e=1.0, beta_f=0.1, gamma_c=0.1, c0=1.0)
        )
        with pytest.raises(ValueError, match="feedback"):
            simulate_decoupled(config)

    def test_clamp_violation_on_coarse_grid(self):
        config = ScenarioConfig(
            autonomy=LogisticParams(30.0, 0.9, 0.5),
            infra=P_I,
            tau=0.5,
            grid=TimeGrid(0.0, 10.0, 0.5),
        )
        with pytest.raises((ClampViolation, NonFiniteState)):
            simulate_decoupled(config)


def feedback_scenario(beta_f=0.1, gamma_c=0.2, combine=False, coupling=CouplingFunction.SATURATING, **kwargs):
    return make_scenario(
        feedback=FeedbackParams(
            kappa_e=2.5, beta_f=beta_f, gamma_c=gamma_c, c0=1.0,
            coupling=coupling, combine_logistic=combine,
        ),
        **kwargs,
    )


class TestSimulateFeedback:
    def test_zero_gain_keeps_embedding_constant(self):
        traj = simulate_feedback(feedback_scenario(beta_f=0.0))
        assert np.all(traj.icc == traj.icc[0])

    def test_energy_is_proportional_to_compute(self):
        traj = simulate_feedback(feedback_scenario())
        assert np.array_equal(traj.energy, 2.5 * traj.compute)
        assert np.max(np.abs(traj.energy / traj.compute - 2.5)) < 1e-12

    def test_accelerates_crossing_vs_decoupled(self):
        base = make_scenario(rate_i=0.08, x0_i=0.05, t_end=120.0)
        fb = dataclasses.replace(
            base,
            feedback=FeedbackParams(kappa_e=1.0, beta_f=0.1, gamma_c=0.1, c0=1.0),
        )
        t_base = simulate_decoupled(base).crossing
        t_fb = simulate_feedback(fb).crossing
        assert t_base is not None and t_fb is not None
        assert t_fb.t_cross < t_base.t_cross

    def test_combined_mode_never_slower_than_decoupled(self):
        base = make_scenario(rate_i=0.3, x0_i=0.05, t_end=60.0)
        fb = dataclasses.replace(
            base,
            feedback=FeedbackParams(
                kappa_e=1.0, beta_f=0.05, gamma_c=0.1, c0=1.0, combine_logistic=True
            ),
        )
        t_base = simulate_decoupled(base).crossing
        t_fb = simulate_feedback(fb).crossing
        assert t_base is not None and t_fb is not None
        assert t_fb.t_cross <= t_base.t_cross

    @pytest.mark.parametrize("coupling", list(CouplingFunction))
    def test_coupling_variants_grow_embedding(self, coupling):
        traj = simulate_feedback(feedback_scenario(coupling=coupling, t_end=10.0))
        assert traj.icc[-1] > traj.icc[0]
        assert np.all(traj.icc <= 0.9)

    def test_compute_growth_is_autonomy_driven(self):
        traj = simulate_feedback(feedback_scenario(gamma_c=0.0, t_end=10.0))
        assert np.all(traj.compute == 1.0)

    def test_rejects_plain_scenario(self):
        with pytest.raises(ValueError, match="feedback"):
            simulate_feedback(make_scenario())

    def test_dispatch(self):
        assert simulate(make_scenario()).compute is None
        assert simulate(feedback_scenario(t_end=5.0)).compute is not None


class TestCrossingTime:
    def test_start_above_threshold(self):
        t = np.linspace(0.0, 1.0, 11)
        traj = Trajectory(t=t, aix=np.full(11, 0.9), icc=np.full(11, 0.9), ttp=np.full(11, 0.81))
        event = crossing_time(traj, 0.5)
        assert event is not None
        assert event.t_cross == 0.0
        assert event.ttp_at_cross == 0.81

    def test_monotone_crossing_agrees_with_dense_scan(self):
        config = make_scenario(t_end=20.0)
        traj = simulate_decoupled(config)
        event = crossing_time(traj, 0.5)
        assert event is not None
        # independent route: locate the bracket by linear scan, then find the
        # first sample of the piecewise-linear signal above the threshold on
        # a dense sub-grid of that bracket
        i = int(np.argmax(traj.ttp > 0.5))
        ts = np.linspace(traj.t[i - 1], traj.t[i], 50_001)
        interp = np.interp(ts, traj.t, traj.ttp)
        t_scan = ts[np.argmax(interp > 0.5)]
        assert abs(event.t_cross - t_scan) < 1e-6
        assert event.ttp_at_cross == pytest.approx(0.5, abs=1e-9)

    def test_no_crossing_below_threshold(self):
        t = np.linspace(0.0, 1.0, 11)
        ttp = np.linspace(0.1, 0.4, 11)
        traj = Trajectory(t=t, aix=np.sqrt(ttp), icc=np.sqrt(ttp), ttp=ttp)
        assert crossing_time(traj, 0.5) is None

    def test_monotone_trajectory_reports_single_first_crossing(self, symmetric_scenario):
        traj = simulate_decoupled(symmetric_scenario)
        event = crossing_time(traj, 0.5)
        before = traj.ttp[traj.t < event.t_cross - symmetric_scenario.grid.dt]
        assert np.all(before <= 0.5)


class TestGrowthDecomposition:
    def test_product_rule_roughly_doubles_equal_factors(self, symmetric_scenario):
        traj = simulate_decoupled(symmetric_scenario)
        g = growth_decomposition(traj)
        early = g.t < 2.0
        # central differences leave an O(dt^2) residue in the identity
        assert np.allclose(g.ttp_rate[early], 2.0 * g.aix_rate[early], rtol=1e-4)

    def test_constant_trajectory_has_zero_rates(self):
        t = np.linspace(0.0, 1.0, 11)
        traj = Trajectory(t=t, aix=np.full(11, 0.4), icc=np.full(11, 0.5), ttp=np.full(11, 0.2))
        g = growth_decomposition(traj)
        assert np.all(g.aix_rate == 0.0)
        assert np.all(g.ttp_rate == 0.0)

    def test_frozen_factor_drops_out(self):
        config = make_scenario(t_end=10.0)
        traj = simulate_decoupled(config)
        frozen = Trajectory(t=traj.t, aix=traj.aix, icc=np.full_like(traj.icc, 0.5),
                            ttp=traj.aix * 0.5)
        g = growth_decomposition(frozen)
        assert np.allclose(g.ttp_rate, g.aix_rate, atol=1e-12)
        assert np.all(g.icc_rate == 0.0)

    def test_zero_interior_rejected(self):
        t = np.linspace(0.0, 1.0, 5)
        traj = Trajectory(t=t, aix=np.array([0.0, 0.0, 0.1, 0.2, 0.3]),
                          icc=np.full(5, 0.5), ttp=np.array([0.0, 0.0, 0.05, 0.1, 0.15]))
        with pytest.raises(DegenerateTrajectory):
            growth_decomposition(traj)

    def test_needs_three_points(self):
        t = np.array([0.0, 1.0])
        traj = Trajectory(t=t, aix=np.array([0.1, 0.2]), icc=np.array([0.1, 0.2]),
                          ttp=np.array([0.01, 0.04]))
        with pytest.raises(ValueError, match="3"):
            growth_decomposition(traj)


_PARITY_SCRIPT = """
import numpy as np
import sys
from anai import (FeedbackParams, LogisticParams, ScenarioConfig, TimeGrid,
                  simulate_decoupled, simulate_feedback)
from anai import _kernels
assert not _kernels.NUMBA_ENABLED
grid = TimeGrid(0.0, 5.0, 0.01)
plain = ScenarioConfig(autonomy=LogisticParams(0.5, 0.9, 0.1),
                       infra=LogisticParams(0.3, 0.8, 0.05), tau=0.5, grid=grid)
fb = ScenarioConfig(autonomy=LogisticParams(0.5, 0.9, 0.1),
                    infra=LogisticParams(0.5, 0.9, 0.1), tau=0.5, grid=grid,
                    feedback=FeedbackParams(kappa_e=2.5, beta_f=0.1, gamma_c=0.2, c0=1.0))
a = simulate_decoupled(plain)
b = simulate_feedback(fb)
np.savez(sys.argv[1], aix=a.aix, icc=a.icc, fic=b.icc, comp=b.compute)
"""


class TestKernelPathParity:
    def test_fallback_path_is_bit_identical(self, tmp_path):
        """Run the interpreted kernels in a subprocess and compare bitwise."""
        grid = TimeGrid(0.0, 5.0, 0.01)
        plain = make_scenario(rate_i=0.3, cap_i=0.8, x0_i=0.05, t_end=5.0)
        fb = feedback_scenario(t_end=5.0)
        traj = simulate_decoupled(plain)
        trajf = simulate_feedback(fb)
        assert np.array_equal(traj.t, grid.times())
        out = tmp_path / "fallback.npz"
        env = dict(os.environ, ANAI_DISABLE_NUMBA="1")
        subprocess.run(
            [sys.executable, "-c", _PARITY_SCRIPT, str(out)], env=env, check=True
        )
        saved = np.load(out)
        assert np.array_equal(saved["aix"], traj.aix)
        assert np.array_equal(saved["icc"], traj.icc)
        assert np.array_equal(saved["fic"], trajf.icc)
        assert np.array_equal(saved["comp"], trajf.compute)
