"""Quantitative acceptance criteria for the whole toolkit.

Each test pins one published benchmark behavior: the advance-versus-amplitude
table, the quadratic scaling law, the second-order expansion, the stability
certificate, the constructive equilibrium against a direct minimizer,
structural identities of the reduced dynamics, the spatial demo gait, and the
settle-then-force protocol.
"""
import time

import numpy as np
import pytest

from relcrawl.backend import active as active_backend
from relcrawl.backend import integrate_crawler
from relcrawl.cycles import (
    check_first_order_shift,
    dominant_frequency,
    second_order_shift,
    settle_then_force,
    stroboscopic_map,
)
from relcrawl.equilibrium import (
    equilibrium_state,
    full_linearization,
    homotopy_equilibrium,
)
from relcrawl.integrate import IntegratorConfig
from relcrawl.model import PhaseState, rayleigh_value, total_energy
from relcrawl.presets import default_params_2d, default_schedule_2d
from relcrawl.reduction import (
    act_r,
    act_se2,
    lift_state_2d,
    project_state_2d,
    reconstruct_shift_2d,
    se2_compose,
)
from scipy.integrate import simpson

from oracles import powell_equilibrium_2d, random_triangle_rest_lengths

pytestmark = pytest.mark.acceptance

# Published advance-versus-amplitude benchmark (three significant digits).
BENCH_EPS = (1.0, 0.5, 0.25, 0.125, 0.0625, 0.03125)
BENCH_DELTA = (0.17870, 0.04666, 0.01172, 0.002934, 0.000734, 0.000183)
BENCH_P = (1.93, 1.99, 2.00, 2.00, 2.00)


# -------------------------------------------------- criterion 1: the table


def test_advance_table(sweep_rows, timings):
    tol = 0.05 if active_backend() == "compiled" else 0.15
    assert len(sweep_rows) == 6
    for row, eps, ref in zip(sweep_rows, BENCH_EPS, BENCH_DELTA):
        assert row.epsilon == eps
        assert row.converged
        assert row.delta_x == pytest.approx(ref, rel=tol)
    for row, ref_p in zip(sweep_rows[:-1], BENCH_P):
        assert row.p_exponent == pytest.approx(ref_p, abs=0.02)
    assert timings["sweep"] < 180.0


# -------------------------------------------- criterion 2: quadratic law


def test_quadratic_scaling_law(sweep_rows, response_2d):
    small = [r for r in sweep_rows if r.epsilon <= 0.25]
    assert len(small) >= 3
    slope = np.polyfit(
        np.log([r.epsilon for r in small]),
        np.log([r.delta_x for r in small]),
        1,
    )[0]
    assert 1.95 <= slope <= 2.05
    assert abs(check_first_order_shift(response_2d)) <= 1e-8


# ------------------------------------- criterion 3: second-order formula


def test_second_order_formula_predicts_advance(sweep_rows, response_2d):
    predicted = second_order_shift(response_2d)
    smallest = sweep_rows[-1]
    measured = smallest.delta_x / smallest.epsilon**2
    assert predicted == pytest.approx(measured, rel=0.10)


# ------------------------------------------ criterion 4: the certificate


def test_stability_certificate(report_2d, eq_point_2d, params2d):
    r = report_2d
    assert r.verdict == "robustly_stable"
    assert r.gradient_norm <= 1e-10
    assert np.min(r.hessian_eigenvalues) > 0.0
    assert np.min(r.rayleigh_eigenvalues) > 0.0
    assert r.spectral_abscissa < 0.0
    # unreduced check: the only neutral direction is the symmetry itself
    A = full_linearization(eq_point_2d, params2d)
    w, v = np.linalg.eig(A)
    order = np.argsort(np.abs(w))
    assert abs(w[order[0]]) <= 1e-9
    assert abs(w[order[1]]) > 1e-9
    vec = np.real(v[:, order[0]])
    vec /= np.linalg.norm(vec)
    uniform_x = np.zeros(12)
    uniform_x[0:6:2] = 1.0 / np.sqrt(3.0)
    assert min(np.linalg.norm(vec - uniform_x), np.linalg.norm(vec + uniform_x)) <= 1e-6


# ------------------------- criterion 5: equilibrium vs direct minimizer


def test_homotopy_matches_direct_minimizer(rng):
    start = time.perf_counter()
    triangles = random_triangle_rest_lengths(rng, n=5)
    for rest in triangles:
        for kappa in (10.0, 100.0):
            p = default_params_2d(
                kappa_s=kappa, kappa_np=kappa, rest_lengths=tuple(sorted(rest))
            )
            pt = homotopy_equilibrium(p)
            ref = powell_equilibrium_2d(p)
            assert np.max(np.abs(pt.as_array() - ref)) <= 1e-6
    assert time.perf_counter() - start < 30.0


# --------------------------------- criterion 6: structural identities


def test_energy_balance_unforced(params2d, eq_point_2d):
    """Total energy decays exactly by twice the Rayleigh function."""
    state = equilibrium_state(params2d, eq_point_2d)
    y0 = state.y.copy()
    y0[6:] += 0.05 * np.sin(np.arange(6) + 1.0)  # generic velocity kick
    cfg = IntegratorConfig(rtol=1e-12, atol=1e-14)
    traj = integrate_crawler(PhaseState(q=y0[:6], u=y0[6:], t=0.0),
                             None, params2d, (0.0, 2.0), cfg)
    rest = np.asarray(params2d.rest_lengths, dtype=float)
    ts = np.linspace(0.0, 2.0, 4097)
    R = np.empty(ts.size)
    for i, t in enumerate(ts):
        y = traj.y[-1] if i == ts.size - 1 else traj.sample_at(t)
        R[i] = rayleigh_value(y[:6], y[6:], params2d)
    e0 = total_energy(PhaseState(q=y0[:6], u=y0[6:], t=0.0), rest, params2d)
    y1 = traj.y[-1]
    e1 = total_energy(PhaseState(q=y1[:6], u=y1[6:], t=2.0), rest, params2d)
    assert abs(e1 - e0 + 2.0 * simpson(R, x=ts)) <= 1e-9


def test_flow_equivariance(params2d, eq_point_2d):
    sched = default_schedule_2d(0.5)
    state = equilibrium_state(params2d, eq_point_2d)
    cfg = IntegratorConfig(rtol=1e-12, atol=1e-14)
    end_direct = integrate_crawler(state, sched, params2d, (0.0, 1.0), cfg).y[-1]
    moved = act_r(3.0, state)
    end_moved = integrate_crawler(moved, sched, params2d, (0.0, 1.0), cfg).y[-1]
    translated = act_r(
        3.0, PhaseState(q=end_direct[:6], u=end_direct[6:], t=1.0)
    )
    assert np.max(np.abs(end_moved[:6] - translated.q)) <= 1e-9
    assert np.max(np.abs(end_moved[6:] - translated.u)) <= 1e-9


def test_fiber_independence_of_reduced_map(params2d, cycle_05):
    """The one-period reduced map must not see the fiber representative."""
    sched = default_schedule_2d(0.5)
    red = cycle_05.fixed_point
    state = lift_state_2d(red, fiber=0.0)
    red_again, _ = project_state_2d(act_r(7.5, state))
    assert np.max(np.abs(red_again - red)) <= 1e-12
    a = stroboscopic_map(red, 0.0, sched, params2d)
    b = stroboscopic_map(red_again, 0.0, sched, params2d)
    assert np.max(np.abs(a - b)) <= 1e-12


def test_shift_reconstruction_identity(cycle_05):
    rec = reconstruct_shift_2d(
        cycle_05.samples[:, 11], cycle_05.period, times=cycle_05.samples[:, 0]
    )
    assert rec == pytest.approx(cycle_05.delta, abs=1e-9)


def test_relative_periodicity(cycle_05, params2d):
    sched = default_schedule_2d(0.5)
    state = lift_state_2d(cycle_05.fixed_point, fiber=0.0)
    cfg = IntegratorConfig(rtol=1e-11, atol=1e-13)
    traj = integrate_crawler(state, sched, params2d,
                             (0.0, 2.0 * cycle_05.period), cfg)
    for t in (0.0, 0.25, 0.5, 0.75):
        y_t = traj.sample_at(t)
        y_tp = traj.sample_at(t + cycle_05.period)
        shifted = act_r(cycle_05.delta, PhaseState(q=y_t[:6], u=y_t[6:], t=t))
        assert np.max(np.abs(y_tp[:6] - shifted.q)) <= 1e-6
        assert np.max(np.abs(y_tp[6:] - shifted.u)) <= 1e-6


# ------------------------------------------ criterion 7: spatial demo


def test_spatial_demo_gait(cycle_3d, params3d, timings):
    from relcrawl.presets import demo_schedule_3d

    c = cycle_3d
    assert c.converged
    mags = np.abs(c.floquet_multipliers)
    assert np.max(mags) < 1.0
    assert abs(c.delta.phi) > 0.0

    sched = demo_schedule_3d(c.epsilon)
    y0 = c.trajectory.y[0]
    state0 = PhaseState(q=y0[:12], u=y0[12:], t=0.0)
    cfg = IntegratorConfig(rtol=1e-11, atol=1e-13)
    two = integrate_crawler(state0, sched, params3d,
                            (0.0, 2.0 * c.period), cfg).y[-1]
    predicted = act_se2(se2_compose(c.delta, c.delta), state0)
    err = max(
        np.max(np.abs(two[:12] - predicted.q)),
        np.max(np.abs(two[12:] - predicted.u)),
    )
    assert err <= 1e-5
    assert timings["cycle_3d"] < 120.0


# -------------------------------------- criterion 8: settle protocol


def test_settle_then_force_protocol(params2d):
    result = settle_then_force(0.5, 10.0, 20, params2d)
    shifts = result.period_shifts
    assert shifts.shape == (20,)
    # the per-period advance converges into the benchmark band
    assert shifts[-1] == pytest.approx(0.04666, rel=0.05)
    # transient deviations die out (the decay rings: compare windows)
    dev = np.abs(shifts - 0.04666)
    assert np.max(dev[:5]) > np.max(dev[-5:])
    # the forced response locks to the drive frequency (resolution 1/20)
    t0 = result.t_settle
    ts = t0 + np.arange(20 * 64) * (result.period / 64.0)
    xs = np.array([result.forced_trajectory.sample_at(t)[4] for t in ts])
    assert dominant_frequency(ts, xs) == pytest.approx(
        1.0 / result.period, abs=1e-12)
