"""Forced limit cycles, per-cycle advance, and the small-amplitude expansion.

With a periodic rest-length schedule the reduced dynamics is a periodically
forced system; its attracting cycle is a fixed point of the stroboscopic
(period-one) map on the reduced state.  This module finds those fixed points
(Picard iteration then Newton with a finite-difference Jacobian), extracts
the per-cycle group shift (the crawler's advance), runs the amplitude
scaling study, reproduces the settle-then-force protocol, and implements the
first/second-order small-amplitude formulas that explain why the advance
scales quadratically.

Reduced-state packing matches :mod:`relcrawl.reduction`: 11 entries planar,
21 spatial.
"""
from __future__ import annotations

import dataclasses
import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np
from numpy.linalg import eigvals
from scipy.integrate import simpson
from scipy.linalg import expm, svdvals

from .backend import integrate_crawler
from .errors import NoConvergence, SingularPeriodMap
from .equilibrium import homotopy_equilibrium, equilibrium_state
from .integrate import IntegratorConfig, Trajectory, integrate
from .model import (
    CrawlerParams,
    PhaseState,
    RestLengthSchedule,
    potential_hessian,
    rayleigh_matrix,
    schedule_eval,
    _debounce_weight,
    _spring_geometry,
)
from .reduction import (
    SE2Element,
    chart_jacobian_2d,
    fiber_3d,
    lift_state_2d,
    lift_state_3d,
    project_state_2d,
    project_state_3d,
)
from .smoothing import chi_prime

__all__ = [
    "CYCLE_CONFIG",
    "TOL_CYCLE",
    "CycleResult",
    "ScalingRow",
    "SettleForceResult",
    "FirstOrderResponse",
    "reduced_equilibrium_state",
    "stroboscopic_map",
    "find_limit_cycle",
    "scaling_study",
    "settle_then_force",
    "first_order_response",
    "check_first_order_shift",
    "second_order_shift",
    "cyclic_balance_residual",
    "dominant_frequency",
]

TOL_CYCLE = 1e-10
_PICARD_TOL = 1e-2
_PICARD_MAX = 40
_NEWTON_MAX = 12
_FD_STEP = 1e-6

CYCLE_CONFIG = IntegratorConfig(rtol=1e-10, atol=1e-13)
SIM_CONFIG = IntegratorConfig(rtol=1e-9, atol=1e-12)


# --------------------------------------------------------------------------
# result types
# --------------------------------------------------------------------------


@dataclass(frozen=True)
class CycleResult:
    """A converged (or best-effort) stroboscopic fixed point and its cycle."""

    epsilon: float
    period: float
    fixed_point: np.ndarray
    residual: float
    delta: object  # float shift (planar) or SE2Element (spatial)
    floquet_multipliers: np.ndarray
    converged: bool
    samples: np.ndarray  # columns: t, then the reduced state
    trajectory: Trajectory
    picard_iterations: int = 0
    newton_iterations: int = 0


@dataclass(frozen=True)
class ScalingRow:
    """One amplitude of the scaling study.

    ``p_exponent`` pairs this row with the next smaller amplitude
    (log-ratio of advances over log-ratio of amplitudes) and is None for the
    last row or when either advance is unusable.
    """

    epsilon: float
    delta_x: float
    p_exponent: object
    residual: float = float("nan")
    max_multiplier: float = float("nan")
    converged: bool = False


@dataclass(frozen=True)
class SettleForceResult:
    """Output of the settle-then-force protocol."""

    settle_trajectory: Trajectory
    forced_trajectory: Trajectory
    period_shifts: np.ndarray
    t_settle: float
    period: float
    epsilon: float


@dataclass(frozen=True)
class FirstOrderResponse:
    """Unique periodic solution of the linearized forced reduced system.

    Amplitude-normalized: the physical first-order perturbation is
    ``epsilon * (shape, velocity)``.  ``velocity[:, 5]`` is the fiber-velocity
    component whose period integral is the first-order advance.
    """

    period: float
    times: np.ndarray
    shape: np.ndarray  # (n, 5) chart shape perturbation
    velocity: np.ndarray  # (n, 6) chart velocity perturbation
    w0: np.ndarray  # periodic initial condition (11,)
    state_matrix: np.ndarray  # (11, 11) chart-coordinate linearization
    equilibrium_shape: np.ndarray  # (5,)
    q_star: np.ndarray  # lifted equilibrium configuration
    params: CrawlerParams = field(repr=False, default=None)
    schedule: RestLengthSchedule = field(repr=False, default=None)


# --------------------------------------------------------------------------
# reduced-state plumbing
# --------------------------------------------------------------------------


def reduced_equilibrium_state(params: CrawlerParams, point=None) -> np.ndarray:
    """Reduced rest state (zero velocities) at the homotopy equilibrium."""
    if point is None:
        point = homotopy_equilibrium(params)
    shape = point.as_array()
    n_vel = 6 if params.n_masses == 3 else 12
    return np.concatenate([shape, np.zeros(n_vel)])


def _lift(reduced: np.ndarray, params: CrawlerParams, t: float) -> PhaseState:
    if params.n_masses == 3:
        return lift_state_2d(reduced, fiber=0.0, t=t)
    return lift_state_3d(reduced, t=t)


def _project(state: PhaseState, params: CrawlerParams) -> np.ndarray:
    if params.n_masses == 3:
        red, _ = project_state_2d(state)
    else:
        red, _ = project_state_3d(state)
    return red


def _state_from_vector(y: np.ndarray, t: float, params: CrawlerParams) -> PhaseState:
    n = params.n_coords
    return PhaseState(q=y[:n], u=y[n:], t=t)


# --------------------------------------------------------------------------
# stroboscopic map and fixed points
# --------------------------------------------------------------------------


def stroboscopic_map(
    reduced_state: np.ndarray,
    t0: float,
    schedule: RestLengthSchedule,
    params: CrawlerParams,
    config: IntegratorConfig = CYCLE_CONFIG,
) -> np.ndarray:
    """Advance the reduced state by one forcing period.

    The state is lifted at the canonical fiber (the map does not depend on
    the fiber choice — re-centering makes that exact, not just approximate),
    integrated over [t0, t0 + T] in the full space, and projected back.
    """
    period = schedule.period
    state = _lift(np.asarray(reduced_state, dtype=float), params, t0)
    cfg = dataclasses.replace(config, dense_output=False)
    traj = integrate_crawler(state, schedule, params, (t0, t0 + period), cfg)
    final = _state_from_vector(traj.y[-1], t0 + period, params)
    return _project(final, params)


def _map_jacobian(
    fixed_point: np.ndarray,
    image: np.ndarray,
    t0: float,
    schedule: RestLengthSchedule,
    params: CrawlerParams,
    config: IntegratorConfig,
) -> np.ndarray:
    """Finite-difference Jacobian of the stroboscopic map (columnwise)."""
    n = fixed_point.size
    J = np.empty((n, n))
    for i in range(n):
        h = _FD_STEP * max(1.0, abs(fixed_point[i]))
        yp = fixed_point.copy()
        yp[i] += h
        J[:, i] = (stroboscopic_map(yp, t0, schedule, params, config) - image) / h
    return J


def find_limit_cycle(
    epsilon: float,
    schedule: RestLengthSchedule,
    params: CrawlerParams,
    seed: np.ndarray = None,
    config: IntegratorConfig = CYCLE_CONFIG,
    n_samples: int = 1025,
    strict: bool = True,
) -> CycleResult:
    """Fixed point of the stroboscopic map at forcing amplitude ``epsilon``.

    Runs Picard iteration until the update is small, then Newton with a
    finite-difference Jacobian until the fixed-point defect is at most
    TOL_CYCLE.  Floquet multipliers are the eigenvalues of the last Jacobian.
    The per-cycle shift is read off the final period exactly (fiber endpoint
    of the re-centered lift).  Raises NoConvergence when the budget is
    exhausted (or returns the best effort with ``converged=False`` when
    ``strict`` is false, as the scaling study does).
    """
    sched = schedule.with_amplitude(float(epsilon))
    period = sched.period
    t0 = sched.phase_origin
    y = (
        np.asarray(seed, dtype=float).copy()
        if seed is not None
        else reduced_equilibrium_state(params)
    )

    picard_done = 0
    for k in range(_PICARD_MAX):
        y_next = stroboscopic_map(y, t0, sched, params, config)
        step = float(np.linalg.norm(y_next - y))
        y = y_next
        picard_done = k + 1
        if step <= _PICARD_TOL:
            break

    newton_done = 0
    image = stroboscopic_map(y, t0, sched, params, config)
    residual = float(np.linalg.norm(image - y))
    J = None
    for k in range(_NEWTON_MAX):
        J = _map_jacobian(y, image, t0, sched, params, config)
        if residual <= TOL_CYCLE:
            break
        try:
            delta_y = np.linalg.solve(J - np.eye(y.size), -(image - y))
        except np.linalg.LinAlgError:
            break
        y = y + delta_y
        image = stroboscopic_map(y, t0, sched, params, config)
        residual = float(np.linalg.norm(image - y))
        newton_done = k + 1
    if J is None:
        J = _map_jacobian(y, image, t0, sched, params, config)
    converged = residual <= TOL_CYCLE
    multipliers = np.sort_complex(eigvals(J))

    # final pass over one period with dense output, from the canonical fiber
    state = _lift(y, params, t0)
    traj = integrate_crawler(
        state, sched, params, (t0, t0 + period), dataclasses.replace(config, dense_output=True)
    )
    ts = np.linspace(t0, t0 + period, n_samples)
    red_dim = y.size
    samples = np.empty((n_samples, 1 + red_dim))
    samples[:, 0] = ts
    for i, t in enumerate(ts):
        yv = traj.y[-1] if i == n_samples - 1 else traj.sample_at(t)
        samples[i, 1:] = _project(_state_from_vector(yv, t, params), params)
    if params.n_masses == 3:
        delta = float(traj.y[-1][4] - traj.y[0][4])  # apex x, exact endpoint
    else:
        delta = fiber_3d(traj.y[-1][: params.n_coords])
    result = CycleResult(
        epsilon=float(epsilon),
        period=period,
        fixed_point=y,
        residual=residual,
        delta=delta,
        floquet_multipliers=multipliers,
        converged=converged,
        samples=samples,
        trajectory=traj,
        picard_iterations=picard_done,
        newton_iterations=newton_done,
    )
    if strict and not converged:
        exc = NoConvergence(
            f"stroboscopic fixed point stalled at residual {residual:.3e} "
            f"(epsilon={epsilon:g})"
        )
        exc.result = result
        raise exc
    return result


def _thread_count() -> int:
    raw = os.environ.get("RELCRAWL_THREADS", "1")
    try:
        return max(1, int(raw))
    except ValueError:
        return 1


def scaling_study(
    epsilons,
    schedule: RestLengthSchedule,
    params: CrawlerParams,
    config: IntegratorConfig = CYCLE_CONFIG,
) -> list:
    """Advance-versus-amplitude study with pairwise scaling exponents.

    Amplitudes are processed in the given (descending) order, each search
    warm-started from the previous cycle's fixed point.  When
    RELCRAWL_THREADS asks for more than one worker the searches run
    independently (each seeded at the equilibrium) and are aggregated in
    amplitude order, so results are deterministic either way.  A failed row
    is recorded with NaN advance and the study continues.
    """
    eps_list = [float(e) for e in epsilons]
    results = {}
    workers = _thread_count()
    if workers > 1 and len(eps_list) > 1:
        def run(eps):
            try:
                return find_limit_cycle(eps, schedule, params, config=config, strict=False)
            except Exception:  # noqa: BLE001 - recorded as a failed row
                return None
        with ThreadPoolExecutor(max_workers=workers) as pool:
            for eps, res in zip(eps_list, pool.map(run, eps_list)):
                results[eps] = res
    else:
        seed = None
        for eps in eps_list:
            try:
                res = find_limit_cycle(
                    eps, schedule, params, seed=seed, config=config, strict=False
                )
            except Exception:  # noqa: BLE001
                res = None
            results[eps] = res
            if res is not None and res.converged:
                seed = res.fixed_point

    rows = []
    for i, eps in enumerate(eps_list):
        res = results[eps]
        if res is None:
            rows.append(ScalingRow(eps, float("nan"), None))
            continue
        delta = res.delta if params.n_masses == 3 else float(res.delta.x)
        p_exp = None
        if i + 1 < len(eps_list):
            nxt = results[eps_list[i + 1]]
            if nxt is not None:
                d2 = nxt.delta if params.n_masses == 3 else float(nxt.delta.x)
                if (
                    np.isfinite(delta)
                    and np.isfinite(d2)
                    and delta != 0.0
                    and d2 != 0.0
                ):
                    p_exp = float(
                        (math.log(abs(delta)) - math.log(abs(d2)))
                        / (math.log(eps) - math.log(eps_list[i + 1]))
                    )
        rows.append(
            ScalingRow(
                epsilon=eps,
                delta_x=float(delta),
                p_exponent=p_exp,
                residual=res.residual,
                max_multiplier=float(np.max(np.abs(res.floquet_multipliers))),
                converged=res.converged,
            )
        )
    return rows


# --------------------------------------------------------------------------
# settle-then-force protocol
# --------------------------------------------------------------------------


def settle_then_force(
    epsilon: float,
    t_settle: float,
    n_periods: int,
    params: CrawlerParams,
    schedule: RestLengthSchedule = None,
    offset=None,
    config: IntegratorConfig = SIM_CONFIG,
) -> SettleForceResult:
    """Rest, then switch on the periodic schedule; record per-period advance.

    The run starts at the lifted equilibrium (so the settle phase is exact
    rest unless ``offset`` — added to the packed full state — makes settling
    visible), integrates unforced for ``t_settle``, then applies the
    schedule (phase zero at t_settle) for ``n_periods`` periods.  Per-period
    shifts are increments of the apex x (planar) or of the mass-1 x
    (spatial) across consecutive periods.
    """
    base = schedule if schedule is not None else RestLengthSchedule(
        base_lengths=params.rest_lengths, amplitude=0.0
    )
    sched = dataclasses.replace(
        base.with_amplitude(float(epsilon)), phase_origin=float(t_settle)
    )
    period = sched.period
    start = equilibrium_state(params)
    y0 = start.y
    if offset is not None:
        y0 = y0 + np.asarray(offset, dtype=float)
        start = _state_from_vector(y0, 0.0, params)

    settle = integrate_crawler(start, None, params, (0.0, float(t_settle)), config)
    mid = _state_from_vector(settle.y[-1], float(t_settle), params)
    t_end = float(t_settle) + n_periods * period
    forced = integrate_crawler(mid, sched, params, (float(t_settle), t_end), config)

    x_index = 4 if params.n_masses == 3 else 0
    marks = np.empty(n_periods + 1)
    for k in range(n_periods + 1):
        t = float(t_settle) + k * period
        yv = forced.y[-1] if k == n_periods else forced.sample_at(t)
        marks[k] = yv[x_index]
    return SettleForceResult(
        settle_trajectory=settle,
        forced_trajectory=forced,
        period_shifts=np.diff(marks),
        t_settle=float(t_settle),
        period=period,
        epsilon=float(epsilon),
    )


# --------------------------------------------------------------------------
# small-amplitude expansion
# --------------------------------------------------------------------------


def _chart_operators(params: CrawlerParams):
    """Equilibrium chart data: (shape*, q*, J, J^-1, K, nu)."""
    point = homotopy_equilibrium(params)
    q_star = equilibrium_state(params, point).q
    J = chart_jacobian_2d(q_star)
    J_inv = np.linalg.inv(J)
    K = potential_hessian(q_star, params.rest_lengths, params)
    nu = rayleigh_matrix(q_star, params)
    return point.as_array(), np.asarray(q_star, dtype=float), J, J_inv, K, nu


def _spring_direction_vectors(q: np.ndarray) -> np.ndarray:
    """Gradients of the spring lengths w.r.t. q, one row per spring."""
    lengths, units, pairs, sdim = _spring_geometry(q)
    n = q.size
    W = np.zeros((len(pairs), n))
    for k, (i, j) in enumerate(pairs):
        W[k, sdim * i : sdim * i + sdim] = units[k]
        W[k, sdim * j : sdim * j + sdim] = -units[k]
    return W


def first_order_response(
    schedule: RestLengthSchedule,
    params: CrawlerParams,
    n_samples: int = 4097,
    rtol: float = 1e-11,
    atol: float = 1e-14,
) -> FirstOrderResponse:
    """Periodic solution of the linearized forced reduced system (planar).

    The chart-coordinate linearization ``w' = A w + b(t)`` is driven by the
    amplitude-normalized rest-length deviation: ``b`` collects the spring
    forces ``kappa_s * (d l_k / d q) * delta_rest_k(t)`` mapped to chart
    velocities.  The unique periodic orbit solves ``(I - e^{AT}) w0 = c``
    with c the zero-start response over one period; SingularPeriodMap is
    raised if 1 is a Floquet multiplier (impossible at a robustly stable
    equilibrium).
    """
    if params.n_masses != 3:
        raise ValueError("the small-amplitude expansion is implemented for the planar model")
    shape_star, q_star, J, J_inv, K, nu = _chart_operators(params)
    JKJ = J @ K @ J_inv
    JnuJ = J @ nu @ J_inv
    A = np.zeros((11, 11))
    A[:5, 5:] = np.eye(6)[:5]
    A[5:, :5] = -JKJ[:, :5]
    A[5:, 5:] = -JnuJ

    W = _spring_direction_vectors(q_star)
    unit_sched = schedule.with_amplitude(1.0)
    base = np.asarray(unit_sched.base_lengths, dtype=float)
    kappa = params.kappa_s
    t0 = unit_sched.phase_origin
    period = unit_sched.period

    def forcing(t):
        dl = schedule_eval(t, unit_sched) - base
        return J @ (kappa * (W.T @ dl))

    def rhs(t, w):
        out = A @ w
        out[5:] += forcing(t)
        return out

    cfg = IntegratorConfig(rtol=rtol, atol=atol, dense_output=False)
    zero_run = integrate(rhs, np.zeros(11), (t0, t0 + period), cfg)
    c = zero_run.y[-1]
    M = expm(A * period)
    IM = np.eye(11) - M
    sv = svdvals(IM)
    if sv[-1] < 1e-12 * max(sv[0], 1.0):
        raise SingularPeriodMap(
            "1 is a Floquet multiplier of the linearized period map"
        )
    w0 = np.linalg.solve(IM, c)

    cfg_dense = IntegratorConfig(rtol=rtol, atol=atol, dense_output=True)
    run = integrate(rhs, w0, (t0, t0 + period), cfg_dense)
    times = np.linspace(t0, t0 + period, n_samples)
    wall = np.empty((n_samples, 11))
    for i, t in enumerate(times):
        wall[i] = run.y[-1] if i == n_samples - 1 else run.sample_at(t)
    return FirstOrderResponse(
        period=period,
        times=times,
        shape=wall[:, :5],
        velocity=wall[:, 5:],
        w0=w0,
        state_matrix=A,
        equilibrium_shape=shape_star,
        q_star=q_star,
        params=params,
        schedule=schedule,
    )


def check_first_order_shift(response: FirstOrderResponse) -> float:
    """Period integral of the first-order fiber velocity (expected ~ 0)."""
    return float(simpson(response.velocity[:, 5], x=response.times))


def _chart_rayleigh(shape: np.ndarray, params: CrawlerParams, frozen=None) -> np.ndarray:
    """Damping matrix in chart velocities at a shape point.

    ``frozen = (ns_weights, db_weights)`` evaluates the contact weights at
    the equilibrium instead of the current heights (geometry still varies) —
    the configuration-independent-damping diagnostic.
    """
    st = lift_state_2d(np.concatenate([shape, np.zeros(6)]), fiber=0.0)
    q = np.asarray(st.q, dtype=float)
    J = chart_jacobian_2d(q)
    J_inv = np.linalg.inv(J)
    if frozen is None:
        nu = rayleigh_matrix(q, params)
    else:
        ns_w, db_w = frozen
        W = _spring_direction_vectors(q)
        nu = params.nu_s * (W.T @ W)
        for i in range(3):
            nu[2 * i, 2 * i] += params.nu_ns * ns_w[i]
            nu[2 * i + 1, 2 * i + 1] += params.nu_db * db_w[i]
    return J_inv.T @ nu @ J_inv


def second_order_shift(
    response: FirstOrderResponse,
    params: CrawlerParams = None,
    h: float = 1e-6,
    frozen_contact: bool = False,
) -> float:
    """Second-order per-cycle advance from the first-order response.

    The fiber coordinate is cyclic, so the period integral of its damping
    force vanishes on the cycle; expanding that balance to second order
    leaves ``delta = -(1/nu_66) * Int (D nu . shape1(t)) vel1(t) |_fiber dt``
    with ``nu`` the chart-velocity damping matrix, differentiated by central
    differences along the five shape directions.  The physical advance is
    ``epsilon**2`` times the returned value.

    ``frozen_contact`` freezes the contact weights at their equilibrium
    values (keeping the geometry): the balance argument then makes the
    advance vanish exactly, so the returned value collapsing to ~0 is a
    machinery check.
    """
    if params is None:
        params = response.params
    shape_star = response.equilibrium_shape
    frozen = None
    if frozen_contact:
        z = np.array([response.q_star[1], response.q_star[3], response.q_star[5]])
        ns_w = np.abs(chi_prime(z, params.profile))
        frozen = (ns_w, _debounce_weight(z, params))

    nu_star = _chart_rayleigh(shape_star, params, frozen)
    nu_66 = nu_star[5, 5]
    D = []
    for k in range(5):
        sp = shape_star.copy()
        sp[k] += h
        sm = shape_star.copy()
        sm[k] -= h
        D.append(
            (_chart_rayleigh(sp, params, frozen) - _chart_rayleigh(sm, params, frozen))
            / (2.0 * h)
        )
    integrand = np.zeros(response.times.size)
    for k in range(5):
        integrand += response.shape[:, k] * (response.velocity @ D[k][5])
    return float(-simpson(integrand, x=response.times) / nu_66)


def cyclic_balance_residual(cycle: CycleResult, params: CrawlerParams, n_samples: int = 2049) -> float:
    """Period integral of the fiber-velocity damping force on a cycle.

    The fiber coordinate is cyclic, so this integral vanishes on an exact
    relative-periodic orbit; the returned residual is a convergence check.
    Planar only (the damping force conjugate to the apex advance reduces to
    the no-slip drag summed over the grounded masses).
    """
    traj = cycle.trajectory
    ts = np.linspace(traj.t[0], traj.t[-1], n_samples)
    vals = np.empty(n_samples)
    for i, t in enumerate(ts):
        yv = traj.y[-1] if i == n_samples - 1 else traj.sample_at(t)
        q, u = yv[:6], yv[6:]
        z = q[1::2]
        w = np.abs(chi_prime(z, params.profile))
        vals[i] = params.nu_ns * float(np.sum(w * u[0::2]))
    return float(simpson(vals, x=ts))


def dominant_frequency(times: np.ndarray, values: np.ndarray) -> float:
    """Frequency of the largest non-constant Fourier component.

    Expects uniform sampling; a linear trend (steady drift) is removed
    before the transform.
    """
    times = np.asarray(times, dtype=float)
    values = np.asarray(values, dtype=float)
    coeff = np.polyfit(times, values, 1)
    detrended = values - np.polyval(coeff, times)
    spec = np.abs(np.fft.rfft(detrended))
    freqs = np.fft.rfftfreq(times.size, d=times[1] - times[0])
    k = int(np.argmax(spec[1:])) + 1
    return float(freqs[k])
