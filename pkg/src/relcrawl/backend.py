"""Backend selection: compiled extension when available, pure Python otherwise.

The compiled module (`relcrawl._core`) implements the crawler right-hand side
and the adaptive RK5(4) loop in C.  It is optional — environments without a C
compiler fall back to the NumPy implementation with identical semantics.  Set
``RELCRAWL_FORCE_PYTHON=1`` to force the fallback (used by tests and the
backend benchmark).
"""
from __future__ import annotations

import os

import numpy as np

from . import integrate as _integrate
from . import model as _model
from .errors import DegenerateConfiguration, ScheduleDomain, StepSizeUnderflow

_core = None
if os.environ.get("RELCRAWL_FORCE_PYTHON", "") != "1":
    try:
        from . import _core  # type: ignore[attr-defined]
    except ImportError:
        _core = None


def active() -> str:
    """Name of the backend in use: ``"compiled"`` or ``"python"``."""
    return "compiled" if _core is not None else "python"


def _pack_params(params: "_model.CrawlerParams") -> np.ndarray:
    prof = params.profile
    return np.array(
        [
            params.kappa_s,
            params.nu_s,
            params.kappa_np,
            params.nu_ns,
            params.nu_db,
            params.gravity,
            0.0 if prof.kind == "raw_c1" else 1.0,
            prof.mollifier_width,
            1.0 if params.debounce_chi_prime else 0.0,
            float(params.n_masses),
        ]
    )


def _pack_schedule(schedule, params: "_model.CrawlerParams") -> np.ndarray:
    if schedule is None:
        vec = [0.0, 0.0, 0.0, 0.0]
        vec.extend(float(b) for b in params.rest_lengths)
        return np.array(vec)
    mode = {"standard": 1, "user_table": 2}[schedule.mode]
    vec = [
        float(mode),
        schedule.amplitude,
        schedule.angular_frequency,
        schedule.phase_origin,
    ]
    vec.extend(float(b) for b in schedule.base_lengths)
    if schedule.mode == "user_table":
        for entry in schedule.table:
            vec.append(float(len(entry)))
            for (mult, amp, phase) in entry:
                vec.extend((float(mult), float(amp), float(phase)))
    return np.array(vec)


def integrate_crawler(state, schedule, params, t_span, config=None):
    """Integrate the crawler EoM over ``t_span`` with the active backend.

    Parameters mirror :func:`relcrawl.integrate.integrate` with the rhs built
    by :func:`relcrawl.model.make_rhs`; the result is a
    :class:`relcrawl.integrate.Trajectory` either way.
    """
    if config is None:
        config = _integrate.IntegratorConfig()
    t0, t1 = float(t_span[0]), float(t_span[1])
    if _core is None:
        rhs = _model.make_rhs(params, schedule)
        y0 = state.y if hasattr(state, "y") else np.asarray(state, dtype=float)
        return _integrate.integrate(rhs, y0, (t0, t1), config)

    y0 = state.y if hasattr(state, "y") else np.asarray(state, dtype=float)
    pvec = _pack_params(params)
    svec = _pack_schedule(schedule, params)
    initial = config.initial_step if config.initial_step is not None else -1.0
    status, ts, ys, coeffs, step_log = _core.integrate_crawler(
        np.ascontiguousarray(y0, dtype=float),
        t0,
        t1,
        config.rtol,
        config.atol,
        config.max_step,
        initial,
        bool(config.dense_output),
        pvec,
        svec,
    )
    if status == 1:
        raise DegenerateConfiguration(
            "two masses closer than the minimum separation during integration"
        )
    if status == 2:
        raise ScheduleDomain("schedule produced a non-finite rest length")
    if status == 3:
        raise StepSizeUnderflow(
            f"step size underflow near t={ts[-1]:.6g}; the problem may be too stiff "
            "for the requested tolerances"
        )
    return _integrate.Trajectory(t=ts, y=ys, coeffs=coeffs, step_log=step_log)


def rhs_eval(t, y, schedule, params):
    """Evaluate the packed rhs once via the compiled path (testing hook)."""
    if _core is None:
        raise RuntimeError("compiled backend not available")
    return _core.rhs_eval(
        float(t),
        np.ascontiguousarray(y, dtype=float),
        _pack_params(params),
        _pack_schedule(schedule, params),
    )
