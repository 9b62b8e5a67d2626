"""Adaptive embedded Runge-Kutta 5(4) integration with dense output.

The stepper is the classic Dormand-Prince 5(4) pair with FSAL, a PI
step-size controller, and a quartic interpolant per accepted step.  It is
deliberately free of global state and randomness: identical inputs produce
bitwise-identical step sequences, which the equivariance and reproducibility
tests rely on.

A compiled twin of this loop lives in ``relcrawl._core`` for the crawler
right-hand sides; both fill the same :class:`Trajectory` container.  The
generic entry point here accepts any ``f(t, y) -> ydot``.
"""

from __future__ import annotations

import bisect
from dataclasses import dataclass

import numpy as np

from .errors import OutOfSpan, StepSizeUnderflow

__all__ = [
    "IntegratorConfig",
    "Trajectory",
    "integrate",
    "flow_map",
    "initial_step_size",
    "read_trajectory_csv",
    "RK_C",
    "RK_A",
    "RK_B",
    "RK_E",
    "RK_P",
]

# Dormand-Prince 5(4) tableau.
RK_C = np.array([0.0, 1 / 5, 3 / 10, 4 / 5, 8 / 9, 1.0, 1.0])
RK_A = np.array(
    [
        [0, 0, 0, 0, 0, 0],
        [1 / 5, 0, 0, 0, 0, 0],
        [3 / 40, 9 / 40, 0, 0, 0, 0],
        [44 / 45, -56 / 15, 32 / 9, 0, 0, 0],
        [19372 / 6561, -25360 / 2187, 64448 / 6561, -212 / 729, 0, 0],
        [9017 / 3168, -355 / 33, 46732 / 5247, 49 / 176, -5103 / 18656, 0],
    ]
)
RK_B = np.array([35 / 384, 0.0, 500 / 1113, 125 / 192, -2187 / 6784, 11 / 84])
# Difference between the 5th- and embedded 4th-order solutions.
RK_E = np.array(
    [71 / 57600, 0.0, -71 / 16695, 71 / 1920, -17253 / 339200, 22 / 525, -1 / 40]
)
# Quartic dense-output coefficients: y(t0 + x*h) = y0 + h * (K' P) @ [x, x^2, x^3, x^4].
RK_P = np.array(
    [
        [1, -8048581381 / 2820520608, 8663915743 / 2820520608, -12715105075 / 11282082432],
        [0, 0, 0, 0],
        [0, 131558114200 / 32700410799, -68118460800 / 10900136933, 87487479700 / 32700410799],
        [0, -1754552775 / 470086768, 14199869525 / 1410260304, -10690763975 / 1880347072],
        [0, 127303824393 / 49829197408, -318862633887 / 49829197408, 701980252875 / 199316789632],
        [0, -282668133 / 205662961, 2019193451 / 616988883, -1453857185 / 822651844],
        [0, 40617522 / 29380423, -110615467 / 29380423, 69997945 / 29380423],
    ]
)

_SAFETY = 0.9
_ALPHA = 0.7 / 5.0  # PI controller: proportional exponent
_BETA = 0.4 / 5.0  # PI controller: integral exponent
_FAC_MIN = 0.2
_FAC_MAX = 10.0
_ORDER_ERR = 5.0  # local error order of the embedded estimate + 1


@dataclass(frozen=True)
class IntegratorConfig:
    """Tolerances and step limits for :func:`integrate`."""

    rtol: float = 1e-9
    atol: float = 1e-12
    max_step: float = np.inf
    initial_step: float | None = None
    dense_output: bool = True

    def __post_init__(self):
        if not (self.rtol > 0.0 and self.atol > 0.0):
            raise ValueError("rtol and atol must be > 0")
        if not (self.max_step > 0.0):
            raise ValueError("max_step must be > 0")


class Trajectory:
    """Integration result: step nodes, states, and per-step interpolants.

    Attributes
    ----------
    t : (n+1,) float array of accepted step endpoints (strictly increasing).
    y : (n+1, d) states at the nodes.
    coeffs : (n, d, 4) dense-output coefficients, or None when dense output
        was disabled.
    step_log : (m, 4) attempted-step log rows (t, h, error_norm, accepted).
    """

    def __init__(self, t, y, coeffs, step_log):
        self.t = np.asarray(t, dtype=float)
        self.y = np.asarray(y, dtype=float)
        self.coeffs = None if coeffs is None else np.asarray(coeffs, dtype=float)
        self.step_log = np.asarray(step_log, dtype=float).reshape(-1, 4)

    @property
    def t0(self) -> float:
        return float(self.t[0])

    @property
    def t1(self) -> float:
        return float(self.t[-1])

    @property
    def n_accepted(self) -> int:
        return len(self.t) - 1

    @property
    def n_rejected(self) -> int:
        if self.step_log.size == 0:
            return 0
        return int(np.sum(self.step_log[:, 3] == 0.0))

    def sample_at(self, t):
        """State at time(s) ``t`` from the dense interpolant.

        Node times return the stored node state exactly (bitwise).  Raises
        OutOfSpan outside ``[t0, t1]`` and requires dense output for
        non-node times.
        """
        if np.ndim(t) > 0:
            return np.array([self.sample_at(tk) for tk in np.asarray(t, dtype=float)])
        t = float(t)
        if t < self.t[0] or t > self.t[-1]:
            raise OutOfSpan(f"t={t} outside [{self.t[0]}, {self.t[-1]}]")
        k = bisect.bisect_right(self.t, t) - 1
        if k >= 0 and self.t[k] == t:
            return self.y[k].copy()
        if k >= len(self.t) - 1:
            k = len(self.t) - 2
        if self.coeffs is None:
            raise OutOfSpan("dense output disabled; only node times can be sampled")
        h = self.t[k + 1] - self.t[k]
        x = (t - self.t[k]) / h
        px = np.array([x, x * x, x * x * x, x * x * x * x])
        return self.y[k] + h * (self.coeffs[k] @ px)

    def to_csv(self, path, column_names=None):
        """Write node samples as CSV with 17 significant digits.

        Columns: ``t`` followed by the state components (named ``y1..yd``
        unless ``column_names`` is given).
        """
        d = self.y.shape[1]
        if column_names is None:
            column_names = [f"y{i + 1}" for i in range(d)]
        if len(column_names) != d:
            raise ValueError("column_names length does not match state dimension")
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(",".join(["t"] + list(column_names)) + "\n")
            for tk, yk in zip(self.t, self.y):
                row = [format(tk, ".17g")] + [format(v, ".17g") for v in yk]
                fh.write(",".join(row) + "\n")


def read_trajectory_csv(path):
    """Read a CSV written by :meth:`Trajectory.to_csv`.

    Returns ``(column_names, t, y)``; the interpolant is not serialized.
    """
    with open(path, "r", encoding="utf-8") as fh:
        header = fh.readline().strip().split(",")
        data = np.loadtxt(fh, delimiter=",", ndmin=2)
    return header[1:], data[:, 0], data[:, 1:]


def _error_norm(err, y_old, y_new, rtol, atol):
    scale = atol + rtol * np.maximum(np.abs(y_old), np.abs(y_new))
    ratio = err / scale
    return float(np.sqrt(np.mean(ratio * ratio)))


def initial_step_size(rhs, t0, y0, f0, rtol, atol, max_step):
    """Heuristic starting step (same scheme both backends use)."""
    scale = atol + rtol * np.abs(y0)
    d0 = float(np.sqrt(np.mean((y0 / scale) ** 2)))
    d1 = float(np.sqrt(np.mean((f0 / scale) ** 2)))
    h0 = 1e-6 if (d0 < 1e-5 or d1 < 1e-5) else 0.01 * d0 / d1
    y1 = y0 + h0 * f0
    f1 = np.asarray(rhs(t0 + h0, y1), dtype=float)
    d2 = float(np.sqrt(np.mean(((f1 - f0) / scale) ** 2))) / h0
    if d1 <= 1e-15 and d2 <= 1e-15:
        h1 = max(1e-6, h0 * 1e-3)
    else:
        h1 = (0.01 / max(d1, d2)) ** (1.0 / _ORDER_ERR)
    return min(100.0 * h0, h1, max_step)


def integrate(rhs, y0, t_span, config: IntegratorConfig | None = None) -> Trajectory:
    """Integrate ``dy/dt = rhs(t, y)`` over ``t_span = (t0, t1)``, t1 >= t0.

    Deterministic for identical inputs.  Raises StepSizeUnderflow when error
    control forces the step below the representable minimum (stiff blow-up),
    and propagates any exception raised by ``rhs``.
    """
    if config is None:
        config = IntegratorConfig()
    t0, t1 = (float(t_span[0]), float(t_span[1]))
    if not (np.isfinite(t0) and np.isfinite(t1)) or t1 < t0:
        raise ValueError(f"invalid t_span {t_span}")
    y = np.array(y0, dtype=float).ravel()
    d = y.size

    ts = [t0]
    ys = [y.copy()]
    coeffs = [] if config.dense_output else None
    step_log = []

    if t1 == t0:
        return Trajectory(ts, ys, np.zeros((0, d, 4)) if config.dense_output else None, np.zeros((0, 4)))

    f = np.asarray(rhs(t0, y), dtype=float)
    if config.initial_step is not None:
        h = float(config.initial_step)
    else:
        h = initial_step_size(rhs, t0, y, f, config.rtol, config.atol, config.max_step)
    h = min(h, config.max_step, t1 - t0)

    t = t0
    err_prev = 1.0
    K = np.empty((7, d))
    while t < t1:
        h = min(h, config.max_step, t1 - t)
        if h < 1e-14 * max(1.0, abs(t)):
            raise StepSizeUnderflow(f"step size {h} underflowed at t={t}")
        K[0] = f
        for s in range(1, 6):
            ys_stage = y + h * (K[:s].T @ RK_A[s, :s])
            K[s] = rhs(t + RK_C[s] * h, ys_stage)
        y_new = y + h * (K[:6].T @ RK_B)
        K[6] = rhs(t + h, y_new)
        err_vec = h * (K.T @ RK_E)
        err = _error_norm(err_vec, y, y_new, config.rtol, config.atol)
        accepted = err <= 1.0
        step_log.append((t, h, err, 1.0 if accepted else 0.0))
        if accepted:
            if config.dense_output:
                coeffs.append(K.T @ RK_P)
            t = t + h
            y = y_new
            f = K[6]  # FSAL
            ts.append(t)
            ys.append(y.copy())
            if err == 0.0:
                factor = _FAC_MAX
            else:
                factor = _SAFETY * err ** (-_ALPHA) * err_prev ** _BETA
            err_prev = max(err, 1e-10)
        else:
            factor = max(_FAC_MIN, _SAFETY * err ** (-1.0 / _ORDER_ERR))
            factor = min(factor, 1.0)
        h = h * min(_FAC_MAX, max(_FAC_MIN, factor))

    return Trajectory(
        ts,
        ys,
        np.array(coeffs) if config.dense_output else None,
        np.array(step_log) if step_log else np.zeros((0, 4)),
    )


def flow_map(rhs, y0, t0, T, config: IntegratorConfig | None = None):
    """Endpoint of the flow after duration ``T`` from ``(t0, y0)``.

    ``T = 0`` returns a copy of ``y0`` without evaluating ``rhs``.
    """
    if T == 0.0:
        return np.array(y0, dtype=float).ravel()
    if config is None:
        config = IntegratorConfig(dense_output=False)
    traj = integrate(rhs, y0, (t0, t0 + T), config)
    return traj.y[-1].copy()
