"""Command-line experiment runner.

Subcommands: certify, simulate, cycle, sweep, perturbation, demo3d.  Each
reads an optional flat YAML config (flags override file values) and writes
machine-readable outputs (CSV time series, JSON reports) into --out.

Exit codes: 0 success (and, for certify, a robustly stable verdict);
1 completed with a negative verdict; 2 assumption/domain/config failure;
3 numerical failure (continuation, cycle search, or integrator breakdown).
"""
from __future__ import annotations

import argparse
import os
import sys

import numpy as np

from . import __version__
from .backend import active as active_backend
from .backend import integrate_crawler
from .cycles import (
    CYCLE_CONFIG,
    check_first_order_shift,
    cyclic_balance_residual,
    dominant_frequency,
    find_limit_cycle,
    first_order_response,
    scaling_study,
    second_order_shift,
    settle_then_force,
    reduced_equilibrium_state,
)
from .dataio import ExperimentConfig, build_config, load_config, write_csv, write_json
from .equilibrium import certify_stability
from .errors import (
    AssumptionViolated,
    ChartDomain,
    ConfigError,
    ContinuationFailed,
    DegenerateConfiguration,
    NoConvergence,
    OutOfSpan,
    ScheduleDomain,
    SingularPeriodMap,
    StepSizeUnderflow,
)
from .model import PhaseState
from .presets import demo_params_3d, demo_schedule_3d
from .reduction import act_se2, se2_compose, lift_state_3d

__all__ = ["main"]

_ASSUMPTION_ERRORS = (
    ConfigError,
    AssumptionViolated,
    ChartDomain,
    ScheduleDomain,
    DegenerateConfiguration,
    OutOfSpan,
)
_NUMERICAL_ERRORS = (
    ContinuationFailed,
    NoConvergence,
    StepSizeUnderflow,
    SingularPeriodMap,
)


def _out_path(cfg: ExperimentConfig, name: str) -> str:
    os.makedirs(cfg.out, exist_ok=True)
    return os.path.join(cfg.out, name)


def _reduced_column_names(spatial: bool):
    if not spatial:
        return [
            "z1", "z2", "l1", "l2", "l3",
            "vz1", "vz2", "vl1", "vl2", "vl3", "v3",
        ]
    return (
        [f"l{k}" for k in range(1, 7)]
        + ["z1", "z2", "z3"]
        + [f"vl{k}" for k in range(1, 7)]
        + ["vz1", "vz2", "vz3"]
        + ["omega", "xi_x", "xi_y"]
    )


def _mass_column_names(spatial: bool):
    if not spatial:
        return ["x1", "z1", "x2", "z2", "x3", "z3"]
    names = []
    for i in range(1, 5):
        names += [f"x{i}", f"y{i}", f"z{i}"]
    return names


def _emit_plot_files(cfg: ExperimentConfig, stem: str, header, rows) -> None:
    """Space-separated plot data plus a gnuplot script template."""
    dat = _out_path(cfg, f"{stem}.dat")
    with open(dat, "w", encoding="utf-8") as fh:
        fh.write("# " + " ".join(header) + "\n")
        for row in rows:
            fh.write(" ".join("nan" if v is None else repr(float(v)) for v in row) + "\n")
    script = _out_path(cfg, f"{stem}.gp")
    with open(script, "w", encoding="utf-8") as fh:
        fh.write(f"# gnuplot template for {stem}.dat (column order in the header line)\n")
        fh.write("set grid\nset key outside\n")
        cols = ", ".join(
            f"'{stem}.dat' using 1:{k + 2} with lines title '{name}'"
            for k, name in enumerate(header[1:])
        )
        fh.write(f"plot {cols}\n")


# --------------------------------------------------------------------------
# subcommands
# --------------------------------------------------------------------------


def cmd_certify(cfg: ExperimentConfig) -> int:
    report = certify_stability(cfg.params)
    point = report.reduced_equilibrium
    payload = {
        "verdict": report.verdict,
        "failure_reason": report.failure_reason,
        "gradient_norm": report.gradient_norm,
        "spectral_abscissa": report.spectral_abscissa,
        "reduced_equilibrium": None if point is None else point.as_array(),
        "hessian_eigenvalues": report.hessian_eigenvalues,
        "rayleigh_eigenvalues": report.rayleigh_eigenvalues,
        "linearization_spectrum": report.linearization_spectrum,
    }
    write_json(_out_path(cfg, "stability_report.json"), payload)
    print(f"verdict: {report.verdict}")
    if report.failure_reason:
        print(f"reason: {report.failure_reason}")
    if report.verdict == "robustly_stable":
        return 0
    if report.verdict in ("marginal", "unstable"):
        return 1
    reason = report.failure_reason or ""
    return 3 if reason.startswith("continuation failed") else 2


def _offset_vector(cfg: ExperimentConfig) -> np.ndarray:
    if cfg.offset is None:
        return None
    n = cfg.params.n_coords
    sdim = cfg.params.space_dim
    if np.ndim(cfg.offset) == 0:
        off = np.zeros(2 * n)
        off[sdim - 1 : n : sdim] = float(cfg.offset)  # lift every mass vertically
        return off
    off = np.asarray(cfg.offset, dtype=float)
    if off.shape != (2 * n,):
        raise ConfigError(f"offset must be a scalar or a length-{2 * n} vector")
    return off


def cmd_simulate(cfg: ExperimentConfig) -> int:
    spatial = cfg.model == "crawler3d"
    result = settle_then_force(
        cfg.epsilon,
        cfg.t_settle,
        cfg.n_periods,
        cfg.params,
        schedule=cfg.schedule,
        offset=_offset_vector(cfg),
        **({"config": cfg.integrator} if cfg.integrator is not None else {}),
    )
    period = result.period
    n = cfg.params.n_coords

    per_period = 64
    t_grid = np.arange(0.0, cfg.t_settle + cfg.n_periods * period + 1e-12, period / per_period)
    series_rows = []
    for t in t_grid:
        traj = result.settle_trajectory if t <= cfg.t_settle else result.forced_trajectory
        y = traj.sample_at(min(t, traj.t[-1]))
        series_rows.append([t] + list(y[:n]))
    names = _mass_column_names(spatial)
    write_csv(_out_path(cfg, "series.csv"), ["t"] + names, series_rows)

    # ground-plane / vertical-plane paths, one pair of columns per mass
    path_rows = [row[1:] for row in series_rows]
    write_csv(_out_path(cfg, "paths.csv"), names, path_rows)

    write_csv(
        _out_path(cfg, "shifts.csv"),
        ["period_index", "shift"],
        [[k + 1, s] for k, s in enumerate(result.period_shifts)],
    )

    x_index = 4 if not spatial else 0
    forced_t = np.linspace(cfg.t_settle, cfg.t_settle + cfg.n_periods * period, 1024, endpoint=False)
    x_series = np.array([result.forced_trajectory.sample_at(t)[x_index] for t in forced_t])
    summary = {
        "model": cfg.model,
        "epsilon": cfg.epsilon,
        "t_settle": cfg.t_settle,
        "n_periods": cfg.n_periods,
        "period": period,
        "period_shifts": result.period_shifts,
        "last_shift": float(result.period_shifts[-1]),
        "dominant_frequency": dominant_frequency(forced_t, x_series),
        "backend": active_backend(),
    }
    write_json(_out_path(cfg, "summary.json"), summary)
    if cfg.emit_plots:
        _emit_plot_files(cfg, "plot_series", ["t"] + names, series_rows)
    print(
        f"simulate: eps={cfg.epsilon:g}, {cfg.n_periods} periods, "
        f"last per-period shift {summary['last_shift']:.6g}"
    )
    return 0


def cmd_cycle(cfg: ExperimentConfig) -> int:
    spatial = cfg.model == "crawler3d"
    seed_state = None
    if cfg.seed is not None:
        rng = np.random.default_rng(cfg.seed)
        seed_state = reduced_equilibrium_state(cfg.params)
        seed_state = seed_state + 1e-2 * rng.standard_normal(seed_state.size)
    res = find_limit_cycle(
        cfg.epsilon,
        cfg.schedule,
        cfg.params,
        seed=seed_state,
        config=cfg.integrator if cfg.integrator is not None else CYCLE_CONFIG,
    )
    names = _reduced_column_names(spatial)
    write_csv(
        _out_path(cfg, "cycle_samples.csv"),
        ["t"] + names,
        [list(row) for row in res.samples],
    )
    summary = {
        "epsilon": res.epsilon,
        "period": res.period,
        "residual": res.residual,
        "converged": res.converged,
        "fixed_point": res.fixed_point,
        "delta": res.delta,
        "floquet_multipliers": list(res.floquet_multipliers),
        "max_multiplier": float(np.max(np.abs(res.floquet_multipliers))),
        "picard_iterations": res.picard_iterations,
        "newton_iterations": res.newton_iterations,
        "seed": cfg.seed,
        "cyclic_balance_residual": (
            cyclic_balance_residual(res, cfg.params) if not spatial else None
        ),
        "backend": active_backend(),
    }
    write_json(_out_path(cfg, "cycle_summary.json"), summary)
    if cfg.emit_plots:
        _emit_plot_files(cfg, "plot_cycle", ["t"] + names, [list(r) for r in res.samples])
    delta_text = (
        f"delta_x={res.delta:.8g}"
        if not spatial
        else f"delta=(phi={res.delta.phi:.6g}, x={res.delta.x:.6g}, y={res.delta.y:.6g})"
    )
    print(
        f"cycle: eps={res.epsilon:g} converged={res.converged} "
        f"residual={res.residual:.3e} {delta_text}"
    )
    return 0


def cmd_sweep(cfg: ExperimentConfig) -> int:
    eps = list(cfg.epsilons)
    if any(b >= a for a, b in zip(eps, eps[1:])):
        print("warning: epsilon list not strictly descending; sorting", file=sys.stderr)
        eps = sorted(set(eps), reverse=True)
    rows = scaling_study(
        eps,
        cfg.schedule,
        cfg.params,
        config=cfg.integrator if cfg.integrator is not None else CYCLE_CONFIG,
    )
    table = [
        [
            r.epsilon,
            None if not np.isfinite(r.delta_x) else r.delta_x,
            r.p_exponent,
            None if not np.isfinite(r.residual) else r.residual,
            None if not np.isfinite(r.max_multiplier) else r.max_multiplier,
            "ok" if r.converged else "failed",
        ]
        for r in rows
    ]
    write_csv(
        _out_path(cfg, "sweep.csv"),
        ["epsilon", "delta_x", "p", "residual", "max_multiplier", "status"],
        table,
    )
    for r in rows:
        p_txt = "" if r.p_exponent is None else f"{r.p_exponent:.4f}"
        print(f"eps={r.epsilon:<10g} delta_x={r.delta_x:<14.8g} p={p_txt}")
    if cfg.emit_plots:
        _emit_plot_files(
            cfg,
            "plot_sweep",
            ["epsilon", "delta_x"],
            [[r.epsilon, r.delta_x] for r in rows if np.isfinite(r.delta_x)],
        )
    return 0 if all(r.converged for r in rows) else 3


def cmd_perturbation(cfg: ExperimentConfig) -> int:
    if cfg.model != "crawler2d":
        raise ConfigError("the perturbation command supports the planar model only")
    resp = first_order_response(cfg.schedule, cfg.params)
    first = check_first_order_shift(resp)
    second = second_order_shift(resp, cfg.params, frozen_contact=cfg.frozen_contact)
    eps_ref = 1.0 / 32.0
    cyc = find_limit_cycle(
        eps_ref,
        cfg.schedule,
        cfg.params,
        config=cfg.integrator if cfg.integrator is not None else CYCLE_CONFIG,
    )
    nonlinear = float(cyc.delta) / eps_ref**2
    payload = {
        "delta_x_first_order": first,
        "delta_x_second_order": second,
        "nonlinear_ratio": nonlinear,
        "frozen_contact": cfg.frozen_contact,
        "reference_epsilon": eps_ref,
    }
    write_json(_out_path(cfg, "perturbation.json"), payload)
    print(
        f"perturbation: first-order {first:.3e}, second-order {second:.8g}, "
        f"nonlinear delta/eps^2 {nonlinear:.8g}"
    )
    return 0


def cmd_demo3d(cfg: ExperimentConfig) -> int:
    if cfg.model == "crawler3d":
        params, schedule = cfg.params, cfg.schedule
    else:
        params, schedule = demo_params_3d(), demo_schedule_3d()
    epsilon = cfg.epsilon if "epsilon" in cfg.raw else 0.25
    config = cfg.integrator if cfg.integrator is not None else CYCLE_CONFIG
    res = find_limit_cycle(epsilon, schedule, params, config=config)

    # two-period composition check of the recovered planar motion
    sched = schedule.with_amplitude(epsilon)
    y0 = lift_state_3d(res.fixed_point, t=sched.phase_origin)
    two = integrate_crawler(
        y0, sched, params,
        (sched.phase_origin, sched.phase_origin + 2.0 * res.period), config,
    )
    end = PhaseState(q=two.y[-1][:12], u=two.y[-1][12:], t=two.t[-1])
    predicted = act_se2(se2_compose(res.delta, res.delta), y0)
    composition_residual = float(
        max(
            np.max(np.abs(end.q - predicted.q)),
            np.max(np.abs(end.u - predicted.u)),
        )
    )

    n_periods = cfg.n_periods
    t_grid = np.linspace(
        sched.phase_origin, sched.phase_origin + n_periods * res.period, 64 * n_periods + 1
    )
    long_run = integrate_crawler(
        y0, sched, params, (float(t_grid[0]), float(t_grid[-1])), config
    )
    names = []
    for i in range(1, 5):
        names += [f"x{i}", f"y{i}"]
    rows = []
    for t in t_grid:
        y = long_run.sample_at(min(t, long_run.t[-1]))
        row = [t]
        for i in range(4):
            row += [y[3 * i], y[3 * i + 1]]
        rows.append(row)
    write_csv(_out_path(cfg, "demo3d_paths.csv"), ["t"] + names, rows)
    summary = {
        "epsilon": epsilon,
        "period": res.period,
        "residual": res.residual,
        "converged": res.converged,
        "delta": res.delta,
        "max_multiplier": float(np.max(np.abs(res.floquet_multipliers))),
        "composition_residual": composition_residual,
        "n_periods": n_periods,
        "backend": active_backend(),
    }
    write_json(_out_path(cfg, "demo3d_summary.json"), summary)
    if cfg.emit_plots:
        _emit_plot_files(cfg, "plot_demo3d", ["t"] + names, rows)
    print(
        f"demo3d: eps={epsilon:g} delta=(phi={res.delta.phi:.6g}, "
        f"x={res.delta.x:.6g}, y={res.delta.y:.6g}) "
        f"composition residual {composition_residual:.3e}"
    )
    return 0


# --------------------------------------------------------------------------
# argument parsing and dispatch
# --------------------------------------------------------------------------

_COMMANDS = {
    "certify": cmd_certify,
    "simulate": cmd_simulate,
    "cycle": cmd_cycle,
    "sweep": cmd_sweep,
    "perturbation": cmd_perturbation,
    "demo3d": cmd_demo3d,
}


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="relcrawl",
        description="Crawler simulation and analysis experiments",
    )
    parser.add_argument("--version", action="version", version=f"relcrawl {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)
    for name, fn in _COMMANDS.items():
        p = sub.add_parser(name, help=fn.__doc__)
        p.add_argument("--config", type=str, default=None, help="flat YAML config file")
        p.add_argument("--epsilon", type=float, default=None, help="forcing amplitude")
        p.add_argument("--out", type=str, default=None, help="output directory")
        p.add_argument("--seed", type=int, default=None, help="seed for the perturbed start")
        p.add_argument(
            "--emit-plots", action="store_true", help="also write gnuplot data + script"
        )
        p.add_argument(
            "--profile",
            type=str,
            choices=("raw_c1", "mollified"),
            default=None,
            help="contact-regularization profile",
        )
        p.set_defaults(func=fn)
    return parser


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        raw = load_config(args.config) if args.config else {}
        overrides = {
            "epsilon": args.epsilon,
            "out": args.out,
            "seed": args.seed,
            "profile": args.profile,
        }
        if args.emit_plots:
            overrides["emit_plots"] = True
        cfg = build_config(raw, overrides)
        return int(args.func(cfg))
    except _ASSUMPTION_ERRORS as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except _NUMERICAL_ERRORS as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
