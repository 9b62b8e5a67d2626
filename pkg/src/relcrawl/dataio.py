"""Experiment configs and machine-readable output files.

Configs are flat YAML key-value files; command-line flags override file
values.  All emitted numbers round-trip losslessly (shortest-repr floats,
which preserve all 17 significant digits), and writers are deterministic:
the same config and seed produce byte-identical files.
"""
from __future__ import annotations

import json
import math
import os
from dataclasses import dataclass, field

import numpy as np
import yaml

from .cycles import ScalingRow
from .errors import ConfigError
from .integrate import IntegratorConfig
from .model import CrawlerParams, RestLengthSchedule
from .presets import DEFAULT_EPSILONS
from .reduction import SE2Element
from .smoothing import SmoothingProfile

__all__ = [
    "ExperimentConfig",
    "load_config",
    "build_config",
    "format_value",
    "write_json",
    "write_csv",
    "read_json",
    "read_csv",
    "scaling_rows_from_csv",
]

_CONFIG_KEYS = {
    "model",
    "kappa_s",
    "nu_s",
    "kappa_np",
    "nu_ns",
    "nu_db",
    "gravity",
    "rest_lengths",
    "profile",
    "mollifier_width",
    "debounce_chi_prime",
    "schedule_mode",
    "base_lengths",
    "angular_frequency",
    "schedule_table",
    "epsilon",
    "epsilons",
    "rtol",
    "atol",
    "max_step",
    "t_settle",
    "n_periods",
    "seed",
    "out",
    "emit_plots",
    "frozen_contact",
    "offset",
}


@dataclass(frozen=True)
class ExperimentConfig:
    """Everything one CLI command needs, resolved and validated."""

    model: str
    params: CrawlerParams
    schedule: RestLengthSchedule
    integrator: IntegratorConfig = None  # None: command picks its default
    epsilon: float = 0.5
    epsilons: tuple = DEFAULT_EPSILONS
    t_settle: float = 10.0
    n_periods: int = 20
    seed: int = None
    out: str = "relcrawl-out"
    emit_plots: bool = False
    frozen_contact: bool = False
    offset: object = None
    raw: dict = field(repr=False, default_factory=dict)


def load_config(path: str) -> dict:
    """Parse a flat YAML config file into a plain dict."""
    try:
        with open(path, "r", encoding="utf-8") as fh:
            data = yaml.safe_load(fh)
    except FileNotFoundError as exc:
        raise ConfigError(f"config file not found: {path}") from exc
    except yaml.YAMLError as exc:
        raise ConfigError(f"config file {path} is not valid YAML: {exc}") from exc
    if data is None:
        return {}
    if not isinstance(data, dict):
        raise ConfigError(f"config file {path} must be a mapping of keys to values")
    return data


def build_config(raw: dict = None, overrides: dict = None) -> ExperimentConfig:
    """Merge config-file values and flag overrides into an ExperimentConfig.

    Unknown keys raise ConfigError (typo protection).  Overrides with value
    None are ignored so absent flags leave file values in place.
    """
    cfg = dict(raw or {})
    for key, value in (overrides or {}).items():
        if value is not None:
            cfg[key] = value
    unknown = set(cfg) - _CONFIG_KEYS
    if unknown:
        raise ConfigError(f"unknown config keys: {sorted(unknown)}")

    model = str(cfg.get("model", "crawler2d"))
    if model not in ("crawler2d", "crawler3d"):
        raise ConfigError(f"model must be crawler2d or crawler3d, got {model!r}")
    spatial = model == "crawler3d"

    profile_kind = str(cfg.get("profile", "raw_c1"))
    try:
        profile = SmoothingProfile(
            kind=profile_kind,
            mollifier_width=float(cfg.get("mollifier_width", 1e-3)),
        )
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc

    rest = cfg.get("rest_lengths", (1.0,) * (6 if spatial else 3))
    params = CrawlerParams(
        kappa_s=float(cfg.get("kappa_s", 10.0)),
        nu_s=float(cfg.get("nu_s", 10.0)),
        kappa_np=float(cfg.get("kappa_np", 10.0)),
        nu_ns=float(cfg.get("nu_ns", 10.0)),
        nu_db=float(cfg.get("nu_db", 5.0)),
        rest_lengths=tuple(float(r) for r in rest),
        gravity=float(cfg.get("gravity", 1.0)),
        profile=profile,
        debounce_chi_prime=bool(cfg.get("debounce_chi_prime", False)),
    )

    default_mode = "user_table" if spatial else "standard"
    mode = str(cfg.get("schedule_mode", default_mode))
    base = cfg.get("base_lengths", params.rest_lengths)
    table = cfg.get("schedule_table", None)
    if table is None:
        if spatial:
            from .presets import _DEMO3D_TABLE

            table = _DEMO3D_TABLE if mode == "user_table" else ()
        else:
            table = ()
    schedule = RestLengthSchedule(
        base_lengths=tuple(float(b) for b in base),
        amplitude=0.0,
        angular_frequency=float(cfg.get("angular_frequency", 2.0 * math.pi)),
        mode=mode,
        table=tuple(tuple(tuple(entry) for entry in spring) for spring in table),
    )

    integrator = None
    if any(k in cfg for k in ("rtol", "atol", "max_step")):
        integrator = IntegratorConfig(
            rtol=float(cfg.get("rtol", 1e-9)),
            atol=float(cfg.get("atol", 1e-12)),
            max_step=float(cfg.get("max_step", math.inf)),
        )

    seed = cfg.get("seed", None)
    epsilons = tuple(float(e) for e in cfg.get("epsilons", DEFAULT_EPSILONS))
    return ExperimentConfig(
        model=model,
        params=params,
        schedule=schedule,
        integrator=integrator,
        epsilon=float(cfg.get("epsilon", 0.5)),
        epsilons=epsilons,
        t_settle=float(cfg.get("t_settle", 10.0)),
        n_periods=int(cfg.get("n_periods", 20)),
        seed=None if seed is None else int(seed),
        out=str(cfg.get("out", "relcrawl-out")),
        emit_plots=bool(cfg.get("emit_plots", False)),
        frozen_contact=bool(cfg.get("frozen_contact", False)),
        offset=cfg.get("offset", None),
        raw=cfg,
    )


# --------------------------------------------------------------------------
# serialization
# --------------------------------------------------------------------------


def format_value(value) -> str:
    """Cell text for CSV: shortest float repr, empty for None."""
    if value is None:
        return ""
    if isinstance(value, (bool, np.bool_)):
        return "true" if value else "false"
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    if isinstance(value, (float, np.floating)):
        return repr(float(value))
    return str(value)


def _jsonable(value):
    if isinstance(value, (bool, np.bool_)):
        return bool(value)
    if isinstance(value, (int, np.integer)):
        return int(value)
    if isinstance(value, (float, np.floating)):
        return float(value)
    if isinstance(value, (complex, np.complexfloating)):
        return [float(value.real), float(value.imag)]
    if isinstance(value, SE2Element):
        return {"phi": value.phi, "x": value.x, "y": value.y}
    if isinstance(value, np.ndarray):
        return [_jsonable(v) for v in value.tolist()]
    if isinstance(value, (list, tuple)):
        return [_jsonable(v) for v in value]
    if isinstance(value, dict):
        return {str(k): _jsonable(v) for k, v in value.items()}
    return value


def write_json(path: str, payload: dict) -> None:
    """Deterministic JSON: sorted keys, lossless floats, trailing newline."""
    os.makedirs(os.path.dirname(os.path.abspath(path)), exist_ok=True)
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(_jsonable(payload), fh, indent=2, sort_keys=True)
        fh.write("\n")


def read_json(path: str) -> dict:
    with open(path, "r", encoding="utf-8") as fh:
        return json.load(fh)


def write_csv(path: str, header, rows) -> None:
    """Plain-comma CSV with lossless float cells and a header line."""
    os.makedirs(os.path.dirname(os.path.abspath(path)), exist_ok=True)
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(",".join(header) + "\n")
        for row in rows:
            fh.write(",".join(format_value(v) for v in row) + "\n")


def _parse_cell(text: str):
    if text == "":
        return None
    if text == "true":
        return True
    if text == "false":
        return False
    try:
        return float(text)
    except ValueError:
        return text


def read_csv(path: str):
    """Inverse of write_csv: (header, rows) with floats parsed back exactly."""
    with open(path, "r", encoding="utf-8") as fh:
        lines = [ln.rstrip("\n") for ln in fh]
    header = lines[0].split(",")
    rows = [[_parse_cell(c) for c in ln.split(",")] for ln in lines[1:] if ln != ""]
    return header, rows


def scaling_rows_from_csv(path: str):
    """Rebuild ScalingRow records from a sweep CSV (lossless round-trip)."""
    header, rows = read_csv(path)
    idx = {name: k for k, name in enumerate(header)}
    out = []
    for row in rows:
        out.append(
            ScalingRow(
                epsilon=row[idx["epsilon"]],
                delta_x=float("nan") if row[idx["delta_x"]] is None else row[idx["delta_x"]],
                p_exponent=row[idx["p"]],
                residual=float("nan") if row[idx["residual"]] is None else row[idx["residual"]],
                max_multiplier=(
                    float("nan")
                    if row[idx["max_multiplier"]] is None
                    else row[idx["max_multiplier"]]
                ),
                converged=bool(row[idx["status"]] == "ok"),
            )
        )
    return out
