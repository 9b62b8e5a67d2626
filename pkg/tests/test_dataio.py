"""Config parsing and lossless serialization round-trips."""
import json
import math

import numpy as np
import pytest

from relcrawl.dataio import (
    build_config,
    format_value,
    read_csv,
    read_json,
    scaling_rows_from_csv,
    write_csv,
    write_json,
)
from relcrawl.cycles import ScalingRow
from relcrawl.errors import ConfigError
from relcrawl.reduction import SE2Element


def test_build_config_defaults():
    cfg = build_config({}, {})
    assert cfg.model == "crawler2d"
    assert cfg.params.kappa_s == 10.0
    assert cfg.params.rest_lengths == (1.0, 1.0, 1.0)
    assert cfg.schedule.mode == "standard"
    assert cfg.integrator is None  # commands pick their own default
    assert cfg.epsilon == 0.5
    assert cfg.t_settle == 10.0 and cfg.n_periods == 20
    assert cfg.out == "relcrawl-out"


def test_build_config_overrides_and_none():
    cfg = build_config({"epsilon": 0.25, "seed": 3}, {"epsilon": None, "out": "d"})
    assert cfg.epsilon == 0.25  # None override leaves the file value alone
    assert cfg.seed == 3
    assert cfg.out == "d"


def test_build_config_rejects_unknown_keys():
    with pytest.raises(ConfigError):
        build_config({"kappa": 10.0}, {})
    with pytest.raises(ConfigError):
        build_config({}, {"model": "crawler4d"})
    with pytest.raises(ConfigError):
        build_config({"profile": "sharp"}, {})


def test_build_config_spatial_defaults():
    cfg = build_config({"model": "crawler3d"}, {})
    assert cfg.params.n_masses == 4
    assert cfg.schedule.mode == "user_table"
    # the default demo table drives exactly the three apex legs
    driven = [k for k, entry in enumerate(cfg.schedule.table) if entry]
    assert driven == [2, 4, 5]


def test_build_config_integrator_only_when_requested():
    cfg = build_config({"rtol": 1e-8}, {})
    assert cfg.integrator is not None
    assert cfg.integrator.rtol == 1e-8
    assert cfg.integrator.atol == 1e-12
    assert math.isinf(cfg.integrator.max_step)


def test_format_value():
    assert format_value(None) == ""
    assert format_value(True) == "true"
    assert format_value(False) == "false"
    assert format_value(3) == "3"
    assert format_value(0.1) == "0.1"
    assert float(format_value(1.0 / 3.0)) == 1.0 / 3.0  # lossless
    assert format_value("ok") == "ok"


def test_csv_round_trip(tmp_path):
    path = tmp_path / "t.csv"
    rows = [[1.0 / 3.0, None, True, "ok"], [2.0, -1e-17, False, "x"]]
    write_csv(path, ["a", "b", "c", "d"], rows)
    header, back = read_csv(path)
    assert header == ["a", "b", "c", "d"]
    assert back[0] == [1.0 / 3.0, None, True, "ok"]
    assert back[1] == [2.0, -1e-17, False, "x"]


def test_json_round_trip_and_determinism(tmp_path):
    payload = {
        "z": np.array([1.0, 2.5]),
        "a": 1 + 2j,
        "g": SE2Element(0.5, -1.0, 2.0),
        "flag": np.bool_(True),
        "n": np.int64(7),
    }
    p1, p2 = tmp_path / "a.json", tmp_path / "b.json"
    write_json(p1, payload)
    write_json(p2, payload)
    assert p1.read_bytes() == p2.read_bytes()
    text = p1.read_text()
    assert text.endswith("\n")
    back = read_json(p1)
    assert back["z"] == [1.0, 2.5]
    assert back["a"] == [1.0, 2.0]
    assert back["g"] == {"phi": 0.5, "x": -1.0, "y": 2.0}
    assert back["flag"] is True and back["n"] == 7
    assert list(back) == sorted(back)


def test_scaling_rows_round_trip(tmp_path):
    rows = [
        ScalingRow(1.0, 0.18413261240902820, 1.9307555468145687,
                   residual=7.6e-13, max_multiplier=0.88, converged=True),
        ScalingRow(0.5, float("nan"), None, converged=False),
    ]
    path = tmp_path / "sweep.csv"
    write_csv(
        path,
        ["epsilon", "delta_x", "p", "residual", "max_multiplier", "status"],
        [
            [
                r.epsilon,
                None if not np.isfinite(r.delta_x) else r.delta_x,
                r.p_exponent,
                None if not np.isfinite(r.residual) else r.residual,
                None if not np.isfinite(r.max_multiplier) else r.max_multiplier,
                "ok" if r.converged else "failed",
            ]
            for r in rows
        ],
    )
    back = scaling_rows_from_csv(path)
    assert back[0].epsilon == 1.0
    assert back[0].delta_x == rows[0].delta_x  # bit-exact float round-trip
    assert back[0].p_exponent == rows[0].p_exponent
    assert back[0].converged is True
    assert math.isnan(back[1].delta_x)
    assert back[1].p_exponent is None
    assert back[1].converged is False
