"""End-to-end command-line runs: exit codes, outputs, determinism."""
import json

import numpy as np
import pytest
import yaml

from relcrawl.cli import main
from relcrawl.dataio import read_csv, read_json, scaling_rows_from_csv


def _write_config(tmp_path, name="cfg.yaml", **kv):
    path = tmp_path / name
    path.write_text(yaml.safe_dump(kv))
    return str(path)


def test_certify_stable(tmp_path, capsys):
    out = tmp_path / "out"
    assert main(["certify", "--out", str(out)]) == 0
    report = read_json(out / "stability_report.json")
    assert report["verdict"] == "robustly_stable"
    assert report["spectral_abscissa"] < 0.0
    assert report["failure_reason"] is None
    assert len(report["reduced_equilibrium"]) == 5
    assert len(report["linearization_spectrum"]) == 11
    assert "robustly_stable" in capsys.readouterr().out


def test_certify_marginal_exit_code(tmp_path):
    cfg = _write_config(tmp_path, nu_s=0.0, nu_ns=0.0, nu_db=0.0)
    out = tmp_path / "out"
    assert main(["certify", "--config", cfg, "--out", str(out)]) == 1
    assert read_json(out / "stability_report.json")["verdict"] == "marginal"


def test_certify_bad_geometry_exit_code(tmp_path, capsys):
    cfg = _write_config(tmp_path, rest_lengths=[1.0, 1.0, 2.0])
    assert main(["certify", "--config", cfg, "--out", str(tmp_path / "o")]) == 2
    assert "error:" in capsys.readouterr().err


def test_certify_continuation_failure_exit_code(tmp_path):
    cfg = _write_config(tmp_path, kappa_s=0.01)
    out = tmp_path / "out"
    assert main(["certify", "--config", cfg, "--out", str(out)]) == 3
    report = read_json(out / "stability_report.json")
    assert report["verdict"] == "indefinite_inputs"
    assert report["failure_reason"].startswith("continuation failed")


def test_simulate_small_run(tmp_path):
    cfg = _write_config(tmp_path, epsilon=0.25, t_settle=1.0, n_periods=2)
    out = tmp_path / "out"
    assert main(["simulate", "--config", cfg, "--out", str(out)]) == 0
    header, rows = read_csv(out / "series.csv")
    assert header == ["t", "x1", "z1", "x2", "z2", "x3", "z3"]
    assert rows[0][0] == 0.0 and rows[-1][0] == pytest.approx(3.0)
    pheader, prows = read_csv(out / "paths.csv")
    assert pheader == header[1:] and len(prows) == len(rows)
    sheader, srows = read_csv(out / "shifts.csv")
    assert sheader == ["period_index", "shift"] and len(srows) == 2
    summary = read_json(out / "summary.json")
    assert summary["model"] == "crawler2d"
    assert summary["backend"] in ("compiled", "python")
    assert summary["last_shift"] == srows[-1][1]
    assert len(summary["period_shifts"]) == 2


def test_simulate_zero_amplitude_is_flat(tmp_path):
    cfg = _write_config(tmp_path, epsilon=0.0, t_settle=1.0, n_periods=2)
    out = tmp_path / "out"
    assert main(["simulate", "--config", cfg, "--out", str(out)]) == 0
    summary = read_json(out / "summary.json")
    assert np.max(np.abs(summary["period_shifts"])) <= 1e-9


def test_simulate_scalar_offset(tmp_path):
    cfg = _write_config(tmp_path, epsilon=0.0, t_settle=2.0, n_periods=1,
                        offset=0.01)
    assert main(["simulate", "--config", cfg, "--out", str(tmp_path / "o")]) == 0


def test_simulate_bad_offset_vector(tmp_path, capsys):
    cfg = _write_config(tmp_path, epsilon=0.0, t_settle=1.0, n_periods=1,
                        offset=[0.0, 0.1])
    assert main(["simulate", "--config", cfg, "--out", str(tmp_path / "o")]) == 2
    assert "offset" in capsys.readouterr().err


def test_cycle_seeded_runs_are_byte_identical(tmp_path):
    out1, out2 = tmp_path / "a", tmp_path / "b"
    args = ["cycle", "--epsilon", "0.5", "--seed", "7"]
    assert main(args + ["--out", str(out1)]) == 0
    assert main(args + ["--out", str(out2)]) == 0
    for name in ("cycle_summary.json", "cycle_samples.csv"):
        assert (out1 / name).read_bytes() == (out2 / name).read_bytes()
    summary = read_json(out1 / "cycle_summary.json")
    assert summary["converged"] is True
    assert summary["delta"] == pytest.approx(0.048296469076143905, abs=1e-6)
    assert summary["max_multiplier"] < 1.0
    assert summary["seed"] == 7
    assert abs(summary["cyclic_balance_residual"]) <= 1e-8


def test_cycle_emit_plots(tmp_path):
    out = tmp_path / "out"
    assert main(["cycle", "--epsilon", "0.25", "--out", str(out),
                 "--emit-plots"]) == 0
    dat = (out / "plot_cycle.dat").read_text().splitlines()
    assert dat[0].startswith("# t z1 z2")
    assert len(dat) == 1 + 1025
    assert "plot " in (out / "plot_cycle.gp").read_text()


def test_sweep_two_amplitudes(tmp_path):
    cfg = _write_config(tmp_path, epsilons=[0.5, 0.25], rtol=1e-8, atol=1e-11)
    out = tmp_path / "out"
    assert main(["sweep", "--config", cfg, "--out", str(out)]) == 0
    rows = scaling_rows_from_csv(out / "sweep.csv")
    assert [r.epsilon for r in rows] == [0.5, 0.25]
    assert rows[0].p_exponent == pytest.approx(1.9923, abs=0.01)
    assert rows[1].p_exponent is None
    assert all(r.converged for r in rows)
    assert rows[0].delta_x == pytest.approx(0.048296469076143905, abs=1e-6)


def test_sweep_unsorted_warns_and_sorts(tmp_path, capsys):
    cfg = _write_config(tmp_path, epsilons=[0.25, 0.5], rtol=1e-8, atol=1e-11)
    out = tmp_path / "out"
    assert main(["sweep", "--config", cfg, "--out", str(out)]) == 0
    assert "not strictly descending" in capsys.readouterr().err
    rows = scaling_rows_from_csv(out / "sweep.csv")
    assert [r.epsilon for r in rows] == [0.5, 0.25]


def test_perturbation_outputs(tmp_path):
    out = tmp_path / "out"
    assert main(["perturbation", "--out", str(out)]) == 0
    payload = read_json(out / "perturbation.json")
    assert abs(payload["delta_x_first_order"]) <= 1e-8
    assert payload["delta_x_second_order"] == pytest.approx(0.1945144059317079, abs=1e-6)
    assert payload["nonlinear_ratio"] == pytest.approx(0.19451001510303445, abs=1e-6)
    assert payload["delta_x_second_order"] == pytest.approx(
        payload["nonlinear_ratio"], rel=1e-3)
    assert payload["frozen_contact"] is False
    assert payload["reference_epsilon"] == 1.0 / 32.0


def test_perturbation_frozen_contact(tmp_path):
    cfg = _write_config(tmp_path, frozen_contact=True)
    out = tmp_path / "out"
    assert main(["perturbation", "--config", cfg, "--out", str(out)]) == 0
    payload = read_json(out / "perturbation.json")
    assert abs(payload["delta_x_second_order"]) <= 1e-8
    assert payload["frozen_contact"] is True


def test_perturbation_rejects_spatial_model(tmp_path, capsys):
    cfg = _write_config(tmp_path, model="crawler3d")
    assert main(["perturbation", "--config", cfg,
                 "--out", str(tmp_path / "o")]) == 2
    assert "planar" in capsys.readouterr().err


def test_demo3d(tmp_path):
    cfg = _write_config(tmp_path, n_periods=3)
    out = tmp_path / "out"
    assert main(["demo3d", "--config", cfg, "--out", str(out)]) == 0
    summary = read_json(out / "demo3d_summary.json")
    assert summary["epsilon"] == 0.25
    assert summary["converged"] is True
    assert summary["composition_residual"] <= 1e-5
    assert summary["max_multiplier"] < 1.0
    assert abs(summary["delta"]["phi"]) > 0.0
    header, rows = read_csv(out / "demo3d_paths.csv")
    assert header[:3] == ["t", "x1", "y1"]
    assert len(rows) == 64 * 3 + 1


def test_unknown_config_key(tmp_path, capsys):
    cfg = _write_config(tmp_path, not_a_real_key=1.0)
    assert main(["certify", "--config", cfg, "--out", str(tmp_path / "o")]) == 2
    assert "unknown config keys" in capsys.readouterr().err


def test_missing_config_file(tmp_path, capsys):
    missing = str(tmp_path / "nope.yaml")
    assert main(["certify", "--config", missing, "--out", str(tmp_path / "o")]) == 2
    assert "not found" in capsys.readouterr().err


def test_mollified_profile_flag(tmp_path):
    cfg = _write_config(tmp_path, epsilon=0.25, t_settle=1.0, n_periods=1)
    out = tmp_path / "out"
    assert main(["simulate", "--config", cfg, "--out", str(out),
                 "--profile", "mollified"]) == 0
    assert (out / "summary.json").exists()


def test_flag_overrides_config_value(tmp_path):
    cfg = _write_config(tmp_path, epsilon=0.1, t_settle=1.0, n_periods=1)
    out = tmp_path / "out"
    assert main(["simulate", "--config", cfg, "--epsilon", "0.0",
                 "--out", str(out)]) == 0
    assert read_json(out / "summary.json")["epsilon"] == 0.0
