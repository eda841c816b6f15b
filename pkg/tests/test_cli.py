"""End-to-end tests of the command-line interface."""

import json

from relaycap.cli import main

TINY = {
    "M": 2,
    "N": 3,
    "K": [1, 2],
    "schemes": ["MF", "AF-cutset"],
    "trials": 100,
    "eig_samples": 1000,
}


def _cfg_file(tmp_path, data=TINY):
    path = tmp_path / "sweep.json"
    path.write_text(json.dumps(data))
    return path


def test_sweep_success_writes_csv_and_plot(tmp_path):
    out = tmp_path / "res.csv"
    code = main(["sweep", str(_cfg_file(tmp_path)), "--out", str(out)])
    assert code == 0
    assert out.exists()
    png = out.with_suffix(".png")
    assert png.exists() and png.stat().st_size > 0
    header = out.read_text().splitlines()[0]
    assert header == "axis,scheme,ergodic,ci,asymptotic,cutset,alpha,flagged"


def test_sweep_no_plot(tmp_path):
    out = tmp_path / "res.csv"
    code = main(["sweep", str(_cfg_file(tmp_path)), "--out", str(out), "--no-plot"])
    assert code == 0
    assert not out.with_suffix(".png").exists()


def test_config_error_exit_code(tmp_path):
    bad = dict(TINY)
    bad["N"] = 1  # N < M
    code = main(["sweep", str(_cfg_file(tmp_path, bad)), "--no-plot"])
    assert code == 2


def test_missing_config_exit_code(tmp_path):
    code = main(["sweep", str(tmp_path / "nope.json"), "--no-plot"])
    assert code == 2


def test_trials_override_floor(tmp_path):
    code = main(
        ["sweep", str(_cfg_file(tmp_path)), "--trials", "10", "--no-plot"]
    )
    assert code == 2


def test_seed_override_changes_numbers(tmp_path):
    out1, out2, out3 = (tmp_path / f"r{i}.csv" for i in range(3))
    assert main(["sweep", str(_cfg_file(tmp_path)), "--out", str(out1), "--seed", "7", "--no-plot"]) == 0
    assert main(["sweep", str(_cfg_file(tmp_path)), "--out", str(out2), "--seed", "7", "--no-plot"]) == 0
    assert main(["sweep", str(_cfg_file(tmp_path)), "--out", str(out3), "--seed", "8", "--no-plot"]) == 0
    assert out1.read_bytes() == out2.read_bytes()
    assert out1.read_bytes() != out3.read_bytes()


def test_preset_runs(tmp_path):
    out = tmp_path / "fig2.csv"
    code = main(
        ["preset", "fig2", "--trials", "100", "--out", str(out), "--no-plot"]
    )
    assert code == 0
    body = out.read_text()
    assert "MF-RZF-fixed" in body and "AF-cutset" in body


def test_numeric_failure_exit_code(tmp_path, monkeypatch):
    import relaycap.sweep as sweep_mod

    def always_fail(*a, **kw):
        raise RuntimeError("injected numeric failure")

    monkeypatch.setattr(sweep_mod, "cutset_upper_bound", always_fail)
    code = main(["sweep", str(_cfg_file(tmp_path)), "--no-plot"])
    assert code == 3


def test_verify_subcommand():
    assert main(["verify", "--seed", "1"]) == 0
