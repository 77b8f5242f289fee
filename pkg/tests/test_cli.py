import math

import numpy as np
import pytest

from fene2d.analysis.diagnostics import DiagnosticsRow
from fene2d.harness.cli import main
from fene2d.harness.io import write_series


def test_gap(capsys):
    assert main(["gap", "--k", "1", "--nr", "24"]) == 0
    out = capsys.readouterr().out.strip().splitlines()
    assert len(out) == 1 and out[0].startswith("lambda1=") and " delta=" in out[0]
    lam = float(out[0].split()[0].split("=")[1])
    assert lam == pytest.approx(5.548074418, rel=1e-9)


def test_fit_power_law(tmp_path, capsys):
    t = np.linspace(0, 100, 101)
    rows = [DiagnosticsRow(ti, (1 + ti) ** -0.5, *([0.0] * 10)) for ti in t]
    write_series(tmp_path / "s.csv", rows)
    argv = ["fit", "--csv", str(tmp_path / "s.csv"), "--col", "energy_u", "--t0", "5", "--t1", "100",
            "--model", "power"]
    assert main(argv) == 0
    assert capsys.readouterr().out.strip() == "exponent=-0.5000 r2=1.0000"
    assert main(argv[:4] + ["nope"] + argv[5:]) == 2


def test_usage_errors(capsys):
    assert main(["bogus"]) == 2
    assert main(["gap", "--k", "1"]) == 2
    assert main(["verify", "--suite", "everything"]) == 2
    assert main([]) == 2


def test_simulate_and_besov(tmp_path, capsys):
    cfg = tmp_path / "run.ini"
    cfg.write_text("[grid]\nnx = 16\nny = 16\n[time]\ndt = 0.01\nt_end = 0.05\nsample_every = 1\n"
                   "[fene]\nn_r = 3\n[init]\ng_preset = m2_bump\n")
    out = tmp_path / "out"
    assert main(["simulate", str(cfg), "--out", str(out)]) == 0
    assert (out / "series.csv").exists() and (out / "checkpoint.bin").exists()
    capsys.readouterr()
    assert main(["besov", "--checkpoint", str(out / "checkpoint.bin")]) == 0
    line = capsys.readouterr().out
    b = float(line.split("besov_b011=")[1].split()[0])
    l1 = float(line.split("l1=")[1].split()[0])
    assert b >= l1 > 0
    assert main(["heat-baseline", str(cfg), "--out", str(tmp_path / "heat")]) == 0
    assert main(["fit", "--csv", str(out / "series.csv"), "--col", "energy_u", "--t0", "0", "--t1", "0.05",
                 "--model", "exp"]) == 0
    assert "rate=4.0" in capsys.readouterr().out.splitlines()[-1]


def test_bad_config_is_usage_error(tmp_path):
    cfg = tmp_path / "bad.ini"
    cfg.write_text("[fene]\nfoo = 1\n")
    assert main(["simulate", str(cfg), "--out", str(tmp_path / "o")]) == 2


def test_verify_negative_control(capsys):
    assert main(["verify", "--suite", "negative-control"]) == 0
    lines = capsys.readouterr().out.splitlines()
    assert lines and all(line.startswith("PASS") for line in lines)


@pytest.mark.slow
def test_verify_identities(capsys):
    assert main(["verify", "--suite", "identities"]) == 0
