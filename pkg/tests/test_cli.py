import csv
import io
import json
import subprocess
import sys

import numpy as np
import pytest

from gaspipe import case_study, cli


@pytest.fixture
def config(tmp_path):
    path = tmp_path / "pipe.json"
    path.write_text(json.dumps(case_study().to_config()))
    return str(path)


def _rows(text):
    return list(csv.reader(io.StringIO(text)))


def test_constants(config, capsys):
    assert cli.main(["constants", "--config", config]) == 0
    rows = dict(_rows(capsys.readouterr().out)[1:])
    assert float(rows["t_d"]) == pytest.approx(116.66666666666667)
    assert float(rows["k_g"]) == pytest.approx(5.206408125964586)
    assert float(rows["k_g_reference"]) == 5.064


def test_eigen_csv(config, capsys):
    assert cli.main(["eigen", "--config", config, "--n", "4"]) == 0
    rows = _rows(capsys.readouterr().out)
    assert rows[0] == ["k", "re", "im"]
    assert rows[1] == ["0", "0", "0"]
    assert len(rows) == 1 + 1 + 8
    assert cli.main(["eigen", "--config", config, "--asymptotic", "--kmax", "3"]) == 0
    assert len(_rows(capsys.readouterr().out)) == 1 + 1 + 6


def test_zeros_csv(config, capsys):
    assert cli.main(["zeros", "--config", config, "--channel", "g22", "--n", "3"]) == 0
    assert len(_rows(capsys.readouterr().out)) == 1 + 6
    assert cli.main(["zeros", "--config", config, "--channel", "g12", "--n", "3"]) == 0
    assert _rows(capsys.readouterr().out) == [["k", "re", "im"]]


def test_bode_without_config_is_usage_error(capsys):
    assert cli.main(["bode"]) == 2
    assert "usage" in capsys.readouterr().err


def test_bode_is_byte_identical(config, tmp_path, monkeypatch):
    a, b = tmp_path / "a.csv", tmp_path / "b.csv"
    args = ["bode", "--config", config, "--evaluator", "truncated", "--order", "50", "--points", "40"]
    assert cli.main(args + ["--output", str(a)]) == 0
    monkeypatch.setenv("GASPIPE_THREADS", "3")
    assert cli.main(args + ["--output", str(b)]) == 0
    assert a.read_bytes() == b.read_bytes()
    rows = _rows(a.read_text())
    assert rows[0] == ["omega_rad_s", "mag_db_g11", "phase_deg_g11", "mag_db_g21", "phase_deg_g21", "flags"]
    assert len(rows) == 41 and all(r[-1] in ("", "near_pole") for r in rows[1:])


def test_simulate_both(config, tmp_path):
    from gaspipe import derive_constants

    k = derive_constants(case_study())
    t = np.arange(0, 3 * k.t_d, 1.0)
    inp = tmp_path / "in.csv"
    inp.write_text("t,q1,q2\n" + "\n".join(f"{x},{np.sin(0.003 * x)},0" for x in t) + "\n")
    out = tmp_path / "out.csv"
    assert cli.main(["simulate", "--config", config, "--input", str(inp), "--model", "both", "--n", "40", "--output", str(out)]) == 0
    rows = _rows(out.read_text())
    assert rows[0] == ["t", "p1", "p2", "p1_ss", "p2_ss"]
    # dt snapped from 1.0 s to t_d / 117
    assert float(rows[2][0]) == pytest.approx(k.t_d / 117)


def test_validate_passes(config, capsys):
    assert cli.main(["validate", "--config", config, "--n", "50"]) == 0
    out = capsys.readouterr().out
    assert "FAIL" not in out and out.count("PASS") >= 8


def test_validate_reports_failures(config, capsys, monkeypatch):
    monkeypatch.setitem(cli._SUITES, "gain", lambda k, n: iter([("forced", 1.0, 0.0)]))
    assert cli.main(["validate", "--config", config, "--suite", "gain"]) == 1
    assert "gain: forced" in capsys.readouterr().err


def test_bad_inputs(tmp_path, capsys):
    bad = tmp_path / "bad.json"
    bad.write_text(json.dumps({"length_m": -1}))
    assert cli.main(["constants", "--config", str(bad)]) == 1
    assert cli.main(["constants", "--config", str(tmp_path / "missing.json")]) == 2
    assert cli.main(["eigen", "--config", str(bad), "--n", "0"]) == 2


def test_module_entry_point(config):
    proc = subprocess.run([sys.executable, "-m", "gaspipe", "constants", "--config", config], capture_output=True, text=True)
    assert proc.returncode == 0 and proc.stdout.startswith("name,value")
