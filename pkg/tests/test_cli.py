import subprocess
import sys

import numpy as np
import pytest

from varcs.cli import main
from varcs.sim import parse_csv
from varcs.variance_cs import two_sided_path


@pytest.fixture
def data_file(tmp_path):
    x = np.random.default_rng(0).uniform(size=400)
    path = tmp_path / "x.txt"
    path.write_text("# header comment\n" + "\n".join(repr(float(v)) for v in x) + "\n\n")
    return path, x


def _rows(text):
    lines = text.strip().splitlines()
    assert lines[0] == "t,lower,upper,std_lower,std_upper"
    return np.array([[float(v) for v in line.split(",")] for line in lines[1:]])


def test_track_matches_library(data_file, capsys):
    path, x = data_file
    assert main(["track", "--input", str(path)]) == 0
    rows = _rows(capsys.readouterr().out)
    l, u = two_sided_path(x)
    assert rows.shape == (400, 5)
    np.testing.assert_allclose(rows[:, 1], l, rtol=0, atol=1e-15)
    np.testing.assert_allclose(rows[:, 2], u, rtol=0, atol=1e-15)
    np.testing.assert_allclose(rows[:, 3] ** 2, l, atol=1e-15)


def test_track_ci_prints_horizon_only(data_file, capsys):
    path, _ = data_file
    main(["track", "--input", str(path), "--mode", "ci", "--horizon", "400",
          "--split", "log-horizon", "--alpha", "0.1"])
    rows = _rows(capsys.readouterr().out)
    assert rows.shape == (1, 5) and rows[0, 0] == 400


@pytest.mark.parametrize("method", ["alt", "decoupled", "mp", "hilbert"])
def test_track_methods(method, data_file, capsys):
    path, _ = data_file
    assert main(["track", "--input", str(path), "--method", method]) == 0
    rows = _rows(capsys.readouterr().out)
    assert np.all(rows[:, 1] <= rows[:, 2])


def test_track_vectors(tmp_path, capsys):
    v = np.random.default_rng(1).uniform(-0.2, 0.2, size=(100, 3))
    path = tmp_path / "v.txt"
    np.savetxt(path, v, delimiter=",")
    assert main(["track", "--input", str(path), "--dim", "3"]) == 0
    assert _rows(capsys.readouterr().out).shape == (100, 5)
    assert main(["track", "--input", str(path), "--dim", "2"]) == 2
    assert "expected 2 coordinates" in capsys.readouterr().err


@pytest.mark.parametrize("content,msg", [("0.2\n1.3\n", "outside [0, 1]"),
                                         ("0.2\nabc\n", "not a number"),
                                         ("0.2,0.3\n", "expected one value")])
def test_track_bad_input(tmp_path, capsys, content, msg):
    path = tmp_path / "bad.txt"
    path.write_text(content)
    assert main(["track", "--input", str(path)]) == 2
    err = capsys.readouterr().err
    assert msg in err and "bad.txt:" in err


def test_track_argument_errors(data_file, capsys):
    path, _ = data_file
    assert main(["track", "--input", str(path), "--mode", "ci"]) == 2
    assert main(["track", "--input", str(path), "--method", "double-eb"]) == 2
    assert main(["track", "--input", str(path / "nope")]) == 2
    with pytest.raises(SystemExit):
        main(["track", "--input", str(path), "--method", "magic"])


def test_simulate_and_plot(tmp_path, capsys):
    cfg = tmp_path / "e.cfg"
    cfg.write_text("streams = uniform; martingale\nmethods = EB-CS, MP\nreplications = 4\n"
                   f"checkpoints = 20, 200\nseed = 5\ncsv = {tmp_path / 'r.csv'}\n")
    assert main(["simulate", "--config", str(cfg)]) == 0
    rows = parse_csv(tmp_path / "r.csv")
    assert len(rows) == 8
    assert main(["simulate", "--config", str(cfg), "--csv", str(tmp_path / "b.csv"),
                 "--svg", str(tmp_path / "b.svg")]) == 0
    assert (tmp_path / "r.csv").read_bytes() == (tmp_path / "b.csv").read_bytes()
    assert main(["plot", "--input", str(tmp_path / "r.csv"), "--output",
                 str(tmp_path / "p.svg")]) == 0
    assert (tmp_path / "p.svg").read_text().count('class="bound"') == 8
    assert main(["plot", "--input", str(tmp_path / "r.csv"), "--output",
                 str(tmp_path / "no" / "p.svg")]) == 2
    assert str(tmp_path / "no" / "p.svg") in capsys.readouterr().err


def test_simulate_to_stdout(tmp_path, capsys):
    cfg = tmp_path / "e.cfg"
    cfg.write_text("streams = uniform\nmethods = EB-CS\nreplications = 2\ncheckpoints = 10\n")
    assert main(["simulate", "--config", str(cfg)]) == 0
    out = capsys.readouterr().out
    assert out.startswith("method,t,mean_lower")


def test_compare(tmp_path, monkeypatch):
    monkeypatch.setenv("VARCS_SEED", "3")
    out = tmp_path / "c.csv"
    assert main(["compare", "--replications", "3", "--horizon", "300", "--points", "3",
                 "--csv", str(out)]) == 0
    rows = parse_csv(out)
    assert {r["method"] for r in rows} == {"EB-CI", "MP"}
    assert {r["distribution"] for r in rows} == {"uniform", "beta(2,6)", "beta(5,5)"}


def test_console_script_entry():
    res = subprocess.run([sys.executable, "-m", "varcs.cli", "--version"],
                         capture_output=True, text=True)
    assert res.returncode == 0 and "varcs" in res.stdout
