import math
import xml.etree.ElementTree as ET

import numpy as np
import pytest
from scipy import integrate, stats

from varcs.sim import (
    CSV_COLUMNS,
    SEED_ENV,
    ExperimentResult,
    ExperimentSpec,
    StreamSpec,
    coverage_and_width,
    default_seed,
    emit_csv,
    emit_svg,
    generate_batch,
    generate_stream,
    load_experiment,
    log_grid,
    parse_config_text,
    parse_csv,
    parse_stream,
    run_replication,
    sharpness_curve,
    supermartingale_means,
    true_moments,
)
from varcs.sim.config_file import dump_experiment
from varcs.sim.io import csv_text, svg_text
from varcs.sim.streams import beta_moments, replication_seed

SVG = "{http://www.w3.org/2000/svg}"


# --- streams ---------------------------------------------------------------

def test_constant_stream():
    x = generate_stream(StreamSpec("constant", (0.3,), 1, 5))
    assert x.tolist() == [0.3] * 5


def test_uniform_mean():
    x = generate_stream(StreamSpec("uniform", seed=11, length=10 ** 6))
    assert abs(x.mean() - 0.5) < 0.002


def test_beta_variance():
    x = generate_stream(parse_stream("beta(2,6)", seed=12, length=10 ** 6))
    assert abs(x.var() - 1 / 48) < 0.0005
    assert x.min() >= 0 and x.max() <= 1


def test_invalid_specs():
    with pytest.raises(ValueError):
        StreamSpec("beta", (0.0, 2.0))
    with pytest.raises(ValueError):
        StreamSpec("beta", (2.0,))
    with pytest.raises(ValueError):
        StreamSpec("gamma")
    with pytest.raises(ValueError):
        StreamSpec("martingale", (0.5, 0.4))
    with pytest.raises(ValueError):
        parse_stream("beta(2")


def test_streams_in_range_and_deterministic():
    for text in ("uniform", "beta(5,5)", "bernoulli(0.2)", "martingale", "martingale(0.4,0.2)"):
        a = generate_stream(parse_stream(text, seed=3, length=2000))
        b = generate_stream(parse_stream(text, seed=3, length=2000))
        assert np.array_equal(a, b)
        assert a.min() >= 0 and a.max() <= 1
    v = generate_stream(parse_stream("cube(4)", seed=1, length=500))
    assert v.shape == (500, 4) and np.linalg.norm(v, axis=1).max() <= 0.5


def test_true_moments_examples():
    assert true_moments(StreamSpec("uniform")) == pytest.approx((0.5, 1 / 12, 1 / 180))
    assert true_moments(StreamSpec("constant", (0.7,))) == (0.7, 0.0, 0.0)
    mu, var, _ = true_moments(StreamSpec("beta", (5, 5)))
    assert (mu, var) == pytest.approx((0.5, 1 / 44))


@pytest.mark.parametrize("a,b", [(2, 6), (5, 5), (0.5, 3)])
def test_beta_moments_against_quadrature(a, b):
    m, v, m4 = beta_moments(a, b)
    ref_v = stats.beta(a, b).var()
    ref_m4 = integrate.quad(lambda x: (x - m) ** 4 * stats.beta(a, b).pdf(x), 0, 1)[0]
    assert v == pytest.approx(ref_v, rel=1e-12)
    assert m4 == pytest.approx(ref_m4, rel=1e-9)


def test_frozen_beta_fourth_moments():
    # 40-digit quadrature values
    assert beta_moments(5, 5)[2] == pytest.approx(0.0013111888111888112, rel=1e-13)
    assert beta_moments(2, 6)[2] == pytest.approx(0.0013494318181818182, rel=1e-13)


def test_moments_match_samples():
    for text in ("bernoulli(0.3)", "martingale", "cube(3)"):
        spec = parse_stream(text, seed=21, length=10 ** 6)
        x = generate_stream(spec)
        mu, var, v4 = true_moments(spec)
        dev = np.sum((x - mu) ** 2, axis=-1) if x.ndim == 2 else (x - mu) ** 2
        assert dev.mean() == pytest.approx(var, rel=0.01)
        assert dev.var() == pytest.approx(v4, rel=0.03)


def test_martingale_conditional_moments():
    x = generate_stream(StreamSpec("martingale", seed=5, length=4 * 10 ** 5))
    above = x[:-1] > 0.5
    for mask in (above, ~above):
        nxt = x[1:][mask]
        assert abs(nxt.mean() - 0.5) < 0.003
        assert abs(nxt.var() - 0.09) < 0.002
    # the law does change with the past: fourth moments differ
    d4 = (x[1:] - 0.5) ** 4
    assert abs(d4[above].mean() - d4[~above].mean()) > 0.003


def test_replication_seeds():
    spec = StreamSpec("uniform", seed=9, length=10)
    batch = generate_batch(spec, 4)
    tail = generate_batch(spec, 2, start=2)
    assert np.array_equal(batch[2:], tail)
    assert np.array_equal(batch[1], generate_stream(spec.with_(seed=replication_seed(9, 1))))
    assert generate_batch(spec.with_(length=0), 3).shape == (3, 0)


# --- harness ---------------------------------------------------------------

def test_run_replication():
    spec = StreamSpec("uniform", seed=1, length=300)
    out = run_replication(spec, ["EB-CS", "MP", "Decoupled"])
    lo, up = out["EB-CS"]
    assert lo.shape == (300,) and np.all(up >= lo)
    assert out["MP"][0].shape == (1,)
    again = run_replication(spec, ["EB-CS"])
    assert np.array_equal(again["EB-CS"][0], lo) and np.array_equal(again["EB-CS"][1], up)
    empty = run_replication(spec.with_(length=0), ["EB-CS"])
    assert empty["EB-CS"][0].size == 0


def test_experiment_spec_validation():
    with pytest.raises(ValueError):
        ExperimentSpec(methods=("EB-XX",))
    with pytest.raises(ValueError):
        ExperimentSpec(checkpoints=(100, 10))
    with pytest.raises(ValueError):
        ExperimentSpec(replications=0)
    with pytest.raises(ValueError):
        ExperimentSpec(scale="log")


def _small(**kw):
    base = dict(streams=("uniform", "beta(2,6)"), methods=("EB-CS", "EB-CI", "MP"),
                replications=6, checkpoints=(10, 100, 400), seed=4, chunk=4)
    base.update(kw)
    return ExperimentSpec(**base)


def test_coverage_and_width_shapes():
    res = coverage_and_width(_small())
    assert len(res.rows) == 2 * 3 * 3
    for r in res.rows:
        assert 0 <= r["miscoverage"] <= 1
        assert 0 <= r["q95_lower"] <= r["mean_lower"] + 1e-15
        assert r["mean_upper"] <= r["q95_upper"] + 1e-15 <= 1 + 1e-15
    lo, up = res.trajectories[("uniform", "EB-CS")]
    assert lo.shape == (6, 3)
    assert set(res.wall_time) == set(res.trajectories)


def test_single_replication_quantiles():
    res = coverage_and_width(_small(replications=1))
    for r in res.rows:
        assert r["q95_lower"] == r["mean_lower"] and r["q95_upper"] == r["mean_upper"]


def test_worker_count_does_not_matter():
    a = coverage_and_width(_small(chunk=6))
    b = coverage_and_width(_small(chunk=2, n_jobs=2))
    assert csv_text(a) == csv_text(b)


def test_alpha_one_runs():
    res = coverage_and_width(_small(alpha=1.0, replications=3))
    assert all(0 <= r["miscoverage"] <= 1 for r in res.rows)


def test_std_scale():
    res = coverage_and_width(_small(scale="std", methods=("EB-CS",)))
    assert res.rows[0]["truth"] == pytest.approx(math.sqrt(1 / 12))


def test_all_methods_and_vector_stream():
    spec = ExperimentSpec(streams=("bernoulli(0.4)",), methods=tuple(
        ["EB-CS", "EB-CI", "MP", "Decoupled", "AltLower", "DoubleEB", "HilbertEB"]),
        replications=3, checkpoints=(50, 200))
    res = coverage_and_width(spec)
    assert len(res.rows) == 14
    vec = coverage_and_width(ExperimentSpec(streams=("cube(2)",), methods=("HilbertEB",),
                                            replications=3, checkpoints=(50, 200)))
    assert vec.rows[-1]["truth"] == pytest.approx(1 / 12)
    with pytest.raises(ValueError):
        coverage_and_width(ExperimentSpec(streams=("cube(2)",), methods=("EB-CS",),
                                          replications=2, checkpoints=(20,)))


def test_sharpness_curve_constant_and_trend():
    rows = sharpness_curve(StreamSpec("constant", (0.3,)), [1000, 10000])
    assert all(math.isnan(r["ratio_upper"]) for r in rows)
    assert rows[-1]["upper_width"] < rows[0]["upper_width"]
    rows = sharpness_curve(StreamSpec("uniform", seed=3), [10 ** 4, 10 ** 5, 10 ** 6], reps=2)
    ups = [r["ratio_upper"] for r in rows]
    los = [r["ratio_lower"] for r in rows]
    assert ups[0] > ups[-1] and los[0] > los[1] > los[2]
    assert abs(ups[-1] - 1) < 0.1


def test_supermartingale_means_small():
    out = supermartingale_means(StreamSpec("beta", (2, 6), seed=1), [10, 30], 4000)
    for key in ("plus", "minus"):
        mean, se = out[key]
        assert np.all(mean <= 1 + 5 * se)


# --- io --------------------------------------------------------------------

def test_csv_roundtrip(tmp_path):
    res = coverage_and_width(_small())
    path = emit_csv(res, tmp_path / "r.csv")
    rows = parse_csv(path)
    assert len(rows) == len(res.rows)
    for a, b in zip(rows, res.rows):
        assert a["method"] == b["method"] and a["t"] == b["t"]
        for c in CSV_COLUMNS[2:7]:
            assert a[c] == pytest.approx(b[c], abs=1e-12)
    assert parse_csv(csv_text(res)) == rows


def test_empty_csv_is_header_only(tmp_path):
    path = emit_csv(ExperimentResult(), tmp_path / "e.csv")
    assert path.read_text() == ",".join(CSV_COLUMNS) + "\n"
    assert parse_csv(path) == []


def test_csv_requires_columns():
    with pytest.raises(ValueError):
        parse_csv("method,t\nEB,1\n")


def test_svg_structure(tmp_path):
    res = coverage_and_width(_small())
    path = emit_svg(res, tmp_path / "r.svg")
    root = ET.parse(path).getroot()
    panels = root.findall(f"{SVG}g[@class='panel']")
    assert len(panels) == 2
    for p in panels:
        bounds = p.findall(f"{SVG}polyline[@class='bound']")
        assert len(bounds) == 3 * 2
        assert {(b.get("data-method"), b.get("data-series")) for b in bounds} == {
            (m, s) for m in ("EB-CS", "EB-CI", "MP") for s in ("mean_lower", "mean_upper")}
        assert len(p.findall(f"{SVG}line[@class='truth']")) == 1
    assert "<svg" in svg_text([])


def test_unwritable_path_names_path(tmp_path):
    bad = tmp_path / "missing" / "x.csv"
    with pytest.raises(OSError, match="missing"):
        emit_csv(ExperimentResult(), bad)
    with pytest.raises(OSError, match="missing"):
        emit_svg(ExperimentResult(), tmp_path / "missing" / "x.svg")


# --- config files ----------------------------------------------------------

def test_parse_config_text():
    kw = parse_config_text("""
        # comment
        streams = uniform; beta(2, 6)  beta(5,5)
        methods = EB-CS, MP
        alpha = 0.1
        checkpoints = log 10 1000 3
        seed = 0x10
        csv = out.csv
    """)
    assert kw["streams"] == ("uniform", "beta(2,6)", "beta(5,5)")
    assert kw["methods"] == ("EB-CS", "MP")
    assert kw["checkpoints"] == (10, 100, 1000)
    assert kw["seed"] == 16 and kw["alpha"] == 0.1 and kw["csv"] == "out.csv"
    with pytest.raises(ValueError, match="unknown key"):
        parse_config_text("colour = red")
    with pytest.raises(ValueError, match=":1:"):
        parse_config_text("alpha = lots")
    with pytest.raises(ValueError):
        parse_config_text("just words")


def test_log_grid():
    assert log_grid(10, 10000, 4) == (10, 100, 1000, 10000)
    assert log_grid(5, 5, 3) == (5,)
    with pytest.raises(ValueError):
        log_grid(0, 10, 3)


def test_seed_env(monkeypatch, tmp_path):
    monkeypatch.delenv(SEED_ENV, raising=False)
    assert default_seed() == 0
    monkeypatch.setenv(SEED_ENV, "77")
    assert default_seed() == 77
    cfg = tmp_path / "e.cfg"
    cfg.write_text("methods = EB-CS\ncheckpoints = 10, 20\n")
    assert load_experiment(cfg).seed == 77
    cfg.write_text("methods = EB-CS\ncheckpoints = 10, 20\nseed = 3\n")
    assert load_experiment(cfg).seed == 3
    monkeypatch.setenv(SEED_ENV, "abc")
    with pytest.raises(ValueError):
        default_seed()


def test_dump_roundtrip(tmp_path):
    spec = _small(csv="a.csv")
    path = tmp_path / "s.cfg"
    path.write_text(dump_experiment(spec))
    assert load_experiment(path) == spec
