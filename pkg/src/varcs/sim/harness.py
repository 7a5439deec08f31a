"""Monte Carlo replication engine.

Replications of one stream are stacked along axis 0 and every method is
run on the whole batch at once. Methods score either uniformly in time
(``miscoverage`` is the running frequency of "the truth left the
interval at some s <= t") or at a fixed horizon (CI methods are re-tuned
and re-run for each checkpoint and scored there).
"""

from dataclasses import dataclass, field
import math
import time

import numpy as np

from ..baselines import DecoupledVarianceTracker, mp_std_from_moments
from ..config import TrackerConfig
from ..hilbert import HilbertVarianceTracker
from ..psi import psi_e
from ..variance_cs import lower_components, two_sided_path, upper_components, upper_path
from .streams import StreamSpec, generate_batch, parse_stream, true_moments

METHODS = ("EB-CS", "EB-CI", "MP", "Decoupled", "AltLower", "DoubleEB", "HilbertEB")
CI_METHODS = ("EB-CI", "MP")
SCALES = ("var", "std")


@dataclass
class ExperimentSpec:
    """What to run.

    ``streams`` holds stream descriptions such as ``"beta(2,6)"``;
    ``checkpoints`` are the times at which bounds are recorded and the
    largest one is the stream length. ``scale`` selects bounds for the
    variance or for the standard deviation.
    """

    streams: tuple = ("uniform", "beta(2,6)", "beta(5,5)")
    methods: tuple = ("EB-CS", "MP")
    alpha: float = 0.05
    replications: int = 100
    checkpoints: tuple = (100, 1000, 10000)
    split: str = "halves"
    scale: str = "var"
    seed: int = 0
    n_jobs: int = 1
    chunk: int = 100
    csv: str | None = None
    svg: str | None = None

    def __post_init__(self):
        self.streams = tuple(self.streams)
        self.methods = tuple(self.methods)
        self.checkpoints = tuple(int(c) for c in self.checkpoints)
        bad = [m for m in self.methods if m not in METHODS]
        if bad:
            raise ValueError(f"unknown methods {bad}; expected some of {METHODS}")
        if self.replications < 1:
            raise ValueError("replications must be >= 1")
        if not self.checkpoints or list(self.checkpoints) != sorted(set(self.checkpoints)):
            raise ValueError("checkpoints must be a nonempty strictly increasing list")
        if self.checkpoints[0] < 1:
            raise ValueError("checkpoints must be positive")
        if self.scale not in SCALES:
            raise ValueError(f"scale must be one of {SCALES}")
        if self.chunk < 1:
            raise ValueError("chunk must be >= 1")
        TrackerConfig(alpha=self.alpha, split=self.split)

    @property
    def horizon(self):
        return self.checkpoints[-1]

    def stream_specs(self):
        return [parse_stream(s, seed=self.seed, length=self.horizon) for s in self.streams]


@dataclass
class ExperimentResult:
    """Aggregates (one row per stream, method and checkpoint) plus raw bounds.

    ``rows`` are dicts with keys :data:`~varcs.sim.io.CSV_COLUMNS`;
    ``trajectories[(stream, method)]`` is ``(lower, upper)``, each of
    shape ``(replications, len(checkpoints))``; ``wall_time`` maps the same
    keys to seconds.
    """

    spec: ExperimentSpec | None = None
    rows: list = field(default_factory=list)
    trajectories: dict = field(default_factory=dict)
    wall_time: dict = field(default_factory=dict)

    def select(self, method=None, stream=None):
        return [r for r in self.rows
                if (method is None or r["method"] == method)
                and (stream is None or r["distribution"] == stream)]


# ---------------------------------------------------------------------------
# per-method runners: (x, checkpoints, cfg, truth) -> lower, upper, miss
# with all arrays shaped (reps, K) on the variance scale


def _at(a, checkpoints):
    return a[..., np.asarray(checkpoints) - 1]


def _cs_scores(lower, upper, truth, checkpoints):
    miss = np.logical_or.accumulate((truth < lower) | (truth > upper), axis=-1)
    return _at(lower, checkpoints), _at(upper, checkpoints), _at(miss, checkpoints)


def _require_scalar(x, name):
    if x.ndim != 2:
        raise ValueError(f"{name} needs scalar streams; use HilbertEB for vectors")


def _run_eb_cs(x, checkpoints, cfg, truth, variant="gated"):
    _require_scalar(x, "EB")
    lower, upper = two_sided_path(x, cfg, variant)
    return _cs_scores(lower, upper, truth, checkpoints)


def _run_alt(x, checkpoints, cfg, truth):
    return _run_eb_cs(x, checkpoints, cfg, truth, "alt")


def _run_double_eb(x, checkpoints, cfg, truth):
    return _run_eb_cs(x, checkpoints, cfg.replace(horizon=x.shape[-1]), truth, "double-eb")


def _run_eb_ci(x, checkpoints, cfg, truth):
    _require_scalar(x, "EB-CI")
    lo, up = [], []
    for n in checkpoints:
        l, u = two_sided_path(x[:, :n], cfg.replace(mode="ci", horizon=n))
        lo.append(l[:, -1])
        up.append(u[:, -1])
    lower, upper = np.stack(lo, axis=-1), np.stack(up, axis=-1)
    return lower, upper, (truth < lower) | (truth > upper)


def _run_mp(x, checkpoints, cfg, truth):
    _require_scalar(x, "MP")
    n = np.asarray(checkpoints, dtype=float)
    s1 = _at(np.cumsum(x, axis=-1), checkpoints)
    s2 = _at(np.cumsum(x * x, axis=-1), checkpoints)
    lo = np.zeros(s1.shape)
    up = np.full(s1.shape, cfg.cap)
    ok = n >= 2
    if ok.any():
        var = np.maximum(s2[:, ok] - s1[:, ok] ** 2 / n[ok], 0.0) / (n[ok] - 1)
        iv = mp_std_from_moments(n[ok], var, cfg.alpha, cfg.cap)
        lo[:, ok], up[:, ok] = np.square(iv.lower), np.square(iv.upper)
    return lo, up, (truth < lo) | (truth > up)


def _stream_scores(tracker, xs, checkpoints, truth):
    n = xs.shape[1]
    reps = xs.shape[0]
    want = {c - 1: k for k, c in enumerate(checkpoints)}
    lo = np.zeros((reps, len(checkpoints)))
    up = np.zeros((reps, len(checkpoints)))
    miss = np.zeros((reps, len(checkpoints)), bool)
    missed = np.zeros(reps, bool)
    for j in range(n):
        iv = tracker.update(xs[:, j])
        missed |= (truth < iv.lower) | (truth > iv.upper)
        k = want.get(j)
        if k is not None:
            lo[:, k], up[:, k], miss[:, k] = iv.lower, iv.upper, missed
    return lo, up, miss


def _run_decoupled(x, checkpoints, cfg, truth):
    _require_scalar(x, "Decoupled")
    return _stream_scores(DecoupledVarianceTracker(cfg), x, checkpoints, truth)


def _run_hilbert(x, checkpoints, cfg, truth):
    # scalar [0, 1] data maps into the ball by y -> y - 1/2
    xv = x[..., None] - 0.5 if x.ndim == 2 else x
    return _stream_scores(HilbertVarianceTracker(xv.shape[-1], cfg), xv, checkpoints, truth)


RUNNERS = {"EB-CS": _run_eb_cs, "EB-CI": _run_eb_ci, "MP": _run_mp,
           "Decoupled": _run_decoupled, "AltLower": _run_alt, "DoubleEB": _run_double_eb,
           "HilbertEB": _run_hilbert}


def run_replication(spec, methods, config=None, checkpoints=None):
    """Run ``methods`` on the single stream ``spec``.

    Returns ``{method: (lower, upper)}`` with variance bounds at every
    ``t = 1..length`` for anytime methods and at ``checkpoints`` (default:
    the final time) for CI methods. A zero-length stream gives empty
    arrays.
    """
    from .streams import generate_stream

    cfg = config or TrackerConfig()
    x = generate_stream(spec)[None]
    n = spec.length
    out = {}
    for m in methods:
        if n == 0:
            out[m] = (np.zeros(0), np.zeros(0))
            continue
        cps = tuple(range(1, n + 1)) if m not in CI_METHODS else tuple(checkpoints or (n,))
        lo, up, _ = RUNNERS[m](x, cps, cfg, 0.0)
        out[m] = (lo[0], up[0])
    return out


def _chunk_bounds(stream, method, start, reps, exp, truth):
    x = generate_batch(stream, reps, start)
    cfg = TrackerConfig(alpha=exp.alpha, split=exp.split)
    return RUNNERS[method](x, exp.checkpoints, cfg, truth)


def _aggregate(lo, up, miss, scale):
    if scale == "std":
        lo, up = np.sqrt(lo), np.sqrt(up)
    return lo, up, {
        "mean_lower": lo.mean(axis=0), "mean_upper": up.mean(axis=0),
        "q95_lower": np.quantile(lo, 0.05, axis=0), "q95_upper": np.quantile(up, 0.95, axis=0),
        "miscoverage": miss.mean(axis=0)}


def coverage_and_width(exp):
    """Run an :class:`ExperimentSpec` and aggregate over replications.

    ``q95_lower`` is the 5% empirical quantile of the lower bounds and
    ``q95_upper`` the 95% quantile of the upper bounds, so together they
    bracket 95% of the replications on each side. Chunks of replications
    may run in parallel (``n_jobs``); seeds depend on the replication
    index only, so the output does not depend on the worker count.
    """
    result = ExperimentResult(spec=exp)
    starts = list(range(0, exp.replications, exp.chunk))
    sizes = [min(exp.chunk, exp.replications - s) for s in starts]
    for stream in exp.stream_specs():
        truth_var = true_moments(stream)[1]
        truth = math.sqrt(truth_var) if exp.scale == "std" else truth_var
        for method in exp.methods:
            tic = time.perf_counter()
            jobs = [(stream, method, s, k, exp, truth_var) for s, k in zip(starts, sizes)]
            if exp.n_jobs != 1 and len(jobs) > 1:
                from joblib import Parallel, delayed

                parts = Parallel(n_jobs=exp.n_jobs)(delayed(_chunk_bounds)(*j) for j in jobs)
            else:
                parts = [_chunk_bounds(*j) for j in jobs]
            lo, up, miss = (np.concatenate(p, axis=0) for p in zip(*parts))
            lo, up, agg = _aggregate(lo, up, miss, exp.scale)
            result.trajectories[(stream.label, method)] = (lo, up)
            result.wall_time[(stream.label, method)] = time.perf_counter() - tic
            for k, t in enumerate(exp.checkpoints):
                row = {"method": method, "t": t}
                row.update({key: float(v[k]) for key, v in agg.items()})
                row.update({"distribution": stream.label, "truth": truth})
                result.rows.append(row)
    return result


def sharpness_curve(spec, n_grid, alpha=0.05, split="log-horizon", reps=1):
    """First-order widths ``sqrt(n)(U_n - D_n)`` and ``sqrt(n)(D_n - L_n)``.

    Each one-sided bound runs at level ``alpha`` in CI mode tuned to the
    horizon ``n``. Returns one dict per ``n`` with the replication means,
    the oracle ``sqrt(2 V[(X - mu)^2] log(1/alpha))`` and their ratios
    (``nan`` when the oracle is 0).
    """
    from ..variance_cs import lower_path

    v4 = true_moments(spec)[2]
    oracle = math.sqrt(2 * v4 * math.log(1 / alpha))
    rows = []
    for n in n_grid:
        cfg = TrackerConfig(alpha=alpha, mode="ci", horizon=int(n), split=split)
        s = spec.with_(length=int(n))
        up_w, lo_w = [], []
        # one replication at a time keeps memory at O(n)
        for r in range(reps):
            x = generate_batch(s, 1, r)[0]
            u, du = upper_path(x, alpha, cfg)
            l, dl = lower_path(x, alpha, cfg)
            up_w.append(math.sqrt(n) * (u[-1] - du[-1]))
            lo_w.append(math.sqrt(n) * (dl[-1] - l[-1]))
        up_m, lo_m = float(np.mean(up_w)), float(np.mean(lo_w))
        ratio = (lambda w: w / oracle if oracle > 0 else math.nan)
        rows.append({"n": int(n), "upper_width": up_m, "lower_width": lo_m,
                     "oracle": oracle, "ratio_upper": ratio(up_m),
                     "ratio_lower": ratio(lo_m)})
    return rows


def supermartingale_means(spec, times, runs, alpha=0.05, config=None, chunk=10000):
    """Monte Carlo means of the two exponential processes at ``times``.

    ``S^+`` uses the upper bound's plug-ins (centre ``mu_bar``) and
    ``S^-`` the lower bound's (Bennett-weighted centre, gated lambda),
    each with its own predictable ``sigma_hat``; ``sigma~_i^2`` is
    ``sigma^2 + (mu_hat_i - mu)^2`` with the true moments of ``spec``.
    Returns ``{"plus": (means, ses), "minus": (means, ses)}``.
    """
    cfg = config or TrackerConfig(alpha=alpha)
    mu, var, _ = true_moments(spec)
    horizon = max(times)
    s = spec.with_(length=horizon)
    idx = np.asarray(times) - 1
    acc = {"plus": [], "minus": []}
    for start in range(0, runs, chunk):
        x = generate_batch(s, min(chunk, runs - start), start)
        for key, comp, sign in (("plus", upper_components(x, alpha, cfg), 1.0),
                                ("minus", lower_components(x, alpha, cfg), -1.0)):
            lam, dev, sig2 = comp["lam"], comp["dev"], comp["sig2"]
            tilde = var + (comp["mu_hat"] - mu) ** 2
            inc = sign * lam * (dev - tilde) - psi_e(lam) * (dev - sig2) ** 2
            acc[key].append(np.exp(np.cumsum(inc, axis=-1)[:, idx]))
    out = {}
    for key, parts in acc.items():
        vals = np.concatenate(parts, axis=0)
        out[key] = (vals.mean(axis=0), vals.std(axis=0, ddof=1) / math.sqrt(len(vals)))
    return out
