"""Empirical Bernstein confidence sequences for the variance.

The upper bound is ``U_t = D_t + R_{t,alpha}``: a lambda-weighted average
of squared deviations from a predictable mean plus a self-normalised
radius. The lower bound subtracts, in addition, the error from using an
estimated mean; that error is controlled by a Bennett confidence
sequence whose radius is quadratic in the variance, so the bound is the
positive root of a quadratic.

Trackers accept either a float per update (one stream) or an array of
shape ``(batch,)`` (independent streams advanced in lockstep). Vector
observations put their coordinates on the last axis.
"""

import math

import numpy as np

from ._state import Snapshot
from .config import TrackerConfig
from .estimators import (
    EstimatorState,
    gate_statistic,
    lambda_tilde,
    lambda_upper,
    sqdist,
)
from .interval import Interval
from .mean_cs import bennett_radius_coeffs, eb_mean_radius
from .psi import psi_e, psi_p

QUAD_EPS = 1e-14
LOWER_VARIANTS = ("gated", "alt", "double-eb")


def _f(v):
    return float(v) if np.ndim(v) == 0 else v


def radius_R(sum_lam, sum_pen, alpha):
    """``(log(1/alpha) + penalty sum) / sum lambda``; ``inf`` without weight."""
    sum_lam = np.asarray(sum_lam, dtype=float)
    with np.errstate(divide="ignore", invalid="ignore"):
        r = (math.log(1 / alpha) + sum_pen) / sum_lam
    return _f(np.where(sum_lam > 0, r, np.inf))


def solve_lower_quadratic(a, b, k, eps=QUAD_EPS):
    """Nonnegative root ``L`` of ``a L^2 + b L = k``.

    For ``a <= eps`` the linear limit ``k / b`` is used. A negative
    discriminant or negative root gives 0.
    """
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    k = np.asarray(k, dtype=float)
    quad = a > eps
    safe_a = np.where(quad, a, 1.0)
    # rationalised root 2k / (b + sqrt(disc)) avoids cancellation for small a*k
    with np.errstate(divide="ignore", invalid="ignore"):
        disc = b * b + 4 * a * k
        sq = np.sqrt(np.maximum(disc, 0.0))
        denom = b + sq
        root_q = np.where(denom > 0, 2 * k / np.where(denom > 0, denom, 1.0),
                          (-b + sq) / (2 * safe_a))
        root_l = k / b
    root = np.where(quad, np.where(disc >= 0, root_q, 0.0), root_l)
    root = np.where(np.isfinite(root), root, 0.0)
    return _f(np.maximum(root, 0.0))


def alpha_split(policy, alpha, n=None):
    """Split a lower-bound budget into (mean-radius part, variance part).

    ``"halves"`` gives ``(alpha/2, alpha/2)``; ``"log-horizon"`` gives
    ``(alpha/log n, alpha (log n - 1)/log n)`` and falls back to halves
    when ``n`` is missing or ``log n <= 1``; a pair is returned as is
    after checking it sums to ``alpha``.
    """
    if isinstance(policy, str):
        if policy == "halves":
            return alpha / 2, alpha / 2
        if policy == "log-horizon":
            if n is None or math.log(n) <= 1:
                return alpha / 2, alpha / 2
            ln = math.log(n)
            return alpha / ln, alpha * (ln - 1) / ln
        raise ValueError(f"unknown split policy {policy!r}")
    a1, a2 = policy
    if a1 <= 0 or a2 <= 0 or not math.isclose(a1 + a2, alpha, rel_tol=1e-9):
        raise ValueError(f"custom split {policy} must be positive and sum to {alpha}")
    return float(a1), float(a2)


def std_interval(var_interval):
    """Square-root map from a variance interval to one for the std."""
    return var_interval.sqrt()


def _horizon(cfg):
    return cfg.horizon if cfg.mode == "ci" else None


def _scale(w, x, vector):
    if vector:
        return np.asarray(w)[..., None] * x
    return w * x


def _zeros_like_mean(prior):
    return np.zeros_like(np.asarray(prior, dtype=float)) if np.ndim(prior) else 0.0


class UpperVarianceTracker(Snapshot):
    """Upper confidence sequence ``U_t = D_t + R_{t,alpha}`` for the variance.

    Uses the predictable mean ``mu_bar`` as centre and the fourth-moment
    plug-in schedule (CS or CI according to ``config.mode``).
    """

    def __init__(self, alpha=None, config=None, vector=False, prior_mean=None):
        self.config = config or TrackerConfig()
        self.alpha = self.config.alpha if alpha is None else alpha
        self.vector = vector
        c4 = self.config.c4 if prior_mean is None else prior_mean
        self.est = EstimatorState(c3=self.config.c3, c4=c4, vector=vector)
        self.sum_m4 = 0.0
        self.sum_lam = 0.0
        self.sum_lam_d = 0.0
        self.sum_pen = 0.0
        self.last_lambda = 0.0

    @property
    def t(self):
        return self.est.t

    def update(self, x):
        cfg = self.config
        t = self.t + 1
        sig2 = self.est.sigma_hat_sq()
        dev = sqdist(x, self.est.mu_bar(), self.vector)
        m4 = (cfg.c2 + self.sum_m4) / t
        lam = lambda_upper(m4, t, self.alpha, cfg.c1, _horizon(cfg))
        resid = dev - sig2
        self.sum_lam = self.sum_lam + lam
        self.sum_lam_d = self.sum_lam_d + lam * dev
        self.sum_pen = self.sum_pen + psi_e(lam) * resid * resid
        self.sum_m4 = self.sum_m4 + resid * resid
        self.est.update(x)
        self.last_lambda = lam
        return self.value()

    def D(self):
        s = np.asarray(self.sum_lam, dtype=float)
        with np.errstate(divide="ignore", invalid="ignore"):
            return _f(np.where(s > 0, self.sum_lam_d / np.where(s > 0, s, 1.0), 0.0))

    def R(self):
        return radius_R(self.sum_lam, self.sum_pen, self.alpha)

    def value(self):
        return _f(np.minimum(self.D() + self.R(), self.config.cap))


class LowerVarianceTracker(Snapshot):
    """Lower confidence sequence for the variance.

    Parameters
    ----------
    alpha : float
        Budget of this one-sided bound, split between the mean radius
        (``alpha1``) and the variance radius (``alpha2``) per
        ``config.split``.
    variant : {"gated", "alt", "double-eb"}
        ``"gated"`` (default) centres at the Bennett-weighted mean and
        zeroes the plug-in while the estimated mean radius exceeds 1.
        ``"alt"`` never zeroes the plug-in and instead charges a full
        unit penalty on those steps. ``"double-eb"`` bounds the mean
        error with an empirical Bernstein radius capped at 1, with
        ``alpha1 = alpha / horizon``.
    """

    def __init__(self, alpha=None, config=None, variant="gated", vector=False,
                 prior_mean=None, start_mean=None):
        if variant not in LOWER_VARIANTS:
            raise ValueError(f"variant must be one of {LOWER_VARIANTS}")
        self.config = cfg = config or TrackerConfig()
        self.alpha = cfg.alpha if alpha is None else alpha
        self.variant = variant
        self.vector = vector
        if variant == "double-eb":
            h = cfg.horizon
            if h is None:
                raise ValueError("double-eb lower bound needs config.horizon")
            self.alpha1 = self.alpha / h
            self.alpha2 = self.alpha * (h - 1) / h if h > 1 else self.alpha / 2
        else:
            self.alpha1, self.alpha2 = alpha_split(cfg.split, self.alpha, cfg.horizon)
        c4 = cfg.c4 if prior_mean is None else prior_mean
        self.start_mean = 0.5 if start_mean is None else start_mean
        self.est = EstimatorState(c3=cfg.c3, c4=c4, vector=vector)
        zero_vec = _zeros_like_mean(self.start_mean)
        self.sum_m4 = 0.0
        self.sum_lam = 0.0
        self.sum_lam_d = 0.0
        self.sum_pen = 0.0
        self.sum_lam_a = 0.0
        self.sum_lam_b = 0.0
        self.sum_lam_c = 0.0
        # mean-estimate weights: Bennett lambdas, or EB lambdas for double-eb
        self.sum_w = 0.0
        self.sum_w_x = zero_vec
        self.sum_w_pen = 0.0
        self.sum_psi = 0.0
        self.last_lambda = 0.0

    @property
    def t(self):
        return self.est.t

    def mu_hat(self):
        """Predictable mean estimate for the next index (weighted past mean)."""
        s = np.asarray(self.sum_w, dtype=float)
        pos = s > 0
        safe = np.where(pos, s, 1.0)
        if self.vector:
            m = self.sum_w_x / safe[..., None]
            return np.where(pos[..., None], m, self.start_mean)
        return _f(np.where(pos, self.sum_w_x / safe, self.start_mean))

    def _mean_error_coeffs(self, t, sig2):
        """Per-step (A~, B~, C~, lambda_open) before seeing X_t."""
        shape = np.shape(self.sum_w)
        if self.variant == "double-eb":
            rt = np.minimum(eb_mean_radius(self.sum_w, self.sum_w_pen, self.alpha1), 1.0)
            zero = np.zeros(np.shape(rt))
            return zero, zero, rt * rt, True
        stat = gate_statistic(self.sum_w, self.sum_psi, sig2, self.alpha1)
        inside = (t >= 2) & (np.asarray(stat) <= 1)
        if t == 1:
            a = b = np.zeros(shape)
            # the t = 1 mean radius is 1/2 by convention
            c = np.full(shape, 0.25)
        else:
            a, b, c = bennett_radius_coeffs(self.sum_w, self.sum_psi, self.alpha1)
        if self.variant == "gated":
            return a, b, c, inside
        # alt: steps outside the set carry radius 1 and keep their lambda
        return (np.where(inside, a, 0.0), np.where(inside, b, 0.0),
                np.where(inside, c, 1.0), True)

    def update(self, x):
        cfg = self.config
        t = self.t + 1
        sig2 = self.est.sigma_hat_sq()
        mu_bar = self.est.mu_bar()
        dev = sqdist(x, self.mu_hat(), self.vector)
        m4 = (cfg.c2 + self.sum_m4) / t
        lam = lambda_upper(m4, t, self.alpha2, cfg.c1, _horizon(cfg))
        a, b, c, open_ = self._mean_error_coeffs(t, sig2)
        lam = _f(np.where(open_, lam, 0.0))
        resid = dev - sig2
        self.sum_lam = self.sum_lam + lam
        self.sum_lam_d = self.sum_lam_d + lam * dev
        self.sum_pen = self.sum_pen + psi_e(lam) * resid * resid
        self.sum_lam_a = self.sum_lam_a + lam * a
        self.sum_lam_b = self.sum_lam_b + lam * b
        self.sum_lam_c = self.sum_lam_c + lam * c
        self.sum_m4 = self.sum_m4 + resid * resid
        if self.variant == "double-eb":
            w = lambda_upper(sig2, t, self.alpha1 / 2, cfg.c1)
            self.sum_w_pen = self.sum_w_pen + psi_e(w) * sqdist(x, mu_bar, self.vector)
        else:
            w = lambda_tilde(sig2, t, self.alpha1, cfg.c5)
            self.sum_psi = self.sum_psi + psi_p(w)
        self.sum_w = self.sum_w + w
        self.sum_w_x = self.sum_w_x + _scale(w, x, self.vector)
        self.est.update(x)
        self.last_lambda = lam
        return self.value()

    def _ratio(self, num):
        s = np.asarray(self.sum_lam, dtype=float)
        with np.errstate(divide="ignore", invalid="ignore"):
            return np.where(s > 0, num / np.where(s > 0, s, 1.0), 0.0)

    def D(self):
        return _f(self._ratio(self.sum_lam_d))

    def R(self):
        return radius_R(self.sum_lam, self.sum_pen, self.alpha2)

    def coefficients(self):
        """``(A_t, B_t, C_t)`` of the current lower-bound quadratic."""
        return (_f(self._ratio(self.sum_lam_a)), _f(1.0 + self._ratio(self.sum_lam_b)),
                _f(self._ratio(self.sum_lam_c)))

    def value(self):
        s = np.asarray(self.sum_lam, dtype=float)
        a, b, c = self.coefficients()
        with np.errstate(invalid="ignore"):
            k = np.where(s > 0, np.asarray(self.D()) - c - np.where(s > 0, self.R(), 0.0),
                         -np.inf)
        return _f(np.minimum(solve_lower_quadratic(a, b, k), self.config.cap))


class VarianceConfidenceSequence(Snapshot):
    """Two-sided confidence sequence (or interval, in CI mode) for the variance.

    The budget ``config.alpha`` is divided equally between the upper and
    the lower bound. :meth:`update` takes one observation (or a batch of
    observations from parallel streams) and returns the current
    :class:`Interval`.
    """

    def __init__(self, config=None, vector=False, prior_mean=None, start_mean=None,
                 lower_variant="gated"):
        self.config = cfg = config or TrackerConfig()
        half = cfg.alpha / 2
        self.upper = UpperVarianceTracker(half, cfg, vector=vector, prior_mean=prior_mean)
        self.lower = LowerVarianceTracker(half, cfg, variant=lower_variant, vector=vector,
                                          prior_mean=prior_mean, start_mean=start_mean)
        self.best_lower = 0.0
        self.best_upper = cfg.cap

    @property
    def t(self):
        return self.upper.t

    def update(self, x):
        self.upper.update(x)
        self.lower.update(x)
        return self.interval()

    def interval(self):
        u = self.upper.value()
        l = np.minimum(self.lower.value(), u)
        if self.config.running_intersection:
            self.best_upper = np.minimum(self.best_upper, u)
            self.best_lower = np.minimum(np.maximum(self.best_lower, l), self.best_upper)
            l, u = self.best_lower, self.best_upper
        return Interval(_f(l), _f(u), self.t, 1 - self.config.alpha)

    def std_interval(self):
        return self.interval().sqrt()


# ---------------------------------------------------------------------------
# whole-trajectory evaluation


def _excl_cumsum(a):
    """Sums over indices strictly before each position along axis -1."""
    out = np.zeros_like(a)
    np.cumsum(a[..., :-1], axis=-1, out=out[..., 1:])
    return out


def _ratio_path(num, den, empty):
    with np.errstate(divide="ignore", invalid="ignore"):
        return np.where(den > 0, num / np.where(den > 0, den, 1.0), empty)


def upper_components(x, alpha, config=None):
    """Predictable sequences behind :func:`upper_path`.

    Returns a dict with ``lam``, ``mu_hat``, ``sig2`` and ``dev`` (the
    squared deviation ``(X_t - mu_hat_t)**2``), all shaped like ``x``.
    """
    cfg = config or TrackerConfig()
    x = np.asarray(x, dtype=float)
    n = x.shape[-1]
    t = np.arange(1, n + 1, dtype=float)
    mu = (cfg.c4 + _excl_cumsum(x)) / t
    dev = (x - mu) ** 2
    sig2 = (cfg.c3 + _excl_cumsum(dev)) / t
    resid2 = (dev - sig2) ** 2
    m4 = (cfg.c2 + _excl_cumsum(resid2)) / t
    lam = _lambda_path(m4, t, alpha, cfg)
    return {"lam": lam, "mu_hat": mu, "sig2": sig2, "dev": dev}


def upper_path(x, alpha, config=None):
    """Upper bound trajectory for scalar streams stored along the last axis.

    Returns ``(U, D)``, both with the shape of ``x``. Matches
    :class:`UpperVarianceTracker` step for step.
    """
    cfg = config or TrackerConfig()
    c = upper_components(x, alpha, cfg)
    lam, dev = c["lam"], c["dev"]
    resid2 = (dev - c["sig2"]) ** 2
    s_lam = np.cumsum(lam, axis=-1)
    d = _ratio_path(np.cumsum(lam * dev, axis=-1), s_lam, 0.0)
    r = _ratio_path(math.log(1 / alpha) + np.cumsum(psi_e(lam) * resid2, axis=-1),
                    s_lam, np.inf)
    return np.minimum(d + r, cfg.cap), d


def _lambda_path(m4, t, alpha, cfg):
    return lambda_upper(m4, t, alpha, cfg.c1, _horizon(cfg))


def lower_components(x, alpha, config=None, variant="gated"):
    """Predictable sequences behind :func:`lower_path`.

    Returns a dict with ``lam`` (after gating), ``mu_hat``, ``sig2``,
    ``dev``, the per-step quadratic coefficients ``a``, ``b``, ``c`` and
    the split ``alpha1``, ``alpha2``.
    """
    if variant not in LOWER_VARIANTS:
        raise ValueError(f"variant must be one of {LOWER_VARIANTS}")
    cfg = config or TrackerConfig()
    x = np.asarray(x, dtype=float)
    n = x.shape[-1]
    t = np.arange(1, n + 1, dtype=float)
    if variant == "double-eb":
        if cfg.horizon is None:
            raise ValueError("double-eb lower bound needs config.horizon")
        h = cfg.horizon
        a1 = alpha / h
        a2 = alpha * (h - 1) / h if h > 1 else alpha / 2
    else:
        a1, a2 = alpha_split(cfg.split, alpha, cfg.horizon)
    mu_bar = (cfg.c4 + _excl_cumsum(x)) / t
    sig2 = (cfg.c3 + _excl_cumsum((x - mu_bar) ** 2)) / t

    if variant == "double-eb":
        w = lambda_upper(sig2, t, a1 / 2, cfg.c1)
        s_w = _excl_cumsum(w)
        s_wpen = _excl_cumsum(psi_e(w) * (x - mu_bar) ** 2)
    else:
        w = lambda_tilde(sig2, t, a1, cfg.c5)
        s_w = _excl_cumsum(w)
        s_psi = _excl_cumsum(psi_p(w))
    mu_hat = _ratio_path(_excl_cumsum(w * x), s_w, 0.5)
    dev = (x - mu_hat) ** 2
    resid2 = (dev - sig2) ** 2
    m4 = (cfg.c2 + _excl_cumsum(resid2)) / t
    lam = _lambda_path(m4, t, a2, cfg)

    if variant == "double-eb":
        with np.errstate(divide="ignore", invalid="ignore"):
            rt = np.where(s_w > 0, (math.log(2 / a1) + s_wpen) / np.where(s_w > 0, s_w, 1),
                          np.inf)
        rt = np.minimum(rt, 1.0)
        a = b = np.zeros_like(x)
        c = rt * rt
    else:
        log_term = math.log(2 / a1)
        with np.errstate(divide="ignore", invalid="ignore"):
            stat = np.where(s_w > 0, (log_term + sig2 * s_psi) / np.where(s_w > 0, s_w, 1),
                            np.inf)
            inv2 = np.where(s_w > 0, 1.0 / np.where(s_w > 0, s_w, 1) ** 2, 0.0)
        inside = (t >= 2) & (stat <= 1)
        a = s_psi * s_psi * inv2
        b = 2 * log_term * s_psi * inv2
        c = np.where(t == 1, 0.25, log_term * log_term * inv2)
        if variant == "gated":
            lam = np.where(inside, lam, 0.0)
        else:
            a = np.where(inside, a, 0.0)
            b = np.where(inside, b, 0.0)
            c = np.where(inside, c, 1.0)
    return {"lam": lam, "mu_hat": mu_hat, "sig2": sig2, "dev": dev,
            "a": a, "b": b, "c": c, "alpha1": a1, "alpha2": a2}


def lower_path(x, alpha, config=None, variant="gated"):
    """Lower bound trajectory; returns ``(L, D)`` shaped like ``x``.

    Matches :class:`LowerVarianceTracker` step for step.
    """
    cfg = config or TrackerConfig()
    comp = lower_components(x, alpha, cfg, variant)
    lam, dev = comp["lam"], comp["dev"]
    resid2 = (dev - comp["sig2"]) ** 2
    a2 = comp["alpha2"]
    s_lam = np.cumsum(lam, axis=-1)
    d = _ratio_path(np.cumsum(lam * dev, axis=-1), s_lam, 0.0)
    r = _ratio_path(math.log(1 / a2) + np.cumsum(psi_e(lam) * resid2, axis=-1), s_lam, 0.0)
    qa = _ratio_path(np.cumsum(lam * comp["a"], axis=-1), s_lam, 0.0)
    qb = 1.0 + _ratio_path(np.cumsum(lam * comp["b"], axis=-1), s_lam, 0.0)
    qc = _ratio_path(np.cumsum(lam * comp["c"], axis=-1), s_lam, 0.0)
    k = np.where(s_lam > 0, d - qc - r, -np.inf)
    return np.minimum(solve_lower_quadratic(qa, qb, k), cfg.cap), d


def two_sided_path(x, config=None, lower_variant="gated"):
    """``(L, U)`` trajectories of :class:`VarianceConfidenceSequence`."""
    cfg = config or TrackerConfig()
    u, _ = upper_path(x, cfg.alpha / 2, cfg)
    l, _ = lower_path(x, cfg.alpha / 2, cfg, lower_variant)
    return np.minimum(l, u), u
