"""Confidence sequences for the mean of a bounded stream.

Two constructions are provided: the empirical Bernstein sequence, which
needs nothing beyond the [0, 1] bound, and the anytime-valid Bennett
sequence, which needs the (common conditional) variance. The Bennett
radius is quadratic in the variance; :func:`bennett_radius_coeffs`
exposes that polynomial for the variance lower bound.
"""

import math

import numpy as np

from ._state import Snapshot
from .config import TrackerConfig
from .estimators import EstimatorState, lambda_tilde, lambda_upper
from .interval import Interval
from .psi import psi_e, psi_p


def _f(v):
    return float(v) if np.ndim(v) == 0 else v


def _weighted_interval(sum_w, sum_wx, radius, t, level, lo=0.0, hi=1.0):
    sum_w = np.asarray(sum_w, dtype=float)
    pos = sum_w > 0
    with np.errstate(divide="ignore", invalid="ignore"):
        center = np.where(pos, sum_wx / np.where(pos, sum_w, 1.0), 0.5 * (lo + hi))
    radius = np.where(pos, radius, np.inf)
    lower = np.clip(center - radius, lo, hi)
    upper = np.clip(center + radius, lo, hi)
    return Interval(_f(lower), _f(upper), t, level)


def eb_mean_radius(sum_lam, sum_pen, delta, sides=2):
    """``(log(sides/delta) + sum psi_E(lam)(X - mu_hat)^2) / sum lam``; inf if no weight."""
    sum_lam = np.asarray(sum_lam, dtype=float)
    with np.errstate(divide="ignore", invalid="ignore"):
        r = (math.log(sides / delta) + sum_pen) / sum_lam
    return _f(np.where(sum_lam > 0, r, np.inf))


def eb_mean_interval(sum_lam, sum_lam_x, sum_pen, delta, t=0):
    """Two-sided empirical Bernstein interval for the mean, clipped to [0, 1]."""
    r = eb_mean_radius(sum_lam, sum_pen, delta)
    return _weighted_interval(sum_lam, sum_lam_x, r, t, 1 - delta)


def bennett_radius(sum_lt, sum_psi_p, sigma_sq, delta):
    """``(log(2/delta) + sigma^2 sum psi_P(lt)) / sum lt``; inf if no weight."""
    sum_lt = np.asarray(sum_lt, dtype=float)
    with np.errstate(divide="ignore", invalid="ignore"):
        r = (math.log(2 / delta) + sigma_sq * sum_psi_p) / sum_lt
    return _f(np.where(sum_lt > 0, r, np.inf))


def bennett_mean_interval(sum_lt, sum_lt_x, sum_psi_p, sigma_sq, delta, t=0):
    """Anytime-valid Bennett interval for the mean given the variance."""
    r = bennett_radius(sum_lt, sum_psi_p, sigma_sq, delta)
    return _weighted_interval(sum_lt, sum_lt_x, r, t, 1 - delta)


def bennett_radius_coeffs(sum_lt, sum_psi_p, delta):
    """Coefficients ``(A, B, C)`` with ``radius**2 = A s^4 + B s^2 + C``.

    ``s^2`` is the variance; the sums run over the indices before the
    current one and ``sum_lt`` must be positive.
    """
    sum_lt = np.asarray(sum_lt, dtype=float)
    if np.any(sum_lt <= 0):
        raise ValueError("Bennett sums are empty; use the t=1 convention")
    log_term = math.log(2 / delta)
    inv2 = 1.0 / (sum_lt * sum_lt)
    a = sum_psi_p * sum_psi_p * inv2
    b = 2 * log_term * sum_psi_p * inv2
    c = log_term * log_term * inv2
    return _f(a), _f(b), _f(c)


class EBMeanTracker(Snapshot):
    """Streaming empirical Bernstein confidence sequence for the mean.

    The plug-ins follow the variance-adaptive schedule with the running
    variance estimate in place of the fourth-moment one; the penalty is
    centred at the predictable mean ``mu_bar``. ``prior_mean`` replaces
    ``config.c4`` when given (useful when tracking ``X**2``).
    """

    def __init__(self, delta=0.05, config=None, prior_mean=None):
        self.config = config or TrackerConfig()
        self.delta = delta
        c4 = self.config.c4 if prior_mean is None else prior_mean
        self.est = EstimatorState(c3=self.config.c3, c4=c4)
        self.sum_lam = 0.0
        self.sum_lam_x = 0.0
        self.sum_pen = 0.0

    @property
    def t(self):
        return self.est.t

    def next_lambda(self):
        cfg = self.config
        horizon = cfg.horizon if cfg.mode == "ci" else None
        return lambda_upper(self.est.sigma_hat_sq(), self.t + 1, self.delta / 2,
                            cfg.c1, horizon)

    def update(self, x):
        lam = self.next_lambda()
        centre = self.est.mu_bar()
        self.sum_lam = self.sum_lam + lam
        self.sum_lam_x = self.sum_lam_x + lam * x
        self.sum_pen = self.sum_pen + psi_e(lam) * (x - centre) ** 2
        self.est.update(x)
        return self.interval()

    def radius(self, delta=None, sides=2):
        return eb_mean_radius(self.sum_lam, self.sum_pen,
                              self.delta if delta is None else delta, sides)

    def center(self):
        s = np.asarray(self.sum_lam, dtype=float)
        with np.errstate(divide="ignore", invalid="ignore"):
            return _f(np.where(s > 0, self.sum_lam_x / np.where(s > 0, s, 1.0), 0.5))

    def interval(self):
        return _weighted_interval(self.sum_lam, self.sum_lam_x, self.radius(),
                                  self.t, 1 - self.delta)

    def one_sided(self, delta):
        """Lower and upper one-sided bounds, each holding at level ``1 - delta``."""
        r = self.radius(delta, sides=1)
        c = self.center()
        return _f(np.maximum(c - r, 0.0)), _f(np.minimum(c + r, 1.0))


class BennettMeanTracker(Snapshot):
    """Streaming anytime-valid Bennett sequence for the mean (variance known)."""

    def __init__(self, sigma_sq, delta=0.05, config=None):
        self.config = config or TrackerConfig()
        self.sigma_sq = sigma_sq
        self.delta = delta
        self.est = EstimatorState(c3=self.config.c3, c4=self.config.c4)
        self.sum_lt = 0.0
        self.sum_lt_x = 0.0
        self.sum_psi_p = 0.0

    @property
    def t(self):
        return self.est.t

    def update(self, x):
        lt = lambda_tilde(self.est.sigma_hat_sq(), self.t + 1, self.delta, self.config.c5)
        self.sum_lt = self.sum_lt + lt
        self.sum_lt_x = self.sum_lt_x + lt * x
        self.sum_psi_p = self.sum_psi_p + psi_p(lt)
        self.est.update(x)
        return bennett_mean_interval(self.sum_lt, self.sum_lt_x, self.sum_psi_p,
                                     self.sigma_sq, self.delta, self.t)
