"""Predictable running estimators and the plug-in lambda schedules.

Every quantity produced here for index ``t`` only depends on the
observations ``1..t-1``; the state objects expose the value for the next
index and are advanced with :meth:`EstimatorState.update` once the
observation arrives.
"""

from dataclasses import dataclass
import math

import numpy as np


def sqdist(x, m, vector=False):
    """Squared distance between observations and centres.

    Scalars use ``(x - m)**2``; in vector mode the last axis holds the
    coordinates and the squared Euclidean norm is returned.
    """
    d = np.subtract(x, m)
    if vector:
        return np.sum(d * d, axis=-1)
    return d * d


@dataclass
class EstimatorState:
    """Running sums behind the predictable mean and variance estimates.

    ``mu_bar`` is ``(c4 + sum_{i<t} X_i) / t`` and ``sigma_hat_sq`` is
    ``(c3 + sum_{i<t} (X_i - mu_bar_i)**2) / t``, both for the index
    ``t = self.t + 1`` that the next observation will carry. ``c4`` may
    be a vector (the prior centre) in vector mode.
    """

    c3: float = 0.25
    c4: object = 0.5
    vector: bool = False
    t: int = 0
    sum_x: object = 0.0
    sum_sq_dev: object = 0.0

    def mu_bar(self):
        return (self.c4 + self.sum_x) / (self.t + 1)

    def sigma_hat_sq(self):
        return (self.c3 + self.sum_sq_dev) / (self.t + 1)

    def update(self, x):
        self.sum_sq_dev = self.sum_sq_dev + sqdist(x, self.mu_bar(), self.vector)
        self.sum_x = self.sum_x + x
        self.t += 1


def _check_t(t):
    if np.any(np.asarray(t) < 1):
        raise ValueError("time index must be >= 1")


def mu_bar(sum_x, t, c4=0.5):
    """``(c4 + sum_{i<t} X_i) / t``."""
    _check_t(t)
    return (c4 + sum_x) / t


def sigma_hat_sq(sum_sq_dev, t, c3=0.25):
    """``(c3 + sum_{i<t} (X_i - mu_bar_i)^2) / t``."""
    _check_t(t)
    return (c3 + sum_sq_dev) / t


def m4_hat_sq(sum_m4_dev, t, c2=1.0 / 16):
    """``(c2 + sum_{i<t} [(X_i - mu_hat_i)^2 - sigma_hat_i^2]^2) / t``."""
    _check_t(t)
    return (c2 + sum_m4_dev) / t


def _root_capped(numer, denom, cap, name):
    denom = np.asarray(denom, dtype=float)
    if np.any(denom < 0):
        raise ValueError(f"{name} must be nonnegative")
    with np.errstate(divide="ignore", invalid="ignore", over="ignore"):
        out = np.sqrt(numer / denom)
    # 0/0 only arises with a zero log term, where no weight is warranted
    out = np.minimum(np.where(np.isnan(out), 0.0, out), cap)
    return float(out) if out.ndim == 0 else out


def lambda_cs_upper(m4sq, t, alpha, c1=0.5):
    """Confidence-sequence plug-in ``sqrt(2 log(1/a) / (m4sq t log(1+t))) ^ c1``.

    ``m4sq`` must be positive; zero is only reachable with
    ``c2 = 0`` and then maps to the cap ``c1``.
    """
    _check_t(t)
    m4sq = np.asarray(m4sq, dtype=float)
    if np.any(m4sq < 0):
        raise ValueError("m4sq must be positive")
    return _root_capped(2 * math.log(1 / alpha), m4sq * t * np.log1p(t), c1, "m4sq")


def lambda_ci_upper(m4sq, n, alpha, c1=0.5):
    """Fixed-horizon plug-in ``sqrt(2 log(1/a) / (m4sq n)) ^ c1``."""
    if n < 1:
        raise ValueError("horizon must be >= 1")
    m4sq = np.asarray(m4sq, dtype=float)
    if np.any(m4sq < 0):
        raise ValueError("m4sq must be positive")
    return _root_capped(2 * math.log(1 / alpha), m4sq * n, c1, "m4sq")


def lambda_upper(m4sq, t, alpha, c1=0.5, horizon=None):
    """Dispatch to the CS schedule, or the CI one when ``horizon`` is set."""
    if horizon is None:
        return lambda_cs_upper(m4sq, t, alpha, c1)
    return lambda_ci_upper(m4sq, horizon, alpha, c1)


def lambda_tilde(sigma_hat_sq, t, alpha, c5=2.0):
    """Bennett plug-in ``sqrt(2 log(2/a) / (sigma_hat_sq t log(1+t))) ^ c5``."""
    _check_t(t)
    s = np.asarray(sigma_hat_sq, dtype=float)
    if np.any(s < 0):
        raise ValueError("sigma_hat_sq must be positive")
    return _root_capped(2 * math.log(2 / alpha), s * t * np.log1p(t), c5, "sigma_hat_sq")


def gate_statistic(sum_lt, sum_psi_p, sigma_hat_sq, alpha1):
    """Plug-in estimate of the Bennett mean radius from past sums.

    Returns ``inf`` when no Bennett weight has accumulated.
    """
    sum_lt = np.asarray(sum_lt, dtype=float)
    with np.errstate(divide="ignore", invalid="ignore"):
        stat = (math.log(2 / alpha1) + sigma_hat_sq * sum_psi_p) / sum_lt
    stat = np.where(sum_lt > 0, stat, np.inf)
    return float(stat) if stat.ndim == 0 else stat


def lambda_lower_gate(candidate_lambda, t, sum_lt, sum_psi_p, sigma_hat_sq, alpha1):
    """Zero the lower-bound plug-in while the mean radius estimate exceeds 1.

    ``sum_lt`` and ``sum_psi_p`` are the Bennett sums over ``1..t-1``.
    """
    t = np.asarray(t)
    open_ = (t >= 2) & (gate_statistic(sum_lt, sum_psi_p, sigma_hat_sq, alpha1) <= 1)
    out = np.where(open_, candidate_lambda, 0.0)
    return float(out) if out.ndim == 0 else out
