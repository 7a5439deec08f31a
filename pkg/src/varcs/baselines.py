"""Competing variance bounds used for comparison.

* Maurer-Pontil interval for the standard deviation (iid data, fixed n).
* The decoupled construction ``Var X = E X^2 - (E X)^2`` with one
  empirical Bernstein sequence per moment.
* The alternative lower plug-ins and the double empirical Bernstein
  lower bound, both thin wrappers over :class:`LowerVarianceTracker`.
"""

import math

import numpy as np

from .config import TrackerConfig
from .interval import Interval
from .mean_cs import EBMeanTracker
from ._state import Snapshot
from .variance_cs import LowerVarianceTracker

# predictable second-moment prior for the X**2 stream
M2_PRIOR = 0.25


def _f(v):
    return float(v) if np.ndim(v) == 0 else v


def mp_radius(n, delta):
    """Half-width ``sqrt(2 log(2/delta) / (n - 1))`` of the two-sided MP interval."""
    n = np.asarray(n, dtype=float)
    if np.any(n < 2):
        raise ValueError("the Maurer-Pontil bound needs n >= 2")
    return _f(np.sqrt(2 * math.log(2 / delta) / (n - 1)))


def mp_std_from_moments(n, sample_var, delta, cap=1.0):
    """MP interval for sigma from the unbiased sample variance of ``n`` points."""
    s = np.sqrt(np.maximum(sample_var, 0.0))
    r = mp_radius(n, delta)
    hi = math.sqrt(cap)
    return Interval(_f(np.clip(s - r, 0.0, hi)), _f(np.clip(s + r, 0.0, hi)),
                    int(np.max(n)), 1 - delta)


def mp_std_interval(samples, delta=0.05, cap=1.0):
    """Two-sided Maurer-Pontil confidence interval for the standard deviation.

    Each side holds with probability ``1 - delta/2`` by the
    self-bounding concentration of the sample variance; the data must be
    iid in [0, 1].

    Examples
    --------
    >>> iv = mp_std_interval([0.3] * 101, delta=0.1)
    >>> round(iv.upper, 4)
    0.2448
    """
    x = np.asarray(samples, dtype=float)
    if x.ndim != 1 or x.size < 2:
        raise ValueError("need a 1-d sample with at least two points")
    return mp_std_from_moments(x.size, x.var(ddof=1), delta, cap)


class MPTracker(Snapshot):
    """Running sample variance (Welford) feeding the MP interval at each n.

    Every reported interval is a fixed-n interval; the sequence as a
    whole carries no time-uniform guarantee.
    """

    def __init__(self, delta=0.05, cap=1.0):
        self.delta = delta
        self.cap = cap
        self.n = 0
        self.mean = 0.0
        self.m2 = 0.0

    def update(self, x):
        self.n += 1
        d = x - self.mean
        self.mean = self.mean + d / self.n
        self.m2 = self.m2 + d * (x - self.mean)
        return self.std_interval()

    def std_interval(self):
        if self.n < 2:
            hi = math.sqrt(self.cap)
            z = np.zeros(np.shape(self.mean))
            return Interval(_f(z), _f(z + hi), self.n, 1 - self.delta)
        return mp_std_from_moments(self.n, self.m2 / (self.n - 1), self.delta, self.cap)

    def interval(self):
        """Variance-scale version of :meth:`std_interval`."""
        iv = self.std_interval()
        return Interval(_f(np.square(iv.lower)), _f(np.square(iv.upper)), iv.t, iv.level)


class DecoupledVarianceTracker(Snapshot):
    """Variance bounds from separate sequences for ``E X^2`` and ``E X``.

    ``upper = U1 - max(L2, 0)^2`` and ``lower = max(L1 - U2^2, 0)`` where
    ``(L1, U1)`` bound the second moment at one-sided level ``alpha1`` and
    ``(L2, U2)`` bound the mean at ``alpha2``. With the defaults
    ``alpha1 = alpha2 = alpha/4`` the pair is a two-sided ``1 - alpha``
    sequence.
    """

    def __init__(self, config=None, alpha1=None, alpha2=None):
        self.config = cfg = config or TrackerConfig()
        self.alpha1 = cfg.alpha / 4 if alpha1 is None else alpha1
        self.alpha2 = cfg.alpha / 4 if alpha2 is None else alpha2
        # a two-sided EB sequence at 2a has one-sided sides at level a
        self.second = EBMeanTracker(2 * self.alpha1, cfg, prior_mean=M2_PRIOR)
        self.first = EBMeanTracker(2 * self.alpha2, cfg)

    @property
    def t(self):
        return self.first.t

    def update(self, x):
        self.second.update(np.square(x))
        self.first.update(x)
        return self.interval()

    def upper_value(self):
        _, u1 = self.second.one_sided(self.alpha1)
        l2, _ = self.first.one_sided(self.alpha2)
        return _f(np.clip(u1 - np.square(np.maximum(l2, 0.0)), 0.0, self.config.cap))

    def lower_value(self):
        l1, _ = self.second.one_sided(self.alpha1)
        _, u2 = self.first.one_sided(self.alpha2)
        return _f(np.maximum(l1 - np.square(np.minimum(u2, 1.0)), 0.0))

    def interval(self):
        u = self.upper_value()
        return Interval(_f(np.minimum(self.lower_value(), u)), u, self.t,
                        1 - self.config.alpha)


class AltLowerVarianceTracker(LowerVarianceTracker):
    """Lower bound that keeps every plug-in and charges a unit mean radius
    on steps where the estimated Bennett radius exceeds 1."""

    def __init__(self, alpha=None, config=None, **kw):
        super().__init__(alpha, config, variant="alt", **kw)


class DoubleEBLowerVarianceTracker(LowerVarianceTracker):
    """Lower bound whose mean error is bounded by an empirical Bernstein
    radius (capped at 1) with ``alpha1 = alpha / horizon``."""

    def __init__(self, alpha=None, config=None, **kw):
        super().__init__(alpha, config, variant="double-eb", **kw)
