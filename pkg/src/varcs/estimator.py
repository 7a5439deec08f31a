"""scikit-learn style wrappers around the streaming variance trackers."""

import numpy as np
from sklearn.base import BaseEstimator
from sklearn.utils.validation import check_is_fitted

from ._validation import check_unit_interval, check_vectors
from .config import TrackerConfig
from .hilbert import HilbertVarianceTracker
from .variance_cs import VarianceConfidenceSequence


class VarianceCS(BaseEstimator):
    """Confidence sequence (or interval) for the variance of a [0, 1] stream.

    ``fit`` starts from scratch and ``partial_fit`` continues the same
    sequence, so feeding a stream in chunks gives exactly the bounds of
    feeding it at once.

    Parameters
    ----------
    alpha : float
        Total miscoverage; each side gets ``alpha / 2``.
    mode : {"cs", "ci"}
        Time-uniform plug-ins, or plug-ins tuned to ``horizon``.
    horizon : int, optional
        Needed in CI mode and by ``lower="double-eb"``.
    split : {"halves", "log-horizon"}
        Budget split of the lower bound.
    lower : {"gated", "alt", "double-eb"}
        Construction of the lower bound.
    cap : float
        Clamp for the upper bound (1/4 is always valid).
    running_intersection : bool
    c1, c2, c3, c4, c5 : float
        Plug-in constants.

    Attributes
    ----------
    lower_, upper_ : float
        Current variance bounds.
    path_ : ndarray of shape (n_samples, 2)
        ``[lower, upper]`` after each sample of the last ``fit`` /
        ``partial_fit`` call.
    n_samples_seen_ : int
    tracker_ : VarianceConfidenceSequence
    """

    def __init__(self, alpha=0.05, mode="cs", horizon=None, split="halves", lower="gated",
                 cap=1.0, running_intersection=False, c1=0.5, c2=1 / 16, c3=0.25, c4=0.5,
                 c5=2.0):
        self.alpha = alpha
        self.mode = mode
        self.horizon = horizon
        self.split = split
        self.lower = lower
        self.cap = cap
        self.running_intersection = running_intersection
        self.c1 = c1
        self.c2 = c2
        self.c3 = c3
        self.c4 = c4
        self.c5 = c5

    def _config(self):
        return TrackerConfig(alpha=self.alpha, mode=self.mode, horizon=self.horizon,
                             split=self.split, c1=self.c1, c2=self.c2, c3=self.c3,
                             c4=self.c4, c5=self.c5, cap=self.cap,
                             running_intersection=self.running_intersection)

    def _new_tracker(self):
        return VarianceConfidenceSequence(self._config(), lower_variant=self.lower)

    def _check(self, X):
        return check_unit_interval(X)

    def fit(self, X, y=None):
        """Reset and consume ``X`` in order."""
        self.tracker_ = self._new_tracker()
        self.n_samples_seen_ = 0
        return self.partial_fit(X)

    def partial_fit(self, X, y=None):
        """Consume ``X`` in order, continuing from the current state."""
        X = self._check(X)
        if not hasattr(self, "tracker_"):
            self.tracker_ = self._new_tracker()
            self.n_samples_seen_ = 0
        path = np.empty((len(X), 2))
        for i, x in enumerate(X):
            iv = self.tracker_.update(x)
            path[i] = iv.lower, iv.upper
        self.path_ = path
        self.n_samples_seen_ += len(X)
        iv = self.tracker_.interval()
        self.lower_, self.upper_ = iv.lower, iv.upper
        return self

    def interval(self):
        check_is_fitted(self, "tracker_")
        return self.tracker_.interval()

    def std_interval(self):
        """Bounds for the standard deviation."""
        return self.interval().sqrt()


class HilbertVarianceCS(VarianceCS):
    """:class:`VarianceCS` for vectors of norm at most 1/2 (``X`` of shape (n, dim))."""

    def __init__(self, dim=1, alpha=0.05, mode="cs", horizon=None, split="halves",
                 lower="gated", cap=1.0, running_intersection=False, c1=0.5, c2=1 / 16,
                 c3=0.25, c4=0.5, c5=2.0):
        super().__init__(alpha=alpha, mode=mode, horizon=horizon, split=split, lower=lower,
                         cap=cap, running_intersection=running_intersection, c1=c1, c2=c2,
                         c3=c3, c4=c4, c5=c5)
        self.dim = dim

    def _new_tracker(self):
        return HilbertVarianceTracker(self.dim, self._config(), lower_variant=self.lower)

    def _check(self, X):
        return check_vectors(X, self.dim)
