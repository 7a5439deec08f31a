"""Variance confidence sequences for vector observations.

Observations live in a Euclidean space of fixed dimension ``d`` and must
satisfy ``||x|| <= 1/2``. Squares of scalar deviations become squared
norms; the mean estimates are vectors while the variance estimates stay
scalar. Both priors default to the centre of the ball (the origin), which
is the image of the scalar prior 1/2 under ``y -> y - 1/2``.
"""

import math

import numpy as np

from .config import TrackerConfig
from .variance_cs import VarianceConfidenceSequence

NORM_TOL = 1e-12


def check_ball(x, radius=0.5):
    """Validate that the last axis of ``x`` holds vectors of norm <= radius."""
    x = np.asarray(x, dtype=float)
    if x.ndim == 0:
        raise ValueError("vector observations need at least one axis")
    if not np.all(np.isfinite(x)):
        raise ValueError("observations must be finite")
    norms = np.linalg.norm(x, axis=-1)
    if np.any(norms > radius + NORM_TOL):
        raise ValueError(f"observation norm {norms.max():.6g} exceeds {radius}")
    return x


def vec_bennett_center_radius(sum_lt, sum_lt_x, sum_psi_p, sigma_sq, delta):
    """Centre and radius of the vector-valued anytime Bennett ball.

    Returns ``(nan vector, inf)`` when no weight has accumulated.
    """
    sum_lt_x = np.asarray(sum_lt_x, dtype=float)
    if sum_lt <= 0:
        return np.full(sum_lt_x.shape, np.nan), math.inf
    centre = sum_lt_x / sum_lt
    radius = (math.log(2 / delta) + sigma_sq * sum_psi_p) / sum_lt
    return centre, radius


class HilbertVarianceTracker(VarianceConfidenceSequence):
    """Two-sided variance sequence for ``E ||X - mu||^2`` with ``d``-vectors."""

    def __init__(self, dim, config=None, lower_variant="gated"):
        if dim < 1:
            raise ValueError("dim must be >= 1")
        self.dim = dim
        origin = np.zeros(dim)
        super().__init__(config or TrackerConfig(), vector=True, prior_mean=origin,
                         start_mean=origin, lower_variant=lower_variant)

    def update(self, x):
        x = check_ball(x)
        if x.shape[-1] != self.dim:
            raise ValueError(f"expected {self.dim} coordinates, got {x.shape[-1]}")
        return super().update(x)
