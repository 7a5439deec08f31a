"""Interval record returned by every tracker."""

from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True)
class Interval:
    """Lower/upper bounds for one target at time ``t``.

    ``lower`` and ``upper`` are floats for a single stream or arrays when
    a tracker runs a batch of independent streams side by side.
    """

    lower: object
    upper: object
    t: int = 0
    level: float = 0.95

    @property
    def width(self):
        return np.subtract(self.upper, self.lower)

    def contains(self, value):
        return (np.asarray(self.lower) <= value) & (value <= np.asarray(self.upper))

    def sqrt(self):
        """Map a variance interval to the standard-deviation scale."""
        return Interval(_sqrt(self.lower), _sqrt(self.upper), self.t, self.level)


def _sqrt(v):
    out = np.sqrt(np.maximum(v, 0.0))
    return float(out) if np.ndim(out) == 0 else out
