"""Empirical Bernstein confidence sequences for the variance of bounded data."""

__version__ = "0.1.0"

from .baselines import (
    AltLowerVarianceTracker,
    DecoupledVarianceTracker,
    DoubleEBLowerVarianceTracker,
    MPTracker,
    mp_std_interval,
)
from .config import TrackerConfig
from .estimator import HilbertVarianceCS, VarianceCS
from .hilbert import HilbertVarianceTracker
from .interval import Interval
from .mean_cs import BennettMeanTracker, EBMeanTracker
from .psi import psi_e, psi_n, psi_p
from .variance_cs import (
    LowerVarianceTracker,
    UpperVarianceTracker,
    VarianceConfidenceSequence,
    alpha_split,
    lower_path,
    solve_lower_quadratic,
    two_sided_path,
    upper_path,
)
