"""Input checks shared by the estimator wrappers and the CLI."""

import numpy as np
from sklearn.utils import check_array

from .hilbert import check_ball


def check_unit_interval(X, name="X"):
    """Return ``X`` as a 1-d float array with every entry in [0, 1].

    Accepts a 1-d sequence or a single-column 2-d array.
    """
    X = np.asarray(X, dtype=float)
    if X.ndim == 2 and X.shape[1] == 1:
        X = X[:, 0]
    X = check_array(X, ensure_2d=False, ensure_min_samples=0, input_name=name)
    if X.ndim != 1:
        raise ValueError(f"{name} must be 1-d or a single column, got shape {X.shape}")
    if X.size and (X.min() < 0 or X.max() > 1):
        raise ValueError(f"{name} must lie in [0, 1]; got range [{X.min()}, {X.max()}]")
    return X


def check_vectors(X, dim, name="X"):
    """Return ``X`` as an ``(n, dim)`` float array of vectors with norm <= 1/2."""
    X = check_array(X, ensure_min_samples=0, input_name=name)
    if X.shape[1] != dim:
        raise ValueError(f"{name} must have {dim} columns, got {X.shape[1]}")
    return check_ball(X) if X.size else X
