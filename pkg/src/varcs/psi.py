"""Cumulant-type penalty functions used by the Chernoff-style bounds.

``psi_e``  empirical Bernstein penalty, ``-log(1 - l) - l``
``psi_p``  Poisson/Bennett penalty, ``exp(l) - l - 1``
``psi_n``  sub-Gaussian penalty, ``l**2 / 2``

All three accept scalars or numpy arrays and return the same shape.
Small arguments are evaluated through truncated power series so the
results keep full relative precision (the closed forms lose digits to
cancellation there).
"""

import math

import numpy as np

# psi_e(l) = sum_{k>=2} l**k / k ; below 1/4 the 32-term tail is < 1e-17 relative
_PSI_E_SERIES_CUTOFF = 0.25
_PSI_E_COEFS = np.array([1.0 / k for k in range(32, 1, -1)])

# psi_p(l) = sum_{k>=2} l**k / k!
_PSI_P_SERIES_CUTOFF = 0.5
_PSI_P_COEFS = np.array([1.0 / math.factorial(k) for k in range(22, 1, -1)])


def _unwrap(out, scalar):
    return float(out) if scalar else out


def _horner(coefs, lam):
    acc = np.zeros_like(lam)
    for c in coefs:
        acc = acc * lam + c
    return acc * lam * lam


def psi_e(lam):
    """Empirical Bernstein penalty ``-log(1 - lam) - lam`` on ``[0, 1)``.

    Raises
    ------
    ValueError
        If any argument lies outside ``[0, 1)``.
    """
    scalar = np.ndim(lam) == 0
    lam = np.asarray(lam, dtype=float)
    if np.any(~((lam >= 0) & (lam < 1))):
        raise ValueError("psi_e is defined on [0, 1)")
    small = lam < _PSI_E_SERIES_CUTOFF
    big = np.where(small, 0.5, lam)
    out = np.where(small, _horner(_PSI_E_COEFS, np.where(small, lam, 0.0)),
                   -np.log1p(-big) - big)
    return _unwrap(out, scalar)


def psi_p(lam):
    """Bennett penalty ``exp(lam) - lam - 1`` for ``lam >= 0``."""
    scalar = np.ndim(lam) == 0
    lam = np.asarray(lam, dtype=float)
    if np.any(~(lam >= 0)):
        raise ValueError("psi_p is defined on [0, inf)")
    small = lam < _PSI_P_SERIES_CUTOFF
    big = np.where(small, 1.0, lam)
    with np.errstate(over="ignore"):
        closed = np.expm1(big) - big
    out = np.where(small, _horner(_PSI_P_COEFS, np.where(small, lam, 0.0)), closed)
    return _unwrap(out, scalar)


def psi_n(lam):
    """Sub-Gaussian penalty ``lam**2 / 2``."""
    scalar = np.ndim(lam) == 0
    lam = np.asarray(lam, dtype=float)
    return _unwrap(0.5 * lam * lam, scalar)
