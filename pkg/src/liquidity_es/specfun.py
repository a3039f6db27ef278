"""Special functions used by the generalized hyperbolic characteristic functions.

Only two functions are needed: the modified Bessel function of the third
kind ``K_lambda(x)`` for arbitrary real order, and ``log Gamma``.  Both are
thin, validated wrappers around :mod:`scipy.special`; ``log_bessel_k`` is the
workhorse since the characteristic functions take ratios of Bessel values at
arguments where ``K`` itself under- or overflows.
"""

import math

import numpy as np
from scipy import special

__all__ = ["bessel_k", "log_bessel_k", "log_gamma"]


def _check_positive(x, name):
    arr = np.asarray(x, dtype=float)
    if not np.all(np.isfinite(arr)):
        raise ValueError(f"{name} must be finite")
    if np.any(arr <= 0):
        raise ValueError(f"{name} must be strictly positive")
    return arr


def _check_order(order):
    order = abs(float(order))
    if not math.isfinite(order):
        raise ValueError("order must be finite")
    # scipy returns nan for subnormal orders; K is flat in the order at 0
    return 0.0 if order < 1e-300 else order


def bessel_k(order, x):
    """Modified Bessel function of the third kind ``K_order(x)``.

    Parameters
    ----------
    order : float
        Any finite real order.  ``K`` is even in the order.
    x : float or array_like
        Strictly positive argument.

    Returns
    -------
    float or ndarray
        ``K_order(x)``.  Underflows to ``0.0`` for large ``x`` (beyond ~700)
        instead of raising.

    Raises
    ------
    ValueError
        If ``x <= 0`` or any input is not finite.
    """
    order = _check_order(order)
    arr = _check_positive(x, "x")
    out = special.kv(order, arr)
    return float(out) if np.ndim(out) == 0 else out


def log_bessel_k(order, x):
    """Natural log of ``K_order(x)``, accurate where ``K`` itself is not representable.

    Uses the exponentially scaled ``kve`` so that ``log K = log kve - x``
    stays finite for arguments far beyond the underflow point of ``kv``.
    """
    order = _check_order(order)
    arr = _check_positive(x, "x")
    out = np.log(special.kve(order, arr)) - arr
    return float(out) if np.ndim(out) == 0 else out


def log_gamma(x):
    """``ln Gamma(x)`` for ``x > 0``."""
    arr = _check_positive(x, "x")
    out = special.gammaln(arr)
    return float(out) if np.ndim(out) == 0 else out
