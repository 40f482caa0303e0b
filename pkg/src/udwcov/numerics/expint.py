"""Exponential integral Ei(x) in double precision.

Three regimes:

* ``|x| <= 1`` and ``0 < x <= 40``: power series ``gamma + ln|x| + sum x^k / (k k!)``
* ``x < -1``: ``Ei(x) = -E1(-x)`` with E1 from its continued fraction
  (modified Lentz)
* ``x > 40``: divergent asymptotic series truncated at its smallest term

The series/continued-fraction seam sits at ``|x| = 1`` rather than further out:
the alternating series for negative arguments loses roughly
``log10(max term / |Ei(x)|)`` digits to cancellation, which is already ~4 digits
at ``x = -6``.
"""

from __future__ import annotations

import numpy as np

EULER_GAMMA = 0.57721566490153286060651209008240243

_SERIES_CROSSOVER = 1.0
_ASYMPTOTIC_CROSSOVER = 40.0
_POLE_GUARD = 1e-300
_EPS = np.finfo(float).eps
_TINY = 1e-300


class PoleError(ValueError):
    """Ei was requested at (or numerically indistinguishable from) x = 0."""


def _series(x: np.ndarray) -> np.ndarray:
    total = np.zeros_like(x)
    term = np.ones_like(x)
    active = np.ones(x.shape, dtype=bool)
    k = 0
    while active.any():
        k += 1
        term = term * x / k
        contrib = term / k
        total = total + np.where(active, contrib, 0.0)
        active &= np.abs(contrib) > _EPS * 0.25 * np.maximum(np.abs(total), _TINY)
        if k > 200:
            break
    return EULER_GAMMA + np.log(np.abs(x)) + total


def _e1_continued_fraction(z: np.ndarray) -> np.ndarray:
    # E1(z) = e^{-z} / (z + 1 - 1^2/(z + 3 - 2^2/(z + 5 - ...))), z >= 1
    b = z + 1.0
    c = np.full_like(z, 1.0 / _TINY)
    d = 1.0 / b
    h = d.copy()
    active = np.ones(z.shape, dtype=bool)
    i = 0
    while active.any():
        i += 1
        an = -float(i * i)
        b = b + 2.0
        d = 1.0 / (an * d + b)
        c = b + an / c
        delta = c * d
        h = np.where(active, h * delta, h)
        active &= np.abs(delta - 1.0) > _EPS
        if i > 500:
            break
    return h * np.exp(-z)


def _asymptotic(x: np.ndarray) -> np.ndarray:
    total = np.ones_like(x)
    term = np.ones_like(x)
    active = np.ones(x.shape, dtype=bool)
    k = 0
    while active.any():
        k += 1
        nxt = term * k / x
        shrinking = np.abs(nxt) < np.abs(term)
        active &= shrinking
        term = np.where(active, nxt, term)
        total = total + np.where(active, nxt, 0.0)
        active &= np.abs(nxt) > _EPS * 0.25 * np.abs(total)
    with np.errstate(over="ignore"):
        return np.exp(x) / x * total


def expint_ei(x):
    """Exponential integral Ei(x), principal value for x > 0.

    Accepts scalars or arrays. For x < 0 this equals ``-E1(-x)``: negative,
    increasing toward 0 as x decreases toward -inf.

    Raises
    ------
    PoleError
        if any ``|x| < 1e-300`` (Ei has a logarithmic pole at 0).
    """
    arr = np.asarray(x, dtype=float)
    if np.any(np.abs(arr) < _POLE_GUARD):
        raise PoleError("Ei(x) has a logarithmic pole at x = 0")
    if np.any(np.isnan(arr)):
        raise ValueError("Ei(x) is undefined for NaN input")

    flat = arr.reshape(-1)
    out = np.empty_like(flat)

    neg_far = flat < -_SERIES_CROSSOVER
    pos_far = flat > _ASYMPTOTIC_CROSSOVER
    near = ~(neg_far | pos_far)

    if near.any():
        out[near] = _series(flat[near])
    if neg_far.any():
        z = -flat[neg_far]
        res = np.zeros_like(z)
        finite = np.isfinite(z)
        res[finite] = -_e1_continued_fraction(z[finite])
        out[neg_far] = res
    if pos_far.any():
        out[pos_far] = _asymptotic(flat[pos_far])

    out = out.reshape(arr.shape)
    if out.ndim == 0:
        return float(out)
    return out


def expint_e1(z):
    """E1(z) = -Ei(-z) for z > 0."""
    arr = np.asarray(z, dtype=float)
    if np.any(arr <= 0):
        raise ValueError("E1 is only provided for z > 0")
    return -expint_ei(-arr)
