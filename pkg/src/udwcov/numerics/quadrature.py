"""Globally adaptive Gauss-Kronrod (G7/K15) quadrature.

Integrands are called with a 1-D array of abscissae and must return either an
array of the same length or an ``(n, k)`` array for vector-valued integrands.
Subdivision is driven by the error of component 0; the remaining components
ride along on the same panels. ``quad_nested_2d`` uses this to carry the inner
error estimate as a second component so both levels show up in the total.
"""

from __future__ import annotations

import heapq
import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

# Kronrod 15-point abscissae (non-negative half) and weights; Gauss 7-point
# nodes are the odd entries.
_XGK = np.array([
    0.991455371120812639206854697526329,
    0.949107912342758524526189684047851,
    0.864864423359769072789712788640926,
    0.741531185599394439863864773280788,
    0.586087235467691130294144845693013,
    0.405845151377397166906606412076961,
    0.207784955007898467600689403773245,
    0.000000000000000000000000000000000,
])
_WGK = np.array([
    0.022935322010529224963732008058970,
    0.063092092629978553290700663189204,
    0.104790010322250183839876322541518,
    0.140653259715525918745189590510238,
    0.169004726639267902826583426598550,
    0.190350578064785409913256402421014,
    0.204432940075298892414161999234649,
    0.209482141084727828012999174891714,
])
_WG = np.array([
    0.129484966168869693270611432679082,
    0.279705391489276667901467771423780,
    0.381830050505118944950369775488975,
    0.417959183673469387755102040816327,
])

NODES = np.concatenate([-_XGK[:-1], _XGK[::-1]])
KRONROD_WEIGHTS = np.concatenate([_WGK[:-1], _WGK[::-1]])
GAUSS_WEIGHTS = np.zeros(15)
GAUSS_WEIGHTS[[1, 3, 5]] = _WG[:3]
GAUSS_WEIGHTS[[9, 11, 13]] = _WG[2::-1]
GAUSS_WEIGHTS[7] = _WG[3]

_EPS = np.finfo(float).eps


@dataclass(frozen=True)
class QuadratureSpec:
    abs_tol: float = 1e-12
    rel_tol: float = 1e-8
    max_subdivisions: int = 2000
    truncation_sigma: float = 12.0

    def __post_init__(self):
        if not (self.abs_tol > 0 and self.rel_tol > 0):
            raise ValueError("quadrature tolerances must be positive")
        if self.max_subdivisions < 1:
            raise ValueError("max_subdivisions must be >= 1")
        if self.truncation_sigma < 6:
            raise ValueError("truncation_sigma must be >= 6")

    def scaled(self, factor: float) -> "QuadratureSpec":
        """Same spec with ``abs_tol`` divided by ``factor``.

        Used when the integral is multiplied by a known prefactor afterwards,
        so that the tolerance applies to the final value.
        """
        return QuadratureSpec(self.abs_tol / factor, self.rel_tol,
                              self.max_subdivisions, self.truncation_sigma)


class NonConvergenceError(RuntimeError):
    """Raised when the subdivision budget runs out before tolerance is met.

    The best available estimate is attached as ``value`` and ``error``.
    """

    def __init__(self, message, value, error):
        super().__init__(f"{message} (best estimate {value!r} +/- {error:.3g})")
        self.value = value
        self.error = error


def _panel(f, a, b, drive_all=False):
    center = 0.5 * (a + b)
    half = 0.5 * (b - a)
    fx = np.asarray(f(center + half * NODES), dtype=float)
    if fx.ndim == 1:
        fx = fx[:, None]
    kron = half * (KRONROD_WEIGHTS @ fx)
    gauss = half * (GAUSS_WEIGHTS @ fx)
    if not np.all(np.isfinite(kron)):
        raise FloatingPointError(f"non-finite integrand on panel [{a}, {b}]")
    # QUADPACK error heuristic, per driving component
    cols = slice(None) if drive_all else slice(0, 1)
    fd = fx[:, cols]
    kd = kron[cols]
    resabs = abs(half) * (KRONROD_WEIGHTS @ np.abs(fd))
    mean = kd / (2.0 * half) if half != 0 else np.zeros_like(kd)
    resasc = abs(half) * (KRONROD_WEIGHTS @ np.abs(fd - mean))
    err = np.abs(kd - gauss[cols])
    ok = (resasc != 0.0) & (err != 0.0)
    err[ok] = resasc[ok] * np.minimum(1.0, (200.0 * err[ok] / resasc[ok]) ** 1.5)
    err = np.maximum(err, 50 * _EPS * resabs)
    return kron, float(err.sum())


def _map_domain(f, a, b, singular):
    """Return (g, lo, hi) with int_a^b f = int_lo^hi g on a finite interval."""
    if a == b:
        return f, 0.0, 0.0
    sign = 1.0
    if a > b:
        a, b, sign = b, a, -1.0
        singular = {"left": "right", "right": "left"}.get(singular, singular)

    if math.isinf(a) and math.isinf(b):
        raise ValueError("doubly infinite domains must be split by the caller")

    if math.isinf(b):
        base = f

        def g(u):
            x = a + u / (1.0 - u)
            jac = 1.0 / (1.0 - u) ** 2
            return _scale(base(x), sign * jac)

        lo, hi = 0.0, 1.0
    elif math.isinf(a):
        base = f

        def g(u):
            x = b - u / (1.0 - u)
            jac = 1.0 / (1.0 - u) ** 2
            return _scale(base(x), sign * jac)

        lo, hi = 0.0, 1.0
        singular = {"left": "right", "right": "left"}.get(singular, singular)
    else:
        base = f

        def g(x):
            return _scale(base(x), sign)

        lo, hi = a, b

    if singular is None:
        return g, lo, hi
    if singular not in ("left", "right", "both"):
        raise ValueError(f"unknown singular endpoint marker {singular!r}")

    # Cubic endpoint clustering x = lo + L u^3 (or mirrored). A log singularity
    # becomes u^2 log(u), which the Kronrod rule resolves with a few splits.
    length = hi - lo
    inner = g
    if singular == "left":
        def h(u):
            return _scale(inner(lo + length * u**3), 3.0 * length * u**2)
        return h, 0.0, 1.0
    if singular == "right":
        def h(u):
            return _scale(inner(hi - length * u**3), 3.0 * length * u**2)
        return h, 0.0, 1.0
    mid = 0.5 * (lo + hi)
    half = 0.5 * length

    def h(u):
        # u in [-1, 1]; cluster toward both ends
        w = u * (3.0 - u * u) * 0.5
        return _scale(inner(mid + half * w), 1.5 * half * (1.0 - u * u))

    return h, -1.0, 1.0


def _scale(values, factor):
    values = np.asarray(values, dtype=float)
    factor = np.asarray(factor, dtype=float)
    if values.ndim == 2 and factor.ndim == 1:
        return values * factor[:, None]
    return values * factor


def _adapt(g, lo, hi, spec: QuadratureSpec, drive_all=False):
    kron, err = _panel(g, lo, hi, drive_all)
    total = kron.copy()
    total_err = err
    heap = [(-err, 0, lo, hi, kron)]
    count = 1
    def scale(total):
        return np.sum(np.abs(total)) if drive_all else abs(total[0])

    while total_err > max(spec.abs_tol, spec.rel_tol * scale(total)):
        if count >= spec.max_subdivisions:
            raise NonConvergenceError("adaptive quadrature did not converge",
                                      _unwrap(total), total_err)
        neg_err, tag, a, b, k_old = heapq.heappop(heap)
        mid = 0.5 * (a + b)
        if not (a < mid < b):
            # panel at floating-point resolution; cannot refine further
            heapq.heappush(heap, (neg_err, tag, a, b, k_old))
            raise NonConvergenceError("panel width reached machine resolution",
                                      _unwrap(total), total_err)
        k1, e1 = _panel(g, a, mid, drive_all)
        k2, e2 = _panel(g, mid, b, drive_all)
        total = total + k1 + k2 - k_old
        total_err += e1 + e2 + neg_err
        heapq.heappush(heap, (-e1, 2 * count - 1, a, mid, k1))
        heapq.heappush(heap, (-e2, 2 * count, mid, b, k2))
        count += 1
    # recompute sums to shed accumulated cancellation
    total = np.sum([item[4] for item in heap], axis=0)
    total_err = sum(-item[0] for item in heap)
    return total, total_err


def _unwrap(total):
    return float(total[0]) if total.shape == (1,) else total


def quad_adaptive_1d(f: Callable, a: float, b: float, spec: QuadratureSpec | None = None,
                     singular: str | None = None, drive_all: bool = False):
    """Integrate ``f`` over ``[a, b]``.

    ``b`` (or ``a``) may be infinite; the half-line is mapped onto ``[0, 1)``
    with ``x = a + u/(1-u)``. Pass ``singular='left'|'right'|'both'`` to
    declare an integrable (e.g. logarithmic) endpoint singularity.

    Returns ``(value, error_estimate)``; ``value`` is an array when ``f`` is
    vector-valued. By default only component 0 steers refinement; with
    ``drive_all=True`` the summed error of every component does, and the
    tolerance is checked against the summed magnitudes. Raises :class:`NonConvergenceError` once
    ``spec.max_subdivisions`` panels are in use without meeting
    ``max(abs_tol, rel_tol * |value|)``.
    """
    spec = spec or QuadratureSpec()
    g, lo, hi = _map_domain(f, a, b, singular)
    if lo == hi:
        return 0.0, 0.0
    total, err = _adapt(g, lo, hi, spec, drive_all)
    return _unwrap(total), float(err)


def quad_nested_2d(f: Callable, outer: tuple, inner: Callable, spec: QuadratureSpec | None = None,
                   outer_singular: str | None = None, inner_singular=None):
    """Iterated integral ``int_outer dx int_{inner(x)} dy f(x, y)``.

    ``inner(x)`` returns the ``(lo, hi)`` limits of the inner integral, or a
    list of ``(lo, hi, singular)`` segments to be integrated separately (e.g.
    to isolate a near-singular panel next to one limit).
    ``f(x, ys)`` is called with a scalar ``x`` and an array ``ys``.
    ``inner_singular`` applies to the two-tuple form and may be a marker
    string or a callable of ``x`` returning one.

    The reported error is the outer estimate plus the integral of the inner
    estimates.
    """
    spec = spec or QuadratureSpec()

    def segments(x):
        lim = inner(x)
        if len(lim) == 2 and not isinstance(lim[0], (tuple, list)):
            sing = inner_singular(x) if callable(inner_singular) else inner_singular
            return [(lim[0], lim[1], sing)]
        return lim

    def outer_integrand(xs):
        out = np.zeros((len(xs), 2))
        for i, x in enumerate(xs):
            for lo, hi, sing in segments(x):
                val, err = quad_adaptive_1d(lambda ys, x=x: f(x, ys), lo, hi, spec, singular=sing)
                out[i, 0] += val
                out[i, 1] += err
        return out

    total, outer_err = quad_adaptive_1d(outer_integrand, outer[0], outer[1], spec,
                                        singular=outer_singular)
    return float(total[0]), float(outer_err + abs(total[1]))
