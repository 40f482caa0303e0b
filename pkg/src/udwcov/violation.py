"""Frame-dependence functional Tr(rho_phi E) and the detector-state deviation.

Four routes to the same number for a Gaussian-smeared inertial detector in
the massless 3+1 vacuum:

``MONTE_CARLO_REFERENCE``
    importance-sampled 8-dimensional integral straight from the definition,
    for an arbitrary pair (detector rest frame, frame_t);
``REDUCED_3D``
    switching and centre-of-mass integrals done analytically, leaving
    ``(sigma, xi, r)`` with ``r`` the transverse separation;
``EI_CLOSED_FORM_2D``
    the ``r`` integral replaced by ``-exp(a/4l^2) Ei(-a/4l^2) / 2``;
``DIMENSIONLESS_2D``
    the same integral in ``s = sigma / (v T)``, ``zeta = xi / T``.

The three reduced routes compare the detector rest frame with the lab frame
only. Their prefactors (``*_COEFF``) were checked against the Monte-Carlo
reference before being frozen; ``calibrate_prefactors`` reruns that check.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .detector import (SIGMA_Z, DetectorConfig, PointlikeSmearingError, QubitState,
                       commutator_with_sigma_z, spacetime_smearing)
from .field import VACUUM, FieldKind, FieldState, interval_sq_detector_frame, wightman_spacelike
from .geometry import LAB, FrameSpec, relative_velocity, s_leq_mask
from .numerics import (GaussianProductSampler, NonConvergenceError, QuadratureSpec, expint_ei,
                       mc_integrate, quad_adaptive_1d, quad_nested_2d)

PI3 = math.pi ** 3

# value = 1j * COEFF * (scale) * integral, with
#   REDUCED_3D:        scale = T / l^3,        integral over (sigma, xi, r)
#   EI_CLOSED_FORM_2D: scale = T / l^3,        integral over (sigma, xi)
#   DIMENSIONLESS_2D:  scale = v (T / l)^3,    integral over (s, zeta)
REDUCED3D_COEFF = -1.0 / (8.0 * PI3)
EI2D_COEFF = 1.0 / (16.0 * PI3)
DIMENSIONLESS_COEFF = 1.0 / (16.0 * PI3)

# Gaussian tail cut for the semi-infinite time-separation integral
GAUSSIAN_FLOOR = 1e-18
# above this speed the inner panel next to xi = -sigma/v gets the log-aware rule
LOG_RULE_SPEED = 0.95

MAX_DETECTORS = 6

STANDARD_GRID = tuple((v, tl, wt) for v in (0.3, 0.6, 0.9) for tl in (1.0, 10.0) for wt in (0.5, 2.0))
QUICK_GRID = ((0.3, 1.0, 0.5), (0.6, 10.0, 2.0), (0.9, 10.0, 0.5))


class ViolationPath(enum.Enum):
    MONTE_CARLO_REFERENCE = "mc"
    REDUCED_3D = "reduced3d"
    EI_CLOSED_FORM_2D = "ei2d"
    DIMENSIONLESS_2D = "dimensionless"
    ANALYTIC_POINTLIKE = "pointlike"


@dataclass(frozen=True)
class ViolationResult:
    value: complex
    path: ViolationPath
    error_estimate: float = 0.0
    params: dict = field(default_factory=dict, compare=False)

    def __post_init__(self):
        if not self.error_estimate >= 0:
            raise ValueError("error_estimate must be non-negative")

    @property
    def imag(self) -> float:
        return complex(self.value).imag

    @property
    def is_exact_zero(self) -> bool:
        return self.value == 0 and self.error_estimate == 0


def _params(config: DetectorConfig) -> dict:
    return {"v": config.v, "t_switch": config.t_switch, "ell": config.ell, "omega": config.omega}


def _check_field(state: FieldState):
    if state.kind is not FieldKind.MASSLESS_VACUUM_3P1:
        raise NotImplementedError(f"no closed-form Wightman function for {state.kind}")


def _require_gaussian(config: DetectorConfig):
    if config.pointlike:
        raise PointlikeSmearingError("pointlike detectors are handled by pointlike_trace_e")


def pointlike_trace_e(config: DetectorConfig) -> ViolationResult:
    """Exact zero for a delta-smeared detector.

    With delta smearing the boost-axis separation is pinned to xi = 0, which
    never lies in the order-flipping domain xi < -sigma/v.
    """
    if not config.pointlike:
        raise ValueError("pointlike_trace_e called with a Gaussian-smeared detector")
    return ViolationResult(0j, ViolationPath.ANALYTIC_POINTLIKE, 0.0, _params(config))


# --------------------------------------------------------------------------
# Monte-Carlo reference
# --------------------------------------------------------------------------

def trace_e_reference_mc(config: DetectorConfig, state: FieldState = VACUUM,
                         frame_t: FrameSpec = LAB, samples: int = 10**6, seed: int = 0,
                         workers: int = 1) -> ViolationResult:
    """Monte-Carlo estimate of
    ``-2i int int Lambda(x) Lambda(x') W(x, x') sin(omega (tau - tau'))``
    over pairs whose order flips between the detector rest frame and
    ``frame_t``.

    Coordinates ``(tau, xbar, tau', xbar')`` are drawn from the normalised
    Gaussians underlying switching and smearing; the reweighting factor is
    ``Lambda Lambda / density`` evaluated from the profiles themselves.
    """
    if config.pointlike:
        return pointlike_trace_e(config)
    _check_field(state)
    if samples < 10**4:
        raise ValueError("the reference estimator needs at least 1e4 samples")
    params = {**_params(config), "frame_t": frame_t.v, "samples": samples, "seed": seed}
    v_rel = relative_velocity(config.rest_frame, frame_t)
    if config.omega == 0 or v_rel == 0:
        return ViolationResult(0j, ViolationPath.MONTE_CARLO_REFERENCE, 0.0, params)

    T, ell = config.t_switch, config.ell
    sampler = GaussianProductSampler(means=[0.0] * 8, stds=[T, ell, ell, ell] * 2)

    def accept(x):
        d = x[:, :4] - x[:, 4:]
        return s_leq_mask(d[:, 0], d[:, 1], d[:, 2] ** 2 + d[:, 3] ** 2, v_rel)

    def integrand(x):
        d = x[:, :4] - x[:, 4:]
        weight = (spacetime_smearing(x[:, 0], x[:, 1:4], config)
                  * spacetime_smearing(x[:, 4], x[:, 5:8], config)
                  / np.exp(sampler.log_density(x)))
        s2 = interval_sq_detector_frame(d[:, 0], d[:, 1], np.hypot(d[:, 2], d[:, 3]))
        w = wightman_spacelike(s2, state)
        return -2j * weight * w * np.sin(config.omega * d[:, 0])

    est = mc_integrate(integrand, sampler, accept, samples, seed, workers=workers)
    params["accepted"] = est.accepted
    return ViolationResult(complex(est.mean), ViolationPath.MONTE_CARLO_REFERENCE,
                           est.std_error, params)


# --------------------------------------------------------------------------
# reduced quadrature routes (detector rest frame vs lab)
# --------------------------------------------------------------------------

def _sigma_cutoff(rate: float) -> float:
    """Where exp(-rate * sigma^2) drops below GAUSSIAN_FLOOR."""
    return math.sqrt(-math.log(GAUSSIAN_FLOOR) / rate)


def _boundary_segments(upper: float, width: float, v: float, near: float):
    """Inner-limit segments ``(lo, hi, singular)`` for an integral ending at ``upper``.

    For ``v`` above ``LOG_RULE_SPEED`` the panel of length ``near`` adjacent to
    the upper limit is split off and integrated with the endpoint-clustering
    rule, since the integrand there approaches an integrable log singularity.
    """
    lo = upper - width
    if v <= LOG_RULE_SPEED or near >= width:
        return [(lo, upper, None)]
    return [(lo, upper - near, None), (upper - near, upper, "right")]


def _ei2d_integral(v, T, ell, omega, quad: QuadratureSpec):
    inv4l2 = 1.0 / (4.0 * ell * ell)
    rate = 1.0 / (4.0 * T * T) + inv4l2
    width = quad.truncation_sigma * math.sqrt(2.0) * ell

    def inner(sigma):
        return _boundary_segments(-sigma / v, width, v, near=min(width, ell))

    def f(sigma, xi):
        damp = math.exp(-rate * sigma * sigma) * math.sin(omega * sigma)
        return damp * expint_ei((sigma * sigma - xi * xi) * inv4l2)

    return quad_nested_2d(f, (0.0, _sigma_cutoff(rate)), inner, quad)


def _r_integrals(a, ell, r_max, quad: QuadratureSpec):
    """Transverse integrals ``int_0^r_max r e^{-r^2/4l^2} / (a + r^2) dr`` for a batch of ``a > 0``.

    With ``r^2 = a (e^t - 1)`` the integrand becomes
    ``exp(-a (e^t - 1) / 4l^2) / 2`` on ``t in [0, log(1 + r_max^2/a)]``,
    bounded and smooth; each upper limit is rescaled onto ``[0, 1]`` so the
    whole batch shares one vector-valued adaptive integration.
    """
    a = np.asarray(a, dtype=float)
    inv4l2 = 1.0 / (4.0 * ell * ell)
    t_max = np.log1p(r_max * r_max / a)

    def g(w):
        t = np.outer(w, t_max)
        return 0.5 * t_max * np.exp(-a * np.expm1(t) * inv4l2)

    val, err = quad_adaptive_1d(g, 0.0, 1.0, quad, drive_all=True)
    return np.atleast_1d(val), err


def _reduced3d_integral(v, T, ell, omega, quad: QuadratureSpec):
    inv4l2 = 1.0 / (4.0 * ell * ell)
    inv4t2 = 1.0 / (4.0 * T * T)
    rate = inv4t2 + inv4l2
    width = quad.truncation_sigma * math.sqrt(2.0) * ell
    r_max = width

    def inner(sigma):
        return _boundary_segments(-sigma / v, width, v, near=min(width, ell))

    def f(sigma, xis):
        pre = math.exp(-inv4t2 * sigma * sigma) * math.sin(omega * sigma)
        g = pre * np.exp(-xis * xis * inv4l2)
        vals, err = _r_integrals(xis * xis - sigma * sigma, ell, r_max, quad)
        out = np.empty((len(xis), 2))
        out[:, 0] = g * vals
        # batch error shared out in proportion to each weighted value
        share = np.abs(g * vals)
        total = share.sum()
        out[:, 1] = err * np.abs(g).max() * (share / total if total > 0 else 1.0 / len(xis))
        return out

    return _nested_with_errors(f, (0.0, _sigma_cutoff(rate)), inner, quad)


def _nested_with_errors(f, outer, inner, quad):
    """Like quad_nested_2d but ``f`` returns ``(value, error)`` columns, so the
    innermost quadrature error is propagated through both outer levels."""

    def outer_integrand(xs):
        out = np.zeros((len(xs), 2))
        for i, x in enumerate(xs):
            for lo, hi, sing in inner(x):
                val, err = quad_adaptive_1d(lambda ys, x=x: f(x, ys), lo, hi, quad, singular=sing)
                out[i, 0] += val[0]
                out[i, 1] += err + abs(val[1])
        return out

    total, err = quad_adaptive_1d(outer_integrand, outer[0], outer[1], quad)
    return float(total[0]), float(err + abs(total[1]))


def _dimensionless_integral(v, t_over_ell, omega_t, quad: QuadratureSpec):
    r2 = t_over_ell * t_over_ell
    rate = 0.25 * v * v * (1.0 + r2)
    width = quad.truncation_sigma * math.sqrt(2.0) / t_over_ell
    quarter_r2 = 0.25 * r2

    def inner(s):
        return _boundary_segments(-s, width, v, near=min(width, 1.0 / t_over_ell))

    def f(s, zeta):
        damp = math.exp(-rate * s * s) * math.sin(omega_t * v * s)
        return damp * expint_ei((s * s * v * v - zeta * zeta) * quarter_r2)

    return quad_nested_2d(f, (0.0, _sigma_cutoff(rate)), inner, quad)


def _scaled_quad(integral, scale, path: ViolationPath, *args):
    """Run a raw integral and attach the prefactor, also to a non-converged estimate."""
    try:
        val, err = integral(*args)
    except NonConvergenceError as exc:
        raw = float(np.atleast_1d(exc.value)[0])
        raise NonConvergenceError(f"{path.value} quadrature did not converge",
                                  1j * scale * raw, abs(scale) * exc.error) from exc
    return ViolationResult(1j * scale * val, path, abs(scale) * err)


def _reduced_preconditions(config: DetectorConfig, state: FieldState):
    _require_gaussian(config)
    _check_field(state)


def trace_e_reduced3d(config: DetectorConfig, state: FieldState = VACUUM,
                      quad: QuadratureSpec | None = None) -> ViolationResult:
    """Nested quadrature over time separation, boost-axis separation and
    transverse separation, detector rest frame vs lab."""
    _reduced_preconditions(config, state)
    quad = quad or QuadratureSpec()
    v = abs(config.v)
    params = _params(config)
    if config.omega == 0 or v == 0:
        return ViolationResult(0j, ViolationPath.REDUCED_3D, 0.0, params)
    scale = REDUCED3D_COEFF * config.t_switch / config.ell**3
    res = _scaled_quad(_reduced3d_integral, scale, ViolationPath.REDUCED_3D, v, config.t_switch,
                       config.ell, config.omega, quad.scaled(abs(scale)))
    return ViolationResult(res.value, res.path, res.error_estimate, params)


def trace_e_ei_2d(config: DetectorConfig, state: FieldState = VACUUM,
                  quad: QuadratureSpec | None = None) -> ViolationResult:
    """2D quadrature with the transverse integral in closed form via Ei."""
    _reduced_preconditions(config, state)
    quad = quad or QuadratureSpec()
    v = abs(config.v)
    params = _params(config)
    if config.omega == 0 or v == 0:
        return ViolationResult(0j, ViolationPath.EI_CLOSED_FORM_2D, 0.0, params)
    scale = EI2D_COEFF * config.t_switch / config.ell**3
    res = _scaled_quad(_ei2d_integral, scale, ViolationPath.EI_CLOSED_FORM_2D, v, config.t_switch,
                       config.ell, config.omega, quad.scaled(abs(scale)))
    return ViolationResult(res.value, res.path, res.error_estimate, params)


def trace_e_dimensionless(v: float, t_over_ell: float, omega_t: float,
                          quad: QuadratureSpec | None = None) -> ViolationResult:
    """Same quantity as a function of (v, T/l, Omega T) only.

    ``omega_t`` may be negative here; the result is odd in it.
    """
    if not (math.isfinite(v) and 0 <= v < 1):
        raise ValueError(f"v must lie in [0, 1), got {v!r}")
    if not (math.isfinite(t_over_ell) and t_over_ell > 0):
        raise ValueError("t_over_ell must be > 0")
    if not math.isfinite(omega_t):
        raise ValueError("omega_t must be finite")
    quad = quad or QuadratureSpec()
    params = {"v": v, "t_over_ell": t_over_ell, "omega_t": omega_t}
    if omega_t == 0 or v == 0:
        return ViolationResult(0j, ViolationPath.DIMENSIONLESS_2D, 0.0, params)
    scale = DIMENSIONLESS_COEFF * v * t_over_ell**3
    res = _scaled_quad(_dimensionless_integral, scale, ViolationPath.DIMENSIONLESS_2D, v, t_over_ell,
                       omega_t, quad.scaled(abs(scale)))
    return ViolationResult(res.value, res.path, res.error_estimate, params)


def config_from_triple(v: float, t_over_ell: float, omega_t: float, ell: float = 1.0) -> DetectorConfig:
    """A dimensional detector realising the triple (v, T/l, Omega T)."""
    t_switch = t_over_ell * ell
    return DetectorConfig(omega=omega_t / t_switch, t_switch=t_switch, ell=ell, v=v)


def trace_e(config: DetectorConfig, path: ViolationPath | str = ViolationPath.EI_CLOSED_FORM_2D,
            state: FieldState = VACUUM, quad: QuadratureSpec | None = None,
            samples: int = 10**6, seed: int = 0, frame_t: FrameSpec = LAB,
            workers: int = 1) -> ViolationResult:
    """Dispatch to one evaluation route; pointlike detectors always get the analytic zero."""
    path = ViolationPath(path)
    if config.pointlike or path is ViolationPath.ANALYTIC_POINTLIKE:
        return pointlike_trace_e(config)
    if path is ViolationPath.MONTE_CARLO_REFERENCE:
        return trace_e_reference_mc(config, state, frame_t, samples, seed, workers)
    if frame_t != LAB:
        raise ValueError("reduced routes compare the detector rest frame with the lab frame only")
    if path is ViolationPath.REDUCED_3D:
        return trace_e_reduced3d(config, state, quad)
    if path is ViolationPath.EI_CLOSED_FORM_2D:
        return trace_e_ei_2d(config, state, quad)
    _check_field(state)
    return trace_e_dimensionless(abs(config.v), config.t_switch / config.ell,
                                 config.omega * config.t_switch, quad)


def calibrate_prefactors(points=STANDARD_GRID, samples: int = 10**7, seed: int = 0,
                         quad: QuadratureSpec | None = None) -> list[dict]:
    """Ratio of each reduced route to the Monte-Carlo reference on ``points``.

    A correct prefactor gives ratios of 1 within ``rel_mc_error``.
    """
    rows = []
    for v, tl, wt in points:
        config = config_from_triple(v, tl, wt)
        mc = trace_e_reference_mc(config, samples=samples, seed=seed)
        row = {"v": v, "t_over_ell": tl, "omega_t": wt, "mc": mc.imag,
               "mc_err": mc.error_estimate, "rel_mc_error": mc.error_estimate / abs(mc.imag)}
        for res in (trace_e_reduced3d(config, quad=quad), trace_e_ei_2d(config, quad=quad),
                    trace_e_dimensionless(v, tl, wt, quad)):
            row[res.path.value] = res.imag
            row[f"{res.path.value}_ratio"] = res.imag / mc.imag
        rows.append(row)
    return rows


# --------------------------------------------------------------------------
# detector-state deviations
# --------------------------------------------------------------------------

@dataclass(frozen=True)
class DeviationMatrix:
    """lambda^2 coefficient of rho_d^t - rho_d^tau (2^N x 2^N for N detectors)."""

    coeff: np.ndarray = field(repr=False)
    lam: float = 1.0

    def __post_init__(self):
        c = np.array(self.coeff, dtype=complex)
        tol = 1e-10 * max(1.0, float(np.max(np.abs(c))) if c.size else 1.0)
        if np.max(np.abs(c - c.conj().T)) > tol:
            raise ValueError("deviation coefficient is not Hermitian")
        if abs(np.trace(c)) > tol:
            raise ValueError("deviation coefficient is not traceless")
        c.setflags(write=False)
        object.__setattr__(self, "coeff", c)

    @property
    def full(self) -> np.ndarray:
        """Deviation at the stored coupling, up to O(lambda^3)."""
        return self.lam**2 * self.coeff


def single_detector_deviation(rho0: QubitState, violation: ViolationResult,
                              lam: float = 1.0) -> DeviationMatrix:
    return DeviationMatrix(commutator_with_sigma_z(rho0) * complex(violation.value), lam)


def _kron_all(mats):
    out = np.ones((1, 1), dtype=complex)
    for m in mats:
        out = np.kron(out, m)
    return out


def multi_detector_deviation(detectors: Sequence[tuple[DetectorConfig, QubitState]],
                             violations: Sequence[ViolationResult],
                             lam: float = 1.0) -> DeviationMatrix:
    """Second-order deviation for N detectors starting in a product state.

    Term ``i`` is the tensor product of the untouched states with
    ``[sigma_z, rho_i] * value_i`` in slot ``i`` (detector 0 is the leftmost
    factor).
    """
    n = len(detectors)
    if n != len(violations):
        raise ValueError(f"{n} detectors but {len(violations)} violation results")
    if not 1 <= n <= MAX_DETECTORS:
        raise ValueError(f"need 1 to {MAX_DETECTORS} detectors, got {n}")
    states = [state.rho for _, state in detectors]
    total = np.zeros((2**n, 2**n), dtype=complex)
    for i, ((_, state), res) in enumerate(zip(detectors, violations)):
        value = complex(res.value)
        if value == 0 or state.is_energy_diagonal:
            continue
        factors = list(states)
        factors[i] = commutator_with_sigma_z(state) * value
        total += _kron_all(factors)
    return DeviationMatrix(total, lam)


__all__ = [
    "ViolationPath", "ViolationResult", "DeviationMatrix",
    "trace_e", "trace_e_reference_mc", "trace_e_reduced3d", "trace_e_ei_2d",
    "trace_e_dimensionless", "pointlike_trace_e", "config_from_triple",
    "single_detector_deviation", "multi_detector_deviation", "calibrate_prefactors",
    "STANDARD_GRID", "QUICK_GRID",
    "REDUCED3D_COEFF", "EI2D_COEFF", "DIMENSIONLESS_COEFF", "SIGMA_Z",
]
