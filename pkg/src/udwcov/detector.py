"""Two-level detector: configuration, Gaussian profiles and qubit algebra.

Energy basis convention: index 0 is the excited state |e>, index 1 the ground
state |g>, so ``SIGMA_Z = diag(1, -1)`` and the free Hamiltonian is
``omega * SIGMA_PLUS @ SIGMA_MINUS = diag(omega, 0)``.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field

import numpy as np

from .geometry import FrameSpec, InvalidFrameError

SIGMA_Z = np.array([[1, 0], [0, -1]], dtype=complex)
SIGMA_PLUS = np.array([[0, 1], [0, 0]], dtype=complex)
SIGMA_MINUS = SIGMA_PLUS.T.copy()

_INV_SQRT_2PI = 1.0 / math.sqrt(2.0 * math.pi)


class SmearingKind(enum.Enum):
    GAUSSIAN = "gaussian"
    POINTLIKE = "pointlike"


class PointlikeSmearingError(ValueError):
    """A Gaussian-only evaluation was handed a pointlike detector.

    Pointlike detectors have delta-function smearing; use the analytic
    ``pointlike_trace_e`` route instead of evaluating a delta numerically.
    """


@dataclass(frozen=True)
class DetectorConfig:
    omega: float
    t_switch: float
    ell: float = 1.0
    v: float = 0.0
    lam: float = 1.0
    smearing_kind: SmearingKind = SmearingKind.GAUSSIAN

    def __post_init__(self):
        if not math.isfinite(self.omega) or self.omega < 0:
            raise ValueError("omega must be finite and >= 0")
        if not (math.isfinite(self.t_switch) and self.t_switch > 0):
            raise ValueError("t_switch must be > 0")
        if self.smearing_kind is SmearingKind.GAUSSIAN and not (math.isfinite(self.ell) and self.ell > 0):
            raise ValueError("ell must be > 0 for Gaussian smearing")
        if not math.isfinite(self.v) or abs(self.v) >= 1:
            raise InvalidFrameError(f"detector speed must satisfy |v| < 1, got {self.v!r}")

    @property
    def pointlike(self) -> bool:
        return self.smearing_kind is SmearingKind.POINTLIKE

    @property
    def rest_frame(self) -> FrameSpec:
        return FrameSpec(self.v)


def _check_density_matrix(rho: np.ndarray) -> None:
    if rho.shape != (2, 2):
        raise ValueError(f"qubit density matrix must be 2x2, got {rho.shape}")
    if not np.all(np.isfinite(rho)):
        raise ValueError("density matrix has non-finite entries")
    if np.max(np.abs(rho - rho.conj().T)) > 1e-12:
        raise ValueError("density matrix is not Hermitian")
    if abs(np.trace(rho) - 1) > 1e-12:
        raise ValueError("density matrix trace differs from 1")
    if np.linalg.eigvalsh(rho).min() < -1e-12:
        raise ValueError("density matrix is not positive semidefinite")


@dataclass(frozen=True)
class QubitState:
    rho: np.ndarray = field(repr=False)

    def __post_init__(self):
        rho = np.array(self.rho, dtype=complex)
        _check_density_matrix(rho)
        rho.setflags(write=False)
        object.__setattr__(self, "rho", rho)

    @classmethod
    def excited(cls) -> "QubitState":
        return cls(np.diag([1.0, 0.0]))

    @classmethod
    def ground(cls) -> "QubitState":
        return cls(np.diag([0.0, 1.0]))

    @classmethod
    def from_bloch(cls, rx: float, ry: float, rz: float) -> "QubitState":
        """State with Bloch vector (rx, ry, rz), |r| <= 1, rz along SIGMA_Z."""
        return cls(0.5 * np.array([[1 + rz, rx - 1j * ry], [rx + 1j * ry, 1 - rz]]))

    @property
    def is_energy_diagonal(self) -> bool:
        return self.rho[0, 1] == 0 and self.rho[1, 0] == 0


def switching(tau, config: DetectorConfig):
    """Gaussian switching ``exp(-tau^2 / 2T^2) / sqrt(2 pi)``.

    The prefactor deliberately carries no 1/T.
    """
    tau = np.asarray(tau, dtype=float)
    out = _INV_SQRT_2PI * np.exp(-0.5 * (tau / config.t_switch) ** 2)
    return float(out) if out.ndim == 0 else out


def smearing(xbar, config: DetectorConfig):
    """Normalised isotropic Gaussian smearing in the detector rest frame.

    ``xbar`` has shape ``(3,)`` or ``(n, 3)``.
    """
    if config.pointlike:
        raise PointlikeSmearingError("pointlike smearing is a delta function; "
                                     "use pointlike_trace_e for this detector")
    xbar = np.asarray(xbar, dtype=float)
    ell = config.ell
    r2 = np.sum(xbar * xbar, axis=-1)
    out = np.exp(-0.5 * r2 / ell**2) / ((2.0 * math.pi) ** 1.5 * ell**3)
    return float(out) if out.ndim == 0 else out


def spacetime_smearing(tau, xbar, config: DetectorConfig):
    """Lambda(tau, xbar) = switching(tau) * smearing(xbar) in the Fermi frame."""
    return switching(tau, config) * smearing(xbar, config)


def monopole_commutator_kernel(tau, tau_prime, omega):
    """Real coefficient c in ``[mu(tau), mu(tau')] = i c sigma_z``, i.e. ``2 sin(omega (tau - tau'))``."""
    return 2.0 * np.sin(omega * (np.asarray(tau) - np.asarray(tau_prime)))


def monopole(tau: float, omega: float) -> np.ndarray:
    """Interaction-picture monopole ``e^{i omega tau} sigma+ + e^{-i omega tau} sigma-``."""
    return np.exp(1j * omega * tau) * SIGMA_PLUS + np.exp(-1j * omega * tau) * SIGMA_MINUS


def commutator_with_sigma_z(state: QubitState) -> np.ndarray:
    rho = state.rho
    return SIGMA_Z @ rho - rho @ SIGMA_Z
