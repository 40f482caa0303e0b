"""Field states and the massless vacuum Wightman function at spacelike separation."""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np

WIGHTMAN_CONSTANT = 2.0 / (2.0 * math.pi) ** 2  # = 1 / (2 pi^2)


class FieldKind(enum.Enum):
    MASSLESS_VACUUM_3P1 = "massless_vacuum_3p1"


@dataclass(frozen=True)
class FieldState:
    kind: FieldKind = FieldKind.MASSLESS_VACUUM_3P1

    @property
    def stationary(self) -> bool:
        return self.kind is FieldKind.MASSLESS_VACUUM_3P1


VACUUM = FieldState()


class SpacelikeDomainError(ValueError):
    """The closed-form Wightman function was asked for a non-spacelike interval."""


def interval_sq_detector_frame(sigma, xi, r_perp):
    """Squared interval ``-sigma^2 + xi^2 + r_perp^2`` between two events
    separated by ``sigma`` in time, ``xi`` along the boost axis and ``r_perp``
    transversally."""
    if np.any(np.asarray(r_perp) < 0):
        raise ValueError("r_perp is a magnitude and must be >= 0")
    return -np.square(sigma) + np.square(xi) + np.square(r_perp)


def wightman_spacelike(interval_sq, state: FieldState = VACUUM):
    if state.kind is not FieldKind.MASSLESS_VACUUM_3P1:
        raise NotImplementedError(f"no Wightman function for {state.kind}")
    s = np.asarray(interval_sq, dtype=float)
    if np.any(~(s > 0)):
        raise SpacelikeDomainError("closed form only holds for strictly spacelike intervals")
    out = WIGHTMAN_CONSTANT / s
    return float(out) if out.ndim == 0 else out
