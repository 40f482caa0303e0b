"""Minkowski interval algebra with boosts along x.

Signature is (-, +, +, +) and c = 1. Frames are inertial and labelled by their
boost speed along x relative to the lab frame. Events carry the frame their
coordinates refer to; converting is always an explicit call.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np


class InvalidFrameError(ValueError):
    pass


def _check_speed(v):
    if not math.isfinite(v) or abs(v) >= 1.0:
        raise InvalidFrameError(f"boost speed must satisfy |v| < 1, got {v!r}")


@dataclass(frozen=True)
class FrameSpec:
    """Inertial frame moving with speed ``v`` along x relative to the lab."""

    v: float = 0.0

    def __post_init__(self):
        _check_speed(self.v)

    @property
    def gamma(self) -> float:
        return gamma(self.v)


LAB = FrameSpec(0.0)


@dataclass(frozen=True)
class SpacetimeEvent:
    t: float
    x: float
    y: float = 0.0
    z: float = 0.0
    frame: FrameSpec = LAB

    def __post_init__(self):
        if not all(math.isfinite(c) for c in (self.t, self.x, self.y, self.z)):
            raise ValueError("event coordinates must be finite")
        if not isinstance(self.frame, FrameSpec):
            raise InvalidFrameError("frame must be a FrameSpec")

    def to_frame(self, frame: FrameSpec) -> "SpacetimeEvent":
        if frame == self.frame:
            return self
        w = relative_velocity(self.frame, frame)
        g = gamma(w)
        return SpacetimeEvent(g * (self.t - w * self.x), g * (self.x - w * self.t),
                              self.y, self.z, frame)


class IntervalClass(enum.Enum):
    TIMELIKE = "timelike"
    NULL = "null"
    SPACELIKE = "spacelike"


def gamma(v: float) -> float:
    """Lorentz factor 1/sqrt(1 - v^2)."""
    _check_speed(v)
    # (1 - v)(1 + v) keeps relative accuracy as |v| -> 1
    return 1.0 / math.sqrt((1.0 - v) * (1.0 + v))


def relative_velocity(source: FrameSpec, target: FrameSpec) -> float:
    """Velocity of ``target`` as seen from ``source`` (relativistic subtraction)."""
    return (target.v - source.v) / (1.0 - target.v * source.v)


def boost_delta_t(delta_tau: float, delta_xbar: float, v: float) -> float:
    """Lab time interval between two events separated by (delta_tau, delta_xbar)
    in the rest frame of an observer moving at +v along x."""
    return gamma(v) * (delta_tau + v * delta_xbar)


def interval_sq(dt, dx, dy=0.0, dz=0.0):
    return -dt * dt + dx * dx + dy * dy + dz * dz


def null_tolerance(dt, dx, dy=0.0, dz=0.0):
    return 1e-12 * np.maximum(1.0, dt * dt + dx * dx + dy * dy + dz * dz)


def classify_interval(a: SpacetimeEvent, b: SpacetimeEvent) -> IntervalClass:
    if b.frame != a.frame:
        b = b.to_frame(a.frame)
    d = (b.t - a.t, b.x - a.x, b.y - a.y, b.z - a.z)
    s = interval_sq(*d)
    if abs(s) <= null_tolerance(*d):
        return IntervalClass.NULL
    return IntervalClass.TIMELIKE if s < 0 else IntervalClass.SPACELIKE


def s_leq_mask(d_tau, d_xbar, d_perp_sq, v_rel):
    """Vectorised membership test for the order-flipping region.

    Separations are measured in the "tau" frame (first event minus second).
    ``v_rel`` is the velocity of the "t" frame as seen from the "tau" frame.
    A pair belongs when it is spacelike, strictly later in tau and not later
    in t.
    """
    d_tau = np.asarray(d_tau, dtype=float)
    d_xbar = np.asarray(d_xbar, dtype=float)
    s = -d_tau * d_tau + d_xbar * d_xbar + d_perp_sq
    spacelike = s > 1e-12 * np.maximum(1.0, d_tau * d_tau + d_xbar * d_xbar + d_perp_sq)
    if v_rel == 0.0:
        return np.zeros(np.broadcast(d_tau, d_xbar, d_perp_sq).shape, dtype=bool)
    d_t = gamma(v_rel) * (d_tau - v_rel * d_xbar)
    return spacelike & (d_tau > 0) & (d_t <= 0)


def in_s_leq(a: SpacetimeEvent, b: SpacetimeEvent, frame_tau: FrameSpec, frame_t: FrameSpec) -> bool:
    """True when ``(a, b)`` is spacelike, ``a`` is later than ``b`` in
    ``frame_tau`` and not later in ``frame_t``."""
    if frame_tau == frame_t:
        return False
    ea, eb = a.to_frame(frame_tau), b.to_frame(frame_tau)
    d_perp_sq = (ea.y - eb.y) ** 2 + (ea.z - eb.z) ** 2
    mask = s_leq_mask(ea.t - eb.t, ea.x - eb.x, d_perp_sq, relative_velocity(frame_tau, frame_t))
    return bool(mask)
