"""Seeded Monte-Carlo integration over a Gaussian product sampler.

Samples are drawn in fixed-size chunks. Chunk ``k`` always comes from the
Philox stream ``Philox(key=seed).jumped(k)``, so the estimate depends only on
``(seed, samples, chunk_size)`` and not on how chunks are scheduled across
workers. Partial sums are combined in chunk order.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

DEFAULT_CHUNK = 1 << 18


class DegenerateEstimateError(RuntimeError):
    """No sample landed in the accepted region; the estimate is meaningless."""


@dataclass(frozen=True)
class McEstimate:
    mean: complex
    std_error: float
    samples: int
    seed: int
    accepted: int = 0


@dataclass(frozen=True)
class GaussianProductSampler:
    """Independent normal coordinates with the given means and standard deviations."""

    means: Sequence[float]
    stds: Sequence[float]

    def __post_init__(self):
        if len(self.means) != len(self.stds):
            raise ValueError("means and stds must have equal length")
        if any(s <= 0 for s in self.stds):
            raise ValueError("standard deviations must be positive")

    @property
    def dim(self) -> int:
        return len(self.means)

    def draw(self, rng: np.random.Generator, n: int) -> np.ndarray:
        z = rng.standard_normal((n, self.dim))
        return z * np.asarray(self.stds) + np.asarray(self.means)

    def log_density(self, x: np.ndarray) -> np.ndarray:
        stds = np.asarray(self.stds)
        z = (x - np.asarray(self.means)) / stds
        return -0.5 * np.sum(z * z, axis=1) - np.sum(np.log(stds)) - 0.5 * self.dim * math.log(2 * math.pi)


def substream(seed: int, index: int) -> np.random.Generator:
    if seed < 0:
        raise ValueError("seed must be non-negative")
    return np.random.Generator(np.random.Philox(key=seed).jumped(index))


def _chunk_sums(f, sampler, accept, seed, index, n):
    rng = substream(seed, index)
    x = sampler.draw(rng, n)
    mask = accept(x)
    vals = np.zeros(n, dtype=complex)
    if mask.any():
        vals[mask] = f(x[mask])
    re, im = vals.real, vals.imag
    return (re.sum(), im.sum(), (re * re).sum() + (im * im).sum(), int(mask.sum()))


def mc_integrate(f: Callable, sampler: GaussianProductSampler, accept: Callable,
                 samples: int, seed: int, chunk_size: int = DEFAULT_CHUNK,
                 workers: int = 1) -> McEstimate:
    """Estimate ``E_p[f(X) 1{accept(X)}]`` for ``X`` drawn from ``sampler``.

    ``f`` must already include the importance weight (target density over
    sampler density). It is only evaluated on accepted points.
    """
    if samples < 2:
        raise ValueError("need at least two samples")
    sizes = [chunk_size] * (samples // chunk_size)
    if samples % chunk_size:
        sizes.append(samples % chunk_size)

    jobs = list(enumerate(sizes))
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            parts = list(pool.map(lambda job: _chunk_sums(f, sampler, accept, seed, *job), jobs))
    else:
        parts = [_chunk_sums(f, sampler, accept, seed, *job) for job in jobs]

    s_re = math.fsum(p[0] for p in parts)
    s_im = math.fsum(p[1] for p in parts)
    s_sq = math.fsum(p[2] for p in parts)
    accepted = sum(p[3] for p in parts)
    if accepted == 0:
        raise DegenerateEstimateError(f"no accepted samples out of {samples}")

    mean = complex(s_re / samples, s_im / samples)
    var = (s_sq - samples * abs(mean) ** 2) / (samples - 1)
    std_error = math.sqrt(max(var, 0.0) / samples)
    return McEstimate(mean, std_error, samples, seed, accepted)
