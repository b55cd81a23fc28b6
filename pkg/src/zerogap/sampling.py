"""Uniform sampling of the region R and reproducible Monte Carlo means.

Randomness comes from numpy's PCG64.  A run with seed ``s`` is split into
fixed-size chunks of accepted points; chunk ``k`` draws from the substream
``SeedSequence(s, spawn_key=(k,))``.  Chunk results are combined in ascending
chunk order, so estimates depend only on ``(seed, n)``, never on the number
of worker threads.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Callable, NamedTuple

import numpy as np

REGION_VOLUME = 1.0 / 20.0
CHUNK = 1 << 16


class RegionPoint(NamedTuple):
    x: float
    x1: float
    x2: float
    x3: float
    x4: float


@dataclass(frozen=True)
class McEstimate:
    mean: float
    stderr: float
    n: int
    seed: int

    def agrees_with(self, value: float, sigmas: float = 3.0) -> bool:
        return abs(self.mean - value) <= sigmas * self.stderr


def in_region(pts: np.ndarray) -> np.ndarray:
    """Acceptance predicate for points in the unit 5-cube, shape (m, 5)."""
    return (pts[:, 0] + pts[:, 1] + pts[:, 2] <= 1.0) & (pts[:, 0] + pts[:, 3] + pts[:, 4] <= 1.0)


def substream(seed: int, index: int) -> np.random.Generator:
    return np.random.Generator(np.random.PCG64(np.random.SeedSequence(seed, spawn_key=(index,))))


def sample_region(rng: np.random.Generator) -> RegionPoint:
    """One uniform point of R by rejection from the unit cube."""
    while True:
        u = rng.random(5)
        if u[0] + u[1] + u[2] <= 1.0 and u[0] + u[3] + u[4] <= 1.0:
            return RegionPoint(*map(float, u))


def sample_region_batch(rng: np.random.Generator, m: int) -> np.ndarray:
    """``m`` uniform points of R, shape (m, 5), by batched rejection."""
    out = np.empty((m, 5))
    filled = 0
    while filled < m:
        want = m - filled
        proposals = rng.random((int(want * 22) + 64, 5))
        ok = proposals[in_region(proposals)]
        take = min(len(ok), want)
        out[filled : filled + take] = ok[:take]
        filled += take
    return out


def _chunk_stats(fn, seed: int, index: int, size: int):
    pts = sample_region_batch(substream(seed, index), size)
    vals = np.asarray(fn(pts), dtype=float)
    mean = vals.mean(axis=0)
    m2 = ((vals - mean) ** 2).sum(axis=0)
    return size, mean, m2


def mc_integrate(
    fn: Callable[[np.ndarray], np.ndarray],
    n: int,
    seed: int,
    threads: int = 1,
) -> tuple[np.ndarray, np.ndarray]:
    """Monte Carlo integral over R of a vectorised integrand.

    ``fn`` maps points of shape (m, 5) to values of shape (m,) or (m, k).
    Returns ``(mean, stderr)`` of the integral (volume factor included).
    """
    if n < 1:
        raise ValueError("sample count must be positive")
    sizes = [CHUNK] * (n // CHUNK)
    if n % CHUNK:
        sizes.append(n % CHUNK)
    jobs = list(enumerate(sizes))
    if threads > 1:
        with ThreadPoolExecutor(threads) as pool:
            stats = list(pool.map(lambda job: _chunk_stats(fn, seed, job[0], job[1]), jobs))
    else:
        stats = [_chunk_stats(fn, seed, k, size) for k, size in jobs]

    # Chan et al. pairwise update, fixed chunk order
    count, mean, m2 = stats[0]
    for nb, mb, m2b in stats[1:]:
        total = count + nb
        delta = mb - mean
        mean = mean + delta * (nb / total)
        m2 = m2 + m2b + delta**2 * (count * nb / total)
        count = total
    var = m2 / (count - 1) if count > 1 else np.zeros_like(m2)
    stderr = np.sqrt(var / count)
    return mean * REGION_VOLUME, stderr * REGION_VOLUME


def estimate(fn, n: int, seed: int, threads: int = 1) -> McEstimate:
    mean, err = mc_integrate(fn, n, seed, threads)
    return McEstimate(float(mean), float(err), n, seed)


def acceptance_rate(n_proposals: int, seed: int) -> tuple[float, float]:
    """Empirical acceptance fraction of cube proposals and its standard error."""
    rng = substream(seed, 0)
    hits = 0
    left = n_proposals
    while left:
        m = min(left, 1 << 20)
        hits += int(in_region(rng.random((m, 5))).sum())
        left -= m
    p = hits / n_proposals
    return p, math.sqrt(p * (1 - p) / n_proposals)
