"""Deterministic Monte-Carlo plumbing: counter-based streams, chunked reduction.

Sampling is built on the Philox counter-based bit generator, keyed by
``(seed, stream_index)``.  Each chunk of work owns one stream, so any mix of
serial and parallel execution produces bit-identical 64-bit integer streams;
results are always combined in chunk-index order.  Moment accumulation uses
the parallel Welford combine, which is exact in a fixed order.
"""

from __future__ import annotations

import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

DEFAULT_CHUNK = 1 << 16

_STREAM_SALT = 0x9E3779B97F4A7C15  # keeps stream keys away from raw seeds


def stream_generator(seed: int, stream: int) -> np.random.Generator:
    """Generator for stream ``stream`` of the experiment keyed by ``seed``."""
    key = (np.uint64(seed & 0x7FFFFFFFFFFFFFFF) << np.uint64(1)) ^ np.uint64(_STREAM_SALT)
    bitgen = np.random.Philox(key=[np.uint64(stream & 0x7FFFFFFFFFFFFFFF), key])
    return np.random.Generator(bitgen)


def worker_count() -> int:
    """Worker cap from GMAC_THREADS (0 or unset = auto)."""
    raw = os.environ.get("GMAC_THREADS", "0")
    try:
        n = int(raw)
    except ValueError:
        n = 0
    if n <= 0:
        n = os.cpu_count() or 1
    return max(1, n)


def chunk_sizes(total: int, chunk: int = DEFAULT_CHUNK) -> list[int]:
    sizes = [chunk] * (total // chunk)
    if total % chunk:
        sizes.append(total % chunk)
    return sizes


@dataclass
class MomentAccumulator:
    """Single-pass mean/M2 accumulator per coordinate (Welford combine)."""

    count: int
    mean: np.ndarray
    m2: np.ndarray

    @classmethod
    def from_values(cls, values: np.ndarray) -> "MomentAccumulator":
        values = np.asarray(values, dtype=np.float64)
        n = values.shape[0]
        mean = values.mean(axis=0)
        m2 = ((values - mean) ** 2).sum(axis=0)
        return cls(n, mean, m2)

    def combine(self, other: "MomentAccumulator") -> "MomentAccumulator":
        n = self.count + other.count
        delta = other.mean - self.mean
        mean = self.mean + delta * (other.count / n)
        m2 = self.m2 + other.m2 + delta**2 * (self.count * other.count / n)
        return MomentAccumulator(n, mean, m2)

    @property
    def variance(self) -> np.ndarray:
        return self.m2 / max(self.count - 1, 1)

    @property
    def se_of_mean(self) -> np.ndarray:
        return np.sqrt(self.variance / self.count)


def accumulate_chunks(
    fn: Callable[[np.random.Generator, int], np.ndarray],
    seed: int,
    total: int,
    chunk: int = DEFAULT_CHUNK,
) -> MomentAccumulator:
    """Run ``fn(rng, n) -> (n, k) samples`` over chunks, reduce in chunk order.

    Chunks may be evaluated concurrently (GMAC_THREADS workers), but the
    Welford combination always proceeds in chunk-index order, so the result
    is independent of the degree of parallelism.
    """
    sizes = chunk_sizes(total, chunk)

    def run(idx_size):
        idx, size = idx_size
        return MomentAccumulator.from_values(fn(stream_generator(seed, idx), size))

    workers = min(worker_count(), len(sizes))
    if workers > 1 and len(sizes) > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            parts = list(pool.map(run, enumerate(sizes)))
    else:
        parts = [run(item) for item in enumerate(sizes)]

    acc = parts[0]
    for part in parts[1:]:
        acc = acc.combine(part)
    return acc


def halton(index: int, base: int) -> float:
    """Element ``index`` (1-based) of the van der Corput sequence in ``base``."""
    result = 0.0
    f = 1.0
    i = index
    while i > 0:
        f /= base
        result += f * (i % base)
        i //= base
    return result


_HALTON_BASES: Sequence[int] = (2, 3, 5, 7, 11, 13, 17)


def halton_points(count: int, dim: int, skip: int = 1) -> np.ndarray:
    """Deterministic low-discrepancy start schedule in the unit ``dim``-cube."""
    bases = _HALTON_BASES[:dim]
    pts = np.empty((count, dim))
    for i in range(count):
        for j, b in enumerate(bases):
            pts[i, j] = halton(i + skip, b)
    return pts
