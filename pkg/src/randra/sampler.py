"""Seeded sampling of the random cycle model.

Every cycle, in index order, consumes one 64-bit draw from a splitmix64
stream and is mandatory iff the draw is below ``floor(p * 2**64)``.  A draw
is consumed even when ``p`` is 0 or 1, so stream positions never depend on
``p``.

The ``k``-th draw (0-based) of a stream seeded with ``s`` is
``mix(s + (k + 1) * GOLDEN)``, which lets whole batches of trials be drawn at
once with numpy.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .core import CycleStructure, cycle_count, _check_n

__all__ = [
    "GOLDEN",
    "SamplerConfig",
    "SplitMix64",
    "bits_to_structures",
    "empirical_cycle_frequency",
    "mix64",
    "sample",
    "sample_bits",
    "splitmix64_next",
    "threshold",
    "trial_seed",
    "trial_seeds",
]

MASK64 = (1 << 64) - 1
GOLDEN = 0x9E3779B97F4A7C15
_M1 = 0xBF58476D1CE4E5B9
_M2 = 0x94D049BB133111EB


def mix64(z: int) -> int:
    """The splitmix64 output finalizer."""
    z &= MASK64
    z = ((z ^ (z >> 30)) * _M1) & MASK64
    z = ((z ^ (z >> 27)) * _M2) & MASK64
    return z ^ (z >> 31)


def splitmix64_next(state: int) -> tuple[int, int]:
    """Advance ``state`` once; return ``(new_state, output)``."""
    state = (state + GOLDEN) & MASK64
    return state, mix64(state)


class SplitMix64:
    """Minimal splitmix64 stream."""

    def __init__(self, seed: int):
        self.state = seed & MASK64

    def next(self) -> int:
        self.state, out = splitmix64_next(self.state)
        return out

    __next__ = next

    def __iter__(self):
        return self


def trial_seed(master_seed: int, trial_index: int) -> int:
    """Seed for trial ``trial_index`` of a run seeded with ``master_seed``."""
    start = (master_seed + trial_index * GOLDEN) & MASK64
    return splitmix64_next(start)[1]


def threshold(p: float) -> int:
    """``floor(p * 2**64)``, computed exactly from the binary value of ``p``."""
    if not 0.0 <= p <= 1.0:
        raise ValueError(f"p must lie in [0, 1], got {p!r}")
    return int(Fraction(p) * (1 << 64))


@dataclass(frozen=True)
class SamplerConfig:
    n: int
    p: float
    seed: int

    def __post_init__(self) -> None:
        _check_n(self.n)
        if not 0.0 <= self.p <= 1.0:
            raise ValueError(f"p must lie in [0, 1], got {self.p!r}")
        if not 0 <= self.seed <= MASK64:
            raise ValueError("seed must be an unsigned 64-bit integer")


def sample(cfg: SamplerConfig) -> CycleStructure:
    """Draw one structure; pure-Python reference path."""
    limit = threshold(cfg.p)
    rng = SplitMix64(cfg.seed)
    bits = 0
    for i in range(cycle_count(cfg.n)):
        if rng.next() < limit:
            bits |= 1 << i
    return CycleStructure(cfg.n, bits)


# vectorised paths -----------------------------------------------------------


def _mix64_np(z: np.ndarray) -> np.ndarray:
    z = (z ^ (z >> np.uint64(30))) * np.uint64(_M1)
    z = (z ^ (z >> np.uint64(27))) * np.uint64(_M2)
    return z ^ (z >> np.uint64(31))


def trial_seeds(master_seed: int, start: int, stop: int) -> np.ndarray:
    """``trial_seed(master_seed, i)`` for ``i`` in ``range(start, stop)``."""
    idx = np.arange(start, stop, dtype=np.uint64)
    with np.errstate(over="ignore"):
        state = np.uint64(master_seed & MASK64) + idx * np.uint64(GOLDEN) + np.uint64(GOLDEN)
        return _mix64_np(state)


def sample_bits(n: int, p: float, seeds: np.ndarray) -> np.ndarray:
    """Sample one structure per seed; returns a ``(len(seeds), M(n))`` bool array.

    Row ``r`` equals ``sample(SamplerConfig(n, p, seeds[r])).to_bool_list()``.
    """
    m = cycle_count(n)
    limit = threshold(p)
    seeds = np.asarray(seeds, dtype=np.uint64)
    if limit == 0:
        return np.zeros((len(seeds), m), dtype=bool)
    if limit == 1 << 64:
        return np.ones((len(seeds), m), dtype=bool)
    steps = np.arange(1, m + 1, dtype=np.uint64) * np.uint64(GOLDEN)
    with np.errstate(over="ignore"):
        draws = _mix64_np(seeds[:, None] + steps[None, :])
    return draws < np.uint64(limit)


def bits_to_structures(n: int, rows: np.ndarray) -> list[CycleStructure]:
    weights = [1 << i for i in range(rows.shape[1])]
    out = []
    for row in rows:
        out.append(CycleStructure(n, sum(w for w, b in zip(weights, row) if b)))
    return out


def empirical_cycle_frequency(n: int, p: float, seed: int, trials: int, chunk: int = 20000) -> np.ndarray:
    """Fraction of ``trials`` samples in which each cycle is mandatory."""
    if trials < 1:
        raise ValueError("trials must be at least 1")
    counts = np.zeros(cycle_count(n), dtype=np.int64)
    for start in range(0, trials, chunk):
        stop = min(trials, start + chunk)
        counts += sample_bits(n, p, trial_seeds(seed, start, stop)).sum(axis=0)
    return counts / trials
