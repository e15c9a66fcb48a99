"""Batched numpy kernels over many structures with the same ``n``.

Structures enter as a ``(B, M(n))`` bool matrix (one row per structure, column
``i`` = cycle ``i``).  Composition is held as a ``(B, N, N, N)`` tensor with
``N = n + 1`` and the identity at index ``n``: ``T[b, u, v, w]`` is true iff
``w <= u;v`` in structure ``b``.  Relational products become float32 batched
matrix products, which keeps the Monte Carlo runs inside BLAS.
"""

from __future__ import annotations

from functools import lru_cache

import numpy as np

from .core import cycle_count, cycles

__all__ = [
    "associative_batch",
    "composition_tensor",
    "containing_indices",
    "flexible_count_batch",
    "ints_to_bits",
    "witness_batch",
]

# keeps each float32 working array below roughly 64 MB
_WORK_ELEMENTS = 1 << 24


@lru_cache(maxsize=32)
def _orientation_index(n: int) -> np.ndarray:
    """``idx[a, b, c]`` = index of the cycle ``{a, b, c}``."""
    idx = np.empty((n, n, n), dtype=np.intp)
    for i, (a, b, c) in enumerate(cycles(n)):
        for u, v, w in ((a, b, c), (a, c, b), (b, a, c), (b, c, a), (c, a, b), (c, b, a)):
            idx[u, v, w] = i
    return idx


@lru_cache(maxsize=32)
def containing_indices(n: int) -> np.ndarray:
    """Row ``z`` lists the ``C(n+1, 2)`` cycle indices whose multiset contains ``z``."""
    rows = [[i for i, c in enumerate(cycles(n)) if z in c] for z in range(n)]
    return np.array(rows, dtype=np.intp)


def ints_to_bits(values, n: int) -> np.ndarray:
    """Expand integer bit vectors into the ``(B, M(n))`` bool layout."""
    m = cycle_count(n)
    if m > 64:
        raise ValueError(f"integer bit vectors need M(n) <= 64, got M({n}) = {m}")
    vals = np.asarray(values, dtype=np.uint64)
    shifts = np.arange(m, dtype=np.uint64)
    return ((vals[:, None] >> shifts[None, :]) & np.uint64(1)).astype(bool)


def composition_tensor(bits: np.ndarray, n: int) -> np.ndarray:
    bits = np.asarray(bits, dtype=bool)
    b = bits.shape[0]
    big = n + 1
    t = np.zeros((b, big, big, big), dtype=bool)
    t[:, :n, :n, :n] = bits[:, _orientation_index(n)]
    diag = np.arange(n)
    t[:, diag, diag, n] = True
    every = np.arange(big)
    t[:, n, every, every] = True
    t[:, every, n, every] = True
    return t


def _chunks(total: int, per_item: int):
    step = max(1, _WORK_ELEMENTS // max(per_item, 1))
    for start in range(0, total, step):
        yield start, min(total, start + step)


def associative_batch(bits: np.ndarray, n: int) -> np.ndarray:
    """Atom-level associativity ``(u;v);w == u;(v;w)`` for every structure."""
    bits = np.asarray(bits, dtype=bool)
    big = n + 1
    out = np.empty(bits.shape[0], dtype=bool)
    for lo, hi in _chunks(bits.shape[0], big**4):
        t = composition_tensor(bits[lo:hi], n).astype(np.float32)
        b = hi - lo
        # left[u, v, w, y] = sum_x t[u, v, x] * t[x, w, y]
        left = t.reshape(b, big * big, big) @ t.reshape(b, big, big * big)
        # right[u, v, w, y] = sum_x t[v, w, x] * t[u, x, y]
        right = np.matmul(t.reshape(b, 1, big * big, big), t)
        same = (left.reshape(b, -1) > 0) == (right.reshape(b, -1) > 0)
        out[lo:hi] = same.all(axis=1)
    return out


def witness_batch(bits: np.ndarray, n: int, include_identity: bool, identity_everywhere: bool = False) -> np.ndarray:
    """Batched form of :func:`randra.analysis.witness_condition`.

    With ``g[a, b, x, y] = sum_c t[a, b, c] t[x, y, c]`` the diversity-only
    condition reads ``g[a, b, x, y] > 0  =>  g[a, x, b, y] > 0``: the same
    product counts shared third atoms and candidate witnesses.  A witness
    ``z = 1'`` exists exactly when ``a == x`` and ``b == y``.
    """
    bits = np.asarray(bits, dtype=bool)
    k = n + 1 if identity_everywhere else n
    out = np.empty(bits.shape[0], dtype=bool)
    if include_identity and not identity_everywhere:
        eye = np.eye(k, dtype=bool)
        identity_witness = eye[:, None, :, None] & eye[None, :, None, :]  # [a, b, x, y]: a == x and b == y
    for lo, hi in _chunks(bits.shape[0], k**4):
        t = composition_tensor(bits[lo:hi], n)[:, :k, :k, :k].astype(np.float32)
        b = hi - lo
        flat = t.reshape(b, k * k, k)
        g = (flat @ flat.transpose(0, 2, 1)).reshape(b, k, k, k, k) > 0
        witnessed = g.transpose(0, 1, 3, 2, 4)
        if include_identity and not identity_everywhere:
            witnessed = witnessed | identity_witness
        out[lo:hi] = ~(g & ~witnessed).reshape(b, -1).any(axis=1)
    return out


def flexible_count_batch(bits: np.ndarray, n: int) -> np.ndarray:
    bits = np.asarray(bits, dtype=bool)
    return bits[:, containing_indices(n)].all(axis=2).sum(axis=1)
