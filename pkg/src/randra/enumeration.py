"""Exhaustive enumeration of small cycle structures and isomorphism classes.

Two structures are isomorphic when a permutation of the diversity atoms maps
one onto the other (the identity is fixed).  The canonical form of a
structure is the numerically least bit vector in its orbit.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from functools import lru_cache
from itertools import permutations
from typing import Iterator, NamedTuple, Sequence

import numpy as np

from .analysis import Violation, find_violation
from .core import CycleStructure, build_composition_table, cycle_count, cycle_index, cycles, parse_structure, serialize_structure
from .kernels import associative_batch, flexible_count_batch, ints_to_bits

__all__ = [
    "CANONICALIZE_MAX_N",
    "ENUMERATION_MAX_CYCLES",
    "CanonicalForm",
    "Census",
    "Counterexample",
    "all_structures",
    "canonicalize",
    "catalog_text",
    "census",
    "find_nonassociative_examples",
    "orbit",
    "parse_catalog",
    "permute",
]

ENUMERATION_MAX_CYCLES = 25
CANONICALIZE_MAX_N = 10

_CHUNK = 1 << 14


def _check_enumerable(n: int) -> None:
    m = cycle_count(n)
    if m > ENUMERATION_MAX_CYCLES:
        raise ValueError(
            f"refusing to enumerate 2**{m} structures for n = {n}: "
            f"the cap is M(n) <= {ENUMERATION_MAX_CYCLES} cycles"
        )


def all_structures(n: int) -> Iterator[CycleStructure]:
    """Every structure over ``n`` atoms, in ascending bit-vector order."""
    _check_enumerable(n)
    for bits in range(1 << cycle_count(n)):
        yield CycleStructure(n, bits)


def _cycle_map(n: int, sigma: Sequence[int]) -> list[int]:
    """Where each cycle index goes under the atom relabelling ``sigma``."""
    return [cycle_index((sigma[i], sigma[j], sigma[k]), n) for i, j, k in cycles(n)]


@lru_cache(maxsize=8)
def _cycle_maps(n: int) -> tuple[tuple[int, ...], ...]:
    return tuple(tuple(_cycle_map(n, sigma)) for sigma in permutations(range(n)))


def permute(s: CycleStructure, sigma: Sequence[int]) -> CycleStructure:
    """Image of ``s`` under the atom relabelling ``a -> sigma[a]``."""
    if sorted(sigma) != list(range(s.n)):
        raise ValueError(f"{sigma!r} is not a permutation of range({s.n})")
    target = _cycle_map(s.n, sigma)
    return CycleStructure(s.n, sum(1 << target[i] for i in s.mandatory_indices()))


def _images(s: CycleStructure) -> Iterator[int]:
    idx = s.mandatory_indices()
    if s.n <= 6:
        for target in _cycle_maps(s.n):
            yield sum(1 << target[i] for i in idx)
    else:
        for sigma in permutations(range(s.n)):
            target = _cycle_map(s.n, sigma)
            yield sum(1 << target[i] for i in idx)


def orbit(s: CycleStructure) -> set[int]:
    if s.n > CANONICALIZE_MAX_N:
        raise ValueError(f"orbit enumeration is limited to n <= {CANONICALIZE_MAX_N}")
    return set(_images(s))


@dataclass(frozen=True)
class CanonicalForm:
    n: int
    canonical_bits: int

    @property
    def structure(self) -> CycleStructure:
        return CycleStructure(self.n, self.canonical_bits)


def canonicalize(s: CycleStructure) -> CanonicalForm:
    """Least bit vector over all ``n!`` relabellings of the diversity atoms."""
    if s.n > CANONICALIZE_MAX_N:
        raise ValueError(f"canonicalize enumerates n! permutations; n = {s.n} exceeds {CANONICALIZE_MAX_N}")
    return CanonicalForm(s.n, min(_images(s)))


def _canonical_batch(values: np.ndarray, n: int) -> np.ndarray:
    """Canonical bits for a batch of small (``M <= 25``) integer bit vectors."""
    bits = ints_to_bits(values, n).astype(np.int64)
    best = None
    for target in _cycle_maps(n):
        weights = np.left_shift(np.int64(1), np.asarray(target, dtype=np.int64))
        image = bits @ weights
        best = image if best is None else np.minimum(best, image)
    return best


class Counterexample(NamedTuple):
    structure: CycleStructure
    violation: Violation


@dataclass
class Census:
    n: int
    total_structures: int
    associative_labeled: int = 0
    associative_classes: int = 0
    with_flexible_labeled: int = 0
    nonassociative_example: CycleStructure | None = None
    classes: list[int] = field(default_factory=list, repr=False)

    def to_dict(self) -> dict:
        return {
            "n": self.n,
            "total": self.total_structures,
            "associative_labeled": self.associative_labeled,
            "associative_classes": self.associative_classes,
            "with_flexible_labeled": self.with_flexible_labeled,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2)


def census(n: int) -> Census:
    """Count associative structures, their isomorphism classes and flexible ones.

    Structures are streamed in blocks; only the set of canonical classes is
    kept in memory.
    """
    _check_enumerable(n)
    total = 1 << cycle_count(n)
    out = Census(n=n, total_structures=total)
    classes: set[int] = set()
    for lo in range(0, total, _CHUNK):
        values = np.arange(lo, min(total, lo + _CHUNK), dtype=np.int64)
        bits = ints_to_bits(values, n)
        assoc = associative_batch(bits, n)
        out.associative_labeled += int(assoc.sum())
        out.with_flexible_labeled += int(((flexible_count_batch(bits, n) > 0) & assoc).sum())
        if out.nonassociative_example is None and not assoc.all():
            first = int(values[np.argmin(assoc)])
            out.nonassociative_example = CycleStructure(n, first)
        if assoc.any():
            classes.update(int(v) for v in _canonical_batch(values[assoc], n))
    out.classes = sorted(classes)
    out.associative_classes = len(out.classes)
    return out


def find_nonassociative_examples(n: int, limit: int) -> list[Counterexample]:
    """The first ``limit`` non-associative structures in numeric order."""
    _check_enumerable(n)
    found: list[Counterexample] = []
    for s in all_structures(n):
        if len(found) >= limit:
            break
        violation = find_violation(build_composition_table(s))
        if violation is not None:
            found.append(Counterexample(s, violation))
    return found


def catalog_text(c: Census) -> str:
    """One ``.cyc`` block per associative class, ascending canonical bits."""
    blocks = []
    for number, bits in enumerate(c.classes, start=1):
        s = CycleStructure(c.n, bits)
        blocks.append(f"# class {number} of {len(c.classes)} canonical_bits {bits:x}\n" + serialize_structure(s))
    return "\n".join(blocks)


def parse_catalog(text: str) -> list[CycleStructure]:
    """Split a catalog into its structures (blocks start at each ``n`` header)."""
    blocks: list[list[str]] = []
    for line in text.splitlines():
        if line.strip().startswith("n ") or line.strip() == "n":
            blocks.append([])
        if blocks:
            blocks[-1].append(line)
    return [parse_structure("\n".join(b)) for b in blocks]
