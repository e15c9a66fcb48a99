"""Atoms, diversity cycles and cycle structures.

Diversity atoms are the integers ``0..n-1``.  The identity atom ``1'`` never
appears inside a cycle; wherever an atom set is represented as a bit mask it
occupies bit position ``n`` (see :func:`identity_atom`).

A cycle is a sorted triple ``(i, j, k)`` with ``i <= j <= k``.  Cycles over
``n`` atoms are numbered lexicographically, so for ``n = 3`` the order is::

    (0,0,0) (0,0,1) (0,0,2) (0,1,1) (0,1,2) (0,2,2) (1,1,1) (1,1,2) (1,2,2) (2,2,2)

A :class:`CycleStructure` is ``n`` together with an integer whose bit ``i`` is
set when cycle number ``i`` is mandatory.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from functools import lru_cache
from itertools import combinations_with_replacement
from math import comb
from typing import Iterable, Iterator, Sequence

__all__ = [
    "MAX_ATOMS",
    "Cycle",
    "CycleFormatError",
    "CycleIndexer",
    "CycleStructure",
    "CompositionTable",
    "build_composition_table",
    "compose_sets",
    "cycle_at",
    "cycle_count",
    "cycle_index",
    "cycle_type_census",
    "cycles",
    "format_atom",
    "format_atom_set",
    "format_cycle",
    "identity_atom",
    "parse_structure",
    "serialize_structure",
]

#: Largest number of diversity atoms accepted anywhere in the package.
#: Atom sets are Python ints, so this is a sanity cap rather than a word size.
MAX_ATOMS = 256

Cycle = tuple[int, int, int]


def _check_n(n: int) -> None:
    if not isinstance(n, int) or isinstance(n, bool):
        raise TypeError(f"n must be an int, got {type(n).__name__}")
    if n < 1:
        raise ValueError("n must be at least 1 (no diversity atoms gives a degenerate model)")
    if n > MAX_ATOMS:
        raise ValueError(f"n = {n} exceeds MAX_ATOMS = {MAX_ATOMS}")


def cycle_count(n: int) -> int:
    """Number of diversity cycles over ``n`` atoms, ``n + 2*C(n,2) + C(n,3)``."""
    if n < 1:
        raise ValueError("n must be at least 1 (no diversity atoms gives a degenerate model)")
    return n + 2 * comb(n, 2) + comb(n, 3)


def cycle_type_census(n: int) -> tuple[int, int, int]:
    """Return the numbers of 1-cycles (aaa), 2-cycles (abb) and 3-cycles (abc)."""
    if n < 1:
        raise ValueError("n must be at least 1")
    return n, 2 * comb(n, 2), comb(n, 3)


def identity_atom(n: int) -> int:
    """Position of ``1'`` in atom masks and composition tables over ``n`` atoms."""
    return n


def _sorted_triple(c: Sequence[int]) -> Cycle:
    if len(c) != 3:
        raise ValueError(f"a cycle has exactly three atoms, got {tuple(c)!r}")
    i, j, k = sorted(int(a) for a in c)
    return i, j, k


def cycle_index(c: Sequence[int], n: int) -> int:
    """Position of the cycle ``c`` in the lexicographic order over ``n`` atoms.

    The atoms of ``c`` may be given in any order.
    """
    i, j, k = _sorted_triple(c)
    if i < 0 or k >= n:
        raise ValueError(f"cycle {tuple(c)!r} has an atom outside [0, {n})")
    # multisets whose least atom is >= i number C(n-i+2, 3)
    first = cycle_count(n) - comb(n - i + 2, 3)
    second = comb(n - i + 1, 2) - comb(n - j + 1, 2)
    return first + second + (k - j)


def cycle_at(idx: int, n: int) -> Cycle:
    """Inverse of :func:`cycle_index`."""
    total = cycle_count(n)
    if not 0 <= idx < total:
        raise IndexError(f"cycle index {idx} out of range for n = {n} (M = {total})")
    i = 0
    while idx >= comb(n - i + 1, 2):
        idx -= comb(n - i + 1, 2)
        i += 1
    j = i
    while idx >= n - j:
        idx -= n - j
        j += 1
    return i, j, j + idx


@lru_cache(maxsize=64)
def cycles(n: int) -> tuple[Cycle, ...]:
    """All cycles over ``n`` atoms in index order."""
    _check_n(n)
    return tuple(combinations_with_replacement(range(n), 3))


@dataclass(frozen=True)
class CycleIndexer:
    """Bidirectional map between cycles and their indices for a fixed ``n``."""

    n: int

    def __post_init__(self) -> None:
        _check_n(self.n)

    @property
    def total(self) -> int:
        return cycle_count(self.n)

    def index(self, c: Sequence[int]) -> int:
        return cycle_index(c, self.n)

    def cycle(self, idx: int) -> Cycle:
        return cycle_at(idx, self.n)

    def __len__(self) -> int:
        return self.total

    def __iter__(self) -> Iterator[Cycle]:
        return iter(cycles(self.n))


_LETTERS = "abcdefghijklmnopqrstuvwxyz"


def format_atom(a: int, n: int) -> str:
    """Render an atom: letters for ``n <= 26``, ``1'`` for the identity."""
    if a == identity_atom(n):
        return "1'"
    if not 0 <= a < n:
        raise ValueError(f"atom {a} out of range for n = {n}")
    return _LETTERS[a] if n <= len(_LETTERS) else f"d{a}"


def format_atom_set(mask: int, n: int) -> str:
    """Render an atom mask as ``{1',a,c}``; the identity is listed first."""
    names = []
    if mask >> n & 1:
        names.append("1'")
    names += [format_atom(a, n) for a in range(n) if mask >> a & 1]
    return "{" + ",".join(names) + "}"


def format_cycle(c: Sequence[int], n: int) -> str:
    return "".join(format_atom(a, n) for a in c) if n <= len(_LETTERS) else " ".join(map(str, c))


@dataclass(frozen=True)
class CycleStructure:
    """One event of the random model: the set of mandatory diversity cycles.

    ``bits`` is a non-negative int; bit ``i`` is set iff ``cycle_at(i, n)``
    is mandatory.  Instances are immutable and hashable.
    """

    n: int
    bits: int = 0

    def __post_init__(self) -> None:
        _check_n(self.n)
        if self.bits < 0 or self.bits >> cycle_count(self.n):
            raise ValueError(f"bit vector does not fit the {cycle_count(self.n)} cycles of n = {self.n}")

    @classmethod
    def from_cycles(cls, n: int, mandatory: Iterable[Sequence[int]]) -> "CycleStructure":
        bits = 0
        for c in mandatory:
            bits |= 1 << cycle_index(c, n)
        return cls(n, bits)

    @classmethod
    def full(cls, n: int) -> "CycleStructure":
        """Every cycle mandatory (the ``p = 1`` structure)."""
        return cls(n, (1 << cycle_count(n)) - 1)

    @classmethod
    def empty(cls, n: int) -> "CycleStructure":
        return cls(n, 0)

    @property
    def size(self) -> int:
        """Length of the bit vector, ``M(n)``."""
        return cycle_count(self.n)

    def __len__(self) -> int:
        """Number of mandatory cycles."""
        return self.bits.bit_count()

    def is_mandatory(self, *atoms: int) -> bool:
        """Whether the cycle on the three given atoms (any order) is mandatory."""
        return bool(self.bits >> cycle_index(atoms, self.n) & 1)

    def __contains__(self, c: Sequence[int]) -> bool:
        return self.is_mandatory(*c)

    def mandatory_indices(self) -> list[int]:
        bits, out, i = self.bits, [], 0
        while bits:
            if bits & 1:
                out.append(i)
            bits >>= 1
            i += 1
        return out

    def mandatory_cycles(self) -> list[Cycle]:
        all_cycles = cycles(self.n)
        return [all_cycles[i] for i in self.mandatory_indices()]

    def with_cycles(self, extra: Iterable[Sequence[int]]) -> "CycleStructure":
        return CycleStructure(self.n, self.bits | CycleStructure.from_cycles(self.n, extra).bits)

    def issubset(self, other: "CycleStructure") -> bool:
        return self.n == other.n and self.bits & ~other.bits == 0

    def to_bool_list(self) -> list[bool]:
        return [bool(self.bits >> i & 1) for i in range(self.size)]

    def __repr__(self) -> str:
        shown = ",".join(format_cycle(c, self.n) for c in self.mandatory_cycles()[:12])
        more = "" if len(self) <= 12 else f",...(+{len(self) - 12})"
        return f"CycleStructure(n={self.n}, {{{shown}{more}}})"


@dataclass(frozen=True)
class CompositionTable:
    """Atom-level composition of the algebra determined by a cycle structure.

    ``entries[u][v]`` is the mask of atoms below ``u;v`` for ``u, v`` in
    ``0..n`` where ``n`` is the identity.
    """

    n: int
    entries: tuple[tuple[int, ...], ...]

    @property
    def identity(self) -> int:
        return self.n

    @property
    def atoms(self) -> range:
        return range(self.n + 1)

    def entry(self, u: int, v: int) -> int:
        return self.entries[u][v]

    def __str__(self) -> str:
        n = self.n
        order = [n, *range(n)]
        width = max(len(format_atom_set(self.entries[u][v], n)) for u in order for v in order)
        width = max(width, 3)
        lines = [" " * 4 + " ".join(format_atom(v, n).ljust(width) for v in order)]
        for u in order:
            row = " ".join(format_atom_set(self.entries[u][v], n).ljust(width) for v in order)
            lines.append(format_atom(u, n).ljust(4) + row)
        return "\n".join(lines)


def build_composition_table(s: CycleStructure) -> CompositionTable:
    """Derive the composition table: ``c <= a;b`` iff ``{a,b,c}`` is mandatory."""
    n = s.n
    one = identity_atom(n)
    rows = [[0] * (n + 1) for _ in range(n + 1)]
    for x in range(n + 1):
        rows[one][x] = rows[x][one] = 1 << x
    for a in range(n):
        rows[a][a] |= 1 << one
    for i, j, k in s.mandatory_cycles():
        # every orientation of the multiset; duplicates are harmless
        for a, b, c in ((i, j, k), (i, k, j), (j, k, i)):
            rows[a][b] |= 1 << c
            rows[b][a] |= 1 << c
    return CompositionTable(n, tuple(tuple(r) for r in rows))


def compose_sets(t: CompositionTable, x: int, y: int) -> int:
    """Composition of two atom sets given as masks, by additivity."""
    out = 0
    u = 0
    while x >> u:
        if x >> u & 1:
            row = t.entries[u]
            v = 0
            while y >> v:
                if y >> v & 1:
                    out |= row[v]
                v += 1
        u += 1
    return out


# .cyc text format ---------------------------------------------------------


class CycleFormatError(ValueError):
    """A ``.cyc`` document could not be parsed; ``line`` is 1-based."""

    def __init__(self, message: str, line: int | None = None):
        self.line = line
        super().__init__(f"line {line}: {message}" if line is not None else message)


_HEADER = re.compile(r"^n\s+(\d+)$")


def parse_structure(text: str) -> CycleStructure:
    """Parse a ``.cyc`` document (cycle-list or ``bits <hex>`` form)."""
    n = None
    bits = 0
    seen_bits_line = False
    seen_cycle_line = False
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        if n is None:
            m = _HEADER.match(line)
            if not m:
                raise CycleFormatError(f"expected header 'n <int>', got {line!r}", lineno)
            n = int(m.group(1))
            if n < 1 or n > MAX_ATOMS:
                raise CycleFormatError(f"atom count {n} outside [1, {MAX_ATOMS}]", lineno)
            total = cycle_count(n)
            continue
        if line.startswith("bits"):
            parts = line.split()
            if seen_bits_line or seen_cycle_line or len(parts) != 2:
                raise CycleFormatError("a 'bits' line must be the only line after the header", lineno)
            try:
                bits = int(parts[1], 16)
            except ValueError:
                raise CycleFormatError(f"bad hex bit vector {parts[1]!r}", lineno) from None
            if bits >> total:
                raise CycleFormatError(f"bit vector sets bits beyond the {total} cycles of n = {n}", lineno)
            seen_bits_line = True
            continue
        if seen_bits_line:
            raise CycleFormatError("cycle lines cannot follow a 'bits' line", lineno)
        parts = line.split()
        if len(parts) != 3 or not all(p.isdigit() for p in parts):
            raise CycleFormatError(f"expected three atom indices, got {line!r}", lineno)
        triple = tuple(int(p) for p in parts)
        if max(triple) >= n:
            raise CycleFormatError(f"atom out of range: {max(triple)} >= n = {n}", lineno)
        if list(triple) != sorted(triple):
            raise CycleFormatError(f"cycle atoms must be sorted ascending: {line!r}", lineno)
        bit = 1 << cycle_index(triple, n)
        if bits & bit:
            raise CycleFormatError(f"duplicate cycle {line!r}", lineno)
        bits |= bit
        seen_cycle_line = True
    if n is None:
        raise CycleFormatError("missing header 'n <int>'")
    return CycleStructure(n, bits)


def serialize_structure(s: CycleStructure, form: str = "cycles") -> str:
    """Render ``s`` as ``.cyc`` text; ``form`` is ``"cycles"`` or ``"bits"``."""
    lines = [f"n {s.n}"]
    if form == "bits":
        digits = -(-s.size // 4)
        lines.append(f"bits {s.bits:0{digits}x}")
    elif form == "cycles":
        lines += [f"{i} {j} {k}" for i, j, k in s.mandatory_cycles()]
    else:
        raise ValueError(f"unknown form {form!r}; expected 'cycles' or 'bits'")
    return "\n".join(lines) + "\n"
