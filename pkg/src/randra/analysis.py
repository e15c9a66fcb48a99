"""Associativity, witness conditions, flexible atoms and the closed-form bounds.

All atom arguments use the table convention of :mod:`randra.core`: diversity
atoms are ``0..n-1`` and the identity is ``n``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple

from .core import (
    CompositionTable,
    CycleStructure,
    build_composition_table,
    cycle_count,
    cycles,
    format_atom,
    format_atom_set,
)

__all__ = [
    "AssociativityReport",
    "FlexibilityReport",
    "Violation",
    "critical_p",
    "expected_flexible_count",
    "failure_bound",
    "flexible_atoms",
    "is_associative",
    "witness_condition",
]


class Violation(NamedTuple):
    """Atoms ``u, v, w`` with ``(u;v);w`` = ``left`` but ``u;(v;w)`` = ``right``."""

    u: int
    v: int
    w: int
    left: int
    right: int

    def describe(self, n: int) -> str:
        u, v, w = (format_atom(x, n) for x in (self.u, self.v, self.w))
        return (
            f"({u};{v});{w} = {format_atom_set(self.left, n)} but "
            f"{u};({v};{w}) = {format_atom_set(self.right, n)}"
        )


@dataclass(frozen=True)
class AssociativityReport:
    associative: bool
    first_violation: Violation | None
    paper_condition_holds: bool
    extended_condition_holds: bool
    full_identity_condition_holds: bool

    def __post_init__(self) -> None:
        if self.associative and self.first_violation is not None:
            raise ValueError("an associative structure has no violation")


@dataclass(frozen=True)
class FlexibilityReport:
    flexible_atoms: int  # mask over the diversity atoms
    count: int
    representable_flag: str  # "representable" or "unknown"

    @property
    def has_flexible(self) -> bool:
        return self.count > 0

    def atoms(self) -> list[int]:
        return [a for a in range(self.flexible_atoms.bit_length()) if self.flexible_atoms >> a & 1]


def _set_then_atom(rows, x: int, w: int) -> int:
    """``X;w`` for an atom mask ``x``."""
    out, u = 0, 0
    while x:
        if x & 1:
            out |= rows[u][w]
        x >>= 1
        u += 1
    return out


def _atom_then_set(row_u, y: int) -> int:
    """``u;Y`` given the table row of ``u``."""
    out, v = 0, 0
    while y:
        if y & 1:
            out |= row_u[v]
        y >>= 1
        v += 1
    return out


def find_violation(t: CompositionTable) -> Violation | None:
    """Lexicographically least ``(u, v, w)`` where atom-level associativity fails."""
    rows = t.entries
    atoms = range(t.n + 1)
    for u in atoms:
        row_u = rows[u]
        for v in atoms:
            uv = row_u[v]
            for w in atoms:
                left = _set_then_atom(rows, uv, w)
                right = _atom_then_set(row_u, rows[v][w])
                if left != right:
                    return Violation(u, v, w, left, right)
    return None


def witness_condition(
    s: CycleStructure, include_identity: bool = False, identity_everywhere: bool = False
) -> bool:
    """Witness condition for every pair of cycles sharing a third atom.

    For all orientations ``(a, b, c)`` and ``(x, y, c)`` of mandatory diversity
    cycles some diversity atom ``z`` must make ``{a, x, z}`` and ``{b, y, z}``
    mandatory.  ``include_identity`` also lets ``z`` be ``1'``, where
    ``{u, v, 1'}`` counts as mandatory iff ``u == v``.

    ``identity_everywhere`` goes further and admits ``1'`` in all six
    positions, so the shared atom ``c`` may be ``1'`` as well.  That variant
    additionally demands ``a;x != 0`` for all diversity ``a, x`` and is
    equivalent to associativity; the other two are not (the empty structure
    satisfies both vacuously).
    """
    t = build_composition_table(s)
    n = s.n
    rows = t.entries
    atoms = range(n + 1) if identity_everywhere else range(n)
    keep = (1 << (n + 1)) - 1 if include_identity or identity_everywhere else (1 << n) - 1
    for c in atoms:
        sharing = [(a, b) for a in atoms for b in atoms if rows[a][b] >> c & 1]
        for a, b in sharing:
            for x, y in sharing:
                if not rows[a][x] & rows[b][y] & keep:
                    return False
    return True


def is_associative(s: CycleStructure) -> AssociativityReport:
    """Decide associativity of the algebra generated by ``s``.

    By complete additivity the atom-level identity ``(u;v);w = u;(v;w)`` over
    all ``n + 1`` atoms decides associativity of the full ``2**(n+1)``-element
    algebra.
    """
    violation = find_violation(build_composition_table(s))
    return AssociativityReport(
        associative=violation is None,
        first_violation=violation,
        paper_condition_holds=witness_condition(s, include_identity=False),
        extended_condition_holds=witness_condition(s, include_identity=True),
        full_identity_condition_holds=witness_condition(s, identity_everywhere=True),
    )


def flexible_atoms(s: CycleStructure, associative: bool | None = None) -> FlexibilityReport:
    """Atoms ``z`` such that every cycle containing ``z`` is mandatory.

    A flexible atom only certifies representability of a genuine relation
    algebra, so the flag is ``"representable"`` only when ``s`` is also
    associative.  Pass ``associative`` to skip recomputing it.
    """
    missing = 0
    for i, c in enumerate(cycles(s.n)):
        if not s.bits >> i & 1:
            for a in c:
                missing |= 1 << a
    mask = ((1 << s.n) - 1) & ~missing
    count = mask.bit_count()
    if count and associative is None:
        associative = find_violation(build_composition_table(s)) is None
    flag = "representable" if count and associative else "unknown"
    return FlexibilityReport(mask, count, flag)


def expected_flexible_count(n: int, p: float) -> float:
    """Expected number of flexible atoms, ``n * p ** C(n+1, 2)``."""
    if n < 1:
        raise ValueError("n must be at least 1")
    if not 0.0 <= p <= 1.0:
        raise ValueError(f"p must lie in [0, 1], got {p!r}")
    return n * p ** math.comb(n + 1, 2)


def critical_p(n: int) -> float:
    """Smallest ``p`` with one expected flexible atom, ``n ** (-1 / C(n+1, 2))``."""
    if n < 1:
        raise ValueError("n must be at least 1")
    return math.exp(-math.log(n) / math.comb(n + 1, 2))


def failure_bound(n: int, p: float) -> tuple[float, float]:
    """Union bound on the probability that associativity fails.

    Returns ``(C(M(n), 2) * (1 - p**2) ** n, n**6 / 72 * (1 - p**2) ** n)``,
    both evaluated in log space.
    """
    if n < 1:
        raise ValueError("n must be at least 1")
    if not 0.0 < p <= 1.0:
        raise ValueError(f"p must lie in (0, 1], got {p!r}")
    if p == 1.0:
        return 0.0, 0.0
    log_decay = n * math.log1p(-p * p)
    pairs = math.comb(cycle_count(n), 2)
    union = _safe_exp(math.log(pairs) + log_decay) if pairs else 0.0
    asymptotic = _safe_exp(6 * math.log(n) - math.log(72) + log_decay)
    return union, asymptotic


def _safe_exp(x: float) -> float:
    try:
        return math.exp(x)
    except OverflowError:
        return math.inf
