"""Per-atom graphs and quasirandomness diagnostics.

For a diversity atom ``a`` the graph ``G_a`` has the other ``n - 1``
diversity atoms as vertices, an edge ``{b, c}`` (``b != c``) when ``{a, b, c}``
is mandatory and a loop at ``b`` when ``{a, b, b}`` is mandatory.  Cycles that
contain ``a`` twice or more (``aab``, ``aaa``) never show up in ``G_a``.

A graph is judged against a target density ``p`` with three statistics:

* edge density, edges plus loops over ``C(n-1, 2) + (n - 1)`` slots;
* the fraction of vertices whose degree (a loop counts 1) is more than
  ``eps * (n - 1)`` away from ``p * (n - 1)``;
* the mean over vertex pairs of ``|codeg(u, v) - p**2 * (n - 3)|``, loops
  ignored.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass

import numpy as np

from .core import CycleStructure, cycle_index

__all__ = [
    "DEFAULT_DELTA",
    "DEFAULT_EPSILON",
    "AtomGraph",
    "GraphStats",
    "QuasirandomVerdict",
    "adjacency",
    "algebra_quasirandomness",
    "atom_graph",
    "graph_passes",
    "graph_stats",
]

DEFAULT_EPSILON = 0.1
DEFAULT_DELTA = 0.1


@dataclass(frozen=True)
class AtomGraph:
    center: int
    vertices: tuple[int, ...]
    edges: frozenset[tuple[int, int]]  # pairs stored as (low, high)
    loops: frozenset[int]

    @property
    def order(self) -> int:
        return len(self.vertices)

    def degree(self, v: int) -> int:
        return sum(1 for e in self.edges if v in e) + (v in self.loops)


def atom_graph(s: CycleStructure, a: int) -> AtomGraph:
    n = s.n
    if n < 2:
        raise ValueError("G_a needs at least one other diversity atom (n >= 2)")
    if not 0 <= a < n:
        raise ValueError(f"center {a} is not a diversity atom of n = {n}")
    others = tuple(b for b in range(n) if b != a)
    bits = s.bits
    edges = set()
    loops = set()
    for i, b in enumerate(others):
        if bits >> cycle_index((a, b, b), n) & 1:
            loops.add(b)
        for c in others[i + 1:]:
            if bits >> cycle_index((a, b, c), n) & 1:
                edges.add((b, c))
    return AtomGraph(a, others, frozenset(edges), frozenset(loops))


def adjacency(g: AtomGraph) -> tuple[np.ndarray, np.ndarray]:
    """Loopless 0/1 adjacency matrix and loop indicator, in ``g.vertices`` order."""
    pos = {v: i for i, v in enumerate(g.vertices)}
    adj = np.zeros((g.order, g.order), dtype=np.int64)
    for b, c in g.edges:
        adj[pos[b], pos[c]] = adj[pos[c], pos[b]] = 1
    loops = np.array([v in g.loops for v in g.vertices], dtype=np.int64)
    return adj, loops


@dataclass(frozen=True)
class GraphStats:
    edge_density: float
    degree_deviation_fraction: float
    codegree_deviation: float
    epsilon: float
    p: float


def graph_stats(g: AtomGraph, p: float, epsilon: float) -> GraphStats:
    """Edge density, degree-deviation fraction at ``epsilon``, mean codegree deviation."""
    if epsilon <= 0:
        raise ValueError("epsilon must be positive")
    m = g.order  # n - 1
    adj, loops = adjacency(g)
    slots = m * (m - 1) // 2 + m
    density = (len(g.edges) + len(g.loops)) / slots
    degrees = adj.sum(axis=1) + loops
    off = np.abs(degrees - p * m) > epsilon * m
    fraction = float(off.mean())
    if m >= 2:
        codeg = adj @ adj
        iu = np.triu_indices(m, k=1)
        codegree = float(np.abs(codeg[iu] - p * p * (m - 2)).mean())
    else:
        codegree = 0.0
    return GraphStats(density, fraction, codegree, epsilon, p)


def graph_passes(stats: GraphStats, n: int) -> bool:
    eps, p = stats.epsilon, stats.p
    codegree_slack = eps * p * p * (n - 3) + eps * math.sqrt(n)
    return (
        abs(stats.edge_density - p) <= eps
        and stats.degree_deviation_fraction <= eps
        and stats.codegree_deviation <= codegree_slack
    )


@dataclass(frozen=True)
class QuasirandomVerdict:
    per_atom_pass: tuple[bool, ...]
    per_atom_stats: tuple[GraphStats, ...]
    failing_fraction: float
    algebra_quasirandom: bool
    delta: float

    def to_dict(self) -> dict:
        atoms = {}
        for a, (ok, st) in enumerate(zip(self.per_atom_pass, self.per_atom_stats)):
            atoms[str(a)] = {
                "pass": ok,
                "edge_density": st.edge_density,
                "degree_deviation_fraction": st.degree_deviation_fraction,
                "codegree_deviation": st.codegree_deviation,
            }
        return {
            "algebra_quasirandom": self.algebra_quasirandom,
            "failing_fraction": self.failing_fraction,
            "epsilon": self.per_atom_stats[0].epsilon if self.per_atom_stats else None,
            "delta": self.delta,
            "atoms": atoms,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2)


def algebra_quasirandomness(
    s: CycleStructure, p: float, epsilon: float = DEFAULT_EPSILON, delta: float = DEFAULT_DELTA
) -> QuasirandomVerdict:
    """Judge every ``G_a``; the algebra passes when at most ``delta`` of them fail."""
    if s.n < 3:
        raise ValueError("quasirandomness diagnostics need n >= 3")
    stats = tuple(graph_stats(atom_graph(s, a), p, epsilon) for a in range(s.n))
    passes = tuple(graph_passes(st, s.n) for st in stats)
    failing = passes.count(False) / s.n
    return QuasirandomVerdict(passes, stats, failing, failing <= delta, delta)
