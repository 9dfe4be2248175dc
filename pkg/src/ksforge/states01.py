"""Noncontextual 0-1 assignments, the KS property, criticality, parity proofs.

A 0-1 assignment gives every vertex a value so that each edge holds exactly
one 1.  Choosing the 1-vertices is therefore an exact cover of the edge set
by vertex stars, which we solve with bitset backtracking (fewest-candidates
edge first, so forced choices propagate immediately).
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterator, Sequence

import numpy as np

from .mmp import Hypergraph

__all__ = [
    "KsVerdict",
    "NotKSError",
    "ExactOneSolver",
    "solve01",
    "is_ks",
    "is_critical",
    "has_parity_proof",
    "find_parity_subsets",
    "gf2_nullspace",
]


class NotKSError(ValueError):
    """Criticality was asked for a hypergraph that has a 0-1 assignment."""


@dataclass(frozen=True)
class KsVerdict:
    is_ks: bool
    witness: tuple[int, ...] | None = None  # value per vertex
    is_critical: bool | None = None

    def __post_init__(self):
        if self.is_ks != (self.witness is None):
            raise ValueError("a KS verdict has no witness and vice versa")


class ExactOneSolver:
    """Exact-one-per-edge satisfiability over a fixed vertex/edge structure.

    The solver is built once per hypergraph; :meth:`solve` takes a bitmask of
    active edges so sub-hypergraphs (edge deletions) reuse the tables.
    """

    def __init__(self, edges: Sequence[Sequence[int]], num_vertices: int | None = None):
        if num_vertices is None:
            num_vertices = 1 + max((v for e in edges for v in e), default=-1)
        self.num_vertices = num_vertices
        self.num_edges = len(edges)
        self.edge_vmask = [0] * len(edges)
        self.vertex_emask = [0] * num_vertices
        for j, e in enumerate(edges):
            for v in e:
                self.edge_vmask[j] |= 1 << v
                self.vertex_emask[v] |= 1 << j
        self.nodes = 0
        self._compiled = None
        if num_vertices <= 64 and len(edges) <= 64:
            self._compiled = (
                np.array(self.edge_vmask, dtype=np.uint64),
                np.array(self.vertex_emask or [0], dtype=np.uint64),
            )

    def full_mask(self) -> int:
        return (1 << self.num_edges) - 1

    def solve(self, active: int | None = None) -> int | None:
        """Return a bitmask of 1-vertices, or None when no assignment exists."""
        if active is None:
            active = self.full_mask()
        if self._compiled is not None:
            from ._kernels import solve64

            found, ones, nodes = solve64(*self._compiled, np.uint64(active), self.num_edges)
            self.nodes += int(nodes)
            return int(ones) if found else None
        avail = 0
        em = active
        while em:
            low = em & -em
            avail |= self.edge_vmask[low.bit_length() - 1]
            em ^= low
        return self._search(active, avail, 0)

    def _search(self, uncovered: int, avail: int, chosen: int) -> int | None:
        self.nodes += 1
        if not uncovered:
            return chosen
        edge_vmask = self.edge_vmask
        best = -1
        best_cnt = 1 << 30
        em = uncovered
        while em:
            low = em & -em
            j = low.bit_length() - 1
            c = (edge_vmask[j] & avail).bit_count()
            if c < best_cnt:
                if c == 0:
                    return None
                best, best_cnt = j, c
                if c == 1:
                    break
            em ^= low
        cands = edge_vmask[best] & avail
        vertex_emask = self.vertex_emask
        while cands:
            low = cands & -cands
            v = low.bit_length() - 1
            cands ^= low
            # v available means all its active edges are still uncovered
            hit = vertex_emask[v] & uncovered
            blocked = 0
            while hit:
                e = hit & -hit
                blocked |= edge_vmask[e.bit_length() - 1]
                hit ^= e
            res = self._search(uncovered & ~vertex_emask[v], avail & ~blocked, chosen | low)
            if res is not None:
                return res
        return None


def _assignment(h: Hypergraph, ones: int) -> tuple[int, ...]:
    return tuple((ones >> v) & 1 for v in range(h.num_vertices))


def solve01(h: Hypergraph) -> KsVerdict:
    """Search for a 0-1 assignment with exactly one 1 per edge.

    ``is_ks`` is true exactly when no such assignment exists. An odd edge
    subset covering every vertex an even number of times is checked first:
    it rules out any assignment at the cost of one GF(2) elimination.
    """
    if find_parity_subsets(h):
        return KsVerdict(True)
    ones = ExactOneSolver(h.edges, h.num_vertices).solve()
    if ones is None:
        return KsVerdict(True)
    return KsVerdict(False, _assignment(h, ones))


def is_ks(h: Hypergraph) -> bool:
    return solve01(h).is_ks


def is_critical(h: Hypergraph, solver: ExactOneSolver | None = None) -> bool:
    """True when removing any single edge leaves a set with an assignment."""
    solver = solver or ExactOneSolver(h.edges, h.num_vertices)
    full = solver.full_mask()
    if solver.solve(full) is not None:
        raise NotKSError(f"{h.name} is not a KS set")
    return all(solver.solve(full & ~(1 << j)) is not None for j in range(h.m))


def has_parity_proof(h: Hypergraph) -> bool:
    """Odd number of edges and every vertex in an even number of them."""
    return h.m % 2 == 1 and all(d % 2 == 0 for d in h.degrees())


def gf2_nullspace(rows: Sequence[int], ncols: int) -> list[int]:
    """Basis of {x : row . x = 0 for all rows} over GF(2); vectors as int bitmasks."""
    pivots: dict[int, int] = {}  # pivot column -> reduced row
    for r in rows:
        for col, prow in pivots.items():
            if (r >> col) & 1:
                r ^= prow
        if not r:
            continue
        col = (r & -r).bit_length() - 1
        for c2 in list(pivots):
            if (pivots[c2] >> col) & 1:
                pivots[c2] ^= r
        pivots[col] = r
    basis = []
    for free in range(ncols):
        if free in pivots:
            continue
        vec = 1 << free
        for col, prow in pivots.items():
            if (prow >> free) & 1:
                vec |= 1 << col
        basis.append(vec)
    return basis


def _nullspace_vectors(basis: list[int]) -> Iterator[int]:
    # Gray-code walk over all nonzero combinations.
    cur = 0
    for i in range(1, 1 << len(basis)):
        cur ^= basis[(i & -i).bit_length() - 1]
        yield cur


def find_parity_subsets(h: Hypergraph, max_count: int = 1) -> list[tuple[int, ...]]:
    """Edge subsets with odd size in which every covered vertex has even degree.

    These are the odd-weight solutions of the vertex-edge incidence system
    over GF(2). At most ``max_count`` subsets are returned, as sorted tuples
    of edge indices.
    """
    rows = h.incidence_masks()
    # odd vectors first, so the walk starts on a solution
    basis = sorted(gf2_nullspace(rows, h.m), key=lambda b: b.bit_count() % 2 == 0)
    if not basis or basis[0].bit_count() % 2 == 0:
        return []
    out = []
    for vec in _nullspace_vectors(basis):
        if vec.bit_count() % 2:
            out.append(tuple(j for j in range(h.m) if (vec >> j) & 1))
            if len(out) >= max_count:
                break
    return out
