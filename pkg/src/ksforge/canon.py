"""Canonical labeling of hypergraphs and isomorphism dedup.

We work on the bipartite incidence graph (vertex nodes first, then edge
nodes). Colors are ordered-partition positions: a node's color is the index
of the first position of its cell, so singleton cells keep their position
for the rest of the search. Refinement sorts nodes by (color, weighted
sum over neighbour colors). The search individualizes vertex
nodes only; once the vertices are discrete the labeling is fixed.

Pruning uses automorphisms found along the way: orbit pruning of siblings
under the pointwise stabilizer of the current prefix, and a jump back to
the first-path ancestor whenever a leaf equivalent to the first leaf shows
up.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Iterator

import numpy as np

from .mmp import Hypergraph, edge_components, serialize

__all__ = [
    "CanonicalResult",
    "canonical_search",
    "canonical_form",
    "combine_parts",
    "canonical_key",
    "automorphism_generators",
    "is_isomorphic",
    "dedup_stream",
]


def _weights(n: int) -> np.ndarray:
    # fixed pseudo-random weight per color position; same for every input
    return np.random.default_rng(0x5EED).integers(0, 2**63, size=n, dtype=np.uint64)


def _refine(colors: np.ndarray, src: np.ndarray, dst: np.ndarray, weights: np.ndarray) -> np.ndarray:
    """Refine until stable.

    A node's signature is its color plus the (wrapping) sum of fixed weights
    of its neighbours' colors. The signature is a relabeling invariant, so a
    weight collision can only leave the partition coarser, never break
    canonicity.
    """
    n = len(colors)
    ncells = len(np.unique(colors))
    positions = np.arange(n)
    while True:
        sig = np.zeros(n, dtype=np.uint64)
        np.add.at(sig, src, weights[colors[dst]])
        order = np.lexsort((sig, colors))
        c_sorted = colors[order]
        s_sorted = sig[order]
        boundary = np.empty(n, dtype=bool)
        boundary[0] = True
        boundary[1:] = (c_sorted[1:] != c_sorted[:-1]) | (s_sorted[1:] != s_sorted[:-1])
        start = np.maximum.accumulate(np.where(boundary, positions, 0))
        new = np.empty(n, dtype=np.int64)
        new[order] = start
        cells = int(boundary.sum())
        colors = new
        if cells == ncells or cells == n:
            return colors
        ncells = cells


@dataclass
class CanonicalResult:
    labels: list[int]  # vertex -> canonical label
    certificate: tuple[tuple[int, ...], ...]
    generators: list[list[int]]  # automorphisms found (vertex permutations)
    leaves: int


class _Search:
    def __init__(self, h: Hypergraph, max_leaves: int | None = None):
        self.h = h
        k = h.num_vertices
        self.k = k
        adj: list[list[int]] = [[] for _ in range(k + h.m)]
        for j, e in enumerate(h.edges):
            for v in e:
                adj[v].append(k + j)
                adj[k + j].append(v)
        src = [x for x in range(k + h.m) for _ in adj[x]]
        dst = [y for x in range(k + h.m) for y in adj[x]]
        self.src = np.array(src, dtype=np.int64)
        self.dst = np.array(dst, dtype=np.int64)
        self.weights = _weights(k + h.m)
        self.first_cert = None
        self.first_lab = None
        self.best_cert = None
        self.best_lab = None
        self.generators: list[list[int]] = []
        self.leaves = 0
        self.first_path: list[int] = []
        self.max_leaves = max_leaves

    def certificate(self, lab: list[int]) -> tuple[tuple[int, ...], ...]:
        return tuple(sorted(tuple(sorted([lab[v] for v in e])) for e in self.h.edges))

    def run(self) -> CanonicalResult:
        k = self.k
        colors = np.array([0] * k + [k] * self.h.m, dtype=np.int64)
        colors = _refine(colors, self.src, self.dst, self.weights)
        self._search(colors, [])
        return CanonicalResult(self.best_lab, self.best_cert, self.generators, self.leaves)

    def _target_cell(self, colors: np.ndarray) -> list[int] | None:
        """Smallest non-singleton vertex cell (first by color on ties)."""
        vc = colors[: self.k]
        vals, counts = np.unique(vc, return_counts=True)
        multi = counts > 1
        if not multi.any():
            return None
        c = vals[multi][np.argmin(counts[multi])]
        return np.flatnonzero(vc == c).tolist()

    def _orbit_mates(self, prefix: list[int], x: int) -> set[int]:
        gens = [g for g in self.generators if all(g[v] == v for v in prefix)]
        orbit = {x}
        stack = [x]
        while stack:
            y = stack.pop()
            for g in gens:
                z = g[y]
                if z not in orbit:
                    orbit.add(z)
                    stack.append(z)
        return orbit

    def _search(self, colors: np.ndarray, prefix: list[int]) -> int | None:
        """Returns a level to jump back to, or None to continue normally."""
        cell = self._target_cell(colors)
        if cell is None:
            return self._leaf(colors, prefix)
        processed: list[int] = []
        level = len(prefix)
        for x in cell:
            if processed and self.generators:
                if self._orbit_mates(prefix, x).intersection(processed):
                    continue
            processed.append(x)
            new = colors.copy()
            c = colors[x]
            new[cell] = c + 1
            new[x] = c
            new = _refine(new, self.src, self.dst, self.weights)
            prefix.append(x)
            if self.first_lab is None:
                self.first_path.append(x)
            jump = self._search(new, prefix)
            prefix.pop()
            if jump is not None and jump < level:
                return jump
            if self.max_leaves is not None and self.leaves >= self.max_leaves:
                return -1
        return None

    def _leaf(self, colors: np.ndarray, prefix: list[int]) -> int | None:
        self.leaves += 1
        lab = colors[: self.k].tolist()
        cert = self.certificate(lab)
        if self.first_cert is None:
            self.first_cert = self.best_cert = cert
            self.first_lab = self.best_lab = lab
            return None
        if cert == self.first_cert:
            self._add_automorphism(self.first_lab, lab)
            # jump back to where this path left the first path
            gca = 0
            while gca < len(prefix) and gca < len(self.first_path) and prefix[gca] == self.first_path[gca]:
                gca += 1
            return gca
        if cert == self.best_cert:
            self._add_automorphism(self.best_lab, lab)
            return None
        if cert < self.best_cert:
            self.best_cert = cert
            self.best_lab = lab
        return None

    def _add_automorphism(self, lab_a: list[int], lab_b: list[int]) -> None:
        inv_a = [0] * self.k
        for v, l in enumerate(lab_a):
            inv_a[l] = v
        gamma = [inv_a[lab_b[v]] for v in range(self.k)]
        if any(gamma[v] != v for v in range(self.k)):
            self.generators.append(gamma)


def canonical_search(h: Hypergraph) -> CanonicalResult:
    """Canonical labeling plus the automorphisms met during the search."""
    if h.m == 0:
        return CanonicalResult([], (), [], 1)
    return _Search(h).run()


def combine_parts(certs: Iterable[tuple[tuple[int, ...], ...]], dimension: int) -> Hypergraph:
    """Disjoint union of canonical component certificates in a fixed order.

    Components are placed largest first (by vertex and edge count), ties
    broken by their certificates, so the union is itself canonical.
    """

    def size(c):
        return (-(1 + max(v for e in c for v in e)), -len(c), c)

    edges: list[tuple[int, ...]] = []
    offset = 0
    for cert in sorted(certs, key=size):
        edges.extend(tuple(v + offset for v in e) for e in cert)
        offset += 1 + max(v for e in cert for v in e)
    return Hypergraph(tuple(edges), dimension)


def canonical_form(h: Hypergraph) -> Hypergraph:
    """An isomorphic copy of ``h`` that is identical for all isomorphic inputs.

    Connected components are labeled separately and then concatenated.
    """
    parts = edge_components(h)
    if len(parts) <= 1:
        return Hypergraph(canonical_search(h).certificate, h.dimension)
    certs = [canonical_search(h.subhypergraph(g)).certificate for g in parts]
    return combine_parts(certs, h.dimension)


def canonical_key(h: Hypergraph) -> str:
    """Text key; equal keys if and only if the hypergraphs are isomorphic."""
    return serialize(canonical_form(h))


def automorphism_generators(h: Hypergraph) -> list[list[int]]:
    """Automorphisms (vertex permutations) found during canonical labeling.

    They generate the full automorphism group.
    """
    return canonical_search(h).generators


def is_isomorphic(a: Hypergraph, b: Hypergraph) -> bool:
    if (a.k, a.m) != (b.k, b.m) or sorted(map(len, a.edges)) != sorted(map(len, b.edges)):
        return False
    return canonical_key(a) == canonical_key(b)


def dedup_stream(items: Iterable[Hypergraph], seen: set[str] | None = None) -> Iterator[Hypergraph]:
    """Yield the first hypergraph of every isomorphism class, in input order."""
    seen = set() if seen is None else seen
    for h in items:
        key = canonical_key(h)
        if key not in seen:
            seen.add(key)
            yield h
