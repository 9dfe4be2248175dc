"""Subgraph matching, maximal loops and the delta feature."""

from __future__ import annotations

import random
from dataclasses import dataclass
from typing import Sequence

from .mmp import Hypergraph, edge_components, twin_order

__all__ = [
    "subgraph_embedding",
    "subgraph_of",
    "is_embedding",
    "LoopResult",
    "find_max_loop",
    "verify_loop",
    "delta_pairs",
]


# ---------------------------------------------------------------------------
# subgraphs


def is_embedding(small: Hypergraph, big: Hypergraph, vmap: Sequence[int]) -> bool:
    """Check that ``vmap`` is injective and sends every edge of ``small`` onto an edge of ``big``."""
    if len(vmap) != small.num_vertices or len(set(vmap)) != len(vmap):
        return False
    big_edges = set(big.edge_sets())
    return all(frozenset(vmap[v] for v in e) in big_edges for e in small.edges)


def subgraph_embedding(small: Hypergraph, big: Hypergraph, node_budget: int | None = None) -> list[int] | None:
    """An injective vertex map taking each edge of ``small`` exactly onto an
    edge of ``big``, or None.

    Connected components of ``small`` are first embedded one at a time,
    largest first, into still unused vertices; if that greedy pass gets
    stuck the whole hypergraph is searched jointly, so the answer is exact.
    ``node_budget`` bounds the search; when it runs out a RuntimeError is
    raised rather than reporting a wrong negative.
    """
    if small.m > big.m or small.k > big.k:
        return None
    comps = edge_components(small)
    if len(comps) > 1:
        mapped = [-1] * small.num_vertices
        used = 0
        for comp in sorted(comps, key=len, reverse=True):
            part = small.subhypergraph(comp)
            emb = _embed(part, big, used, node_budget)
            if emb is None:
                break
            # Hypergraph re-interns vertices in first-appearance order
            order = list(dict.fromkeys(v for j in comp for v in small.edges[j]))
            for local, v in enumerate(order):
                mapped[v] = emb[local]
                used |= 1 << emb[local]
        else:
            return mapped
    return _embed(small, big, 0, node_budget)


def _embed(small: Hypergraph, big: Hypergraph, forbidden: int, node_budget: int | None) -> list[int] | None:
    """Domain-based backtracking.

    Every small vertex keeps a bitmask domain of big vertices. Mapping v to w
    removes w from all domains, confines the neighbours of v to the big
    edges that can still host their shared small edge, and fails as soon as
    a domain empties. The next vertex is the one with the smallest domain.
    """
    ks, kb = small.num_vertices, big.num_vertices
    big_inc = big.incidence_masks()
    big_emask = []
    for e in big.edges:
        em = 0
        for v in e:
            em |= 1 << v
        big_emask.append(em)
    size_mask: dict[int, int] = {}
    for j, e in enumerate(big.edges):
        size_mask[len(e)] = size_mask.get(len(e), 0) | (1 << j)
    big_deg = [x.bit_count() for x in big_inc]
    small_deg = small.degrees()
    small_inc: list[list[int]] = [[] for _ in range(ks)]
    for j, e in enumerate(small.edges):
        if len(e) not in size_mask:
            return None
        for v in e:
            small_inc[v].append(j)

    def cover(emask: int) -> int:
        acc = 0
        while emask:
            low = emask & -emask
            acc |= big_emask[low.bit_length() - 1]
            emask ^= low
        return acc

    # initial domains: degree and edge-size filters
    by_deg: dict[int, int] = {}
    for d in set(small_deg):
        by_deg[d] = sum(1 << w for w in range(kb) if big_deg[w] >= d)
    domain = []
    for v in range(ks):
        dom = by_deg[small_deg[v]] & ~forbidden
        for j in small_inc[v]:
            dom &= cover(size_mask[len(small.edges[j])])
        if not dom:
            return None
        domain.append(dom)
    edge_hosts = [size_mask[len(e)] for e in small.edges]
    before, after = twin_order(small)
    mapped = [-1] * ks
    unmapped = set(range(ks))
    nodes = 0

    def search() -> bool:
        nonlocal nodes
        if not unmapped:
            return True
        nodes += 1
        if node_budget is not None and nodes > node_budget:
            raise RuntimeError("subgraph search budget exhausted")
        v = min(unmapped, key=lambda u: (domain[u].bit_count(), -small_deg[u]))
        cands = domain[v]
        unmapped.discard(v)
        while cands:
            low = cands & -cands
            w = low.bit_length() - 1
            cands ^= low
            saved_dom = domain[:]
            saved_hosts = [(j, edge_hosts[j]) for j in small_inc[v]]
            ok = True
            for j in small_inc[v]:
                nh = edge_hosts[j] & big_inc[w]
                if not nh:
                    ok = False
                    break
                edge_hosts[j] = nh
                allowed = cover(nh)
                for u in small.edges[j]:
                    if mapped[u] < 0 and u != v:
                        domain[u] &= allowed
            if ok:
                for u in unmapped:
                    domain[u] &= ~low
                    # twins take increasing images
                    if (after[v] >> u) & 1:
                        domain[u] &= ~((low << 1) - 1)
                    elif (before[v] >> u) & 1:
                        domain[u] &= low - 1
                    if not domain[u]:
                        ok = False
                        break
            if ok:
                mapped[v] = w
                if search():
                    return True
                mapped[v] = -1
            domain[:] = saved_dom
            for j, old in saved_hosts:
                edge_hosts[j] = old
        unmapped.add(v)
        return False

    if not search():
        return None
    return mapped[:]


def subgraph_of(small: Hypergraph, big: Hypergraph) -> bool:
    """True when ``small`` is isomorphic to a sub-hypergraph of ``big`` made of whole edges."""
    return subgraph_embedding(small, big) is not None


# ---------------------------------------------------------------------------
# loops


@dataclass(frozen=True)
class LoopResult:
    """A cyclic sequence of edges; ``joints[i]`` is shared by edges i and i+1."""

    edges: tuple[int, ...]
    joints: tuple[int, ...]
    exhaustive: bool
    combinations: int = 0

    @property
    def length(self) -> int:
        return len(self.edges)


def verify_loop(h: Hypergraph, loop: LoopResult) -> bool:
    """Recount the loop invariants on ``h``."""
    L = loop.length
    if L < 3 or len(loop.joints) != L or L > h.m:
        return False
    if len(set(loop.edges)) != L or len(set(loop.joints)) != L:
        return False
    sets = [frozenset(h.edges[j]) for j in loop.edges]
    for i in range(L):
        if loop.joints[i] not in sets[i] or loop.joints[i] not in sets[(i + 1) % L]:
            return False
    if L > 3:
        for a in range(L):
            for b in range(a + 2, L):
                if a == 0 and b == L - 1:
                    continue
                if sets[a] & sets[b]:
                    return False
    return True


def find_max_loop(h: Hypergraph, budget: int = 50_000, seed: int = 0) -> LoopResult:
    """Longest loop found within ``budget`` search steps.

    A loop is a cycle of distinct edges in which consecutive edges meet and
    edges that are not neighbours on the cycle share no vertex, so the loop
    can be drawn as a polygon with the remaining edges inside. Joint vertices
    are distinct. ``exhaustive`` is set when the whole search tree was
    visited, in which case the result is a maximum.
    """
    m = h.m
    if m < 3:
        raise ValueError("a loop needs at least three edges")
    sets = h.edge_sets()
    inc = h.incidence_masks()
    nbr = [0] * m  # edges meeting edge j
    for j, e in enumerate(h.edges):
        acc = 0
        for v in e:
            acc |= inc[v]
        nbr[j] = acc & ~(1 << j)
    rng = random.Random(seed)
    starts = list(range(m))
    rng.shuffle(starts)
    rank = {e: i for i, e in enumerate(starts)}

    best: tuple[list[int], list[int]] | None = None
    steps = 0
    exhausted = True

    def joints_for(path: list[int]) -> list[int] | None:
        L = len(path)
        js = []
        for i in range(L):
            common = sets[path[i]] & sets[path[(i + 1) % L]]
            js.append(common)
        if L > 3:
            return [min(c) for c in js]
        # three edges: need distinct representatives
        for a in js[0]:
            for b in js[1]:
                for c in js[2]:
                    if len({a, b, c}) == 3:
                        return [a, b, c]
        return None

    def extend(path: list[int], forbidden: int, start_rank: int) -> None:
        nonlocal best, steps, exhausted
        steps += 1
        if steps > budget:
            exhausted = False
            return
        last = path[-1]
        first = path[0]
        cands = nbr[last] & ~forbidden
        while cands:
            low = cands & -cands
            f = low.bit_length() - 1
            cands ^= low
            if rank[f] <= start_rank:
                continue
            closes = len(path) >= 2 and (nbr[f] >> first) & 1
            if closes:
                cyc = path + [f]
                if best is None or len(cyc) > len(best[0]):
                    js = joints_for(cyc)
                    if js is not None:
                        best = (cyc, js)
                continue
            # the next edge may meet only f (and the first edge, to close)
            grow = (1 << last) | (nbr[last] if len(path) >= 2 else 0)
            extend(path + [f], forbidden | grow, start_rank)
            if steps > budget:
                return

    for s in starts:
        if best is not None and len(best[0]) >= m:
            break
        extend([s], 1 << s, rank[s])
        if steps > budget:
            break
    if best is None:
        return LoopResult((), (), exhausted, steps)
    return LoopResult(tuple(best[0]), tuple(best[1]), exhausted, steps)


def delta_pairs(h: Hypergraph) -> list[tuple[int, int]]:
    """Edge pairs sharing exactly n-2 vertices (the delta feature)."""
    if h.dimension < 4:
        raise ValueError("the delta feature needs dimension >= 4")
    from .mmp import edge_pairs_sharing

    return edge_pairs_sharing(h, h.dimension - 2)
