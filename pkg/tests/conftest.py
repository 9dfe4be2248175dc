from __future__ import annotations

import itertools
import random

from hypothesis import HealthCheck, settings, strategies as st

from ksforge.mmp import Hypergraph

settings.register_profile(
    "default", deadline=None, max_examples=60, suppress_health_check=[HealthCheck.too_slow]
)
settings.load_profile("default")


def brute_force_exact_one(h: Hypergraph) -> bool:
    """Some 0-1 assignment puts exactly one 1 in every edge."""
    k = h.num_vertices
    for bits in range(1 << k):
        if all(sum((bits >> v) & 1 for v in e) == 1 for e in h.edges):
            return True
    return False


def brute_force_isomorphic(a: Hypergraph, b: Hypergraph) -> bool:
    if (a.k, a.m) != (b.k, b.m) or sorted(a.degrees()) != sorted(b.degrees()):
        return False
    target = set(b.edge_sets())
    for perm in itertools.permutations(range(b.k)):
        if all(frozenset(perm[v] for v in e) in target for e in a.edges):
            return True
    return False


def relabeled(h: Hypergraph, rng: random.Random, shuffle_edges: bool = True) -> Hypergraph:
    perm = list(range(h.num_vertices))
    rng.shuffle(perm)
    edges = [tuple(perm[v] for v in e) for e in h.edges]
    if shuffle_edges:
        rng.shuffle(edges)
    edges = [tuple(rng.sample(e, len(e))) for e in edges]
    return Hypergraph.from_edges(edges, h.dimension)


@st.composite
def hypergraphs(draw, max_vertices: int = 8, max_edges: int = 6, min_edge: int = 2, max_edge: int = 4, dimension: int = 4):
    """Random hypergraphs without duplicate edges; vertices that end up unused are dropped."""
    k = draw(st.integers(min_value=max(min_edge, 2), max_value=max_vertices))
    size = st.integers(min_value=min_edge, max_value=min(max_edge, k))
    edge = size.flatmap(lambda s: st.lists(st.integers(0, k - 1), min_size=s, max_size=s, unique=True))
    edges = draw(st.lists(edge, min_size=1, max_size=max_edges, unique_by=lambda e: frozenset(e)))
    return Hypergraph.from_edges(edges, dimension)
