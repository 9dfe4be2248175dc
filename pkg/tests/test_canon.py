from __future__ import annotations

import itertools
import random

import pytest
from hypothesis import assume, given, strategies as st

from conftest import brute_force_isomorphic, hypergraphs, relabeled
from ksforge.canon import (
    automorphism_generators,
    canonical_form,
    canonical_key,
    canonical_search,
    combine_parts,
    dedup_stream,
    is_isomorphic,
)
from ksforge.data import load_fixture
from ksforge.master import ComponentSet, build_master, decompose_master
from ksforge.mmp import Hypergraph, parse_line

small = hypergraphs(max_vertices=8, max_edges=5)


def _brute_edge_orbits(h: Hypergraph) -> int:
    edges = h.edge_sets()
    target = set(edges)
    auts = [p for p in itertools.permutations(range(h.k)) if all(frozenset(p[v] for v in e) in target for e in edges)]
    seen, orbits = set(), 0
    for e in edges:
        if e in seen:
            continue
        orbits += 1
        seen |= {frozenset(p[v] for v in e) for p in auts}
    return orbits


def _generated_edge_orbits(h: Hypergraph) -> int:
    index = {e: j for j, e in enumerate(h.edge_sets())}
    parent = list(range(h.m))

    def find(x):
        while parent[x] != x:
            x = parent[x]
        return x

    for p in automorphism_generators(h):
        for e, j in index.items():
            parent[find(j)] = find(index[frozenset(p[v] for v in e)])
    return len({find(j) for j in range(h.m)})


@given(small, small)
def test_key_equality_matches_brute_force(a, b):
    assert (canonical_key(a) == canonical_key(b)) == brute_force_isomorphic(a, b)


@given(small, st.integers(0, 2**32))
def test_relabeled_copies_share_a_key(h, seed):
    g = relabeled(h, random.Random(seed))
    assert canonical_key(g) == canonical_key(h)
    assert brute_force_isomorphic(g, h)


@given(small, st.integers(0, 2**32))
def test_near_copies_are_told_apart(h, seed):
    # move one vertex of one edge to a fresh vertex
    rng = random.Random(seed)
    edges = [list(e) for e in h.edges]
    j = rng.randrange(h.m)
    edges[j][rng.randrange(len(edges[j]))] = h.k
    assume(len({frozenset(e) for e in edges}) == h.m)
    g = Hypergraph.from_edges(edges, h.dimension)
    assert (canonical_key(g) == canonical_key(h)) == brute_force_isomorphic(g, h)


@given(hypergraphs(max_vertices=7, max_edges=5))
def test_canonical_form_is_an_idempotent_copy(h):
    c = canonical_form(h)
    assert brute_force_isomorphic(c, h)
    assert canonical_form(c) == c


@given(hypergraphs(max_vertices=7, max_edges=6))
def test_generators_are_automorphisms(h):
    target = set(h.edge_sets())
    for p in automorphism_generators(h):
        assert sorted(p) == list(range(h.k))
        assert {frozenset(p[v] for v in e) for e in h.edges} == target


@given(hypergraphs(max_vertices=7, max_edges=6))
def test_single_deletions_count_edge_orbits(h):
    assume(h.m > 1)
    keys = {canonical_key(h.without_edges([j])) for j in range(h.m)}
    assert len(keys) == _brute_edge_orbits(h)


@pytest.mark.parametrize("name", ["ks_18_9", "ks_18_9_signed", "ks_22_11p", "omega_27_9", "penrose_40_40"])
def test_relabelings_keep_the_key(name):
    h = load_fixture(name)
    key = canonical_key(h)
    rng = random.Random(name)
    assert all(canonical_key(relabeled(h, rng)) == key for _ in range(200))


def test_labels_give_the_certificate():
    h = load_fixture("ks_22_11p")
    res = canonical_search(h)
    assert sorted(res.labels) == list(range(h.k))
    relab = sorted(tuple(sorted(res.labels[v] for v in e)) for e in h.edges)
    assert tuple(relab) == tuple(sorted(res.certificate))


def test_components_are_ordered_canonically():
    a = parse_line("1234,4567.", 4)[0]
    b = parse_line("1234.", 4)[0]
    u1 = parse_line("1234,4567,89AB.", 4)[0]
    u2 = parse_line("89AB,1234,4567.", 4)[0]
    u3 = parse_line("5678,1239,9ABC.", 4)[0]
    assert canonical_key(u1) == canonical_key(u2) == canonical_key(u3)
    joined = combine_parts([canonical_search(b).certificate, canonical_search(a).certificate], 4)
    assert joined == canonical_form(u1)


def test_isomorphism_shortcuts():
    assert not is_isomorphic(parse_line("123,345.", 3)[0], parse_line("1234,4567.", 4)[0])
    assert is_isomorphic(load_fixture("ks_18_9"), relabeled(load_fixture("ks_18_9"), random.Random(1)))


def test_600_cell_single_deletions_are_all_alike():
    h = load_fixture("master_60_75")
    children = [h.without_edges([j]) for j in range(h.m)]
    assert len(list(dedup_stream(children))) == 1
    assert len(list(dedup_stream([h] * 5))) == 1


def test_dedup_stream_keeps_first_of_each_class():
    h = load_fixture("ks_18_9")
    rng = random.Random(5)
    items = [h, relabeled(h, rng), load_fixture("ks_18_9_signed"), relabeled(h, rng)]
    out = list(dedup_stream(items))
    assert out == [items[0], items[2]]
    seen: set[str] = set()
    list(dedup_stream(items[:1], seen))
    assert list(dedup_stream(items, seen)) == [items[2]]


def test_signed_master_single_deletions():
    m = build_master(ComponentSet.parse("-1,0,1", 4)).hypergraph
    keys = {canonical_key(m.without_edges([j])) for j in range(m.m)}
    # 24-24 has two edge orbits (its six disjoint bases and the rest), 16-8 has one
    assert len(keys) == 3 == _generated_edge_orbits(m)


def test_three_isomorphic_81_162_components():
    m = build_master(ComponentSet.parse("0,1,w,w2", 6))
    assert m.name == "834-1609"
    parts = decompose_master(m)
    assert [p.name for p in parts] == ["591-1123"] + ["81-162"] * 3
    small = [p.hypergraph for p in parts if p.name == "81-162"]
    assert len(small) == 3
    assert len({canonical_key(h) for h in small}) == 1
