from __future__ import annotations

import itertools
import random

import pytest
from hypothesis import given, strategies as st

from conftest import hypergraphs, relabeled
from ksforge.data import load_fixture
from ksforge.master import ComponentSet, build_master, decompose_master
from ksforge.mmp import Hypergraph, parse_line
from ksforge.pipeline import StripSpec, strip
from ksforge.structure import (
    LoopResult,
    delta_pairs,
    find_max_loop,
    is_embedding,
    subgraph_embedding,
    subgraph_of,
    verify_loop,
)


@pytest.fixture(scope="module")
def signed():
    m = build_master(ComponentSet.parse("-1,0,1", 4))
    return m.hypergraph, {p.name: p.hypergraph for p in decompose_master(m)}


def _brute_embeds(small: Hypergraph, big: Hypergraph) -> bool:
    target = set(big.edge_sets())
    return any(
        all(frozenset(p[v] for v in e) in target for e in small.edges)
        for p in itertools.permutations(range(big.k), small.k)
    )


def _brute_max_loop(h: Hypergraph) -> int:
    sets = h.edge_sets()
    best = 0
    for L in range(3, h.m + 1):
        for sub in itertools.combinations(range(h.m), L):
            for rest in itertools.permutations(sub[1:]):
                cyc = (sub[0],) + rest
                pairs = [sets[cyc[i]] & sets[cyc[(i + 1) % L]] for i in range(L)]
                for js in itertools.product(*pairs):
                    if verify_loop(h, LoopResult(cyc, js, True)):
                        best = L
                        break
                if best == L:
                    break
            if best == L:
                break
    return best


@given(hypergraphs(max_vertices=5, max_edges=3, max_edge=3), hypergraphs(max_vertices=7, max_edges=6, max_edge=3))
def test_embedding_matches_brute_force(small, big):
    emb = subgraph_embedding(small, big)
    assert (emb is not None) == _brute_embeds(small, big)
    if emb is not None:
        assert is_embedding(small, big, emb)


@given(hypergraphs(max_vertices=10, max_edges=6), st.integers(0, 2**32), st.data())
def test_relabeled_sub_hypergraph_embeds(h, seed, data):
    keep = data.draw(st.sets(st.integers(0, h.m - 1), min_size=1))
    part = relabeled(h.subhypergraph(sorted(keep)), random.Random(seed))
    emb = subgraph_embedding(part, h)
    assert emb is not None and is_embedding(part, h, emb)


def test_18_9_inside_24_24(signed):
    _, parts = signed
    assert subgraph_of(load_fixture("ks_18_9_signed"), parts["24-24"])
    assert not subgraph_of(load_fixture("ks_18_9"), parts["24-24"])


def test_16_8_fits_inside_24_24(signed):
    # eight edges of the 24-24 reproduce the 16-8 pattern, even though no ray is shared
    _, parts = signed
    emb = subgraph_embedding(parts["16-8"], parts["24-24"])
    assert emb is not None and is_embedding(parts["16-8"], parts["24-24"], emb)
    assert not subgraph_of(parts["24-24"], parts["16-8"])


@pytest.mark.parametrize("seed", range(3))
def test_random_strips_embed_in_their_master(signed, seed):
    master, _ = signed
    rng = random.Random(seed)
    for child in strip(master, StripSpec(6, "random", seed=seed, samples=4)):
        child = relabeled(child, rng)
        emb = subgraph_embedding(child, master)
        assert emb is not None and is_embedding(child, master, emb)


def test_disconnected_small_set_uses_disjoint_vertices(signed):
    master, parts = signed
    two = Hypergraph.from_edges(
        list(parts["16-8"].edges) + [tuple(v + 100 for v in e) for e in parts["16-8"].edges[:2]], 4
    )
    emb = subgraph_embedding(two, master)
    assert emb is not None and len(set(emb)) == two.k


def test_embedding_budget_raises():
    with pytest.raises(RuntimeError):
        subgraph_embedding(load_fixture("ks_18_9"), load_fixture("penrose_40_40"), node_budget=3)


def test_is_embedding_rejects_bad_maps():
    h = parse_line("12,23.", 2)[0]
    assert is_embedding(h, h, [0, 1, 2])
    assert not is_embedding(h, h, [0, 0, 2])
    assert not is_embedding(h, h, [1, 0, 2])


@given(hypergraphs(max_vertices=9, max_edges=6, max_edge=3))
def test_max_loop_matches_brute_force(h):
    if h.m < 3:
        with pytest.raises(ValueError):
            find_max_loop(h)
        return
    res = find_max_loop(h)
    assert res.exhaustive
    assert res.length == _brute_max_loop(h)
    if res.length:
        assert verify_loop(h, res)


@given(hypergraphs(max_vertices=14, max_edges=10), st.integers(0, 1000))
def test_loop_length_does_not_depend_on_seed(h, seed):
    if h.m < 3:
        return
    a, b = find_max_loop(h, seed=0), find_max_loop(h, seed=seed)
    assert a.length == b.length


def test_triangle_loop():
    res = find_max_loop(parse_line("12,23,31.", 2)[0])
    assert res.length == 3 and res.exhaustive and verify_loop(parse_line("12,23,31.", 2)[0], res)


def test_edges_through_one_vertex_have_no_loop():
    h = parse_line("12,13,14.", 2)[0]
    assert find_max_loop(h).length == 0


@pytest.mark.parametrize("name", ["ks_18_9", "ks_18_9_signed"])
def test_18_9_loop_is_6(name):
    h = load_fixture(name)
    res = find_max_loop(h)
    assert res.length == 6 and res.exhaustive and verify_loop(h, res)


def test_loop_budget_clears_the_flag():
    res = find_max_loop(load_fixture("penrose_40_40"), budget=10)
    assert not res.exhaustive


def test_verify_loop_rejects_chords():
    h = load_fixture("ks_18_9")
    good = find_max_loop(h)
    e = list(good.edges)
    e[0], e[2] = e[2], e[0]
    assert not verify_loop(h, LoopResult(tuple(e), good.joints, True))
    assert not verify_loop(h, LoopResult(good.edges[:2], good.joints[:2], True))


@given(hypergraphs(max_vertices=12, max_edges=8, min_edge=4, max_edge=4))
def test_delta_pairs_match_definition(h):
    sets = h.edge_sets()
    expect = [(a, b) for a, b in itertools.combinations(range(h.m), 2) if len(sets[a] & sets[b]) == 2]
    assert delta_pairs(h) == expect


def test_delta_examples(signed):
    assert delta_pairs(parse_line("1234,1256,789A.", 4)[0]) == [(0, 1)]
    assert delta_pairs(load_fixture("ks_18_9")) == []
    with pytest.raises(ValueError):
        delta_pairs(parse_line("123,345.", 3)[0])
