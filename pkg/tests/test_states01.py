from __future__ import annotations

import itertools

import pytest
from hypothesis import given, strategies as st

from conftest import brute_force_exact_one, hypergraphs
from ksforge.data import load_fixture
from ksforge.master import ComponentSet, build_master, decompose_master
from ksforge.mmp import Hypergraph, parse_line
from ksforge.states01 import (
    ExactOneSolver,
    KsVerdict,
    NotKSError,
    find_parity_subsets,
    gf2_nullspace,
    has_parity_proof,
    is_critical,
    is_ks,
    solve01,
)


@pytest.fixture(scope="module")
def signed_parts():
    m = build_master(ComponentSet.parse("-1,0,1", 4))
    return m.hypergraph, {p.name: p.hypergraph for p in decompose_master(m)}


def _brute_critical(h: Hypergraph) -> bool:
    if brute_force_exact_one(h):
        return False
    return all(brute_force_exact_one(h.without_edges([j])) for j in range(h.m))


@given(hypergraphs(max_vertices=12, max_edges=10))
def test_solver_matches_brute_force(h):
    v = solve01(h)
    assert v.is_ks == (not brute_force_exact_one(h))
    if not v.is_ks:
        assert all(sum(v.witness[x] for x in e) == 1 for e in h.edges)


@given(hypergraphs(max_vertices=12, max_edges=10))
def test_interpreted_and_compiled_paths_agree(h):
    fast = ExactOneSolver(h.edges, h.num_vertices)
    slow = ExactOneSolver(h.edges, h.num_vertices)
    slow._compiled = None
    for active in range(0, 1 << h.m, max(1, (1 << h.m) // 16)):
        a, b = fast.solve(active), slow.solve(active)
        assert (a is None) == (b is None)


@given(hypergraphs(max_vertices=10, max_edges=7))
def test_criticality_matches_brute_force(h):
    if brute_force_exact_one(h):
        with pytest.raises(NotKSError):
            is_critical(h)
    else:
        assert is_critical(h) == _brute_critical(h)


@given(hypergraphs(max_vertices=12, max_edges=8), st.data())
def test_dropping_edges_never_creates_a_ks_set(h, data):
    if is_ks(h):
        return
    keep = data.draw(st.sets(st.integers(0, h.m - 1), min_size=1))
    sub = h.subhypergraph(sorted(keep))
    assert not is_ks(sub)


def test_small_verdicts():
    assert not is_ks(parse_line("12.", 2)[0])
    # odd cycle of pairs: 0-1 alternation is impossible
    assert is_ks(parse_line("12,23,31.", 2)[0])
    assert is_critical(parse_line("12,23,31.", 2)[0])
    assert not is_ks(parse_line("12,23,34,41.", 2)[0])


def test_18_9_verdicts():
    for name in ("ks_18_9", "ks_18_9_signed"):
        h = load_fixture(name)
        assert is_ks(h) and is_critical(h) and has_parity_proof(h)


def test_signed_components(signed_parts):
    master, parts = signed_parts
    assert is_ks(master) and not is_critical(master)
    assert is_ks(parts["24-24"])
    assert not is_ks(parts["16-8"])


def test_verdict_invariant():
    with pytest.raises(ValueError):
        KsVerdict(True, (0, 1))
    with pytest.raises(ValueError):
        KsVerdict(False)


def test_parity_proof_definition():
    assert not has_parity_proof(parse_line("12,23,34,41.", 2)[0])  # even edge count
    assert has_parity_proof(parse_line("12,23,31.", 2)[0])
    assert not has_parity_proof(load_fixture("penrose_40_40"))


@given(st.lists(st.integers(0, 2**8 - 1), max_size=8), st.integers(1, 8))
def test_nullspace_matches_brute_force(rows, ncols):
    rows = [r & ((1 << ncols) - 1) for r in rows]
    basis = gf2_nullspace(rows, ncols)
    span = {0}
    for b in basis:
        span |= {x ^ b for x in span}
    expect = {x for x in range(1 << ncols) if all((r & x).bit_count() % 2 == 0 for r in rows)}
    assert span == expect and len(span) == 1 << len(basis)


@given(hypergraphs(max_vertices=10, max_edges=8))
def test_parity_subsets_match_brute_force(h):
    found = find_parity_subsets(h, max_count=4)
    for sub in found:
        assert len(sub) % 2 == 1
        assert all(sum(v in h.edges[j] for j in sub) % 2 == 0 for v in range(h.k))
    exists = any(
        all(sum(v in h.edges[j] for j in sub) % 2 == 0 for v in range(h.k))
        for r in range(1, h.m + 1, 2)
        for sub in itertools.combinations(range(h.m), r)
    )
    assert bool(found) == exists


def test_parity_subset_of_18_9_is_everything():
    h = load_fixture("ks_18_9")
    assert find_parity_subsets(h, max_count=5) == [tuple(range(9))]


def test_parity_subsets_inside_24_24(signed_parts):
    _, parts = signed_parts
    h = parts["24-24"]
    subs = find_parity_subsets(h, max_count=3)
    assert len(subs) == 3
    assert all(is_ks(h.subhypergraph(sorted(s))) for s in subs)


def test_large_omega_master_is_ks_by_parity():
    m = build_master(ComponentSet.parse("0,1,w", 6)).hypergraph
    assert m.k > 64  # beyond the compiled kernel
    sub = find_parity_subsets(m)[0]
    assert is_ks(m.subhypergraph(sub)) and solve01(m).is_ks
