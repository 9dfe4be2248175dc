from __future__ import annotations

import itertools
import math
import random

import pytest
from hypothesis import assume, given, settings

from conftest import brute_force_exact_one, brute_force_isomorphic, hypergraphs
from ksforge.data import load_fixture
from ksforge.master import ComponentSet, build_master, decompose_master
from ksforge.mmp import parse_line
from ksforge.pipeline import (
    ClassRecord,
    Distribution,
    LevelSummary,
    StripSpec,
    generate_class,
    stats,
    strip,
    thread_count,
)
from ksforge.states01 import is_critical, is_ks


@pytest.fixture(scope="module")
def signed():
    m = build_master(ComponentSet.parse("-1,0,1", 4))
    return m.hypergraph, {p.name: p.hypergraph for p in decompose_master(m)}


def _brute_class(h):
    """Isomorphism classes of KS edge subsets, each with its criticality."""
    reps: list = []
    for r in range(1, h.m + 1):
        for keep in itertools.combinations(range(h.m), r):
            sub = h.subhypergraph(keep)
            if brute_force_exact_one(sub):
                continue
            if any(brute_force_isomorphic(sub, g) for g, _ in reps):
                continue
            crit = all(brute_force_exact_one(sub.without_edges([j])) for j in range(sub.m))
            reps.append((sub, crit))
    return reps


def test_strip_spec_validation():
    with pytest.raises(ValueError):
        StripSpec(0)
    with pytest.raises(ValueError):
        StripSpec(1, "sideways")
    with pytest.raises(ValueError, match="seed"):
        StripSpec(1, "random")
    with pytest.raises(ValueError, match="master"):
        StripSpec(1, "add")


def test_exhaustive_strip_counts():
    h = load_fixture("ks_18_9")
    assert len(list(strip(h, StripSpec(2)))) == math.comb(9, 2)
    assert all(c.m == 7 for c in strip(h, StripSpec(2)))
    with pytest.raises(ValueError):
        list(strip(h, StripSpec(9)))


def test_strip_drops_orphaned_vertices():
    h = parse_line("1234,4567.", 4)[0]
    (a, b) = strip(h, StripSpec(1))
    assert (a.k, a.m) == (b.k, b.m) == (4, 1)


def test_random_strip_is_reproducible():
    h = load_fixture("penrose_40_40")
    a = list(strip(h, StripSpec(3, "random", seed=11, samples=5)))
    b = list(strip(h, StripSpec(3, "random", seed=11, samples=5)))
    c = list(strip(h, StripSpec(3, "random", seed=12, samples=5)))
    assert a == b and a != c and len(a) == 5


def test_add_mode_restores_the_master(signed):
    master, _ = signed
    child = master.without_edges([0])
    grown = list(strip(child, StripSpec(1, "add", master=master)))
    assert len(grown) == 1 and grown[0].m == 32
    with pytest.raises(ValueError):
        list(strip(load_fixture("ks_18_9"), StripSpec(1, "add", master=master)))


@settings(max_examples=40)
@given(hypergraphs(max_vertices=7, max_edges=8, max_edge=3))
def test_class_matches_brute_force(h):
    assume(is_ks(h))
    got = list(generate_class(h, threads=1))
    expect = _brute_class(h)
    assert len(got) == len(expect)
    for r in got:
        matches = [crit for g, crit in expect if brute_force_isomorphic(r.hypergraph, g)]
        assert len(matches) == 1 and matches[0] == r.is_critical
    assert len({r.canonical_key for r in got}) == len(got)


def test_non_ks_master_is_rejected(signed):
    with pytest.raises(ValueError):
        list(generate_class(signed[1]["16-8"]))


def test_unknown_strategy():
    with pytest.raises(ValueError):
        list(generate_class(load_fixture("ks_18_9"), strategy="sideways"))


def test_critical_master_is_its_own_class():
    (r,) = generate_class(load_fixture("ks_18_9"))
    assert r.is_critical and r.has_parity_proof and r.name == "18-9" and r.is_connected


def test_criticals_of_24_24_are_critical(signed):
    _, parts = signed
    crits = list(generate_class(parts["24-24"], criticals_only=True))
    assert crits and all(is_critical(r.hypergraph) for r in crits)
    names = {r.name for r in crits}
    assert "18-9" in names


def test_levels_report_progress(signed):
    seen: list[LevelSummary] = []
    recs = list(generate_class(signed[1]["24-24"], min_edges=22, progress=seen.append))
    assert [s.m for s in seen] == [24, 23, 22]
    # the two edge orbits of 24-24 give two 23-edge sets
    assert seen[0].ks_count == 1 and seen[1].ks_count == 2
    assert sum(s.ks_count for s in seen) == len(recs)


def test_600_cell_first_level():
    seen: list[LevelSummary] = []
    list(generate_class(load_fixture("master_60_75"), min_edges=74, progress=seen.append))
    assert [(s.m, s.ks_count) for s in seen] == [(75, 1), (74, 1)]


def test_random_strategy(signed):
    master, _ = signed
    with pytest.raises(ValueError, match="seed"):
        list(generate_class(master, strategy="random"))
    a = list(generate_class(master, strategy="random", seed=3, samples=4))
    b = list(generate_class(master, strategy="random", seed=3, samples=4))
    assert [r.canonical_key for r in a] == [r.canonical_key for r in b]
    assert all(is_ks(r.hypergraph) for r in a)
    assert all(is_critical(r.hypergraph) == r.is_critical for r in a)
    crit = list(generate_class(master, strategy="random", seed=3, samples=4, criticals_only=True))
    assert crit and all(r.is_critical for r in crit)


def test_worker_processes_agree(signed):
    h = signed[1]["24-24"]
    one = [r.canonical_key for r in generate_class(h, min_edges=20, threads=1)]
    two = [r.canonical_key for r in generate_class(h, min_edges=20, threads=2)]
    assert one == two


def test_record_annotation():
    (r,) = generate_class(load_fixture("ks_18_9"))
    assert r.annotation() == "ks=1 critical=1 pp=1 delta=0 components=18-9"
    assert isinstance(r, ClassRecord) and r.components == ((18, 9),)


def test_stats_tsv():
    d = Distribution()
    d.add(20, 11, True)
    d.add(18, 9, True)
    d.add(22, 11, False)
    assert d.tsv() == "18\t9\t1\t1\n20\t11\t1\t1\n22\t11\t1\t0\n"
    assert d.vertex_range() == {9: (18, 18), 11: (20, 22)}


def test_stats_over_records_and_hypergraphs():
    recs = list(generate_class(load_fixture("ks_18_9")))
    assert stats(recs).rows() == [(18, 9, 1, 1)]
    assert stats([load_fixture("ks_22_11p")]).rows() == [(22, 11, 1, 1)]


def test_thread_count(monkeypatch):
    monkeypatch.delenv("KSFORGE_THREADS", raising=False)
    assert thread_count() == 1 and thread_count(3) == 3
    monkeypatch.setenv("KSFORGE_THREADS", "4")
    assert thread_count() == 4
    monkeypatch.setenv("KSFORGE_THREADS", "0")
    assert thread_count() == 1
    monkeypatch.setenv("KSFORGE_THREADS", "many")
    with pytest.raises(ValueError):
        thread_count()


def test_strip_edge_cases(signed):
    master, _ = signed
    assert len(list(strip(master, StripSpec(1)))) == 32
    tiny = build_master(ComponentSet.parse("0,1", 2)).hypergraph
    with pytest.raises(ValueError):
        list(strip(tiny, StripSpec(1)))
    assert stats([]).rows() == []


@pytest.mark.parametrize("seed", range(5))
def test_pruning_is_sound_on_random_branches(signed, seed):
    # once a set loses the KS property, no further removal brings it back
    master, _ = signed
    rng = random.Random(seed)
    h = master
    while is_ks(h):
        h = h.without_edges([rng.randrange(h.m)])
    while h.m > 1:
        h = h.without_edges([rng.randrange(h.m)])
        assert not is_ks(h)
