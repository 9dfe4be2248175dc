"""Edge stripping, downward class generation and statistics."""

from __future__ import annotations

import itertools
import os
import random
from collections import Counter
from dataclasses import dataclass, field
from typing import Iterable, Iterator, Sequence

from .canon import canonical_key, canonical_search, combine_parts
from .master import decompose
from .mmp import Hypergraph, edge_pairs_sharing, serialize
from .states01 import ExactOneSolver, has_parity_proof
from .structure import subgraph_embedding

__all__ = [
    "StripSpec",
    "strip",
    "ClassRecord",
    "LevelSummary",
    "generate_class",
    "Distribution",
    "stats",
    "thread_count",
]


def thread_count(default: int = 1) -> int:
    """Worker cap from ``KSFORGE_THREADS`` (at least 1)."""
    raw = os.environ.get("KSFORGE_THREADS", "")
    try:
        return max(1, int(raw)) if raw.strip() else default
    except ValueError:
        raise ValueError(f"KSFORGE_THREADS must be an integer, got {raw!r}") from None


# ---------------------------------------------------------------------------
# stripping


@dataclass(frozen=True)
class StripSpec:
    count: int = 1
    mode: str = "exhaustive"  # exhaustive | random | add
    seed: int | None = None
    samples: int = 1
    master: Hypergraph | None = None

    def __post_init__(self):
        if self.count < 1:
            raise ValueError("strip count must be at least 1")
        if self.mode not in ("exhaustive", "random", "add"):
            raise ValueError(f"unknown strip mode {self.mode!r}")
        if self.mode == "random" and self.seed is None:
            raise ValueError("random stripping needs an explicit seed")
        if self.mode == "add" and self.master is None:
            raise ValueError("add mode needs a master")


def strip(h: Hypergraph, spec: StripSpec) -> Iterator[Hypergraph]:
    """Children of ``h`` with ``spec.count`` edges removed (or added, in add mode).

    Orphaned vertices are dropped from the children.
    """
    if spec.mode == "add":
        yield from _augment(h, spec.master)
        return
    if spec.count >= h.m:
        raise ValueError(f"cannot strip {spec.count} edges from a set with {h.m}")
    if spec.mode == "exhaustive":
        for drop in itertools.combinations(range(h.m), spec.count):
            yield h.without_edges(drop)
    else:
        rng = random.Random(spec.seed)
        for _ in range(spec.samples):
            yield h.without_edges(rng.sample(range(h.m), spec.count))


def _augment(h: Hypergraph, master: Hypergraph) -> Iterator[Hypergraph]:
    emb = subgraph_embedding(h, master)
    if emb is None:
        raise ValueError(f"{h.name} is not a subgraph of {master.name}")
    image = {frozenset(emb[v] for v in e) for e in h.edges}
    base = [tuple(sorted(s)) for s in image]
    for j, e in enumerate(master.edges):
        if frozenset(e) not in image:
            yield Hypergraph.from_edges(base + [e], master.dimension)


# ---------------------------------------------------------------------------
# class generation


@dataclass(frozen=True)
class ClassRecord:
    k: int
    m: int
    is_ks: bool
    is_critical: bool
    has_parity_proof: bool
    delta_count: int
    components: tuple[tuple[int, int], ...]
    canonical_key: str
    hypergraph: Hypergraph = field(compare=False, repr=False)

    @property
    def name(self) -> str:
        return f"{self.k}-{self.m}"

    @property
    def is_connected(self) -> bool:
        return len(self.components) == 1

    def annotation(self) -> str:
        comps = "+".join(f"{k}-{m}" for k, m in self.components)
        return (
            f"ks={int(self.is_ks)} critical={int(self.is_critical)} pp={int(self.has_parity_proof)} "
            f"delta={self.delta_count} components={comps}"
        )


@dataclass(frozen=True)
class LevelSummary:
    m: int
    ks_count: int
    critical_count: int


def _record(h: Hypergraph, key: str, critical: bool) -> ClassRecord:
    delta = len(edge_pairs_sharing(h, h.dimension - 2)) if h.dimension >= 4 else 0
    comps = tuple((c.k, c.m) for c in decompose(h))
    return ClassRecord(h.k, h.m, True, critical, has_parity_proof(h), delta, comps, key, h)


def _sub(master: Hypergraph, mask: int) -> Hypergraph:
    return Hypergraph(tuple(e for j, e in enumerate(master.edges) if (mask >> j) & 1), master.dimension)


def _bits(mask: int) -> list[int]:
    out = []
    while mask:
        low = mask & -mask
        out.append(low.bit_length() - 1)
        mask ^= low
    return out


def _label_component(master: Hypergraph, mask: int):
    """Canonical certificate of one connected edge set, plus its automorphisms
    as pairs of master edge indices (edge j is moved to edge t)."""
    h = _sub(master, mask)
    res = canonical_search(h)
    positions = _bits(mask)
    index = {frozenset(e): j for j, e in enumerate(h.edges)}
    moves = []
    for g in res.generators:
        for j, e in enumerate(h.edges):
            t = index[frozenset(g[v] for v in e)]
            if t != j:
                moves.append((positions[j], positions[t]))
    return res.certificate, tuple(moves)


# worker-process state for the parallel class driver
_WORKER_MASTER: Hypergraph | None = None


def _worker_init(master: Hypergraph) -> None:
    global _WORKER_MASTER
    _WORKER_MASTER = master


def _worker_label(mask: int):
    return _label_component(_WORKER_MASTER, mask)


class _ClassContext:
    """Bitmask views of a master shared by the class driver."""

    def __init__(self, master: Hypergraph, threads: int = 1):
        self.master = master
        self.solver = ExactOneSolver(master.edges, master.num_vertices)
        self.edge_vmask = self.solver.edge_vmask
        self.vertex_emask = self.solver.vertex_emask
        self.threads = threads
        self._pool = None

    def components(self, mask: int) -> list[int]:
        out = []
        rest = mask
        while rest:
            comp = rest & -rest
            verts = self.edge_vmask[comp.bit_length() - 1]
            while True:
                grow = 0
                for v in _bits(verts):
                    grow |= self.vertex_emask[v]
                grow &= rest
                if grow == comp:
                    break
                comp = grow
                for j in _bits(comp):
                    verts |= self.edge_vmask[j]
            out.append(comp)
            rest &= ~comp
        return out

    def label_many(self, masks: list[int]) -> list:
        if self.threads > 1 and len(masks) > 64:
            if self._pool is None:
                from concurrent.futures import ProcessPoolExecutor

                self._pool = ProcessPoolExecutor(self.threads, initializer=_worker_init, initargs=(self.master,))
            chunk = max(1, len(masks) // (8 * self.threads))
            return list(self._pool.map(_worker_label, masks, chunksize=chunk))
        return [_label_component(self.master, m) for m in masks]

    def close(self) -> None:
        if self._pool is not None:
            self._pool.shutdown()
            self._pool = None


def _edge_orbits(mask: int, moves: Sequence[tuple[int, int]]) -> list[tuple[int, int]]:
    """(representative, orbit bitmask) for the edges in ``mask`` under ``moves``."""
    positions = _bits(mask)
    if not moves:
        return [(j, 1 << j) for j in positions]
    parent = {j: j for j in positions}

    def find(x: int) -> int:
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    for a, b in moves:
        ra, rb = find(a), find(b)
        if ra != rb:
            parent[max(ra, rb)] = min(ra, rb)
    orbits: dict[int, int] = {}
    for j in positions:
        r = find(j)
        orbits[r] = orbits.get(r, 0) | (1 << j)
    return sorted(orbits.items())


def generate_class(
    master: Hypergraph,
    *,
    criticals_only: bool = False,
    min_edges: int | None = None,
    strategy: str = "breadth",
    seed: int | None = None,
    samples: int = 1,
    threads: int | None = None,
    progress=None,
) -> Iterator[ClassRecord]:
    """Non-isomorphic KS subsets of ``master`` obtained by deleting edges.

    Level by level from the master downward: every unique set at a level is
    stripped of one edge at a time, children that lose the KS property are
    dropped (their descendants cannot regain it), and the survivors are
    deduplicated by canonical key before the next level. A set is critical
    when none of its children is KS. Records are emitted per level, sorted by
    canonical key. Only one edge per orbit of the known automorphisms of the
    parent is removed, since the other choices give isomorphic children.

    ``strategy="random"`` walks ``samples`` random downward paths instead
    (requires ``seed``) and emits the distinct sets met on the way.
    ``min_edges`` stops the breadth search below that level. ``threads``
    (default: ``KSFORGE_THREADS``) sets the number of worker processes used
    for canonical labeling.
    """
    ctx = _ClassContext(master, thread_count() if threads is None else threads)
    solver = ctx.solver
    full = solver.full_mask()
    if solver.solve(full) is not None:
        raise ValueError(f"{master.name} is not a KS set")
    if strategy == "random":
        yield from _random_walks(master, solver, seed, samples, criticals_only)
        return
    if strategy != "breadth":
        raise ValueError(f"unknown strategy {strategy!r}")

    try:
        level = _dedup(ctx, {full: 0})
        m = master.m
        while level:
            # child mask -> edges already known to leave a 0-1 assignment when removed
            next_masks: dict[int, int] = {}
            emitted = []
            for key in sorted(level):
                mask, moves, dead = level[key]
                orbits = _edge_orbits(mask, moves)
                alive = []
                for j, orbit in orbits:
                    if dead >> j & 1:
                        continue
                    if solver.solve(mask & ~(1 << j)) is None:
                        alive.append(j)
                    else:
                        dead |= orbit
                critical = not alive
                if alive and (min_edges is None or m - 1 >= min_edges):
                    for j in alive:
                        child = mask & ~(1 << j)
                        # monotonicity: removing a dead edge from a subset still leaves an assignment
                        next_masks[child] = next_masks.get(child, 0) | (dead & child)
                if criticals_only and not critical:
                    continue
                emitted.append(_record(_sub(master, mask), key, critical))
            yield from emitted
            if progress is not None:
                progress(LevelSummary(m, len(level), sum(r.is_critical for r in emitted)))
            level = _dedup(ctx, next_masks)
            m -= 1
    finally:
        ctx.close()


def _dedup(ctx: _ClassContext, dead_by_mask: dict[int, int], chunk: int = 4096) -> dict[str, tuple[int, tuple, int]]:
    """Canonical key -> (first mask, automorphism moves, dead edges) over the masks.

    Work is streamed in chunks so only the surviving keys stay in memory.
    Labels of components of disconnected sets are memoized across the level,
    so a component shared by many sets is labeled once.
    """
    masks = list(dead_by_mask)
    out: dict[str, tuple[int, tuple, int]] = {}
    memo: dict[int, tuple] = {}
    dim = ctx.master.dimension
    for lo in range(0, len(masks), chunk):
        batch = masks[lo : lo + chunk]
        parts = [ctx.components(mk) for mk in batch]
        needed = list(dict.fromkeys(c for p in parts for c in p if c not in memo))
        labels = dict(zip(needed, ctx.label_many(needed)))
        for mk, comps in zip(batch, parts):
            if len(comps) == 1:
                cert, moves = labels.get(comps[0]) or memo[comps[0]]
                key = serialize(Hypergraph(cert, dim))
            else:
                got = []
                for c in comps:
                    lab = memo.get(c)
                    if lab is None:
                        lab = memo[c] = labels[c]
                    got.append(lab)
                key = serialize(combine_parts([g[0] for g in got], dim))
                moves = tuple(mv for g in got for mv in g[1])
            if key not in out:
                out[key] = (mk, moves, dead_by_mask[mk])
    return out


def _random_walks(master, solver, seed, samples, criticals_only) -> Iterator[ClassRecord]:
    if seed is None:
        raise ValueError("the random strategy needs an explicit seed")
    rng = random.Random(seed)
    seen: set[str] = set()
    for _ in range(samples):
        mask = solver.full_mask()
        path = []
        while True:
            positions = _bits(mask)
            rng.shuffle(positions)
            nxt = None
            for j in positions:
                if solver.solve(mask & ~(1 << j)) is None:
                    nxt = mask & ~(1 << j)
                    break
            path.append((mask, nxt is None))
            if nxt is None:
                break
            mask = nxt
        for mask, critical in path:
            if criticals_only and not critical:
                continue
            h = _sub(master, mask)
            key = canonical_key(h)
            if key in seen:
                continue
            seen.add(key)
            yield _record(h, key, critical)


# ---------------------------------------------------------------------------
# statistics


@dataclass
class Distribution:
    cells: Counter = field(default_factory=Counter)  # (k, m) -> criticals
    parity: Counter = field(default_factory=Counter)  # (k, m) -> criticals with a parity proof

    def add(self, k: int, m: int, parity_proof: bool) -> None:
        self.cells[(k, m)] += 1
        if parity_proof:
            self.parity[(k, m)] += 1

    def rows(self) -> list[tuple[int, int, int, int]]:
        return [(k, m, c, self.parity[(k, m)]) for (k, m), c in sorted(self.cells.items(), key=lambda t: (t[0][1], t[0][0]))]

    def tsv(self) -> str:
        return "".join(f"{k}\t{m}\t{c}\t{p}\n" for k, m, c, p in self.rows())

    def vertex_range(self) -> dict[int, tuple[int, int]]:
        """min and max k for each m (cutoffs and saw-teeth show up here)."""
        out: dict[int, tuple[int, int]] = {}
        for k, m in self.cells:
            lo, hi = out.get(m, (k, k))
            out[m] = (min(lo, k), max(hi, k))
        return dict(sorted(out.items()))


def stats(records: Iterable[ClassRecord | Hypergraph], *, criticals_only: bool = True) -> Distribution:
    """Histogram of (k, m) over critical records.

    Bare hypergraphs are counted as given (callers filter them beforehand).
    """
    dist = Distribution()
    for r in records:
        if isinstance(r, Hypergraph):
            dist.add(r.k, r.m, has_parity_proof(r))
        elif r.is_critical or not criticals_only:
            dist.add(r.k, r.m, r.has_parity_proof)
    return dist
