"""Master hypergraphs from vector components, decomposition, coordinatizations.

``build_master`` lists every nonzero n-vector over a component set up to
proportionality, finds all mutually orthogonal n-tuples among them and
returns the resulting hypergraph together with its rays.

Orthogonality of all ray pairs is decided in two exact stages: a filter
that evaluates inner products in several prime fields GF(p) (a ring
homomorphism of Z[zeta_N], so a true zero is never missed), followed by an
integer-exact re-check of every surviving pair in Q(zeta_N).
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import product
from typing import Iterable, Mapping, Sequence

import numpy as np

from .cyclotomic import (
    CycloRational,
    CyclotomicField,
    Ray,
    cyclotomic_field,
    hermitian_inner,
    normalize_ray,
    parse_component,
    parse_components,
)
from .mmp import Coordinatization, Hypergraph, check_mmp_validity, edge_components, twin_order

__all__ = [
    "ComponentSet",
    "MasterSet",
    "BudgetExceeded",
    "CoordinatizationReport",
    "CoordinatizationResult",
    "enumerate_rays",
    "orthogonality_graph",
    "enumerate_cliques",
    "build_master",
    "master_from_rays",
    "decompose",
    "decompose_master",
    "ray_embedding",
    "verify_coordinatization",
    "find_coordinatization",
    "format_component",
]

log = logging.getLogger(__name__)

DEFAULT_TUPLE_LIMIT = 10**8
DEFAULT_CLIQUE_BUDGET = 50_000_000


class BudgetExceeded(RuntimeError):
    """A configurable search limit was hit."""


@dataclass(frozen=True)
class ComponentSet:
    values: tuple[CycloRational, ...]
    dimension: int

    def __post_init__(self):
        if not self.values:
            raise ValueError("empty component set")
        if all(v.is_zero() for v in self.values):
            raise ValueError("component set needs a nonzero value")
        if self.dimension < 1:
            raise ValueError("dimension must be positive")

    @classmethod
    def parse(cls, text: str | Iterable[str], dimension: int, field: CyclotomicField | None = None) -> ComponentSet:
        return cls(tuple(parse_components(text, field)), dimension)

    @property
    def field(self) -> CyclotomicField:
        return self.values[0].field


def _value_key(x: CycloRational) -> tuple:
    # zero first, then a fixed order on coefficient vectors
    return (not x.is_zero(), x.num, x.den)


def ray_sort_key(r: Sequence[CycloRational]) -> tuple:
    return tuple(_value_key(x) for x in r)


def enumerate_rays(components: ComponentSet, limit: int = DEFAULT_TUPLE_LIMIT) -> list[Ray]:
    """All nonzero tuples over the component values, one Ray per proportionality class.

    The result is sorted lexicographically by normalized entries. Normalized
    entries may fall outside the component set (e.g. dividing by ``i``).
    """
    values = list(components.values)
    n = components.dimension
    if len(values) ** n > limit:
        raise BudgetExceeded(f"{len(values)}^{n} tuples exceed the limit of {limit}")
    field = components.field
    zero = field.zero()
    nonzero = [v for v in values if not v.is_zero()]
    has_zero = len(nonzero) < len(values)
    products: dict[tuple[CycloRational, CycloRational], CycloRational] = {}

    def scaled(inv: CycloRational, y: CycloRational) -> CycloRational:
        key = (inv, y)
        got = products.get(key)
        if got is None:
            got = products[key] = inv * y
        return got

    seen: set[tuple] = set()
    lead_positions = range(n) if has_zero else range(1)
    for lead in lead_positions:
        for x in nonzero:
            inv = x.inverse()
            head = (zero,) * lead + (field.one(),)
            for rest in product(values, repeat=n - lead - 1):
                seen.add(head + tuple(scaled(inv, y) for y in rest))
    return [Ray(t) for t in sorted(seen, key=ray_sort_key)]


# ---------------------------------------------------------------------------
# orthogonality


def _primes_one_mod(order: int, count: int, start: int = 1 << 26) -> list[int]:
    primes = []
    c = (start // order) * order + 1
    while len(primes) < count:
        if c > start and _is_prime(c):
            primes.append(c)
        c += order
    return primes


def _is_prime(n: int) -> bool:
    if n < 2:
        return False
    for p in (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37):
        if n % p == 0:
            return n == p
    d, s = n - 1, 0
    while d % 2 == 0:
        d //= 2
        s += 1
    for a in (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37):
        x = pow(a, d, n)
        if x in (1, n - 1):
            continue
        for _ in range(s - 1):
            x = x * x % n
            if x == n - 1:
                break
        else:
            return False
    return True


def _integer_rays(rays: Sequence[Ray], field: CyclotomicField) -> tuple[np.ndarray, np.ndarray]:
    """Rays scaled to integer coefficient arrays (R, n, phi) and their conjugates."""
    d = field.degree
    n = len(rays[0])
    ints = np.zeros((len(rays), n, d), dtype=np.int64)
    conj = np.zeros_like(ints)
    for r, ray in enumerate(rays):
        scale = math.lcm(*(x.den for x in ray))
        for i, x in enumerate(ray):
            vec = [c * (scale // x.den) for c in x.num]
            ints[r, i] = vec
            conj[r, i] = field.conj_vector(vec)
    return ints, conj


def _exact_zero_pairs(
    pairs: np.ndarray, ints: np.ndarray, conj: np.ndarray, field: CyclotomicField, chunk: int = 8192
) -> np.ndarray:
    """Boolean mask: which (a, b) pairs have an exactly vanishing inner product."""
    d = field.degree
    # mult[j*d + k] = reduced coefficient vector of z^(j+k)
    mult = np.array([field.reduce_power(j + k) for j in range(d) for k in range(d)], dtype=np.int64)
    bound = int(np.abs(ints).max()) if ints.size else 0
    if bound and bound * bound * ints.shape[1] * d * d * int(np.abs(mult).max()) >= 1 << 62:
        raise OverflowError("ray coefficients too large for exact int64 verification")
    out = np.zeros(len(pairs), dtype=bool)
    for s in range(0, len(pairs), chunk):
        a = pairs[s : s + chunk, 0]
        b = pairs[s : s + chunk, 1]
        outer = np.einsum("pij,pik->pjk", conj[a], ints[b]).reshape(len(a), d * d)
        coeffs = outer @ mult
        out[s : s + chunk] = ~coeffs.any(axis=1)
    return out


def orthogonality_graph(rays: Sequence[Ray], *, primes: int = 3, block: int = 512) -> list[int]:
    """Adjacency bitmasks: bit b of entry a is set iff rays a and b are orthogonal."""
    R = len(rays)
    adj = [0] * R
    if R == 0:
        return adj
    field = rays[0][0].field
    n = len(rays[0])
    plist = _primes_one_mod(field.order, primes)
    images = []
    for p in plist:
        root = field.modular_root(p)
        fwd = np.array([[x.modular_image(p, root) for x in ray] for ray in rays], dtype=np.int64)
        cj = np.array([[x.modular_image(p, root, conjugate=True) for x in ray] for ray in rays], dtype=np.int64)
        images.append((p, fwd, cj))
    assert n * (plist[-1] - 1) ** 2 < 1 << 63
    cand_pairs = []
    for s in range(0, R, block):
        stop = min(R, s + block)
        mask = None
        for p, fwd, cj in images:
            g = (cj[s:stop] @ fwd.T) % p
            zero = g == 0
            mask = zero if mask is None else (mask & zero)
        rows, cols = np.nonzero(mask)
        rows = rows + s
        keep = rows < cols
        cand_pairs.append(np.stack([rows[keep], cols[keep]], axis=1))
    pairs = np.concatenate(cand_pairs) if cand_pairs else np.zeros((0, 2), dtype=np.int64)
    ints, conj = _integer_rays(rays, field)
    exact = _exact_zero_pairs(pairs, ints, conj, field)
    log.debug("orthogonality: %d candidate pairs, %d exact", len(pairs), int(exact.sum()))
    for a, b in pairs[exact]:
        a = int(a)
        b = int(b)
        adj[a] |= 1 << b
        adj[b] |= 1 << a
    return adj


def enumerate_cliques(adj: Sequence[int], size: int, budget: int = DEFAULT_CLIQUE_BUDGET) -> list[tuple[int, ...]]:
    """All cliques with exactly ``size`` vertices, each as an increasing tuple."""
    out: list[tuple[int, ...]] = []
    nodes = 0
    higher = [a & ~((1 << (v + 1)) - 1) for v, a in enumerate(adj)]

    def extend(clique: list[int], cand: int) -> None:
        nonlocal nodes
        nodes += 1
        if nodes > budget:
            raise BudgetExceeded(f"clique enumeration exceeded {budget} nodes")
        if len(clique) == size:
            out.append(tuple(clique))
            return
        need = size - len(clique)
        while cand:
            if cand.bit_count() < need:
                return
            low = cand & -cand
            v = low.bit_length() - 1
            cand ^= low
            clique.append(v)
            extend(clique, cand & higher[v])
            clique.pop()

    for v in range(len(adj)):
        if size == 1:
            out.append((v,))
        elif higher[v].bit_count() >= size - 1:
            extend([v], higher[v])
    return out


# ---------------------------------------------------------------------------
# masters


@dataclass(frozen=True)
class MasterSet:
    hypergraph: Hypergraph
    rays: tuple[Ray, ...]  # ray of vertex v is rays[v]

    @property
    def name(self) -> str:
        return self.hypergraph.name

    def coordinatization(self) -> Coordinatization:
        return Coordinatization({v: tuple(format_component(x) for x in ray) for v, ray in enumerate(self.rays)})

    def values(self) -> dict[int, Ray]:
        return dict(enumerate(self.rays))


def _master_from_cliques(rays: Sequence[Ray], cliques: Sequence[tuple[int, ...]], dimension: int) -> MasterSet:
    cliques = sorted(cliques)
    h = Hypergraph(tuple(cliques), dimension)
    order: dict[int, int] = {}
    for e in cliques:
        for r in e:
            order.setdefault(r, len(order))
    vertex_rays = [None] * len(order)
    for r, v in order.items():
        vertex_rays[v] = rays[r]
    return MasterSet(h, tuple(vertex_rays))


def build_master(
    components: ComponentSet,
    *,
    tuple_limit: int = DEFAULT_TUPLE_LIMIT,
    clique_budget: int = DEFAULT_CLIQUE_BUDGET,
) -> MasterSet:
    """All orthogonal n-tuples over the component set, as an MMP hypergraph.

    Rays that belong to no orthogonal n-tuple are dropped.
    """
    rays = enumerate_rays(components, tuple_limit)
    return _master_over(rays, components.dimension, clique_budget)


def master_from_rays(
    vectors: Iterable[Sequence[CycloRational]], dimension: int, *, clique_budget: int = DEFAULT_CLIQUE_BUDGET
) -> MasterSet:
    """Master over an explicit vector list (e.g. polytope vertices).

    Proportional vectors collapse to one ray.
    """
    rays = sorted({normalize_ray(v) for v in vectors}, key=ray_sort_key)
    if any(r.dimension != dimension for r in rays):
        raise ValueError(f"expected {dimension}-dimensional vectors")
    return _master_over(rays, dimension, clique_budget)


def _master_over(rays: Sequence[Ray], dimension: int, clique_budget: int) -> MasterSet:
    adj = orthogonality_graph(rays)
    cliques = enumerate_cliques(adj, dimension, clique_budget)
    master = _master_from_cliques(rays, cliques, dimension)
    log.info("master %s from %d rays", master.name, len(rays))
    return master


def decompose(h: Hypergraph) -> list[Hypergraph]:
    """Connected components, largest (k, m) first."""
    parts = [h.subhypergraph(g) for g in edge_components(h)]
    return sorted(parts, key=lambda g: (-g.k, -g.m))


def is_connected(h: Hypergraph) -> bool:
    return len(edge_components(h)) <= 1


def decompose_master(master: MasterSet) -> list[MasterSet]:
    """Connected components of a master, each keeping its rays."""
    out = []
    h = master.hypergraph
    for group in edge_components(h):
        edges = [h.edges[j] for j in group]
        order: dict[int, int] = {}
        for e in edges:
            for v in e:
                order.setdefault(v, len(order))
        rays = [None] * len(order)
        for v, new in order.items():
            rays[new] = master.rays[v]
        out.append(MasterSet(Hypergraph(tuple(edges), h.dimension), tuple(rays)))
    return sorted(out, key=lambda ms: (-ms.hypergraph.k, -ms.hypergraph.m))


def ray_embedding(small: MasterSet, big: MasterSet) -> list[int] | None:
    """Vertex map sending each ray of ``small`` to the same ray in ``big``.

    None unless every ray is present and every edge lands on an edge, which
    is what nesting of masters built from nested component sets means.
    """
    where = {r: v for v, r in enumerate(big.rays)}
    vmap = [where.get(r, -1) for r in small.rays]
    if -1 in vmap:
        return None
    edges = set(big.hypergraph.edge_sets())
    if not all(frozenset(vmap[v] for v in e) in edges for e in small.hypergraph.edges):
        return None
    return vmap


# ---------------------------------------------------------------------------
# coordinatizations


@dataclass
class CoordinatizationReport:
    ok: bool
    violations: list[tuple]

    def __bool__(self) -> bool:
        return self.ok


def verify_coordinatization(
    h: Hypergraph,
    coord: Coordinatization | Mapping[int, Sequence[CycloRational]],
    field: CyclotomicField | None = None,
) -> CoordinatizationReport:
    """Check edge-wise orthogonality and pairwise non-proportionality.

    Violations are tuples ``("missing", v)``, ``("zero", v)``,
    ``("nonorthogonal", edge, a, b)`` or ``("proportional", a, b)``.
    """
    values = coord.values(field) if isinstance(coord, Coordinatization) else dict(coord)
    violations: list[tuple] = []
    rays: dict[int, Ray] = {}
    for v in range(h.num_vertices):
        vec = values.get(v)
        if vec is None:
            violations.append(("missing", v))
            continue
        if len(vec) != h.dimension:
            violations.append(("arity", v))
            continue
        try:
            rays[v] = normalize_ray(vec)
        except ValueError:
            violations.append(("zero", v))
    for j, e in enumerate(h.edges):
        for x in range(len(e)):
            for y in range(x + 1, len(e)):
                a, b = e[x], e[y]
                if a in rays and b in rays and not hermitian_inner(rays[a], rays[b]).is_zero():
                    violations.append(("nonorthogonal", j, a, b))
    first: dict[Ray, int] = {}
    for v, r in rays.items():
        if r in first:
            violations.append(("proportional", first[r], v))
        else:
            first[r] = v
    return CoordinatizationReport(not violations, violations)


@dataclass
class CoordinatizationResult:
    status: str  # "sat", "unsat" or "budget-exhausted"
    assignment: dict[int, Ray] | None = None
    nodes: int = 0

    @property
    def satisfiable(self) -> bool | None:
        return {"sat": True, "unsat": False}.get(self.status)


def find_coordinatization(
    h: Hypergraph,
    components: ComponentSet,
    budget: int = 10_000_000,
    *,
    rays: Sequence[Ray] | None = None,
    adjacency: Sequence[int] | None = None,
) -> CoordinatizationResult:
    """Backtracking search for distinct rays over ``components`` that make
    every edge mutually orthogonal.

    ``rays``/``adjacency`` may be passed to reuse a precomputed ray list and
    orthogonality graph.
    """
    n = h.dimension
    if any(len(e) > n for e in h.edges):
        return CoordinatizationResult("unsat")
    if rays is None:
        rays = enumerate_rays(components)
    if adjacency is None:
        adjacency = orthogonality_graph(rays)
    # only rays inside some orthogonal n-tuple can sit in an n-vertex edge
    in_basis = 0
    for e in enumerate_cliques(adjacency, n):
        for r in e:
            in_basis |= 1 << r
    k = h.num_vertices
    nbrs = [0] * k
    for e in h.edges:
        for v in e:
            for u in e:
                if u != v:
                    nbrs[v] |= 1 << u
    nbr_lists = [[u for u in range(k) if (nbrs[v] >> u) & 1] for v in range(k)]
    # vertices in edges that overlap other edges heavily are the most constrained
    sets = h.edge_sets()
    overlap = [0] * k
    for a in range(len(sets)):
        for b in range(a + 1, len(sets)):
            shared = len(sets[a] & sets[b])
            if shared > 1:
                for v in sets[a] | sets[b]:
                    overlap[v] += shared
    before, after = twin_order(h)
    domain = [in_basis] * k
    assigned = [-1] * k
    nodes = 0

    def search(depth: int) -> bool | None:
        nonlocal nodes
        nodes += 1
        if nodes > budget:
            return None
        if depth == k:
            return True
        # most constrained unassigned vertex, preferring ones next to assigned vertices
        best = -1
        best_key = None
        for v in range(k):
            if assigned[v] < 0:
                key = (domain[v].bit_count(), -sum(assigned[u] >= 0 for u in nbr_lists[v]), -overlap[v])
                if best_key is None or key < best_key:
                    best, best_key = v, key
                    if key[0] == 0:
                        return False
        v = best
        cands = domain[v]
        while cands:
            low = cands & -cands
            r = low.bit_length() - 1
            cands ^= low
            saved = domain[:]
            assigned[v] = r
            ok = True
            for w in range(k):
                if assigned[w] < 0:
                    domain[w] &= ~low
                    if (nbrs[v] >> w) & 1:
                        domain[w] &= adjacency[r]
                    if (after[v] >> w) & 1:
                        domain[w] &= ~((low << 1) - 1)
                    elif (before[v] >> w) & 1:
                        domain[w] &= low - 1
                    if not domain[w]:
                        ok = False
                        break
            if ok:
                res = search(depth + 1)
                if res is None:
                    return None
                if res:
                    return True
            assigned[v] = -1
            domain[:] = saved
        return False

    res = search(0)
    if res is None:
        return CoordinatizationResult("budget-exhausted", nodes=nodes)
    if not res:
        return CoordinatizationResult("unsat", nodes=nodes)
    return CoordinatizationResult("sat", {v: rays[assigned[v]] for v in range(k)}, nodes)


# ---------------------------------------------------------------------------
# formatting field elements back to component expressions


def _solve_rational(columns: list[tuple[Fraction, ...]], target: tuple[Fraction, ...]) -> list[Fraction] | None:
    """Exact solve of sum(q_i * columns[i]) == target, or None."""
    m = len(columns)
    rows = [list(col[i] for col in columns) + [target[i]] for i in range(len(target))]
    piv_cols = []
    r = 0
    for c in range(m):
        p = next((i for i in range(r, len(rows)) if rows[i][c] != 0), None)
        if p is None:
            continue
        rows[r], rows[p] = rows[p], rows[r]
        pv = rows[r][c]
        rows[r] = [x / pv for x in rows[r]]
        for i in range(len(rows)):
            if i != r and rows[i][c] != 0:
                f = rows[i][c]
                rows[i] = [a - f * b for a, b in zip(rows[i], rows[r])]
        piv_cols.append(c)
        r += 1
    if any(row[m] != 0 for row in rows[r:]):
        return None
    sol = [Fraction(0)] * m
    for i, c in enumerate(piv_cols):
        sol[c] = rows[i][m]
    return sol


_NICE_BASES = [
    ("i",),
    ("w",),
    ("sqrt5",),
    ("sqrt3",),
    ("sqrt2",),
    ("i", "sqrt5", "i*sqrt5"),
    ("w", "sqrt5", "w*sqrt5"),
]


def format_component(x: CycloRational) -> str:
    """A component expression that parses back to ``x``."""
    field = x.field
    target = tuple(Fraction(c, x.den) for c in x.num)
    if not any(target[1:]):
        q = target[0]
        return str(q.numerator) if q.denominator == 1 else f"{q.numerator}/{q.denominator}"
    for names in _NICE_BASES:
        try:
            vals = [parse_component(nm, field) for nm in names]
        except Exception:
            continue
        cols = [(Fraction(1),) + (Fraction(0),) * (field.degree - 1)]
        cols += [tuple(Fraction(c, v.den) for c in v.num) for v in vals]
        sol = _solve_rational(cols, target)
        if sol is not None:
            if names == ("w",) and sol[0] == 0:
                if sol[1] == 1:
                    return "w"
                if sol[1] == -1:
                    return "-w"
            if names == ("w",) and sol[0] == sol[1]:
                # a + a w = -a w^2
                a = sol[0]
                if a == -1:
                    return "w2"
                if a == 1:
                    return "-w2"
            return _linear_text(sol, ("1",) + names)
    terms = [(Fraction(c, x.den), f"z^{j}" if j else "1") for j, c in enumerate(x.num) if c]
    return _linear_text([t[0] for t in terms], tuple(t[1] for t in terms))


def _linear_text(coeffs: Sequence[Fraction], names: Sequence[str]) -> str:
    den = math.lcm(*(c.denominator for c in coeffs))
    parts = []
    for c, nm in zip(coeffs, names):
        if c == 0:
            continue
        k = int(c * den)
        if nm == "1":
            parts.append(f"{k:+d}")
        elif k == 1:
            parts.append(f"+{nm}")
        elif k == -1:
            parts.append(f"-{nm}")
        else:
            parts.append(f"{k:+d}*{nm}")
    body = "".join(parts).lstrip("+") or "0"
    return f"({body})/{den}" if den != 1 else body
