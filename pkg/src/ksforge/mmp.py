"""MMP hypergraph line format and the core Hypergraph model.

One hypergraph per line: edges are runs of vertex glyphs separated by
commas, the statement ends with ``.`` and may be followed by a
coordinatization block ``{1={0,0,0,1},2={...},...}``.
"""

from __future__ import annotations

import re
import warnings
from dataclasses import dataclass, field
from itertools import combinations
from typing import Iterable, Iterator, Mapping, Sequence

__all__ = [
    "ALPHABET",
    "MMPParseError",
    "Hypergraph",
    "Coordinatization",
    "MMPValidityReport",
    "encode_vertex",
    "decode_vertex",
    "parse_line",
    "parse_lines",
    "is_comment",
    "serialize",
    "check_mmp_validity",
    "edge_components",
    "edge_pairs_sharing",
    "twin_order",
]

ALPHABET = (
    "123456789"
    "ABCDEFGHIJKLMNOPQRSTUVWXYZ"
    "abcdefghijklmnopqrstuvwxyz"
    "!\"#$%&'()*-/:;<=>?@[\\]^_`{|}~"
)
assert len(ALPHABET) == 90
_RANK = {ch: i for i, ch in enumerate(ALPHABET)}


class MMPParseError(ValueError):
    """Malformed MMP line."""

    def __init__(self, message: str, line_number: int | None = None):
        self.line_number = line_number
        if line_number is not None:
            message = f"line {line_number}: {message}"
        super().__init__(message)


def encode_vertex(index: int) -> str:
    if index < 0:
        raise ValueError("vertex index must be non-negative")
    prefix, rank = divmod(index, len(ALPHABET))
    return "+" * prefix + ALPHABET[rank]


def decode_vertex(glyph: str) -> int:
    prefix = len(glyph) - len(glyph.lstrip("+"))
    base = glyph[prefix:]
    if len(base) != 1 or base not in _RANK:
        raise MMPParseError(f"invalid vertex glyph {glyph!r}")
    return prefix * len(ALPHABET) + _RANK[base]


@dataclass(frozen=True)
class Hypergraph:
    """An immutable hypergraph with vertices ``0..k-1``.

    The constructor interns vertices in first-appearance order, so two
    Hypergraphs built from edge lists that differ only by a relabeling that
    preserves first appearance compare equal. Use :meth:`from_edges` to build
    one from arbitrary hashable vertex names.
    """

    edges: tuple[tuple[int, ...], ...]
    dimension: int
    num_vertices: int = field(init=False, compare=False)

    def __post_init__(self):
        if self.dimension < 1:
            raise ValueError("dimension must be positive")
        remap: dict = {}
        edges = []
        for e in self.edges:
            edges.append(tuple(remap.setdefault(v, len(remap)) for v in e))
        object.__setattr__(self, "edges", tuple(edges))
        object.__setattr__(self, "num_vertices", len(remap))

    @classmethod
    def from_edges(cls, edges: Iterable[Iterable], dimension: int, *, warn_duplicates: bool = True) -> Hypergraph:
        seen: set[frozenset] = set()
        out = []
        for e in edges:
            e = tuple(e)
            if not e:
                raise ValueError("empty edge")
            if len(set(e)) != len(e):
                raise ValueError(f"repeated vertex in edge {e!r}")
            key = frozenset(e)
            if key in seen:
                if warn_duplicates:
                    warnings.warn(f"duplicate edge {e!r} dropped", stacklevel=2)
                continue
            seen.add(key)
            out.append(e)
        return cls(tuple(out), dimension)

    # k and m of the "k-m set" naming
    @property
    def k(self) -> int:
        return self.num_vertices

    @property
    def m(self) -> int:
        return len(self.edges)

    @property
    def num_edges(self) -> int:
        return len(self.edges)

    @property
    def name(self) -> str:
        return f"{self.k}-{self.m}"

    def degrees(self) -> list[int]:
        deg = [0] * self.num_vertices
        for e in self.edges:
            for v in e:
                deg[v] += 1
        return deg

    def incidence_masks(self) -> list[int]:
        """For every vertex, a bitmask of the edges that contain it."""
        masks = [0] * self.num_vertices
        for j, e in enumerate(self.edges):
            bit = 1 << j
            for v in e:
                masks[v] |= bit
        return masks

    def edge_sets(self) -> list[frozenset[int]]:
        return [frozenset(e) for e in self.edges]

    def without_edges(self, drop: Iterable[int]) -> Hypergraph:
        """Remove the given edge indices; orphaned vertices disappear."""
        drop = set(drop)
        return Hypergraph(tuple(e for j, e in enumerate(self.edges) if j not in drop), self.dimension)

    def subhypergraph(self, keep: Iterable[int]) -> Hypergraph:
        return Hypergraph(tuple(self.edges[j] for j in keep), self.dimension)

    def relabel(self, perm: Sequence[int]) -> Hypergraph:
        """Apply the vertex map ``v -> perm[v]`` and re-intern."""
        return Hypergraph(tuple(tuple(perm[v] for v in e) for e in self.edges), self.dimension)

    def __str__(self) -> str:
        return serialize(self)


# ---------------------------------------------------------------------------
# coordinatization blocks


@dataclass(frozen=True)
class Coordinatization:
    """Vertex index -> list of component expressions (text), one per coordinate."""

    assignments: Mapping[int, tuple[str, ...]]

    def __len__(self) -> int:
        return len(self.assignments)

    def values(self, field=None) -> dict[int, tuple]:
        from .cyclotomic import parse_component

        return {v: tuple(parse_component(x, field) for x in comps) for v, comps in self.assignments.items()}


def _split_coord_entries(body: str, line_number: int | None) -> Iterator[tuple[str, str]]:
    # body looks like 1={0,0,0,1},2={0,0,1,0},...
    pos = 0
    while pos < len(body):
        eq = body.find("=", pos)
        if eq < 0:
            raise MMPParseError(f"malformed coordinatization near {body[pos:pos + 20]!r}", line_number)
        glyph = body[pos:eq]
        if eq + 1 >= len(body) or body[eq + 1] != "{":
            raise MMPParseError(f"expected '{{' after {glyph}=", line_number)
        depth = 0
        end = eq + 1
        while end < len(body):
            if body[end] == "{":
                depth += 1
            elif body[end] == "}":
                depth -= 1
                if depth == 0:
                    break
            end += 1
        if depth:
            raise MMPParseError("unbalanced braces in coordinatization", line_number)
        yield glyph, body[eq + 2 : end]
        pos = end + 1
        if pos < len(body):
            if body[pos] != ",":
                raise MMPParseError(f"expected ',' in coordinatization at {body[pos:pos + 10]!r}", line_number)
            pos += 1


_BREAK = re.compile(r"\\break(?=\s|$)")


def _clean(line: str) -> str:
    line = _BREAK.sub("", line)
    return "".join(line.split())


def _split_glyphs(token: str, line_number: int | None) -> list[str]:
    glyphs = []
    prefix = ""
    for ch in token:
        if ch == "+":
            prefix += "+"
            continue
        if ch not in _RANK:
            raise MMPParseError(f"character {ch!r} is not in the MMP alphabet", line_number)
        glyphs.append(prefix + ch)
        prefix = ""
    if prefix:
        raise MMPParseError(f"dangling '+' in edge {token!r}", line_number)
    return glyphs


def parse_line(
    line: str,
    dimension: int,
    *,
    lenient: bool = False,
    line_number: int | None = None,
) -> tuple[Hypergraph, Coordinatization | None]:
    """Parse one MMP line.

    Returns the hypergraph (vertices interned in first-appearance order) and
    the coordinatization block, if the line carries one. Empty edges such as
    the ``,,,`` abbreviations found in printed listings are an error unless
    ``lenient`` is set, in which case they are skipped. A missing final
    ``.`` is tolerated. Anything after a tab is an annotation and ignored.
    """
    text = _clean(line.split("\t", 1)[0])
    if not text:
        raise MMPParseError("empty line", line_number)
    coord_text = None
    dot = text.find(".")
    if dot >= 0:
        rest = text[dot + 1 :].replace("\\{", "{").replace("\\}", "}")
        text = text[:dot]
        if rest.endswith("."):
            rest = rest[:-1]
        if rest:
            if not (rest.startswith("{") and rest.endswith("}")):
                raise MMPParseError(f"unexpected text after '.': {rest[:20]!r}", line_number)
            coord_text = rest[1:-1]
    if not text:
        raise MMPParseError("hypergraph has no edges", line_number)

    names: dict[str, int] = {}
    edges: list[tuple[int, ...]] = []
    for token in text.split(","):
        if not token:
            if lenient:
                continue
            raise MMPParseError("empty edge", line_number)
        glyphs = _split_glyphs(token, line_number)
        if len(set(glyphs)) != len(glyphs):
            raise MMPParseError(f"repeated vertex in edge {token!r}", line_number)
        edges.append(tuple(names.setdefault(g, len(names)) for g in glyphs))
    if not edges:
        raise MMPParseError("hypergraph has no edges", line_number)
    hyper = Hypergraph.from_edges(edges, dimension)

    coord = None
    if coord_text is not None:
        assignments: dict[int, tuple[str, ...]] = {}
        for glyph, comps in _split_coord_entries(coord_text, line_number):
            if glyph not in names:
                raise MMPParseError(f"coordinatization names unknown vertex {glyph!r}", line_number)
            parts = tuple(p for p in comps.split(","))
            if len(parts) != dimension or not all(parts):
                raise MMPParseError(
                    f"vertex {glyph!r} has {len(parts)} components, expected {dimension}", line_number
                )
            assignments[names[glyph]] = parts
        coord = Coordinatization(assignments)
    return hyper, coord


def is_comment(line: str) -> bool:
    """Blank lines and ``# ...`` comments."""
    t = line.strip()
    return not t or t == "#" or t.startswith("# ")


def parse_lines(
    lines: Iterable[str], dimension: int, *, lenient: bool = False
) -> Iterator[tuple[Hypergraph, Coordinatization | None]]:
    """Parse a stream of lines, skipping blank ones and comments.

    A comment is ``#`` followed by a space or the end of the line (a bare
    ``#`` may start an edge, since it is also a vertex glyph). In lenient
    mode malformed lines are reported as warnings and skipped.
    """
    for no, line in enumerate(lines, 1):
        if is_comment(line):
            continue
        try:
            yield parse_line(line, dimension, lenient=lenient, line_number=no)
        except MMPParseError as exc:
            if not lenient:
                raise
            warnings.warn(str(exc), stacklevel=2)


def serialize(h: Hypergraph, coord: Coordinatization | None = None) -> str:
    """One MMP line; glyphs are assigned in first-appearance order."""
    body = ",".join("".join(encode_vertex(v) for v in e) for e in h.edges) + "."
    if coord:
        parts = []
        for v in sorted(coord.assignments):
            parts.append(f"{encode_vertex(v)}={{{','.join(coord.assignments[v])}}}")
        body += "{" + ",".join(parts) + "}"
    return body


@dataclass
class MMPValidityReport:
    edge_size_violations: list[int]
    intersection_violations: list[tuple[int, int]]

    def __bool__(self) -> bool:
        return not self.edge_size_violations and not self.intersection_violations

    @property
    def is_valid(self) -> bool:
        return bool(self)


def check_mmp_validity(h: Hypergraph) -> MMPValidityReport:
    """Edges with fewer than n vertices and edge pairs sharing more than n-2."""
    n = h.dimension
    small = [j for j, e in enumerate(h.edges) if len(e) < n]
    sets = h.edge_sets()
    masks = h.incidence_masks()
    bad = []
    for a in range(len(sets)):
        partners: dict[int, int] = {}
        for v in sets[a]:
            rest = masks[v] >> (a + 1)
            while rest:
                low = rest & -rest
                b_idx = a + low.bit_length()
                partners[b_idx] = partners.get(b_idx, 0) + 1
                rest ^= low
        bad.extend((a, b) for b, c in sorted(partners.items()) if c > n - 2)
    return MMPValidityReport(small, bad)


def edge_components(h: Hypergraph) -> list[list[int]]:
    """Edge indices grouped by connected component, in order of first edge."""
    parent = list(range(h.num_vertices))

    def find(x: int) -> int:
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    for e in h.edges:
        root = find(e[0])
        for v in e[1:]:
            rv = find(v)
            if rv != root:
                parent[rv] = root
    groups: dict[int, list[int]] = {}
    for j, e in enumerate(h.edges):
        groups.setdefault(find(e[0]), []).append(j)
    return list(groups.values())


def edge_pairs_sharing(h: Hypergraph, count: int) -> list[tuple[int, int]]:
    """All edge pairs whose intersection has exactly ``count`` vertices."""
    sets = h.edge_sets()
    return [(a, b) for a, b in combinations(range(len(sets)), 2) if len(sets[a] & sets[b]) == count]


def twin_order(h: Hypergraph) -> tuple[list[int], list[int]]:
    """Masks of earlier and later twins per vertex.

    Twins are vertices lying in exactly the same edges. They are
    interchangeable in every search over vertex images, so searches may
    require images to increase along the vertex order within a twin class.
    """
    inc = h.incidence_masks()
    classes: dict[int, list[int]] = {}
    for v, m in enumerate(inc):
        classes.setdefault(m, []).append(v)
    before = [0] * h.num_vertices
    after = [0] * h.num_vertices
    for members in classes.values():
        acc = 0
        for v in members:
            before[v] = acc
            acc |= 1 << v
        for v in members:
            after[v] = acc & ~((1 << (v + 1)) - 1)
    return before, after
