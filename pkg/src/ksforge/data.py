"""Shipped fixture hypergraphs."""

from __future__ import annotations

from importlib import resources

from .mmp import Coordinatization, Hypergraph, is_comment, parse_line

__all__ = ["fixture_names", "fixture_text", "load_fixture", "load_fixture_all"]


def _dir():
    return resources.files("ksforge") / "fixtures"


def fixture_names() -> list[str]:
    return sorted(p.name[:-4] for p in _dir().iterdir() if p.name.endswith(".mmp"))


def fixture_text(name: str) -> str:
    if not name.endswith(".mmp"):
        name += ".mmp"
    return (_dir() / name).read_text()


def _dimension(text: str) -> int:
    for line in text.splitlines():
        t = line.strip()
        if t.startswith("# dimension"):
            return int(t.split()[-1])
    raise ValueError("fixture has no '# dimension' header")


def load_fixture_all(name: str) -> list[tuple[Hypergraph, Coordinatization | None]]:
    """Every hypergraph stored in the fixture file, in order."""
    text = fixture_text(name)
    dim = _dimension(text)
    out = []
    for no, line in enumerate(text.splitlines(), 1):
        if not is_comment(line):
            out.append(parse_line(line, dim, line_number=no))
    return out


def load_fixture(name: str) -> Hypergraph:
    """The first hypergraph in a fixture file."""
    return load_fixture_all(name)[0][0]
