"""Command-line tools: ``ksforge <tool> ...`` or the per-tool entry points.

Every tool reads MMP lines from stdin (or files) and writes MMP lines to
stdout. Results are appended after a tab as ``key=value`` annotations, which
the parser ignores, so tools can be chained with pipes.
"""

from __future__ import annotations

import argparse
import logging
import sys
from typing import Iterable, Iterator, Sequence, TextIO

from .canon import canonical_form, canonical_key
from .master import (
    ComponentSet,
    build_master,
    decompose_master,
    find_coordinatization,
    format_component,
)
from .mmp import Coordinatization, Hypergraph, MMPParseError, is_comment, parse_line, serialize
from .pipeline import ClassRecord, StripSpec, generate_class, stats, strip, thread_count
from .states01 import find_parity_subsets, has_parity_proof, is_critical, solve01
from .structure import delta_pairs, find_max_loop, subgraph_embedding

log = logging.getLogger("ksforge")

TOOLS = ("vecfind", "states01", "mmpstrip", "shortd", "subgraph", "loop", "delta", "parity", "class", "stats")


class InputError(Exception):
    pass


# ---------------------------------------------------------------------------
# input/output helpers


def _open_inputs(paths: Sequence[str]) -> Iterator[TextIO]:
    if not paths:
        yield sys.stdin
        return
    for p in paths:
        with open(p) as fh:
            yield fh


def read_mmp(
    lines: Iterable[str], dimension: int, lenient: bool, err: TextIO | None = None
) -> Iterator[tuple[str, Hypergraph, Coordinatization | None]]:
    """(raw line, hypergraph, coordinatization) per input line.

    Malformed lines raise InputError, or under ``lenient`` are reported to
    ``err`` with their line number and skipped.
    """
    err = sys.stderr if err is None else err
    for no, line in enumerate(lines, 1):
        line = line.rstrip("\n")
        if is_comment(line):
            continue
        try:
            h, coord = parse_line(line, dimension, lenient=lenient, line_number=no)
        except MMPParseError as exc:
            if not lenient:
                raise InputError(str(exc)) from None
            print(f"ksforge: skipped {exc}", file=err)
            continue
        yield line, h, coord


def _annotations(line: str) -> dict[str, str]:
    if "\t" not in line:
        return {}
    out = {}
    for tok in line.split("\t", 1)[1].split():
        key, sep, val = tok.partition("=")
        if sep:
            out[key] = val
    return out


def _body(line: str) -> str:
    return line.split("\t", 1)[0].rstrip()


def _annotate(line: str, extra: str) -> str:
    return f"{line}\t{extra}" if "\t" not in line else f"{line} {extra}"


def _records(args) -> Iterator[tuple[str, Hypergraph, Coordinatization | None]]:
    for fh in _open_inputs(getattr(args, "inputs", [])):
        yield from read_mmp(fh, args.dim, args.lenient)


def _load_one(path: str, dimension: int) -> Hypergraph:
    with open(path) as fh:
        for no, line in enumerate(fh, 1):
            if not is_comment(line):
                return parse_line(line.rstrip("\n"), dimension, line_number=no)[0]
    raise InputError(f"{path}: no hypergraph found")


def _ray_coordinatization(rays: dict) -> Coordinatization:
    return Coordinatization({v: tuple(format_component(x) for x in ray) for v, ray in rays.items()})


# ---------------------------------------------------------------------------
# tools


def cmd_vecfind(args, out: TextIO) -> int:
    comps = ComponentSet.parse(args.components, args.dim)
    if args.assign:
        with open(args.assign) as fh:
            for line, h, _ in read_mmp(fh, args.dim, args.lenient):
                res = find_coordinatization(h, comps, budget=args.budget)
                if res.status == "sat":
                    out.write(_annotate(serialize(h, _ray_coordinatization(res.assignment)), "coord=sat") + "\n")
                else:
                    out.write(_annotate(_body(line), f"coord={res.status}") + "\n")
        return 0
    master = build_master(comps, clique_budget=args.clique_budget)
    if master.hypergraph.m == 0:
        print("ksforge: no orthogonal tuples over these components", file=sys.stderr)
        return 1
    out.write(_annotate(serialize(master.hypergraph, master.coordinatization()), "master") + "\n")
    parts = decompose_master(master)
    if len(parts) > 1:
        for p in parts:
            out.write(_annotate(serialize(p.hypergraph, p.coordinatization()), "component") + "\n")
    return 0


def cmd_states01(args, out: TextIO) -> int:
    for line, h, _ in _records(args):
        ks = solve01(h).is_ks
        crit = ks and is_critical(h)
        pp = has_parity_proof(h)
        if args.filter == "ks" and not ks or args.filter == "nonks" and ks:
            continue
        if args.critical and not crit or args.parity and not pp:
            continue
        out.write(_annotate(line, f"ks={int(ks)} critical={int(crit)} pp={int(pp)}") + "\n")
    return 0


def cmd_mmpstrip(args, out: TextIO) -> int:
    if args.mode == "random" and args.seed is None:
        raise InputError("--seed is required with --mode random")
    master = _load_one(args.master, args.dim) if args.master else None
    spec = StripSpec(args.count, args.mode, args.seed, args.samples, master)
    for _, h, _ in _records(args):
        for child in strip(h, spec):
            out.write(serialize(child) + "\n")
    return 0


def cmd_shortd(args, out: TextIO) -> int:
    seen: set[str] = set()
    for line, h, _ in _records(args):
        key = canonical_key(h)
        if key in seen:
            continue
        seen.add(key)
        out.write((serialize(canonical_form(h)) if args.canonical else line) + "\n")
    return 0


def cmd_subgraph(args, out: TextIO) -> int:
    needle = _load_one(args.needle, args.dim)
    for line, h, _ in _records(args):
        try:
            emb = subgraph_embedding(needle, h, node_budget=args.budget)
            verdict = str(int(emb is not None))
        except RuntimeError:
            verdict = "?"
        if args.filter and verdict != "1":
            continue
        out.write(_annotate(line, f"subgraph={verdict}") + "\n")
    return 0


def cmd_loop(args, out: TextIO) -> int:
    for line, h, _ in _records(args):
        res = find_max_loop(h, budget=args.budget, seed=args.seed)
        note = f"loop={res.length}:{','.join(map(str, res.edges))}"
        if not res.exhaustive:
            note += " loop_exhaustive=0"
        out.write(_annotate(line, note) + "\n")
    return 0


def cmd_delta(args, out: TextIO) -> int:
    for line, h, _ in _records(args):
        pairs = delta_pairs(h)
        if args.filter == "with" and not pairs or args.filter == "without" and pairs:
            continue
        note = f"delta={len(pairs)}"
        if pairs and args.list:
            note += " delta_pairs=" + ";".join(f"{a},{b}" for a, b in pairs)
        out.write(_annotate(line, note) + "\n")
    return 0


def cmd_parity(args, out: TextIO) -> int:
    for line, h, _ in _records(args):
        pp = has_parity_proof(h)
        note = f"pp={int(pp)}"
        if args.subsets:
            subs = find_parity_subsets(h, args.subsets)
            note += f" parity_subsets={len(subs)}"
            if subs:
                note += " first=" + ",".join(map(str, subs[0]))
        elif args.filter and not pp:
            continue
        out.write(_annotate(line, note) + "\n")
    return 0


def cmd_class(args, out: TextIO) -> int:
    if args.strategy == "random" and args.seed is None:
        raise InputError("--seed is required with --strategy random")
    if args.master:
        master = _load_one(args.master, args.dim)
    else:
        got = list(_records(args))
        if len(got) != 1:
            raise InputError("class expects exactly one master hypergraph on stdin")
        master = got[0][1]

    def progress(s):
        log.info("m=%d unique=%d criticals=%d", s.m, s.ks_count, s.critical_count)

    records = generate_class(
        master,
        criticals_only=args.criticals,
        min_edges=args.min_edges,
        strategy=args.strategy,
        seed=args.seed,
        samples=args.samples,
        threads=thread_count(),
        progress=progress,
    )
    for r in records:
        out.write(f"{serialize(r.hypergraph)}\t{r.annotation()}\n")
    return 0


def cmd_stats(args, out: TextIO) -> int:
    items: list[Hypergraph | ClassRecord] = []
    for line, h, _ in _records(args):
        notes = _annotations(line)
        if not args.all and notes.get("critical", "1") != "1":
            continue
        items.append(h)
    dist = stats(items)
    out.write("k\tm\tcount\tpp_count\n" if args.header else "")
    out.write(dist.tsv())
    if args.summary:
        for m, (lo, hi) in dist.vertex_range().items():
            print(f"m={m} k_min={lo} k_max={hi}", file=sys.stderr)
    return 0


# ---------------------------------------------------------------------------
# argument parsing


def _common(p: argparse.ArgumentParser, inputs: bool = True) -> None:
    p.add_argument("--dim", type=int, default=4, help="dimension n (default 4)")
    p.add_argument("--lenient", action="store_true", help="report malformed lines and keep going")
    if inputs:
        p.add_argument("inputs", nargs="*", help="MMP files (default: stdin)")


def _add_tools(sub) -> None:
    p = sub.add_parser("vecfind", help="master hypergraph from vector components")
    _common(p, inputs=False)
    p.add_argument("--components", required=True, help='comma-separated values, e.g. "0,1,-1"')
    g = p.add_mutually_exclusive_group()
    g.add_argument("--master", action="store_true", help="emit the master and its components (default)")
    g.add_argument("--assign", metavar="FILE", help="search coordinatizations for the sets in FILE")
    p.add_argument("--budget", type=int, default=10_000_000, help="search nodes per coordinatization")
    p.add_argument("--clique-budget", type=int, default=50_000_000)
    p.set_defaults(func=cmd_vecfind)

    p = sub.add_parser("states01", help="KS, criticality and parity annotations")
    _common(p)
    p.add_argument("--filter", choices=("ks", "nonks"))
    p.add_argument("--critical", action="store_true", help="keep only critical KS sets")
    p.add_argument("--parity", action="store_true", help="keep only sets with a parity proof")
    p.set_defaults(func=cmd_states01)

    p = sub.add_parser("mmpstrip", help="remove (or add) edges")
    _common(p)
    p.add_argument("--count", type=int, default=1)
    p.add_argument("--mode", choices=("exhaustive", "random", "add"), default="exhaustive")
    p.add_argument("--seed", type=int)
    p.add_argument("--samples", type=int, default=1)
    p.add_argument("--master", metavar="FILE", help="master for --mode add")
    p.set_defaults(func=cmd_mmpstrip)

    p = sub.add_parser("shortd", help="drop isomorphic duplicates")
    _common(p)
    p.add_argument("--canonical", action="store_true", help="print canonical forms instead of the inputs")
    p.set_defaults(func=cmd_shortd)

    p = sub.add_parser("subgraph", help="is the needle a subgraph of each input")
    _common(p)
    p.add_argument("--needle", required=True, metavar="FILE")
    p.add_argument("--budget", type=int, help="search node budget")
    p.add_argument("--filter", action="store_true", help="keep only inputs containing the needle")
    p.set_defaults(func=cmd_subgraph)

    p = sub.add_parser("loop", help="longest loop")
    _common(p)
    p.add_argument("--budget", type=int, default=50_000)
    p.add_argument("--seed", type=int, default=0, help="search order (the result is deterministic per seed)")
    p.set_defaults(func=cmd_loop)

    p = sub.add_parser("delta", help="edge pairs sharing n-2 vertices")
    _common(p)
    p.add_argument("--filter", choices=("with", "without"))
    p.add_argument("--list", action="store_true", help="list the pairs")
    p.set_defaults(func=cmd_delta)

    p = sub.add_parser("parity", help="parity proofs")
    _common(p)
    p.add_argument("--subsets", type=int, default=0, metavar="N", help="search up to N parity edge subsets")
    p.add_argument("--filter", action="store_true", help="keep only parity proofs")
    p.set_defaults(func=cmd_parity)

    p = sub.add_parser("class", help="non-isomorphic KS subsets of a master")
    _common(p)
    p.add_argument("--master", metavar="FILE", help="master file (default: the single stdin line)")
    p.add_argument("--criticals", action="store_true", help="emit criticals only")
    p.add_argument("--strategy", choices=("breadth", "random"), default="breadth")
    p.add_argument("--seed", type=int)
    p.add_argument("--samples", type=int, default=1)
    p.add_argument("--min-edges", type=int)
    p.set_defaults(func=cmd_class)

    p = sub.add_parser("stats", help="(k, m) distribution as TSV")
    _common(p)
    p.add_argument("--all", action="store_true", help="count inputs annotated critical=0 too")
    p.add_argument("--header", action="store_true")
    p.add_argument("--summary", action="store_true", help="k range per m on stderr")
    p.set_defaults(func=cmd_stats)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="ksforge", description="Kochen-Specker hypergraph tools")
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="tool", required=True)
    _add_tools(sub)
    return parser


def main(argv: Sequence[str] | None = None, out: TextIO | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(name)s: %(message)s")
    out = sys.stdout if out is None else out
    try:
        return args.func(args, out)
    except (InputError, ValueError) as exc:
        print(f"ksforge {args.tool}: {exc}", file=sys.stderr)
        return 2
    except BrokenPipeError:
        return 0


def _tool(name: str):
    def entry(argv: Sequence[str] | None = None) -> int:
        return main([name, *(sys.argv[1:] if argv is None else argv)])

    entry.__name__ = f"main_{name}"
    return entry


main_vecfind = _tool("vecfind")
main_states01 = _tool("states01")
main_mmpstrip = _tool("mmpstrip")
main_shortd = _tool("shortd")
main_subgraph = _tool("subgraph")
main_loop = _tool("loop")
main_delta = _tool("delta")
main_parity = _tool("parity")
main_class = _tool("class")
main_stats = _tool("stats")


if __name__ == "__main__":
    sys.exit(main())
