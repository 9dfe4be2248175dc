"""Walk through the master built from the components {-1, 0, 1} in four dimensions.

Builds the master, splits it into connected pieces, asks which pieces are
KS sets, extracts the critical sets and measures their loops.
"""

from __future__ import annotations

from ksforge import build_master, decompose_master, find_max_loop, generate_class, is_ks, serialize
from ksforge.master import ComponentSet

master = build_master(ComponentSet.parse("-1,0,1", 4))
print(f"master {master.name}")
for part in decompose_master(master):
    verdict = "KS" if is_ks(part.hypergraph) else "has a 0-1 assignment"
    print(f"  component {part.name}: {verdict}")

# criticals of a disconnected set always sit inside one KS component
big = decompose_master(master)[0].hypergraph
print(f"\ncriticals of {big.name}:")
for rec in generate_class(big, criticals_only=True):
    loop = find_max_loop(rec.hypergraph)
    pp = "parity proof" if rec.has_parity_proof else "no parity proof"
    print(f"  {rec.name:6} {pp:16} loop {loop.length}  {serialize(rec.hypergraph)}")
