"""First levels of the downward census of the Penrose 40-40 set, then the loops of its smallest criticals.

The full census down to 23 edges takes hours; set LEVELS to go deeper.
"""

from __future__ import annotations

import os
import time
from collections import Counter

from ksforge import find_max_loop, generate_class, load_fixture
from ksforge.data import load_fixture_all

LEVELS = int(os.environ.get("LEVELS", "7"))
master = load_fixture("penrose_40_40")
t = time.perf_counter()


def show(s):
    print(f"{s.m:3} edges: {s.ks_count:7} sets, {s.critical_count} critical  ({time.perf_counter() - t:.1f}s)")


for _ in generate_class(master, min_edges=master.m - LEVELS + 1, progress=show):
    pass

crit = [h for h, _ in load_fixture_all("penrose_40_23_criticals")]
loops = Counter(find_max_loop(h).length for h in crit)
print(f"\n{len(crit)} stored 23-edge criticals, maximal loop lengths: {dict(loops)}")
