"""Nested masters from golden-ratio components.

Starting from {0, +-(sqrt5-1)/2, +-1, +-(sqrt5+1)/2, 2}, drop one value at a
time and watch the master shrink. Every smaller master sits inside the
larger one ray for ray.
"""

from __future__ import annotations

from collections import Counter

from ksforge import build_master, decompose_master
from ksforge.master import ComponentSet, ray_embedding

values = ["0", "(sqrt5-1)/2", "-(sqrt5-1)/2", "1", "-1", "(sqrt5+1)/2", "-(sqrt5+1)/2", "2"]
prev = None
for drop in [None, "2", "(sqrt5+1)/2", "-(sqrt5+1)/2", "-(sqrt5-1)/2"]:
    if drop:
        values.remove(drop)
    m = build_master(ComponentSet.parse(values, 4))
    parts = Counter(p.name for p in decompose_master(m))
    inside = "" if prev is None else f"  inside previous: {ray_embedding(m, prev) is not None}"
    print(f"{m.name:10} = " + " + ".join(f"{c}x{n}" if c > 1 else n for n, c in parts.items()) + inside)
    prev = m
