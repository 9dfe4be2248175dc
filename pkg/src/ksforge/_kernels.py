"""Compiled exact-one search for hypergraphs with at most 64 vertices and 64 edges.

Same algorithm as :class:`ksforge.states01.ExactOneSolver`, on uint64
bitsets with an explicit stack.
"""

from __future__ import annotations

import numpy as np
from numba import njit, uint64

_ONE = np.uint64(1)
_ZERO = np.uint64(0)


@njit(cache=True)
def _popcount(x):
    x = x - ((x >> uint64(1)) & uint64(0x5555555555555555))
    x = (x & uint64(0x3333333333333333)) + ((x >> uint64(2)) & uint64(0x3333333333333333))
    x = (x + (x >> uint64(4))) & uint64(0x0F0F0F0F0F0F0F0F)
    return (x * uint64(0x0101010101010101)) >> uint64(56)


@njit(cache=True)
def _lowbit_index(low):
    return np.int64(_popcount(low - uint64(1)))


@njit(cache=True)
def _pick_edge(edge_vmask, uncovered, avail):
    """Edge with the fewest available vertices; count 0 means a dead end."""
    best = -1
    best_cnt = uint64(1 << 30)
    em = uncovered
    while em != uint64(0):
        low = em & (~em + uint64(1))
        j = _lowbit_index(low)
        c = _popcount(edge_vmask[j] & avail)
        if c < best_cnt:
            best = j
            best_cnt = c
            if c <= uint64(1):
                break
        em ^= low
    return best, best_cnt


@njit(cache=True)
def solve64(edge_vmask, vertex_emask, active, max_depth):
    """Return (found, ones_mask, nodes)."""
    avail0 = uint64(0)
    em = active
    while em != uint64(0):
        low = em & (~em + uint64(1))
        avail0 |= edge_vmask[_lowbit_index(low)]
        em ^= low
    if active == uint64(0):
        return True, uint64(0), 1
    unc = np.zeros(max_depth + 1, dtype=np.uint64)
    av = np.zeros(max_depth + 1, dtype=np.uint64)
    ch = np.zeros(max_depth + 1, dtype=np.uint64)
    cands = np.zeros(max_depth + 1, dtype=np.uint64)
    nodes = 1
    best, cnt = _pick_edge(edge_vmask, active, avail0)
    if cnt == uint64(0):
        return False, uint64(0), nodes
    unc[0] = active
    av[0] = avail0
    cands[0] = edge_vmask[best] & avail0
    d = 0
    while d >= 0:
        c = cands[d]
        if c == uint64(0):
            d -= 1
            continue
        low = c & (~c + uint64(1))
        cands[d] = c ^ low
        v = _lowbit_index(low)
        hit = vertex_emask[v] & unc[d]
        blocked = uint64(0)
        while hit != uint64(0):
            e = hit & (~hit + uint64(1))
            blocked |= edge_vmask[_lowbit_index(e)]
            hit ^= e
        nu = unc[d] & ~vertex_emask[v]
        na = av[d] & ~blocked
        nc = ch[d] | low
        nodes += 1
        if nu == uint64(0):
            return True, nc, nodes
        best, cnt = _pick_edge(edge_vmask, nu, na)
        if cnt == uint64(0):
            continue
        d += 1
        unc[d] = nu
        av[d] = na
        ch[d] = nc
        cands[d] = edge_vmask[best] & na
    return False, uint64(0), nodes
