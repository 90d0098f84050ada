"""Exponential-time exact counting kernels (numba).

Each ``*_residue`` kernel returns its raw count reduced modulo ``mod``; the
value ``mod == 0`` selects wrapping int64 arithmetic, i.e. reduction modulo
2**64. :func:`lift` recombines residues by CRT into the exact integer, given
an a-priori upper bound on the count, so big counts such as 21! stay exact
without big-integer arithmetic in the hot loops.
"""
from __future__ import annotations

import numba
import numpy as np

from .errors import ResourceLimitError

# primes below 2**31, so a product of two residues fits in int64
PRIMES = (2147483647, 2147483629, 2147483587, 2147483579, 2147483563, 2147483549)
TWO64 = 1 << 64


def lift(residue_fn, bound: int) -> int:
    """Exact value in ``[0, bound]`` from its residues modulo 2**64 and primes."""
    value = int(residue_fn(0)) % TWO64
    modulus = TWO64
    for p in PRIMES:
        if modulus > bound:
            return value
        r = int(residue_fn(p))
        t = ((r - value) * pow(modulus, -1, p)) % p
        value += modulus * t
        modulus *= p
    if modulus > bound:
        return value
    raise ResourceLimitError(f"count bound {bound} exceeds the CRT modulus range")


@numba.njit(cache=True, nogil=True)
def _mul(a, b, mod):
    if mod == 0:
        return a * b
    return (a * b) % mod


@numba.njit(cache=True, nogil=True)
def _add(a, b, mod):
    if mod == 0:
        return a + b
    return (a + b) % mod


@numba.njit(cache=True, nogil=True)
def ryser_residue(mat, mod):
    """Permanent of a square nonnegative integer matrix via Ryser's formula.

    Column subsets are visited in Gray-code order so each step updates the
    row sums by a single column.
    """
    n = mat.shape[0]
    rowsum = np.zeros(n, dtype=np.int64)
    gray = 0
    size = 0
    total = np.int64(0)
    for g in range(1, 1 << n):
        j = 0
        while not (g >> j) & 1:
            j += 1
        bit = 1 << j
        if gray & bit:
            gray ^= bit
            size -= 1
            for i in range(n):
                rowsum[i] -= mat[i, j]
        else:
            gray |= bit
            size += 1
            for i in range(n):
                rowsum[i] += mat[i, j]
        prod = np.int64(1)
        for i in range(n):
            if rowsum[i] == 0:
                prod = 0
                break
            prod = _mul(prod, rowsum[i], mod)
        if prod == 0:
            continue
        if (n - size) & 1:
            if mod == 0:
                total -= prod
            else:
                total = (total + mod - prod) % mod
        else:
            total = _add(total, prod, mod)
    return total


@numba.njit(cache=True, nogil=True)
def hamilton_residue(adj, mod):
    """Directed Hamilton cycles through vertex 0 (twice the undirected count).

    ``adj[v]`` is the neighbour bitmask of vertex ``v``. State: (set of
    visited vertices among 1..n-1, current endpoint).
    """
    n = adj.shape[0]
    size = 1 << (n - 1)
    full = size - 1
    dp = np.zeros((size, n - 1), dtype=np.int64)
    for v in range(1, n):
        if (adj[0] >> v) & 1:
            dp[1 << (v - 1), v - 1] = 1
    for mask in range(1, size):
        for v in range(n - 1):
            c = dp[mask, v]
            if c == 0:
                continue
            nb = (adj[v + 1] >> 1) & full & ~mask
            while nb:
                low = nb & -nb
                w = 0
                while not (low >> w) & 1:
                    w += 1
                dp[mask | low, w] = _add(dp[mask | low, w], c, mod)
                nb ^= low
    total = np.int64(0)
    for v in range(n - 1):
        if adj[v + 1] & 1:
            total = _add(total, dp[full, v], mod)
    return total


@numba.njit(cache=True, nogil=True)
def _popcount(x):
    c = 0
    while x:
        x &= x - 1
        c += 1
    return c


@numba.njit(cache=True, nogil=True)
def loose_hamilton_residue(n, k, is_edge, inc_ptr, inc_edges, mod):
    """Loose Hamilton cycles of a k-uniform hypergraph, each counted twice.

    A cycle is walked from its smallest overlap vertex ``u0``; a step from
    overlap vertex ``u`` consumes an edge ``{u} | I | {w}`` with ``k - 2``
    unvisited interior vertices ``I`` (unordered) and a new overlap vertex
    ``w > u0``. Both walking directions are counted.

    ``is_edge`` is a lookup table indexed by vertex bitmask; the edges through
    vertex ``u`` are ``inc_edges[inc_ptr[u]:inc_ptr[u + 1]]``.
    """
    size = 1 << n
    full = size - 1
    dp = np.zeros((size, n), dtype=np.int64)
    total = np.int64(0)
    for u0 in range(n):
        dp[:, :] = 0
        dp[1 << u0, u0] = 1
        for mask in range(1 << u0, size):
            if not (mask >> u0) & 1:
                continue
            rest_all = full & ~mask
            closing = _popcount(rest_all) == k - 2
            for u in range(n):
                c = dp[mask, u]
                if c == 0:
                    continue
                if closing:
                    last = rest_all | (1 << u) | (1 << u0)
                    if is_edge[last]:
                        total = _add(total, c, mod)
                    continue
                for idx in range(inc_ptr[u], inc_ptr[u + 1]):
                    e = inc_edges[idx]
                    rest = e & ~(1 << u)
                    if rest & mask:
                        continue
                    new_mask = mask | rest
                    r = rest
                    while r:
                        low = r & -r
                        w = 0
                        while not (low >> w) & 1:
                            w += 1
                        if w > u0:
                            dp[new_mask, w] = _add(dp[new_mask, w], c, mod)
                        r ^= low
    return total


def incidence_arrays(n: int, edge_masks):
    """Lookup table and per-vertex incidence lists for :func:`loose_hamilton_residue`."""
    is_edge = np.zeros(1 << n, dtype=np.uint8)
    by_vertex = [[] for _ in range(n)]
    for e in edge_masks:
        is_edge[e] = 1
        for v in range(n):
            if (e >> v) & 1:
                by_vertex[v].append(e)
    ptr = np.zeros(n + 1, dtype=np.int64)
    for v in range(n):
        ptr[v + 1] = ptr[v] + len(by_vertex[v])
    flat = np.array([e for lst in by_vertex for e in lst], dtype=np.int64)
    return is_edge, ptr, flat
