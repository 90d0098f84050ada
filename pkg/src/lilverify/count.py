"""Exact counts of copies, perfect matchings and Hamilton cycles.

Every structure has a fast kernel and an independent brute-force oracle for
small instances. Copies of a pattern are *labeled*: injective vertex maps
``V(H) -> [n]`` preserving edges, so the unlabeled count is the labeled one
divided by ``|Aut(H)|``.
"""
from __future__ import annotations

import itertools
import math
import time
from collections import Counter
from dataclasses import dataclass, field
from functools import lru_cache

import numba
import numpy as np

from . import kernels
from .errors import InputError, ResourceLimitError
from .model import GraphInstance
from .patterns import Pattern

STRUCTURES = ("subgraph_copies", "perfect_matchings", "hamilton_cycles", "loose_hyper_hamilton", "hamilton_avoiding")

PATTERN_LIMIT = 8
PERMANENT_LIMIT = 30
PERMANENT_ORACLE_LIMIT = 8
HAMILTON_LIMIT = 22
HAMILTON_ORACLE_LIMIT = 9
LOOSE_LIMIT = 14
LOOSE_ORACLE_LIMIT = 8
AVOIDING_LIMIT = 12
CENSUS_LIMITS = {"perfect_matchings": (5, 3), "hamilton_cycles": (6, 2)}
OVERLAP_CENSUS_LIMIT = 14


@dataclass(frozen=True)
class CountResult:
    value: int
    structure: str
    algorithm: str
    n: int
    k: int = 2
    elapsed: float = field(default=0.0, compare=False)

    def to_dict(self) -> dict:
        # elapsed time is the only nondeterministic field, so it lives in metadata
        return {
            "structure": self.structure,
            "n": self.n,
            "k": self.k,
            "value": str(self.value),
            "algorithm": self.algorithm,
            "metadata": {"elapsed_ms": round(self.elapsed * 1e3, 3)},
        }


@dataclass(frozen=True)
class UnionCensus:
    structure: str
    n: int
    k: int
    edges_per_structure: int
    total: int  # structure count N in the complete (bipartite) graph
    counts: dict  # overlap a -> M(a)

    def to_dict(self) -> dict:
        return {
            "structure": self.structure,
            "n": self.n,
            "k": self.k,
            "edges_per_structure": self.edges_per_structure,
            "total": str(self.total),
            "counts": {str(a): str(c) for a, c in sorted(self.counts.items())},
        }


def _check_algorithm(algorithm):
    if algorithm not in ("fast", "oracle"):
        raise InputError(f"algorithm must be 'fast' or 'oracle', got {algorithm!r}")


# ---------------------------------------------------------------- subgraphs

def triangle_copies(adj: np.ndarray) -> int:
    """Labeled triangles = trace(A^3) (each triangle contributes 3! closed walks)."""
    a = np.asarray(adj, dtype=np.int64)
    return int(np.einsum("ij,jk,ki->", a, a, a))


def _search_order(pattern: Pattern) -> list:
    nbrs = {v: set() for v in range(pattern.ell)}
    for u, v in pattern.edges:
        nbrs[u].add(v)
        nbrs[v].add(u)
    order, placed = [], set()
    while len(order) < pattern.ell:
        best = max(
            (v for v in range(pattern.ell) if v not in placed),
            key=lambda v: (len(nbrs[v] & placed), len(nbrs[v]), -v),
        )
        order.append(best)
        placed.add(best)
    back = [[order.index(w) for w in nbrs[v] if order.index(w) < i] for i, v in enumerate(order)]
    return back


def subgraph_copies_masks(masks, pattern: Pattern) -> int:
    """Backtracking count of labeled copies of ``pattern`` (0-based neighbour masks)."""
    n = len(masks)
    back = _search_order(pattern)
    ell = pattern.ell
    everything = (1 << n) - 1
    image = [0] * ell

    def extend(depth, used):
        cand = everything & ~used
        for j in back[depth]:
            cand &= masks[image[j]]
        if depth == ell - 1:
            return cand.bit_count()
        total = 0
        while cand:
            low = cand & -cand
            image[depth] = low.bit_length() - 1
            total += extend(depth + 1, used | low)
            cand ^= low
        return total

    return extend(0, 0) if ell <= n else 0


def subgraph_copies_oracle(masks, pattern: Pattern) -> int:
    n = len(masks)
    total = 0
    for tup in itertools.permutations(range(n), pattern.ell):
        if all((masks[tup[u]] >> tup[v]) & 1 for u, v in pattern.edges):
            total += 1
    return total


def count_subgraph_copies(g: GraphInstance, h: Pattern, algorithm: str = "fast") -> CountResult:
    """Number of labeled copies of ``h`` in the graph ``g``."""
    _check_algorithm(algorithm)
    if g.kind != "graph":
        raise InputError("subgraph copies are counted in graphs")
    if h.ell == 0 or h.m == 0:
        raise InputError("pattern must have at least one edge")
    if h.ell > PATTERN_LIMIT:
        raise ResourceLimitError(f"pattern has {h.ell} vertices; limit is {PATTERN_LIMIT}", PATTERN_LIMIT)
    t0 = time.perf_counter()
    if algorithm == "oracle":
        value = subgraph_copies_oracle(g.adjacency_masks(), h)
    elif h.name == "triangle" or (h.ell == 3 and h.m == 3):
        value = triangle_copies(g.adjacency_matrix())
    else:
        value = subgraph_copies_masks(g.adjacency_masks(), h)
    return CountResult(value, "subgraph_copies", algorithm, g.n, 2, time.perf_counter() - t0)


# --------------------------------------------------------- perfect matchings

def permanent(mat) -> int:
    """Exact permanent of a square 0/1 (or small nonnegative integer) matrix."""
    a = np.ascontiguousarray(mat, dtype=np.int64)
    n = a.shape[0]
    if n == 0:
        return 1
    rows = a.sum(axis=1)
    if (rows == 0).any() or (a.sum(axis=0) == 0).any():
        return 0
    bound = min(math.factorial(n) * int(a.max()) ** n, math.prod(int(r) for r in rows))
    return kernels.lift(lambda mod: kernels.ryser_residue(a, mod), bound)


def permanent_oracle(mat) -> int:
    a = np.asarray(mat).tolist()
    n = len(a)
    total = 0
    for perm in itertools.permutations(range(n)):
        prod = 1
        for i in range(n):
            prod *= a[i][perm[i]]
            if not prod:
                break
        total += prod
    return total


def count_perfect_matchings(g: GraphInstance, algorithm: str = "fast") -> CountResult:
    """Perfect matchings of a bipartite instance, i.e. the permanent of its biadjacency."""
    _check_algorithm(algorithm)
    if g.kind != "bipartite":
        raise InputError("perfect matchings are counted in bipartite instances")
    limit = PERMANENT_LIMIT if algorithm == "fast" else PERMANENT_ORACLE_LIMIT
    if g.n > limit:
        raise ResourceLimitError(f"n={g.n} exceeds the {algorithm} permanent limit n <= {limit}", limit)
    t0 = time.perf_counter()
    a = g.biadjacency()
    value = permanent(a) if algorithm == "fast" else permanent_oracle(a)
    return CountResult(value, "perfect_matchings", algorithm, g.n, 2, time.perf_counter() - t0)


# ---------------------------------------------------------- Hamilton cycles

def hamilton_cycles(masks) -> int:
    """Undirected Hamilton cycles of a graph given by 0-based neighbour masks."""
    n = len(masks)
    if n < 3:
        raise InputError("Hamilton cycles need n >= 3")
    adj = np.array(masks, dtype=np.int64)
    if any(int(x).bit_count() < 2 for x in masks):
        return 0
    directed = kernels.lift(lambda mod: kernels.hamilton_residue(adj, mod), math.factorial(n - 1))
    return directed // 2


def hamilton_oracle(masks) -> int:
    """Enumerate cyclic orders 0, v1, ..., v_{n-1} with v1 < v_{n-1}."""
    n = len(masks)
    total = 0
    for perm in itertools.permutations(range(1, n)):
        if perm[0] > perm[-1]:
            continue
        if not (masks[0] >> perm[0]) & 1 or not (masks[0] >> perm[-1]) & 1:
            continue
        if all((masks[perm[i]] >> perm[i + 1]) & 1 for i in range(n - 2)):
            total += 1
    return total


def count_hamilton_cycles(g: GraphInstance, algorithm: str = "fast") -> CountResult:
    _check_algorithm(algorithm)
    if g.kind != "graph":
        raise InputError("Hamilton cycles are counted in graphs")
    if g.n < 3:
        raise InputError("Hamilton cycles need n >= 3")
    limit = HAMILTON_LIMIT if algorithm == "fast" else HAMILTON_ORACLE_LIMIT
    if g.n > limit:
        raise ResourceLimitError(f"n={g.n} exceeds the {algorithm} Hamilton-cycle limit n <= {limit}", limit)
    t0 = time.perf_counter()
    masks = g.adjacency_masks()
    value = hamilton_cycles(masks) if algorithm == "fast" else hamilton_oracle(masks)
    return CountResult(value, "hamilton_cycles", algorithm, g.n, 2, time.perf_counter() - t0)


def count_hamilton_avoiding(n: int, forbidden, oriented: bool = False, algorithm: str = "fast") -> CountResult:
    """Hamilton cycles of K_n using no edge of ``forbidden`` (1-based pairs).

    With ``oriented`` each cycle is counted once per direction.
    """
    _check_algorithm(algorithm)
    if n < 3:
        raise InputError("Hamilton cycles need n >= 3")
    if n > AVOIDING_LIMIT:
        raise ResourceLimitError(f"n={n} exceeds the avoiding-count limit n <= {AVOIDING_LIMIT}", AVOIDING_LIMIT)
    full = (1 << n) - 1
    masks = [full & ~(1 << v) for v in range(n)]
    for e in forbidden:
        u, v = sorted(int(x) for x in e)
        if u < 1 or v > n or u == v:
            raise InputError(f"forbidden edge {e!r} is not an edge of K_{n}")
        masks[u - 1] &= ~(1 << (v - 1))
        masks[v - 1] &= ~(1 << (u - 1))
    t0 = time.perf_counter()
    value = hamilton_cycles(masks) if algorithm == "fast" else hamilton_oracle(masks)
    if oriented:
        value *= 2
    return CountResult(value, "hamilton_avoiding", algorithm, n, 2, time.perf_counter() - t0)


# ------------------------------------------------- loose hyper Hamilton cycles

def loose_cycle_count_complete(n: int, k: int) -> int:
    """n! / (2 m ((k-2)!)^m) with m = n / (k-1)."""
    m = n // (k - 1)
    return math.factorial(n) // (2 * m * math.factorial(k - 2) ** m)


def _check_loose(n: int, k: int) -> int:
    if k < 3:
        raise InputError(f"loose Hamilton cycles need k >= 3, got k={k}")
    if n % (k - 1):
        raise InputError(f"divisibility condition fails: (k-1)={k - 1} does not divide n={n}")
    m = n // (k - 1)
    if m < 2:
        raise InputError(f"a loose Hamilton cycle needs at least two edges (n >= {2 * (k - 1)})")
    return m


def loose_hamilton_cycles(n: int, k: int, edge_masks) -> int:
    """Loose Hamilton cycles of a k-uniform hypergraph on vertices 0..n-1."""
    m = _check_loose(n, k)
    if len(edge_masks) < m:
        return 0
    is_edge, ptr, flat = kernels.incidence_arrays(n, edge_masks)
    doubled = kernels.lift(
        lambda mod: kernels.loose_hamilton_residue(n, k, is_edge, ptr, flat, mod),
        2 * loose_cycle_count_complete(n, k),
    )
    return doubled // 2


def loose_hamilton_oracle(n: int, k: int, edge_masks) -> int:
    """Count vertex orderings whose consecutive k-windows are edges, then quotient."""
    m = _check_loose(n, k)
    edges = set(edge_masks)
    step = k - 1
    hits = 0
    for perm in itertools.permutations(range(n)):
        ok = True
        for j in range(m):
            e = 0
            for i in range(j * step, j * step + k):
                e |= 1 << perm[i % n]
            if e not in edges:
                ok = False
                break
        hits += ok
    sym = 2 * m * math.factorial(k - 2) ** m
    assert hits % sym == 0
    return hits // sym


def count_loose_hyper_hamilton(g: GraphInstance, algorithm: str = "fast") -> CountResult:
    _check_algorithm(algorithm)
    if g.kind != "hypergraph":
        raise InputError("loose Hamilton cycles are counted in hypergraphs")
    _check_loose(g.n, g.k)
    limit = LOOSE_LIMIT if algorithm == "fast" else LOOSE_ORACLE_LIMIT
    if g.n > limit:
        raise ResourceLimitError(f"n={g.n} exceeds the {algorithm} loose-cycle limit n <= {limit}", limit)
    t0 = time.perf_counter()
    masks = g.edge_masks()
    if algorithm == "fast":
        value = loose_hamilton_cycles(g.n, g.k, masks)
    else:
        value = loose_hamilton_oracle(g.n, g.k, masks)
    return CountResult(value, "loose_hyper_hamilton", algorithm, g.n, g.k, time.perf_counter() - t0)


@numba.njit(cache=True)
def _loose_overlap_kernel(n, k, m, is_edge, is_marked, inc_ptr, inc_edges):
    # same walk as kernels.loose_hamilton_residue, with a tally of marked edges used
    size = 1 << n
    full = size - 1
    dp = np.zeros((size, n, m + 1), dtype=np.int64)
    out = np.zeros(m + 1, dtype=np.int64)
    for u0 in range(n):
        dp[:, :, :] = 0
        dp[1 << u0, u0, 0] = 1
        for mask in range(1 << u0, size):
            if not (mask >> u0) & 1:
                continue
            rest_all = full & ~mask
            c_rest = 0
            x = rest_all
            while x:
                x &= x - 1
                c_rest += 1
            for u in range(n):
                for a in range(m + 1):
                    c = dp[mask, u, a]
                    if c == 0:
                        continue
                    if c_rest == k - 2:
                        last = rest_all | (1 << u) | (1 << u0)
                        if is_edge[last]:
                            out[a + is_marked[last]] += c
                        continue
                    for idx in range(inc_ptr[u], inc_ptr[u + 1]):
                        e = inc_edges[idx]
                        rest = e & ~(1 << u)
                        if rest & mask:
                            continue
                        b = a + is_marked[e]
                        r = rest
                        while r:
                            low = r & -r
                            w = 0
                            while not (low >> w) & 1:
                                w += 1
                            if w > u0:
                                dp[mask | rest, w, b] += c
                            r ^= low
    return out


@lru_cache(maxsize=32)
def loose_overlap_census(n: int, k: int) -> dict:
    """Number of loose Hamilton cycles of the complete k-graph sharing exactly
    ``a`` edges with a fixed one, for every ``a`` (keys 0..m)."""
    m = _check_loose(n, k)
    if n > OVERLAP_CENSUS_LIMIT:
        raise ResourceLimitError(f"n={n} exceeds the overlap-census limit n <= {OVERLAP_CENSUS_LIMIT}", OVERLAP_CENSUS_LIMIT)
    all_edges = [sum(1 << v for v in c) for c in itertools.combinations(range(n), k)]
    is_edge, ptr, flat = kernels.incidence_arrays(n, all_edges)
    fixed = fixed_loose_cycle(n, k)
    is_marked = np.zeros(1 << n, dtype=np.int64)
    for e in fixed:
        is_marked[e] = 1
    doubled = _loose_overlap_kernel(n, k, m, is_edge, is_marked, ptr, flat)
    return {a: int(c) // 2 for a, c in enumerate(doubled)}


def fixed_loose_cycle(n: int, k: int) -> list:
    """Edge masks of the loose cycle on the natural order 0, 1, ..., n-1."""
    m = _check_loose(n, k)
    step = k - 1
    return [sum(1 << ((j * step + i) % n) for i in range(k)) for j in range(m)]


# ------------------------------------------------------------ union census

def _structure_masks(structure: str, n: int) -> list:
    masks = []
    if structure == "perfect_matchings":
        for perm in itertools.permutations(range(n)):
            masks.append(sum(1 << (i * n + perm[i]) for i in range(n)))
    else:
        def bit(u, v):
            u, v = min(u, v), max(u, v)
            return 1 << (u * n + v)

        for perm in itertools.permutations(range(1, n)):
            if perm[0] > perm[-1]:
                continue
            cyc = (0,) + perm
            masks.append(sum(bit(cyc[i], cyc[(i + 1) % n]) for i in range(n)))
    return masks


def census_union_sizes(n: int, k: int, structure: str) -> UnionCensus:
    """M(a): ordered k-tuples of structures of the complete graph whose union
    has exactly ``k * n - a`` edges."""
    if structure not in CENSUS_LIMITS:
        raise InputError(f"census structure must be one of {sorted(CENSUS_LIMITS)}, got {structure!r}")
    if k < 1 or n < (1 if structure == "perfect_matchings" else 3):
        raise InputError(f"invalid census size n={n}, k={k}")
    n_lim, k_lim = CENSUS_LIMITS[structure]
    if n > n_lim or k > k_lim:
        raise ResourceLimitError(
            f"census of {structure} is limited to n <= {n_lim}, k <= {k_lim}; got n={n}, k={k}", (n_lim, k_lim)
        )
    masks = _structure_masks(structure, n)
    arr = np.array(masks, dtype=np.uint64)
    per = n  # both structures have n edges
    tally = Counter()
    if k == 1:
        tally[0] = len(masks)
    else:
        for head in itertools.product(masks, repeat=k - 1):
            u = 0
            for x in head:
                u |= x
            sizes = np.bitwise_count(arr | np.uint64(u))
            for size, c in zip(*np.unique(sizes, return_counts=True)):
                tally[k * per - int(size)] += int(c)
    counts = {a: tally.get(a, 0) for a in range((k - 1) * per + 1)}
    return UnionCensus(structure, n, k, per, len(masks), counts)
