"""Seeded generators for the binomial, nested and uniform-m random models.

Vertices are 1-based. A graph or k-uniform hyperedge is the sorted vertex
tuple; a bipartite edge is the ``(left, right)`` pair. The nested kinds are
views of one infinite random (hyper)graph: membership of an edge is decided by
a keyed hash of ``(seed, edge)`` and never depends on ``n``.
"""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field, replace
from enum import Enum
from functools import lru_cache
from pathlib import Path
from typing import Iterable, Optional

import numpy as np

from . import prf
from .errors import InputError

UNIFORM_M_STREAM = 0x554D  # spawn key separating G(n,m) draws from the edge PRF


class ModelKind(str, Enum):
    GNP_NESTED = "GnpNested"
    BNP_NESTED = "BnpNested"
    HKNP_NESTED = "HknpNested"
    GNM = "Gnm"
    BNM = "Bnm"

    @property
    def nested(self) -> bool:
        return self in (ModelKind.GNP_NESTED, ModelKind.BNP_NESTED, ModelKind.HKNP_NESTED)

    @property
    def instance_kind(self) -> str:
        if self in (ModelKind.BNP_NESTED, ModelKind.BNM):
            return "bipartite"
        if self is ModelKind.HKNP_NESTED:
            return "hypergraph"
        return "graph"


INSTANCE_KINDS = ("graph", "bipartite", "hypergraph")


@dataclass(frozen=True)
class ModelSpec:
    kind: ModelKind
    n: int
    k: int = 2
    p: Optional[float] = None
    m: Optional[int] = None
    seed: int = 0

    def __post_init__(self):
        object.__setattr__(self, "kind", ModelKind(self.kind))
        if int(self.n) != self.n or self.n < 1:
            raise InputError(f"n must be a positive integer, got {self.n!r}")
        if self.kind is ModelKind.HKNP_NESTED:
            if self.k < 2:
                raise InputError(f"k must be >= 2, got {self.k}")
        elif self.k != 2:
            raise InputError(f"{self.kind.value} is a graph model; k must be 2, got {self.k}")
        if not 0 <= self.seed < 2**64:
            raise InputError(f"seed must be a 64-bit unsigned integer, got {self.seed}")
        if self.kind.nested:
            if self.p is None or not 0.0 < self.p < 1.0:
                raise InputError(f"p must lie in (0, 1), got {self.p!r}")
        else:
            pop = population(self.kind.instance_kind, self.n, self.k)
            if self.m is None or not 0 <= self.m <= pop:
                raise InputError(f"m must lie in [0, {pop}] for {self.kind.value} with n={self.n}, got {self.m!r}")

    def to_dict(self) -> dict:
        return {"kind": self.kind.value, "n": self.n, "k": self.k, "p": self.p, "m": self.m, "seed": self.seed}

    @classmethod
    def from_dict(cls, d: dict) -> "ModelSpec":
        return cls(kind=d["kind"], n=d["n"], k=d.get("k", 2), p=d.get("p"), m=d.get("m"), seed=d.get("seed", 0))


@dataclass(frozen=True)
class GraphInstance:
    kind: str
    n: int
    k: int
    edges: frozenset
    provenance: Optional[ModelSpec] = field(default=None, compare=False)

    def __post_init__(self):
        if self.kind not in INSTANCE_KINDS:
            raise InputError(f"unknown instance kind {self.kind!r}")
        object.__setattr__(self, "edges", frozenset(tuple(int(v) for v in e) for e in self.edges))
        for e in self.edges:
            _check_canonical(self.kind, self.k, e)
            if max(e) > self.n:
                raise InputError(f"edge {e} has a vertex outside [1, {self.n}]")

    def __len__(self):
        return len(self.edges)

    def sorted_edges(self) -> list:
        return sorted(self.edges, key=lambda e: (max(e),) + tuple(reversed(e)))

    # kernel-facing views (0-based)
    def adjacency_masks(self) -> list:
        if self.kind != "graph":
            raise InputError("adjacency masks need a graph instance")
        masks = [0] * self.n
        for u, v in self.edges:
            masks[u - 1] |= 1 << (v - 1)
            masks[v - 1] |= 1 << (u - 1)
        return masks

    def adjacency_matrix(self) -> np.ndarray:
        if self.kind != "graph":
            raise InputError("adjacency matrix needs a graph instance")
        a = np.zeros((self.n, self.n), dtype=np.int64)
        for u, v in self.edges:
            a[u - 1, v - 1] = a[v - 1, u - 1] = 1
        return a

    def biadjacency(self) -> np.ndarray:
        if self.kind != "bipartite":
            raise InputError("biadjacency needs a bipartite instance")
        a = np.zeros((self.n, self.n), dtype=np.int64)
        for u, v in self.edges:
            a[u - 1, v - 1] = 1
        return a

    def edge_masks(self) -> list:
        return [sum(1 << (v - 1) for v in e) for e in self.edges]


@dataclass(frozen=True)
class EdgeCountStat:
    e: int
    mean: float
    sd: float
    normalized: float


def population(kind: str, n: int, k: int = 2) -> int:
    """Number of potential edges of the model on ``[n]``."""
    if kind == "bipartite":
        return n * n
    return math.comb(n, k)


def _check_canonical(kind: str, k: int, edge) -> None:
    if kind == "bipartite":
        if len(edge) != 2 or min(edge) < 1:
            raise InputError(f"bipartite edge must be a (left, right) pair of positive indices, got {edge!r}")
        return
    width = 2 if kind == "graph" else k
    if len(edge) != width:
        raise InputError(f"edge {edge!r} must have exactly {width} vertices")
    if edge[0] < 1 or any(a >= b for a, b in zip(edge, edge[1:])):
        raise InputError(f"edge {edge!r} is not a strictly increasing tuple of positive indices")


def _tag(kind: str, k: int) -> int:
    return prf.TAG_BIPARTITE if kind == "bipartite" else prf.TAG_COMPLETE | k


@lru_cache(maxsize=256)
def canonical_edges(kind: str, n: int, k: int = 2) -> np.ndarray:
    """All potential edges on ``[n]`` as an (E, width) int array.

    Complete kinds use colex order and bipartite pairs are sorted by
    ``(max, left, right)``, so the edges on ``[n]`` are a prefix of the edges
    on ``[n + 1]``.
    """
    if kind == "bipartite":
        pairs = [(l, r) for l in range(1, n + 1) for r in range(1, n + 1)]
        pairs.sort(key=lambda e: (max(e), e[0], e[1]))
        arr = np.array(pairs, dtype=np.int64).reshape(-1, 2)
    elif n < 2 or (k > n and kind == "hypergraph"):
        arr = np.zeros((0, 2 if kind == "graph" else k), dtype=np.int64)
    elif k == 2 or kind == "graph":
        j = np.repeat(np.arange(2, n + 1), np.arange(1, n))
        starts = np.repeat(np.cumsum(np.r_[0, np.arange(1, n - 1)]), np.arange(1, n))
        i = np.arange(j.size) - starts + 1
        arr = np.stack([i, j], axis=1).astype(np.int64).reshape(-1, 2)
    else:
        combos = sorted(itertools.combinations(range(1, n + 1), k), key=lambda e: tuple(reversed(e)))
        arr = np.array(combos, dtype=np.int64).reshape(-1, k)
    arr.setflags(write=False)
    return arr


def edge_present(spec: ModelSpec, edge) -> bool:
    """Whether ``edge`` belongs to the infinite nested graph of ``spec``."""
    if not spec.kind.nested:
        raise InputError(f"edge_present needs a nested kind, got {spec.kind.value}")
    kind = spec.kind.instance_kind
    edge = tuple(int(v) for v in edge)
    _check_canonical(kind, spec.k, edge)
    return prf.edge_uniform_int(spec.seed, _tag(kind, spec.k), edge) < prf.threshold(spec.p)


def _uniform_m_indices(total: int, m: int, seed: int) -> np.ndarray:
    rng = np.random.default_rng(np.random.SeedSequence(seed, spawn_key=(UNIFORM_M_STREAM,)))
    idx = np.arange(total)
    if m == 0:
        return idx[:0]
    targets = rng.integers(np.arange(m), total)
    for i, j in enumerate(targets):
        idx[i], idx[j] = idx[j], idx[i]
    return idx[:m]


def sample_indicators(spec: ModelSpec, seeds: Iterable[int]) -> np.ndarray:
    """Edge-indicator matrix (R, E) for one model under many seeds.

    Column order is :func:`canonical_edges`; row ``r`` equals
    ``sample(replace(spec, seed=seeds[r]))``.
    """
    seeds = np.asarray(list(seeds), dtype=np.uint64)
    kind = spec.kind.instance_kind
    edges = canonical_edges(kind, spec.n, spec.k)
    if spec.kind.nested:
        u = prf.edge_uniforms(seeds, _tag(kind, spec.k), edges)
        return u < np.uint64(prf.threshold(spec.p))
    out = np.zeros((seeds.size, edges.shape[0]), dtype=bool)
    for r, s in enumerate(seeds):
        out[r, _uniform_m_indices(edges.shape[0], spec.m, int(s))] = True
    return out


def instance_from_indicators(spec: ModelSpec, row: np.ndarray) -> GraphInstance:
    kind = spec.kind.instance_kind
    edges = canonical_edges(kind, spec.n, spec.k)[np.asarray(row, dtype=bool)]
    return GraphInstance(kind, spec.n, spec.k, frozenset(map(tuple, edges.tolist())), provenance=spec)


def sample(spec: ModelSpec) -> GraphInstance:
    """Draw the instance determined by ``spec`` (including its seed)."""
    return instance_from_indicators(spec, sample_indicators(spec, [spec.seed])[0])


def restrict(g: GraphInstance, n_new: int) -> GraphInstance:
    """Induced sub-instance on the first ``n_new`` vertices (both sides if bipartite)."""
    if n_new < 1:
        raise InputError(f"restriction size must be >= 1, got {n_new}")
    if n_new > g.n:
        raise InputError(f"cannot restrict an instance on {g.n} vertices to {n_new}")
    edges = frozenset(e for e in g.edges if max(e) <= n_new)
    prov = replace(g.provenance, n=n_new) if g.provenance is not None else None
    return GraphInstance(g.kind, n_new, g.k, edges, provenance=prov)


def edge_stat(g: GraphInstance, p: float) -> EdgeCountStat:
    """Edge count of ``g`` with its binomial mean, SD and normalization."""
    if not 0.0 < p < 1.0:
        raise InputError(f"p must lie in (0, 1), got {p!r}")
    if g.provenance is not None and not g.provenance.kind.nested:
        raise InputError("edge_stat needs an instance of a binomial model")
    pop = population(g.kind, g.n, g.k)
    mean = pop * p
    sd = math.sqrt(pop * p * (1.0 - p))
    e = len(g.edges)
    return EdgeCountStat(e=e, mean=mean, sd=sd, normalized=(e - mean) / sd if sd > 0 else 0.0)


# edge-list text format: "kind n k" header, then one edge per line
def format_edgelist(g: GraphInstance) -> str:
    lines = [f"{g.kind} {g.n} {g.k}"]
    lines += [" ".join(map(str, e)) for e in g.sorted_edges()]
    return "\n".join(lines) + "\n"


def parse_edgelist(text: str) -> GraphInstance:
    rows = [ln.split() for ln in text.splitlines() if ln.strip() and not ln.lstrip().startswith("#")]
    if not rows or len(rows[0]) != 3:
        raise InputError("edge list must start with a 'kind n k' header")
    kind, n, k = rows[0][0], int(rows[0][1]), int(rows[0][2])
    try:
        edges = [tuple(int(v) for v in r) for r in rows[1:]]
    except ValueError as exc:
        raise InputError(f"bad edge line: {exc}") from None
    if kind != "bipartite":
        edges = [tuple(sorted(e)) for e in edges]
    return GraphInstance(kind, n, k, frozenset(edges))


def write_edgelist(g: GraphInstance, path) -> None:
    Path(path).write_text(format_edgelist(g))


def read_edgelist(path) -> GraphInstance:
    return parse_edgelist(Path(path).read_text())
