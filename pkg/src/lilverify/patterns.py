"""Fixed pattern graphs H whose copies are counted in G(n, p)."""
from __future__ import annotations

import itertools
from dataclasses import dataclass
from functools import cached_property

from .errors import InputError


@dataclass(frozen=True)
class Pattern:
    """A small graph on vertices ``0..ell-1`` with sorted 0-based edge pairs."""

    ell: int
    edges: tuple
    name: str = ""

    def __post_init__(self):
        edges = tuple(sorted({tuple(sorted(map(int, e))) for e in self.edges}))
        for u, v in edges:
            if u == v or not (0 <= u < self.ell and 0 <= v < self.ell):
                raise InputError(f"pattern edge {(u, v)} invalid for {self.ell} vertices")
        object.__setattr__(self, "edges", edges)

    @property
    def m(self) -> int:
        return len(self.edges)

    @cached_property
    def edge_set(self) -> frozenset:
        return frozenset(self.edges)

    @cached_property
    def automorphisms(self) -> tuple:
        es = self.edge_set
        auts = []
        for perm in itertools.permutations(range(self.ell)):
            if all(tuple(sorted((perm[u], perm[v]))) in es for u, v in self.edges):
                auts.append(perm)
        return tuple(auts)

    @classmethod
    def triangle(cls) -> "Pattern":
        return cls(3, ((0, 1), (1, 2), (0, 2)), "triangle")

    @classmethod
    def single_edge(cls) -> "Pattern":
        return cls(2, ((0, 1),), "edge")

    @classmethod
    def complete(cls, ell: int) -> "Pattern":
        return cls(ell, tuple(itertools.combinations(range(ell), 2)), f"K{ell}")

    @classmethod
    def cycle(cls, ell: int) -> "Pattern":
        return cls(ell, tuple((i, (i + 1) % ell) for i in range(ell)), f"C{ell}")

    @classmethod
    def path(cls, ell: int) -> "Pattern":
        return cls(ell, tuple((i, i + 1) for i in range(ell - 1)), f"P{ell}")

    @classmethod
    def from_instance(cls, g) -> "Pattern":
        """Pattern from a 1-based graph :class:`GraphInstance` (edge-list files)."""
        if g.kind != "graph":
            raise InputError("a pattern must be a graph")
        return cls(g.n, tuple((u - 1, v - 1) for u, v in g.edges), "custom")

    @classmethod
    def named(cls, name: str) -> "Pattern":
        name = name.strip().lower()
        if name in ("triangle", "k3"):
            return cls.triangle()
        if name in ("edge", "k2"):
            return cls.single_edge()
        if name[0] in "kcp" and name[1:].isdigit():
            return {"k": cls.complete, "c": cls.cycle, "p": cls.path}[name[0]](int(name[1:]))
        raise InputError(f"unknown pattern name {name!r}")
