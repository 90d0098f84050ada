"""Keyed pseudo-random function used to realize the infinite coupled models.

Every edge decision is a pure function of ``(seed, canonical edge)``, so a graph
on ``[n]`` is literally the restriction of the graph on ``[n']`` for ``n' > n``.
The mixer is the SplitMix64 finalizer, evaluated in wrapping uint64 arithmetic.
"""
from fractions import Fraction

import numpy as np

MASK64 = (1 << 64) - 1
GOLDEN = 0x9E3779B97F4A7C15
_M1 = 0xBF58476D1CE4E5B9
_M2 = 0x94D049BB133111EB

# domain tags keep graph, k-uniform and bipartite streams apart
TAG_COMPLETE = 0x1000
TAG_BIPARTITE = 0x2000


def mix64(x):
    """SplitMix64 output function on a uint64 array (wrapping arithmetic)."""
    x = np.asarray(x, dtype=np.uint64)
    with np.errstate(over="ignore"):
        x = x + np.uint64(GOLDEN)
        x = (x ^ (x >> np.uint64(30))) * np.uint64(_M1)
        x = (x ^ (x >> np.uint64(27))) * np.uint64(_M2)
        return x ^ (x >> np.uint64(31))


def mix64_int(x: int) -> int:
    """Scalar twin of :func:`mix64` on Python ints."""
    x = (x + GOLDEN) & MASK64
    x = ((x ^ (x >> 30)) * _M1) & MASK64
    x = ((x ^ (x >> 27)) * _M2) & MASK64
    return x ^ (x >> 31)


def derive_seed(base_seed: int, index: int) -> int:
    """Seed of replicate ``index`` under ``base_seed``."""
    return mix64_int(mix64_int(base_seed & MASK64) ^ (index & MASK64))


def threshold(p) -> int:
    """floor(p * 2**64), computed exactly from the binary value of ``p``."""
    t = Fraction(p) * (1 << 64)
    return int(t)


def edge_uniforms(seeds, tag: int, vertices):
    """Uniform 64-bit values for a batch of seeds and canonical edges.

    ``seeds`` has shape (R,), ``vertices`` shape (E, w) with the edge's vertex
    indices; the result has shape (R, E).
    """
    seeds = np.asarray(seeds, dtype=np.uint64).reshape(-1, 1)
    vertices = np.asarray(vertices, dtype=np.uint64)
    h = mix64(seeds ^ np.uint64(tag))
    h = np.broadcast_to(h, (seeds.shape[0], vertices.shape[0]))
    for c in range(vertices.shape[1]):
        h = mix64(h ^ vertices[:, c][None, :])
    return h


def edge_uniform_int(seed: int, tag: int, vertices) -> int:
    h = mix64_int((seed & MASK64) ^ tag)
    for v in vertices:
        h = mix64_int(h ^ v)
    return h
