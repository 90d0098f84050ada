import math
from dataclasses import replace

import numpy as np
import pytest
from hypothesis import given, strategies as st

from lilverify import model, prf
from lilverify.errors import InputError
from lilverify.model import GraphInstance, ModelKind, ModelSpec

NESTED = [ModelKind.GNP_NESTED, ModelKind.BNP_NESTED, ModelKind.HKNP_NESTED]


def spec_for(kind, n, seed, p=0.5):
    return ModelSpec(kind, n, k=3 if kind is ModelKind.HKNP_NESTED else 2, p=p, seed=seed)


@given(st.integers(0, 2**64 - 1))
def test_mix64_vector_matches_scalar(x):
    assert int(prf.mix64(np.array([x], dtype=np.uint64))[0]) == prf.mix64_int(x)


def test_edge_present_probability_one_edge():
    spec = ModelSpec(ModelKind.GNP_NESTED, 2, p=1 - 2**-53, seed=42)
    assert model.edge_present(spec, (1, 2))


def test_edge_present_is_deterministic():
    spec = ModelSpec(ModelKind.GNP_NESTED, 2, p=0.5, seed=42)
    assert model.edge_present(spec, (1, 2)) == model.edge_present(spec, (1, 2))


def test_edge_present_rejects_noncanonical():
    spec = ModelSpec(ModelKind.GNP_NESTED, 5, p=0.5, seed=1)
    with pytest.raises(InputError):
        model.edge_present(spec, (2, 1))
    with pytest.raises(InputError):
        model.edge_present(spec, (1, 2, 3))


def test_edge_present_law_of_large_numbers():
    edges = model.canonical_edges("graph", 1415)[:1_000_000]
    u = prf.edge_uniforms([7], prf.TAG_COMPLETE | 2, edges)[0]
    frac = float((u < np.uint64(prf.threshold(0.3))).mean())
    assert abs(frac - 0.3) <= 0.002


def test_sample_agrees_with_edge_present():
    for kind in NESTED:
        spec = spec_for(kind, 7, 11)
        g = model.sample(spec)
        all_edges = model.canonical_edges(kind.instance_kind, 7, spec.k)
        expected = {tuple(e) for e in all_edges.tolist() if model.edge_present(spec, e)}
        assert g.edges == expected


def test_gnm_forced_triangle():
    g = model.sample(ModelSpec(ModelKind.GNM, 3, m=3, seed=5))
    assert g.edges == {(1, 2), (1, 3), (2, 3)}


def test_bipartite_nesting_example():
    small = model.sample(ModelSpec(ModelKind.BNP_NESTED, 2, p=0.5, seed=9))
    big = model.sample(ModelSpec(ModelKind.BNP_NESTED, 3, p=0.5, seed=9))
    assert small.edges <= big.edges


def test_gnm_pairs_are_uniform():
    spec = ModelSpec(ModelKind.GNM, 4, m=2, seed=0)
    seeds = [prf.derive_seed(3, r) for r in range(60_000)]
    rows = model.sample_indicators(spec, seeds)
    codes = rows.astype(np.int64) @ (1 << np.arange(6))
    freq = np.bincount(codes, minlength=64)
    pairs = [c for c in range(64) if bin(c).count("1") == 2]
    assert freq.sum() == freq[pairs].sum()
    assert np.all(np.abs(freq[pairs] / 60_000 - 1 / 15) <= 0.005)


@pytest.mark.parametrize("kind", [ModelKind.GNM, ModelKind.BNM])
@given(n=st.integers(2, 9), seed=st.integers(0, 2**64 - 1), data=st.data())
def test_uniform_m_exact_count(kind, n, seed, data):
    pop = model.population(kind.instance_kind, n)
    m = data.draw(st.integers(0, pop))
    g = model.sample(ModelSpec(kind, n, m=m, seed=seed))
    assert len(g.edges) == m


@pytest.mark.parametrize("kind", NESTED)
@given(n=st.integers(3, 40), extra=st.integers(1, 24), seed=st.integers(0, 2**64 - 1))
def test_nesting_invariant(kind, n, extra, seed):
    big = model.sample(spec_for(kind, min(n + extra, 64) if kind is not ModelKind.HKNP_NESTED else min(n + extra, 20), seed))
    small_n = min(n, big.n - 1)
    assert model.restrict(big, small_n) == model.sample(spec_for(kind, small_n, seed))


def test_restrict_examples():
    g = model.sample(spec_for(ModelKind.GNP_NESTED, 10, 4))
    assert model.restrict(g, 10) == g
    assert model.restrict(g, 6) == model.sample(spec_for(ModelKind.GNP_NESTED, 6, 4))
    tri = GraphInstance("graph", 3, 2, frozenset({(1, 2), (1, 3), (2, 3)}))
    assert model.restrict(tri, 2).edges == {(1, 2)}
    with pytest.raises(InputError):
        model.restrict(tri, 4)


def test_marginals_over_many_seeds():
    seeds = [prf.derive_seed(123, r) for r in range(100_000)]
    for kind, p in ((ModelKind.GNP_NESTED, 0.3), (ModelKind.BNP_NESTED, 0.5), (ModelKind.HKNP_NESTED, 0.7)):
        rows = model.sample_indicators(spec_for(kind, 4, 0, p), seeds)
        tol = 4 * math.sqrt(p * (1 - p) / len(seeds))
        assert np.all(np.abs(rows.mean(axis=0) - p) <= tol)


def test_determinism_and_batch_consistency():
    spec = spec_for(ModelKind.GNP_NESTED, 12, 77)
    seeds = [prf.derive_seed(1, r) for r in range(5)]
    rows = model.sample_indicators(spec, seeds)
    for r, s in enumerate(seeds):
        assert model.instance_from_indicators(spec, rows[r]) == model.sample(replace(spec, seed=s))
    assert model.sample(spec) == model.sample(spec)


def test_edge_stat_examples():
    edges = frozenset(tuple(e) for e in model.canonical_edges("graph", 10)[:30].tolist())
    s = model.edge_stat(GraphInstance("graph", 10, 2, edges), 0.5)
    assert (s.e, s.mean) == (30, 22.5)
    assert s.sd == pytest.approx(math.sqrt(11.25))
    assert s.normalized == pytest.approx((30 - 22.5) / math.sqrt(11.25))
    mid = frozenset(tuple(e) for e in model.canonical_edges("hypergraph", 6, 3)[:10].tolist())
    h = model.edge_stat(GraphInstance("hypergraph", 6, 3, mid), 0.5)
    assert (h.mean, h.normalized) == (10, 0)
    assert h.sd == pytest.approx(math.sqrt(5))
    with pytest.raises(InputError):
        model.edge_stat(GraphInstance("graph", 3, 2, frozenset()), 1.0)


def test_canonical_prefix_property():
    for kind, k in (("graph", 2), ("bipartite", 2), ("hypergraph", 3)):
        a = model.canonical_edges(kind, 6, k)
        b = model.canonical_edges(kind, 7, k)
        assert np.array_equal(b[: len(a)], a)
        assert len(a) == model.population(kind, 6, k)


def test_spec_validation():
    with pytest.raises(InputError):
        ModelSpec(ModelKind.GNM, 4, m=7)
    with pytest.raises(InputError):
        ModelSpec(ModelKind.BNM, 2, m=5)
    with pytest.raises(InputError):
        ModelSpec(ModelKind.GNP_NESTED, 4, p=1.0)
    with pytest.raises(InputError):
        ModelSpec(ModelKind.GNP_NESTED, 4, k=3, p=0.5)
    spec = ModelSpec(ModelKind.HKNP_NESTED, 6, k=4, p=0.25, seed=3)
    assert ModelSpec.from_dict(spec.to_dict()) == spec


def test_instance_validation():
    with pytest.raises(InputError):
        GraphInstance("graph", 3, 2, frozenset({(1, 4)}))
    with pytest.raises(InputError):
        GraphInstance("graph", 3, 2, frozenset({(2, 1)}))


@given(seed=st.integers(0, 2**64 - 1))
def test_edgelist_round_trip(seed):
    for kind in NESTED:
        g = model.sample(spec_for(kind, 6, seed))
        back = model.parse_edgelist(model.format_edgelist(g))
        assert back == g
