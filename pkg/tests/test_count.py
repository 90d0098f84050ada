import itertools
import json
import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from lilverify import count, kernels, model, prf
from lilverify.errors import InputError, ResourceLimitError
from lilverify.model import GraphInstance, ModelKind, ModelSpec
from lilverify.patterns import Pattern


def complete_graph(n):
    return GraphInstance("graph", n, 2, frozenset(itertools.combinations(range(1, n + 1), 2)))


def cycle_graph(n):
    return GraphInstance("graph", n, 2, frozenset(tuple(sorted((i, i % n + 1))) for i in range(1, n + 1)))


def complete_hyper_masks(n, k):
    return [sum(1 << v for v in c) for c in itertools.combinations(range(n), k)]


# ------------------------------------------------------------ kernels

def test_lift_recovers_values_beyond_64_bits():
    target = math.factorial(25) * 7 + 3
    assert kernels.lift(lambda mod: target % (mod or kernels.TWO64), target) == target
    with pytest.raises(ResourceLimitError):
        kernels.lift(lambda mod: 0, 1 << 400)


def test_wrapping_permanent_and_crt():
    # 17! < 2**64 < 21!: exercises both the wrapping residue and the CRT lift
    for n in (17, 21):
        assert count.permanent(np.ones((n, n), dtype=np.int64)) == math.factorial(n)


def test_permanent_of_weighted_matrix():
    a = np.array([[2, 1, 0], [1, 3, 1], [0, 1, 4]])
    assert count.permanent(a) == count.permanent_oracle(a) == 2 * 3 * 4 + 2 * 1 * 1 + 1 * 1 * 4


# ------------------------------------------------------ worked examples

def test_triangle_examples():
    assert count.count_subgraph_copies(complete_graph(4), Pattern.triangle()).value == 24
    empty = GraphInstance("graph", 5, 2, frozenset())
    assert count.count_subgraph_copies(empty, Pattern.triangle()).value == 0
    g = model.sample(ModelSpec(ModelKind.GNP_NESTED, 8, p=0.5, seed=1))
    assert count.count_subgraph_copies(g, Pattern.triangle()).value == count.count_subgraph_copies(
        g, Pattern.triangle(), "oracle").value


def test_perfect_matching_examples():
    kb = GraphInstance("bipartite", 3, 2, frozenset(itertools.product(range(1, 4), repeat=2)))
    assert count.count_perfect_matchings(kb).value == 6
    iso = GraphInstance("bipartite", 3, 2, frozenset(e for e in kb.edges if e[0] != 2))
    assert count.count_perfect_matchings(iso).value == 0
    g = model.sample(ModelSpec(ModelKind.BNM, 7, m=25, seed=1))
    assert count.count_perfect_matchings(g).value == count.count_perfect_matchings(g, "oracle").value
    with pytest.raises(InputError):
        count.count_perfect_matchings(complete_graph(3))


def test_hamilton_examples():
    assert count.count_hamilton_cycles(complete_graph(4)).value == 3
    assert count.count_hamilton_cycles(cycle_graph(6)).value == 1
    g = model.sample(ModelSpec(ModelKind.GNP_NESTED, 8, p=0.6, seed=4))
    assert count.count_hamilton_cycles(g).value == count.count_hamilton_cycles(g, "oracle").value
    with pytest.raises(InputError):
        count.count_hamilton_cycles(complete_graph(2))
    with pytest.raises(ResourceLimitError):
        count.count_hamilton_cycles(complete_graph(23))


def test_loose_examples():
    assert count.loose_hamilton_oracle(4, 3, complete_hyper_masks(4, 3)) == 6
    assert count.loose_hamilton_oracle(6, 4, complete_hyper_masks(6, 4)) == 45
    h = GraphInstance("hypergraph", 6, 3, frozenset({(1, 2, 3), (3, 4, 5)}))
    assert count.count_loose_hyper_hamilton(h).value == 0
    with pytest.raises(InputError):
        count.count_loose_hyper_hamilton(GraphInstance("hypergraph", 7, 3, frozenset()))


def test_avoiding_examples():
    assert count.count_hamilton_avoiding(5, []).value == 12
    assert count.count_hamilton_avoiding(4, list(itertools.combinations(range(1, 5), 2))).value == 0
    with pytest.raises(ResourceLimitError):
        count.count_hamilton_avoiding(13, [])


# oriented Hamilton cycles of K_n avoiding a fixed Hamilton cycle, n = 5..12,
# frozen from the DP and cross-checked by enumeration for n <= 9 below
AVOIDING_SERIES = {5: 2, 6: 6, 7: 46, 8: 354, 9: 3106, 10: 29926, 11: 315862, 12: 3628906}


def test_avoiding_series_against_enumeration():
    for n, expected in AVOIDING_SERIES.items():
        forbidden = [(i, i % n + 1) for i in range(1, n + 1)]
        assert count.count_hamilton_avoiding(n, forbidden, oriented=True).value == expected
        if n <= 9:
            assert count.count_hamilton_avoiding(n, forbidden, True, "oracle").value == expected


def test_census_examples():
    c = count.census_union_sizes(2, 2, "perfect_matchings")
    assert c.counts == {0: 2, 1: 0, 2: 2}
    for structure, n in (("perfect_matchings", 4), ("hamilton_cycles", 5)):
        one = count.census_union_sizes(n, 1, structure)
        assert one.counts == {0: one.total}
    assert sum(count.census_union_sizes(3, 2, "perfect_matchings").counts.values()) == 36
    with pytest.raises(ResourceLimitError):
        count.census_union_sizes(6, 2, "perfect_matchings")


@pytest.mark.parametrize("structure,n,k", [("perfect_matchings", 4, 3), ("hamilton_cycles", 6, 2)])
def test_census_completeness_and_support(structure, n, k):
    c = count.census_union_sizes(n, k, structure)
    assert sum(c.counts.values()) == c.total**k
    assert max(c.counts) == (k - 1) * c.edges_per_structure


def test_census_against_pairwise_enumeration():
    # independent tally with Python sets for pairs of Hamilton cycles of K_5
    cycles = []
    for perm in itertools.permutations(range(1, 5)):
        if perm[0] < perm[-1]:
            cyc = (0,) + perm
            cycles.append({tuple(sorted((cyc[i], cyc[(i + 1) % 5]))) for i in range(5)})
    tally = {}
    for a in cycles:
        for b in cycles:
            d = 10 - len(a | b)
            tally[d] = tally.get(d, 0) + 1
    c = count.census_union_sizes(5, 2, "hamilton_cycles")
    assert {a: v for a, v in c.counts.items() if v} == tally


# --------------------------------------------------------- properties

def test_closed_forms_small_range():
    for n in range(1, 11):
        assert count.permanent(np.ones((n, n), dtype=np.int64)) == math.factorial(n)
    for n in range(3, 15):
        assert count.count_hamilton_cycles(complete_graph(n)).value == math.factorial(n - 1) // 2
    for n, k in ((4, 3), (6, 3), (8, 3), (10, 3), (6, 4), (9, 4), (8, 5), (10, 6)):
        assert count.loose_hamilton_cycles(n, k, complete_hyper_masks(n, k)) == count.loose_cycle_count_complete(n, k)


def _random_specs(kind, sizes, count_, salt, k=2):
    for i in range(count_):
        n = sizes[i % len(sizes)]
        yield ModelSpec(kind, n, k=k, p=(0.3, 0.5, 0.7, 0.9)[i % 4], seed=prf.derive_seed(salt, i))


def test_oracle_equality_200_instances_each():
    for spec in _random_specs(ModelKind.BNP_NESTED, range(1, 8), 200, 1):
        g = model.sample(spec)
        assert count.count_perfect_matchings(g).value == count.count_perfect_matchings(g, "oracle").value
    for spec in _random_specs(ModelKind.GNP_NESTED, range(3, 9), 200, 2):
        g = model.sample(spec)
        assert count.count_hamilton_cycles(g).value == count.count_hamilton_cycles(g, "oracle").value
    pats = [Pattern.triangle(), Pattern.path(3), Pattern.cycle(4), Pattern.complete(4), Pattern.path(4)]
    for i, spec in enumerate(_random_specs(ModelKind.GNP_NESTED, range(3, 8), 200, 3)):
        g = model.sample(spec)
        h = pats[i % len(pats)]
        assert count.count_subgraph_copies(g, h).value == count.count_subgraph_copies(g, h, "oracle").value
    for i, spec in enumerate(_random_specs(ModelKind.HKNP_NESTED, (4, 6), 200, 4, k=3)):
        g = model.sample(spec)
        assert count.count_loose_hyper_hamilton(g).value == count.count_loose_hyper_hamilton(g, "oracle").value


def test_general_subgraph_path_matches_triangle_fast_path():
    custom = Pattern(3, ((0, 1), (1, 2), (0, 2)), "custom")
    for seed in range(20):
        g = model.sample(ModelSpec(ModelKind.GNP_NESTED, 9, p=0.5, seed=seed))
        assert count.subgraph_copies_masks(g.adjacency_masks(), custom) == count.count_subgraph_copies(
            g, Pattern.triangle()).value


@given(seed=st.integers(0, 2**64 - 1), extra=st.integers(0, 27), n=st.integers(4, 8))
def test_monotone_under_edge_addition(seed, extra, n):
    g = model.sample(ModelSpec(ModelKind.GNP_NESTED, n, p=0.5, seed=seed))
    missing = sorted(set(itertools.combinations(range(1, n + 1), 2)) - g.edges)
    if not missing:
        return
    g2 = GraphInstance("graph", n, 2, g.edges | {missing[extra % len(missing)]})
    for f in (count.count_hamilton_cycles, lambda x: count.count_subgraph_copies(x, Pattern.cycle(4))):
        assert f(g2).value >= f(g).value
    b = model.sample(ModelSpec(ModelKind.BNP_NESTED, n, p=0.5, seed=seed))
    absent = sorted(set(itertools.product(range(1, n + 1), repeat=2)) - b.edges)
    if absent:
        b2 = GraphInstance("bipartite", n, 2, b.edges | {absent[extra % len(absent)]})
        assert count.count_perfect_matchings(b2).value >= count.count_perfect_matchings(b).value


@given(seed=st.integers(0, 2**64 - 1), n=st.integers(4, 12))
def test_restriction_count_depends_only_on_prefix(seed, n):
    g = model.sample(ModelSpec(ModelKind.GNP_NESTED, 14, p=0.6, seed=seed))
    small = model.sample(ModelSpec(ModelKind.GNP_NESTED, n, p=0.6, seed=seed))
    assert count.count_hamilton_cycles(model.restrict(g, n)).value == count.count_hamilton_cycles(small).value


def test_overlap_census_against_enumeration():
    for n, k in ((6, 3), (8, 3), (6, 4)):
        m = n // (k - 1)
        cycles = set()
        for perm in itertools.permutations(range(n)):
            cycles.add(frozenset(sum(1 << perm[(j * (k - 1) + i) % n] for i in range(k)) for j in range(m)))
        fixed = frozenset(count.fixed_loose_cycle(n, k))
        tally = {}
        for c in cycles:
            t = len(c & fixed)
            tally[t] = tally.get(t, 0) + 1
        census = count.loose_overlap_census(n, k)
        assert {t: v for t, v in census.items() if v} == tally
        assert sum(census.values()) == len(cycles) == count.loose_cycle_count_complete(n, k)


def test_count_result_json_schema():
    r = count.count_hamilton_cycles(complete_graph(21))
    d = json.loads(json.dumps(r.to_dict()))
    assert d["value"] == str(math.factorial(20) // 2)
    assert set(d) == {"structure", "n", "k", "value", "algorithm", "metadata"}
    assert "elapsed_ms" in d["metadata"]
    assert count.CountResult(5, "hamilton_cycles", "fast", 6, elapsed=1.0) == count.CountResult(
        5, "hamilton_cycles", "fast", 6, elapsed=2.0)
