import math

import numpy as np
import pytest

from lilverify import formulas, serialize, stats
from lilverify.errors import DegenerateDistributionError, InputError, ResourceLimitError
from lilverify.model import ModelKind, ModelSpec
from lilverify.patterns import Pattern


def _spec(kind=ModelKind.GNP_NESTED, n=12, statistic="subgraph", replicates=1200, **kw):
    model_kw = {"p": 0.5} if kind in (ModelKind.GNP_NESTED, ModelKind.BNP_NESTED, ModelKind.HKNP_NESTED) else {}
    model_kw.update({k: kw.pop(k) for k in ("p", "m", "k") if k in kw})
    return stats.ExperimentSpec(ModelSpec(kind, n, **model_kw), statistic, replicates, **kw)


def test_replicates_independent_of_threads_and_chunk_order():
    spec = _spec(replicates=1300, base_seed=11)
    a = stats.run_replicates(spec, threads=1)
    b = stats.run_replicates(spec, threads=4)
    c = stats.run_replicates(spec, order=[2, 0, 1])
    assert a.samples == b.samples == c.samples
    assert a.edges == b.edges == c.edges
    assert serialize.dumps(a) == serialize.dumps(b)


def test_thread_env(monkeypatch):
    monkeypatch.setenv("LILVERIFY_THREADS", "3")
    assert stats.thread_count() == 3
    monkeypatch.setenv("LILVERIFY_THREADS", "many")
    with pytest.raises(InputError):
        stats.thread_count()


def test_fingerprint_tracks_spec():
    assert _spec().fingerprint() == _spec().fingerprint()
    assert _spec().fingerprint() != _spec(base_seed=1).fingerprint()


def test_spec_validation():
    with pytest.raises(InputError):
        _spec(kind=ModelKind.BNP_NESTED, statistic="hc")
    with pytest.raises(InputError):
        _spec(replicates=0)
    with pytest.raises(InputError):
        _spec(statistic="cliques")


def test_edge_count_mean_and_normality():
    rep = stats.run_replicates(_spec(n=20, statistic="edges", replicates=2000, p=0.3, base_seed=5))
    pop = 190
    se = math.sqrt(pop * 0.3 * 0.7 / 2000)
    assert abs(rep.mean - pop * 0.3) <= 3 * se
    clt = stats.clt_experiment(_spec(n=30, statistic="edges", replicates=10_000, tolerances={"ks": 0.02}))
    assert clt.passed and clt.ks_distance <= 0.02
    assert clt.extra["corr_edges"] == pytest.approx(1.0)


def test_uniform_edge_count_is_degenerate():
    spec = _spec(kind=ModelKind.GNM, n=10, statistic="edges", replicates=50, m=20)
    assert set(stats.run_replicates(spec).samples) == {20}
    with pytest.raises(DegenerateDistributionError):
        stats.clt_experiment(spec)


def test_triangle_batch_matches_counter():
    spec = _spec(n=9, replicates=40)
    rep = stats.run_replicates(spec)
    general = stats.evaluate("subgraph", 9, 2, stats.model.sample_indicators(spec.model, rep.seeds),
                             Pattern(3, ((0, 1), (1, 2), (0, 2)), "triangle-as-general"))
    assert rep.samples == general


def test_kernel_limit_is_resource_error():
    spec = _spec(kind=ModelKind.BNP_NESTED, n=31, statistic="pm", replicates=2)
    with pytest.raises(ResourceLimitError) as e:
        stats.run_replicates(spec)
    assert e.value.limit == 30


def test_subsequence():
    assert stats.subsequence(2.0, 5, 3) == [(2, 4), (3, 8), (4, 16), (5, 32)]
    assert stats.subsequence(1.1, 3, 1) == [(1, 1)]  # floor(1.1^k) = 1 for k = 1, 2, 3


def test_trajectory_running_max_and_limits():
    spec = _spec(statistic="subgraph", replicates=20, base=1.5, kmax=9, n_min=4)
    rep = stats.lil_trajectory(spec)
    by_rep = {}
    for row in rep.series:
        by_rep.setdefault(row["replicate"], []).append(row)
    for rows in by_rep.values():
        runs = [r["running_max"] for r in rows]
        assert runs == sorted(runs)
        assert [r["n"] for r in rows] == [math.floor(1.5**k) for k in range(4, 10) if math.floor(1.5**k) >= 4][: len(rows)]
    over = _spec(kind=ModelKind.GNP_NESTED, statistic="hc", replicates=2, base=2.0, kmax=5)
    with pytest.raises(ResourceLimitError, match="k=5"):
        stats.lil_trajectory(over)
    with pytest.raises(InputError):
        stats.lil_trajectory(_spec(statistic="edges", replicates=2))


def test_trajectory_prefix_restriction_agrees_with_fresh_counts():
    spec = _spec(statistic="hc", replicates=6, base=2.0, kmax=3, n_min=4, base_seed=3)
    rep = stats.lil_trajectory(spec)
    for row in rep.series:
        g = stats.model.sample(ModelSpec(ModelKind.GNP_NESTED, row["n"], p=0.5, seed=rep.seeds[row["replicate"]]))
        assert int(row["value"]) == stats.count.count_hamilton_cycles(g).value


@pytest.mark.parametrize("seed", range(5))
def test_decomposition_identity(seed):
    r = stats.coupling_decomposition_check(seed, Pattern.triangle(), 2.0, 3)
    assert (r.n_k, r.n_k1) == (8, 16)
    assert r.holds
    single = stats.coupling_decomposition_check(seed, Pattern.single_edge(), 1.5, 4)
    assert single.holds
    assert single.eta + single.zeta == single.x_big - single.x_small


def test_moment_ratios():
    r = stats.moment_ratio_experiment(6, 18, 1, "perfect_matchings")
    assert r.extra["ratio"] == 1
    r = stats.moment_ratio_experiment(2, 2, 2, "perfect_matchings")
    assert r.extra["ratio_exact"] == "3"
    mc = stats.moment_ratio_experiment(4, 8, 2, "perfect_matchings", replicates=4000, base_seed=2)
    assert abs(mc.extra["ratio_mc"] - mc.extra["ratio"]) <= 3 * mc.extra["ratio_mc_se"]
    assert mc.passed
    with pytest.raises(InputError):
        stats.moment_ratio_experiment(3, 2, 2, "perfect_matchings")


def test_tail_experiments():
    j = stats.tail_experiment("janson", 10, replicates=2000, base_seed=4)
    assert j.checks["janson_t0.0"]["threshold"] == 1
    assert j.passed
    c = stats.tail_experiment("chebyshev_hyper", 6, replicates=2000, base_seed=4)
    assert c.passed
    assert c.extra["second_moment_exact"] <= c.extra["second_moment_bound"]
    with pytest.raises(InputError):
        stats.tail_experiment("hoeffding", 10)


def test_report_serialization():
    rep = stats.run_replicates(_spec(kind=ModelKind.BNP_NESTED, n=8, statistic="pm", replicates=10))
    header, rows = rep.csv_rows()
    text = serialize.csv_text(header, rows)
    assert text.splitlines()[0] == "replicate,seed,value,edges"
    assert len(text.splitlines()) == 11
    d = serialize.to_jsonable(rep)
    assert d["fingerprint"] == rep.fingerprint
    assert serialize.to_jsonable(2**60) == str(2**60)
    assert serialize.to_jsonable(float("inf")) == "inf"
    assert serialize.to_jsonable(np.float64(0.1)) == 0.1
