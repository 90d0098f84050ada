"""Acceptance suites: one function per criterion, each returning an :class:`Outcome`.

Tolerances and sizes are pinned here; every Monte Carlo criterion uses the
same base seed, :data:`SEED`.
"""
from __future__ import annotations

import itertools
import math
import os
import time
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from . import count, formulas, model, prf, stats
from .model import ModelKind, ModelSpec
from .patterns import Pattern

SEED = 0
FULL = os.environ.get("LILVERIFY_FULL", "") not in ("", "0")
PM_SWEEP_MAX = 30 if FULL else 24  # complete-bipartite sweep; n > 24 costs minutes per permanent


@dataclass
class Outcome:
    cid: str
    title: str
    passed: bool
    detail: str
    gating: bool = True
    elapsed: float = 0.0

    def line(self) -> str:
        tag = "PASS" if self.passed else "FAIL"
        note = "" if self.gating else " (diagnostic, non-gating)"
        return f"{tag} [{self.cid}] {self.title}: {self.detail} [{self.elapsed:.1f}s]{note}"

    def to_dict(self) -> dict:
        return {"id": self.cid, "title": self.title, "passed": self.passed, "detail": self.detail,
                "gating": self.gating, "elapsed_s": round(self.elapsed, 3)}


# ------------------------------------------------------------ oracles

def crit_1a() -> Outcome:
    t0 = time.perf_counter()
    first_bad = None
    probs = (0.2, 0.35, 0.5, 0.65, 0.8)
    for i in range(1000):
        n = 1 + i % 7
        spec = ModelSpec(ModelKind.BNP_NESTED, n, p=probs[i % 5], seed=prf.derive_seed(SEED, i))
        g = model.sample(spec)
        a = count.count_perfect_matchings(g).value
        b = count.count_perfect_matchings(g, "oracle").value
        if a != b and first_bad is None:
            first_bad = (spec.to_dict(), a, b)
    el = time.perf_counter() - t0
    ok = first_bad is None and el < 10
    detail = "0 mismatches" if first_bad is None else f"first mismatch {first_bad}"
    return Outcome("1a", "Ryser permanent = permutation sum, 1000 instances n<=7", ok, f"{detail}; time limit 10s", elapsed=el)


def crit_1b() -> Outcome:
    t0 = time.perf_counter()
    first_bad = None
    probs = (0.4, 0.6, 0.8)
    for i in range(500):
        n = 3 + i % 7
        spec = ModelSpec(ModelKind.GNP_NESTED, n, p=probs[i % 3], seed=prf.derive_seed(SEED + 1, i))
        g = model.sample(spec)
        a = count.count_hamilton_cycles(g).value
        b = count.count_hamilton_cycles(g, "oracle").value
        if a != b and first_bad is None:
            first_bad = (spec.to_dict(), a, b)
    el = time.perf_counter() - t0
    ok = first_bad is None and el < 60
    detail = "0 mismatches" if first_bad is None else f"first mismatch {first_bad}"
    return Outcome("1b", "Hamilton DP = cyclic-order enumeration, 500 instances n<=9", ok, f"{detail}; time limit 60s", elapsed=el)


def crit_1c() -> Outcome:
    t0 = time.perf_counter()
    first_bad, total = None, 0
    cases = [(3, 4), (3, 6), (3, 8), (4, 6)]
    probs = (0.5, 0.7, 0.9)
    for i in range(100):
        k, n = cases[i % 4]
        spec = ModelSpec(ModelKind.HKNP_NESTED, n, k=k, p=probs[i % 3], seed=prf.derive_seed(SEED + 2, i))
        g = model.sample(spec)
        a = count.count_loose_hyper_hamilton(g).value
        b = count.count_loose_hyper_hamilton(g, "oracle").value
        total += a
        if a != b and first_bad is None:
            first_bad = (spec.to_dict(), a, b)
    el = time.perf_counter() - t0
    ok = first_bad is None and el < 60
    detail = "0 mismatches" if first_bad is None else f"first mismatch {first_bad}"
    return Outcome("1c", "loose hyper DP = symmetry-quotient enumeration, 100 instances k in {3,4}, n<=8", ok,
                   f"{detail} (total cycles {total}); time limit 60s", elapsed=el)


def _complete_hypergraph_masks(n, k):
    return [sum(1 << v for v in c) for c in itertools.combinations(range(n), k)]


def crit_2() -> Outcome:
    t0 = time.perf_counter()
    bad = []
    for n in range(1, PM_SWEEP_MAX + 1):
        if count.permanent(np.ones((n, n), dtype=np.int64)) != math.factorial(n):
            bad.append(("pm", n))
    for n in range(3, count.HAMILTON_LIMIT + 1):
        full = (1 << n) - 1
        if count.hamilton_cycles([full & ~(1 << v) for v in range(n)]) != math.factorial(n - 1) // 2:
            bad.append(("hc", n))
    loose_cases = 0
    for n in range(4, count.LOOSE_LIMIT + 1):
        for k in range(3, n + 1):
            if n % (k - 1) or n // (k - 1) < 2:
                continue
            loose_cases += 1
            if count.loose_hamilton_cycles(n, k, _complete_hypergraph_masks(n, k)) != count.loose_cycle_count_complete(n, k):
                bad.append(("hyper", n, k))
    n6 = count.loose_hamilton_oracle(4, 3, _complete_hypergraph_masks(4, 3))
    n45 = count.loose_hamilton_oracle(6, 4, _complete_hypergraph_masks(6, 4))
    ok = not bad and n6 == 6 and n45 == 45
    detail = (f"pm n=1..{PM_SWEEP_MAX}, hc n=3..{count.HAMILTON_LIMIT}, {loose_cases} loose (n,k) cases; "
              f"enumeration N(3,4)={n6}, N(4,6)={n45}; mismatches {bad or 'none'}")
    return Outcome("2", "complete-graph closed forms", ok, detail, elapsed=time.perf_counter() - t0)


# ----------------------------------------------------------- identities

def _enumerated_mean(pop_edges, n, m, counter):
    total, graphs = 0, 0
    for es in itertools.combinations(pop_edges, m):
        total += counter(es)
        graphs += 1
    return Fraction(total, graphs)


def crit_3a() -> Outcome:
    t0 = time.perf_counter()

    def pm_count(es):
        a = np.zeros((2, 2), dtype=np.int64)
        for l, r in es:
            a[l - 1, r - 1] = 1
        return count.permanent_oracle(a)

    def hc_count(es):
        masks = [0] * 4
        for u, v in es:
            masks[u - 1] |= 1 << (v - 1)
            masks[v - 1] |= 1 << (u - 1)
        return count.hamilton_oracle(masks)

    pm_enum = _enumerated_mean([tuple(e) for e in model.canonical_edges("bipartite", 2).tolist()], 2, 2, pm_count)
    hc_enum = _enumerated_mean([tuple(e) for e in model.canonical_edges("graph", 4).tolist()], 4, 4, hc_count)
    pm_f = formulas.pm_mean(2, 2).value_exact
    hc_f = formulas.hc_mean(4, 4).value_exact
    ok = pm_f == pm_enum == Fraction(1, 3) and hc_f == hc_enum == Fraction(1, 5)
    return Outcome("3a", "exact means vs full enumeration", ok,
                   f"pm_mean(2,2)={pm_f} enum={pm_enum}; hc_mean(4,4)={hc_f} enum={hc_enum}",
                   elapsed=time.perf_counter() - t0)


def crit_3b() -> Outcome:
    t0 = time.perf_counter()
    parts, ok = [], True
    for structure, kind, n, m, stat in (("pm", ModelKind.BNM, 6, 18, "pm"), ("hc", ModelKind.GNM, 8, 14, "hc")):
        spec = stats.ExperimentSpec(ModelSpec(kind, n, m=m), stat, 100_000, SEED)
        rep = stats.run_replicates(spec)
        exact = float((formulas.pm_mean if stat == "pm" else formulas.hc_mean)(n, m).value_exact)
        se = math.sqrt(rep.variance / spec.replicates)
        dev = abs(rep.mean - exact) / se
        ok &= dev <= 3
        parts.append(f"{structure} n={n} m={m}: MC {rep.mean:.5f} vs exact {exact:.5f} ({dev:.2f} SE)")
    el = time.perf_counter() - t0
    ok &= el < 120
    return Outcome("3b", "uniform-m Monte Carlo means within 3 SE (1e5 samples)", ok,
                   "; ".join(parts) + "; time limit 120s", elapsed=el)


def crit_4() -> Outcome:
    t0 = time.perf_counter()
    ns = (8, 10, 12, 14, 16)
    ok, parts = True, []
    for name, fn, structure in (("pm", formulas.pm_mean, "perfect_matchings"), ("hc", formulas.hc_mean, "hamilton_cycles")):
        errs = []
        for n in ns:
            m = formulas.half_density_m(n, structure)
            errs.append(abs(fn(n, m).value_log - fn(n, m, "approx").value_log))
        scaled = [n * e for n, e in zip(ns, errs)]
        bounded = max(scaled) <= 4
        decreasing = all(b <= 1.1 * a for a, b in zip(errs, errs[1:]))
        ok &= bounded and decreasing
        parts.append(f"{name} n*err={[round(x, 4) for x in scaled]} (max<=4: {bounded}, decreasing: {decreasing})")
    el = time.perf_counter() - t0
    ok &= el < 60
    return Outcome("4", "mean approximations have O(1/n) error at p_m=1/2", ok, "; ".join(parts), elapsed=el)


def crit_5a() -> Outcome:
    t0 = time.perf_counter()
    bad, checked = [], 0
    cases = [("perfect_matchings", n, k) for n in range(1, 6) for k in (1, 2, 3)]
    cases += [("hamilton_cycles", n, k) for n in range(3, 7) for k in (1, 2)]
    for structure, n, k in cases:
        c = count.census_union_sizes(n, k, structure)
        if sum(c.counts.values()) != c.total**k:
            bad.append((structure, n, k, "completeness"))
        for a, val in c.counts.items():
            checked += 1
            b = formulas.moment_census_bounds(n, k, a, structure).value_exact
            if val > b:
                bad.append((structure, n, k, a, val, str(b)))
    return Outcome("5a", "census completeness and weak M(a) bounds", not bad,
                   f"{len(cases)} censuses, {checked} M(a) values; violations {bad or 'none'}",
                   elapsed=time.perf_counter() - t0)


def crit_5b() -> Outcome:
    t0 = time.perf_counter()
    r = formulas.kth_moment_exact(2, 2, 2, "perfect_matchings")
    ok = r.value_exact == Fraction(1, 3) and r.extra["ratio"] == "3"
    return Outcome("5b", "second moment of matchings at (n=2, m=2)", ok,
                   f"E[X^2]={r.value_exact}, ratio={r.extra['ratio']}", elapsed=time.perf_counter() - t0)


def crit_5c() -> Outcome:
    t0 = time.perf_counter()
    r = formulas.stirling_gain(1000, 3, 5, 3, 2)
    rel = abs(r.value / math.exp(-2) - 1)
    return Outcome("5c", "Stirling gain at (n=1000, t=3) vs e^-2", rel <= 0.05,
                   f"value={r.value:.6f}, e^-2={math.exp(-2):.6f}, relative error {rel:.4f} (tol 0.05)",
                   elapsed=time.perf_counter() - t0)


def crit_5d() -> Outcome:
    t0 = time.perf_counter()
    n = 8
    forbidden = [(i, i % n + 1) for i in range(1, n + 1)]
    oriented = count.count_hamilton_avoiding(n, forbidden, oriented=True).value
    ratio = oriented / math.factorial(n - 1)
    rel = abs(ratio / math.exp(-2) - 1)
    return Outcome("5d", "oriented cycles avoiding one Hamilton cycle at n=8 vs (n-1)! e^-2", rel <= 0.2,
                   f"count={oriented}, count/7!={ratio:.5f}, e^-2={math.exp(-2):.5f}, relative error {rel:.3f} (tol 0.20)",
                   elapsed=time.perf_counter() - t0)


def crit_8a() -> Outcome:
    t0 = time.perf_counter()
    bad, checked = [], 0
    for i in range(500):
        seed = prf.derive_seed(SEED + 8, i)
        for k in range(1, 6):
            res = stats.coupling_decomposition_check(seed, Pattern.triangle(), 1.5, k)
            checked += 1
            if not res.holds:
                bad.append(res.to_dict())
    return Outcome("8a", "coupling decomposition X_big = eta + X_small + zeta (triangles, a=1.5, k<=5)", not bad,
                   f"{checked} checks over 500 seeds, {len(bad)} violations", elapsed=time.perf_counter() - t0)


# --------------------------------------------------------------- bounds

def crit_6a() -> Outcome:
    t0 = time.perf_counter()
    rep = stats.tail_experiment("janson", 20, 0.5, 10_000, SEED, m_cut=10)
    viol = [k for k, c in rep.checks.items() if not c["passed"]]
    worst = max(c["value"] - c["threshold"] for c in rep.checks.values())
    return Outcome("6a", "Janson lower tail on triangles (n=20, p=1/2, 1e4 replicates)", not viol,
                   f"{len(rep.checks)} grid points, violations beyond 3 SE: {viol or 'none'}; "
                   f"max(freq - bound)={worst:.4f}", elapsed=time.perf_counter() - t0)


def crit_6b() -> Outcome:
    t0 = time.perf_counter()
    rep = stats.tail_experiment("rinott", 15, 0.5, 100_000, SEED)
    e = rep.extra
    return Outcome("6b", "Rinott sup-CDF distance on triangles (n=15, 1e5 replicates)", rep.passed,
                   f"sup distance {e['sup_distance']:.4f} <= bound {e['bound']:.1f} (C={e['C']:.0f}, sigma={e['sigma']:.3f})",
                   elapsed=time.perf_counter() - t0)


def crit_6c() -> Outcome:
    t0 = time.perf_counter()
    bad = []
    for i in range(50):
        m = 7 + (i * 7) % 43  # m in [7, 49]
        g = model.sample(ModelSpec(ModelKind.BNM, 7, m=m, seed=prf.derive_seed(SEED + 6, i)))
        exact = count.count_perfect_matchings(g).value
        degrees = g.biadjacency().sum(axis=1).tolist()
        bound = formulas.bregman_bound(degrees)
        if exact > 0 and bound.value_log < math.log(exact) - 1e-12:
            bad.append((i, exact, bound.value))
        if exact > 0 and bound.value_exact == 0:
            bad.append((i, exact, 0))
    return Outcome("6c", "Bregman bound >= exact permanent, 50 instances B(7, m)", not bad,
                   f"violations {bad or 'none'}", elapsed=time.perf_counter() - t0)


# -------------------------------------------------------- distributions

def _corr_se(r, n):
    return (1 - r * r) / math.sqrt(n)


def crit_7() -> Outcome:
    t0 = time.perf_counter()
    corr, ks8 = {}, None
    for n in (6, 8, 10):
        spec = stats.ExperimentSpec(ModelSpec(ModelKind.HKNP_NESTED, n, k=3, p=0.5), "hyper", 2000, SEED)
        rep = stats.clt_experiment(spec)
        corr[n] = rep.extra["corr_edges"]
        if n == 8:
            ks8 = rep.ks_distance
    ks_ok = ks8 <= 0.08
    corr_ok = corr[8] >= 1 - 10 / 8
    mono = all(corr[a] <= corr[b] + 2 * math.hypot(_corr_se(corr[a], 2000), _corr_se(corr[b], 2000))
               for a, b in ((6, 8), (8, 10)))
    el = time.perf_counter() - t0
    ok = ks_ok and corr_ok and mono and el < 900
    detail = (f"KS(n=8)={ks8:.4f} (tol 0.08); corr(n=8)={corr[8]:.4f} (>= {1 - 10 / 8}); "
              f"corr n=6,8,10: {corr[6]:.4f}, {corr[8]:.4f}, {corr[10]:.4f} monotone within 2 SE: {mono}")
    return Outcome("7", "loose-cycle CLT for k=3 (2e3 replicates)", ok, detail, elapsed=el)


def crit_7_info() -> Outcome:
    t0 = time.perf_counter()
    spec = stats.ExperimentSpec(ModelSpec(ModelKind.HKNP_NESTED, 8, k=3, p=0.5), "hyper", 50_000, SEED + 7)
    rep = stats.clt_experiment(spec)
    return Outcome("7-info", "large-sample KS at n=8 (5e4 replicates)", rep.ks_distance <= 0.08,
                   f"KS={rep.ks_distance:.4f}, raw KS={rep.ks_distance_raw:.4f}, skewness={rep.skewness:.3f}",
                   gating=False, elapsed=time.perf_counter() - t0)


def crit_8b() -> Outcome:
    t0 = time.perf_counter()
    n, p = 10, 0.5
    pop = n * n
    within, zero, total = 0, 0, 100
    worst = 0.0
    for i in range(total):
        g = model.sample(ModelSpec(ModelKind.BNP_NESTED, n, p=p, seed=prf.derive_seed(SEED + 9, i)))
        x = count.count_perfect_matchings(g).value
        if x == 0:
            zero += 1
            continue
        z = formulas.lil_statistic("pm", x, n, p).z
        e_star = model.edge_stat(g, p).normalized
        worst = max(worst, abs(z - e_star))
        within += abs(z - e_star) <= 5
    frac = within / (total - zero)
    return Outcome("8b", "|Z_n - E_n*| <= 5 for matchings at n=10 in >= 99% of seeds", frac >= 0.99,
                   f"{within}/{total - zero} within (fraction {frac:.3f}); {zero} zero-count seeds excluded; "
                   f"max |Z - E*| = {worst:.3f}", elapsed=time.perf_counter() - t0)


def crit_8c() -> Outcome:
    t0 = time.perf_counter()
    parts, ok = [], True
    runs = (
        ("pm", ModelSpec(ModelKind.BNP_NESTED, 22, p=0.5), 100, 11),
        ("subgraph", ModelSpec(ModelKind.GNP_NESTED, 60, p=0.5), 200, 15),
    )
    for stat, ms, reps, kmax in runs:
        spec = stats.ExperimentSpec(ms, stat, reps, SEED, base=1.3, kmax=kmax)
        rep = stats.lil_trajectory(spec)
        med = rep.extra["median_running_max"]
        ok &= 0.2 <= med <= 3.0
        ns = [pt["n"] for pt in rep.extra["points"]]
        parts.append(f"{stat}: median running max {med:.3f} over n={ns} ({rep.extra['zero_count_points']} zero points)")
    return Outcome("8c", "trajectory running max in [0.2, 3.0]", ok, "; ".join(parts), gating=False,
                   elapsed=time.perf_counter() - t0)


SUITES = {
    "oracles": [crit_1a, crit_1b, crit_1c, crit_2],
    "identities": [crit_3a, crit_5a, crit_5b, crit_5c, crit_5d, crit_8a],
    "bounds": [crit_4, crit_6a, crit_6b, crit_6c],
    "distributions": [crit_3b, crit_7, crit_7_info, crit_8b, crit_8c],
}
CRITERIA = {fn.__name__.removeprefix("crit_"): fn for fns in SUITES.values() for fn in fns}


def run_suite(name: str, echo=print) -> list:
    names = list(SUITES) if name == "all" else [name]
    outcomes = []
    for s in names:
        for fn in SUITES[s]:
            out = fn()
            outcomes.append(out)
            if echo:
                echo(out.line())
    return outcomes
