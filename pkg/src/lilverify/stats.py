"""Seeded Monte Carlo experiments over the random models.

Replicate ``r`` of an experiment always uses the instance seed
``derive_seed(base_seed, r)``; chunks of replicates may run on worker threads
but results are stored by replicate index, so every report is a deterministic
function of its :class:`ExperimentSpec`.
"""
from __future__ import annotations

import hashlib
import itertools
import json
import logging
import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace
from fractions import Fraction
from typing import Optional

import numpy as np
from scipy import stats as sps

from . import count, formulas, model, prf
from .errors import DegenerateDistributionError, InputError, ResourceLimitError, ZeroCountError
from .model import ModelKind, ModelSpec
from .patterns import Pattern

log = logging.getLogger(__name__)

STATISTICS = ("edges", "subgraph", "pm", "hc", "hyper")
CHUNK = 512
JITTER_STREAM = 0x4A49  # seed offset of the continuity-correction noise
DEFAULT_GRID = (0.5, 1.0, 1.5, 2.0, 2.5, 3.0)


def thread_count() -> int:
    env = os.environ.get("LILVERIFY_THREADS")
    if env:
        try:
            return max(1, int(env))
        except ValueError:
            raise InputError(f"LILVERIFY_THREADS must be an integer, got {env!r}") from None
    return os.cpu_count() or 1


@dataclass
class ExperimentSpec:
    model: ModelSpec
    statistic: str = "edges"
    replicates: int = 1000
    base_seed: int = 0
    pattern: Optional[Pattern] = None
    base: float = 1.3
    kmax: int = 10
    n_min: int = 8
    tolerances: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.statistic not in STATISTICS:
            raise InputError(f"statistic must be one of {STATISTICS}, got {self.statistic!r}")
        if self.replicates < 1:
            raise InputError(f"replicates must be >= 1, got {self.replicates}")
        if self.base <= 1:
            raise InputError(f"subsequence base must exceed 1, got {self.base}")
        if not 0 <= self.base_seed < 2**64:
            raise InputError(f"base seed must be a 64-bit unsigned integer, got {self.base_seed}")
        want = {"pm": "bipartite", "hc": "graph", "subgraph": "graph", "hyper": "hypergraph"}.get(self.statistic)
        if want and self.model.kind.instance_kind != want:
            raise InputError(f"statistic {self.statistic!r} needs a {want} model, got {self.model.kind.value}")
        if self.statistic == "subgraph" and self.pattern is None:
            self.pattern = Pattern.triangle()

    def to_dict(self) -> dict:
        d = {
            "model": self.model.to_dict(),
            "statistic": self.statistic,
            "replicates": self.replicates,
            "base_seed": self.base_seed,
            "base": self.base,
            "kmax": self.kmax,
            "n_min": self.n_min,
            "tolerances": dict(sorted(self.tolerances.items())),
        }
        if self.pattern is not None:
            d["pattern"] = {"name": self.pattern.name, "ell": self.pattern.ell, "edges": [list(e) for e in self.pattern.edges]}
        return d

    def fingerprint(self) -> str:
        blob = json.dumps(self.to_dict(), sort_keys=True).encode()
        return hashlib.sha256(blob).hexdigest()[:16]


@dataclass
class ExperimentReport:
    name: str
    spec: dict
    fingerprint: str
    samples: list = field(default_factory=list)
    seeds: list = field(default_factory=list)
    edges: list = field(default_factory=list)
    mean: Optional[float] = None
    variance: Optional[float] = None
    skewness: Optional[float] = None
    ks_distance: Optional[float] = None
    ks_distance_raw: Optional[float] = None
    series: list = field(default_factory=list)  # trajectory rows
    checks: dict = field(default_factory=dict)  # name -> {value, threshold, passed}
    excluded: list = field(default_factory=list)  # replicate indices dropped (zero counts)
    extra: dict = field(default_factory=dict)

    def check(self, name, value, threshold, passed) -> bool:
        self.checks[name] = {"value": value, "threshold": threshold, "passed": bool(passed)}
        return bool(passed)

    @property
    def passed(self) -> bool:
        return all(c["passed"] for c in self.checks.values())

    def to_dict(self, include_samples: bool = True) -> dict:
        d = {
            "name": self.name,
            "spec": self.spec,
            "fingerprint": self.fingerprint,
            "mean": self.mean,
            "variance": self.variance,
            "skewness": self.skewness,
            "ks_distance": self.ks_distance,
            "ks_distance_raw": self.ks_distance_raw,
            "checks": self.checks,
            "excluded": self.excluded,
            "extra": self.extra,
        }
        if include_samples:
            d["samples"] = [str(x) if isinstance(x, int) else x for x in self.samples]
            d["series"] = self.series
        return d

    def csv_rows(self) -> tuple:
        """(header, rows): per-replicate rows, or per (replicate, k) rows for trajectories."""
        if self.series:
            header = ["replicate", "k", "n", "value", "z", "ratio", "running_max"]
            return header, [[r[h] for h in header] for r in self.series]
        header = ["replicate", "seed", "value", "edges"]
        rows = [[i, self.seeds[i], self.samples[i], self.edges[i] if self.edges else ""] for i in range(len(self.samples))]
        return header, rows


def replicate_seeds(base_seed: int, replicates: int, start: int = 0) -> list:
    return [prf.derive_seed(base_seed, r) for r in range(start, start + replicates)]


# ------------------------------------------------------------ statistics

def kernel_limit(statistic: str, n: int, k: int = 2) -> Optional[int]:
    """The largest n the statistic's exact kernel accepts (None if unlimited)."""
    return {
        "pm": count.PERMANENT_LIMIT,
        "hc": count.HAMILTON_LIMIT,
        "hyper": count.LOOSE_LIMIT,
    }.get(statistic)


def _check_kernel(statistic: str, n: int, what: str = "") -> None:
    lim = kernel_limit(statistic, n)
    if lim is not None and n > lim:
        raise ResourceLimitError(f"{what}n={n} exceeds the {statistic} kernel limit n <= {lim}", lim)


def _graph_masks(edges: np.ndarray, n: int) -> list:
    masks = [0] * n
    for u, v in edges.tolist():
        masks[u - 1] |= 1 << (v - 1)
        masks[v - 1] |= 1 << (u - 1)
    return masks


def _adjacency_batch(rows: np.ndarray, n: int) -> np.ndarray:
    edges = model.canonical_edges("graph", n)
    a = np.zeros((rows.shape[0], n, n))
    i, j = edges[:, 0] - 1, edges[:, 1] - 1
    a[:, i, j] = rows
    a[:, j, i] = rows
    return a


def triangle_batch(rows: np.ndarray, n: int) -> np.ndarray:
    """Labeled triangle counts trace(A^3) for a batch of indicator rows."""
    if n < 3:
        return np.zeros(rows.shape[0], dtype=np.int64)
    a = _adjacency_batch(rows, n)
    t = np.einsum("bij,bji->b", a @ a, a)  # exact: integers far below 2**53
    return np.rint(t).astype(np.int64)


def evaluate(statistic: str, n: int, k: int, rows: np.ndarray, pattern: Optional[Pattern] = None) -> list:
    """Statistic values (Python ints) for a batch of indicator rows on [n]."""
    if statistic == "edges":
        return [int(x) for x in rows.sum(axis=1)]
    if statistic == "subgraph":
        if pattern.ell == 3 and pattern.m == 3:
            return [int(x) for x in triangle_batch(rows, n)]
        edges = model.canonical_edges("graph", n)
        return [count.subgraph_copies_masks(_graph_masks(edges[r], n), pattern) for r in rows]
    if statistic == "pm":
        edges = model.canonical_edges("bipartite", n)
        out = []
        for r in rows:
            a = np.zeros((n, n), dtype=np.int64)
            e = edges[r]
            a[e[:, 0] - 1, e[:, 1] - 1] = 1
            out.append(count.permanent(a))
        return out
    if statistic == "hc":
        edges = model.canonical_edges("graph", n)
        return [count.hamilton_cycles(_graph_masks(edges[r], n)) for r in rows]
    if statistic == "hyper":
        edges = model.canonical_edges("hypergraph", n, k)
        weights = np.left_shift(np.int64(1), edges - 1).sum(axis=1)
        return [count.loose_hamilton_cycles(n, k, weights[r].tolist()) for r in rows]
    raise InputError(f"unknown statistic {statistic!r}")


def _run_chunks(fn, total: int, threads: Optional[int] = None) -> list:
    """Apply ``fn(start, stop)`` over replicate chunks; results in index order."""
    bounds = [(s, min(s + CHUNK, total)) for s in range(0, total, CHUNK)]
    threads = threads or thread_count()
    if threads == 1 or len(bounds) == 1:
        parts = [fn(a, b) for a, b in bounds]
    else:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            parts = list(pool.map(lambda ab: fn(*ab), bounds))
    return [x for part in parts for x in part]


def run_replicates(spec: ExperimentSpec, threads: Optional[int] = None, order=None) -> ExperimentReport:
    """Evaluate the statistic on every replicate instance.

    ``order`` optionally permutes the chunk execution order (results are
    reassembled by replicate index regardless).
    """
    ms = spec.model
    _check_kernel(spec.statistic, ms.n, "replicate 0: ")
    seeds = replicate_seeds(spec.base_seed, spec.replicates)

    def work(a, b):
        rows = model.sample_indicators(ms, seeds[a:b])
        vals = evaluate(spec.statistic, ms.n, ms.k, rows, spec.pattern)
        return list(zip(vals, (int(x) for x in rows.sum(axis=1))))

    if order is not None:
        results = {}
        bounds = [(s, min(s + CHUNK, spec.replicates)) for s in range(0, spec.replicates, CHUNK)]
        for i in order:
            a, b = bounds[i]
            results[a] = work(a, b)
        pairs = [x for a in sorted(results) for x in results[a]]
    else:
        pairs = _run_chunks(work, spec.replicates, threads)
    rep = ExperimentReport("replicates", spec.to_dict(), spec.fingerprint(), seeds=seeds)
    rep.samples = [v for v, _ in pairs]
    rep.edges = [e for _, e in pairs]
    _fill_moments(rep, rep.samples)
    return rep


def _fill_moments(rep: ExperimentReport, values) -> None:
    x = np.array([float(v) for v in values])
    rep.mean = float(x.mean())
    rep.variance = float(x.var(ddof=1)) if x.size > 1 else 0.0
    rep.skewness = float(sps.skew(x)) if x.size > 2 and rep.variance > 0 else 0.0


# ------------------------------------------------------------------ CLT

def lattice_span(spec: ExperimentSpec) -> int:
    """Spacing of the integer lattice the raw statistic lives on."""
    if spec.statistic == "subgraph":
        return len(spec.pattern.automorphisms)
    return 1


def ks_normal(z: np.ndarray) -> float:
    return float(sps.kstest(z, "norm").statistic)


def jitter(values: np.ndarray, span: float, seed: int) -> np.ndarray:
    """Spread each lattice atom uniformly over its cell (continuity correction)."""
    rng = np.random.default_rng(np.random.SeedSequence(seed, spawn_key=(JITTER_STREAM,)))
    return values + span * (rng.random(values.size) - 0.5)


def exact_moments(spec: ExperimentSpec) -> Optional[tuple]:
    """(mean, sd, approximate?) of the statistic from closed forms, if available."""
    ms = spec.model
    if not ms.kind.nested:
        return None
    p = ms.p
    if spec.statistic == "edges":
        pop = model.population(ms.kind.instance_kind, ms.n, ms.k)
        return pop * p, math.sqrt(pop * p * (1 - p)), False
    if spec.statistic == "subgraph" and spec.pattern.ell <= formulas.PATTERN_MOMENT_LIMIT:
        st = formulas.pattern_moments(spec.pattern, ms.n, p)
        return float(st.mean), st.sd, False
    if spec.statistic == "hyper":
        exact = ms.n <= count.OVERLAP_CENSUS_LIMIT
        hs = formulas.hyper_stats(ms.n, ms.k, p, exact_overlap=exact)
        mu = float(hs.reports["mean"].value_exact)
        if exact:
            return mu, math.sqrt(float(hs.reports["variance_exact"].value_exact)), False
        return mu, mu * math.sqrt(hs.reports["f_upper"].value), True
    return None


def clt_experiment(spec: ExperimentSpec, threads: Optional[int] = None) -> ExperimentReport:
    """KS distance of the normalized statistic to N(0, 1).

    Closed-form moments are used where available; the log-count statistics
    (pm, hc) are normalized by their empirical moments of ``log X`` over
    replicates with ``X > 0``. ``ks_distance`` applies a seeded continuity
    correction to lattice-valued statistics; ``ks_distance_raw`` does not.
    """
    rep = run_replicates(spec, threads)
    rep.name = "clt"
    values = np.array([float(v) for v in rep.samples])
    keep = np.ones(values.size, dtype=bool)
    if spec.statistic in ("pm", "hc"):
        keep = values > 0
        rep.excluded = [int(i) for i in np.flatnonzero(~keep)]
        values = np.log(values[keep])
    if values.size < 2 or np.ptp(values) == 0:
        raise DegenerateDistributionError("statistic is constant across replicates; the CLT check is undefined")
    moments = exact_moments(spec)
    if moments is None:
        mu, sd, approx = float(values.mean()), float(values.std(ddof=1)), False
        rep.extra["moments"] = "empirical"
    else:
        mu, sd, approx = moments
        rep.extra["moments"] = "approximate" if approx else "exact"
    rep.extra["mu"], rep.extra["sigma"] = mu, sd
    z_raw = (values - mu) / sd
    rep.ks_distance_raw = ks_normal(z_raw)
    if spec.statistic in ("pm", "hc"):
        rep.ks_distance = rep.ks_distance_raw
    else:
        rep.ks_distance = ks_normal((jitter(values, lattice_span(spec), spec.base_seed) - mu) / sd)
    if spec.model.kind.nested:
        pop = model.population(spec.model.kind.instance_kind, spec.model.n, spec.model.k)
        p = spec.model.p
        e = np.array(rep.edges, dtype=float)[keep]
        e_star = (e - pop * p) / math.sqrt(pop * p * (1 - p))
        if np.ptp(e_star) > 0 and np.ptp(z_raw) > 0:
            rep.extra["corr_edges"] = float(np.corrcoef(z_raw, e_star)[0, 1])
    tol = spec.tolerances
    if "ks" in tol:
        rep.check("ks", rep.ks_distance, tol["ks"], rep.ks_distance <= tol["ks"])
    if "corr" in tol and "corr_edges" in rep.extra:
        rep.check("corr", rep.extra["corr_edges"], tol["corr"], rep.extra["corr_edges"] >= tol["corr"])
    return rep


# ------------------------------------------------------- LIL trajectories

def subsequence(base: float, kmax: int, n_min: int = 8) -> list:
    """Distinct (k, floor(base^k)) pairs with n_min <= floor(base^k), k <= kmax."""
    out, seen = [], set()
    for k in range(1, kmax + 1):
        n = math.floor(base**k)
        if n >= n_min and n not in seen:
            seen.add(n)
            out.append((k, n))
    return out


def _lil_kind(statistic: str) -> str:
    if statistic == "edges":
        raise InputError("the edge count has no trajectory statistic; use subgraph, pm, hc or hyper")
    return statistic


def lil_trajectory(spec: ExperimentSpec, threads: Optional[int] = None) -> ExperimentReport:
    """Normalized statistics along n_k = floor(a^k) on one coupled instance per replicate."""
    ms = spec.model
    if not ms.kind.nested:
        raise InputError("trajectories need a nested model kind")
    kind = _lil_kind(spec.statistic)
    points = subsequence(spec.base, spec.kmax, max(spec.n_min, 3))
    if not points:
        raise InputError(f"no subsequence point floor({spec.base}^k) >= {spec.n_min} for k <= {spec.kmax}")
    if kind == "hyper":
        points = [(k, n) for k, n in points if n % (ms.k - 1) == 0 and n >= 2 * (ms.k - 1)]
        if not points:
            raise InputError("no subsequence point satisfies the divisibility condition")
    for k, n in points:
        lim = kernel_limit(kind, n)
        if lim is not None and n > lim:
            raise ResourceLimitError(f"subsequence point k={k} has n={n} beyond the {kind} kernel limit n <= {lim}", lim)
    n_max = points[-1][1]
    top = replace(ms, n=n_max)
    seeds = replicate_seeds(spec.base_seed, spec.replicates)
    inst = top.kind.instance_kind
    sizes = {n: len(model.canonical_edges(inst, n, ms.k)) for _, n in points}
    hyper_var = "exact" if kind == "hyper" else "upper"

    def work(a, b):
        rows = model.sample_indicators(top, seeds[a:b])
        out = [[] for _ in range(b - a)]
        for k, n in points:
            vals = evaluate(kind, n, ms.k, rows[:, : sizes[n]], spec.pattern)  # prefix = restriction
            for i, x in enumerate(vals):
                try:
                    lv = formulas.lil_statistic(kind, x, n, ms.p, spec.pattern, ms.k, hyper_variance=hyper_var)
                    out[i].append((k, n, x, lv.z, lv.ratio))
                except ZeroCountError:
                    out[i].append((k, n, x, None, None))
        return out

    per_rep = _run_chunks(work, spec.replicates, threads)
    rep = ExperimentReport("lil", spec.to_dict(), spec.fingerprint(), seeds=seeds)
    finals, zero_points = [], 0
    for r, traj in enumerate(per_rep):
        running = -math.inf
        for k, n, x, z, ratio in traj:
            if z is None:
                zero_points += 1
                if r not in rep.excluded:
                    rep.excluded.append(r)
                continue
            running = max(running, ratio)
            rep.series.append({"replicate": r, "k": k, "n": n, "value": str(x), "z": z, "ratio": ratio,
                               "running_max": running})
        if running > -math.inf:
            finals.append(running)
    if zero_points:
        log.info("lil trajectory: %d zero-count points excluded", zero_points)
    rep.samples = finals
    if finals:
        _fill_moments(rep, finals)
        rep.extra["median_running_max"] = float(np.median(finals))
    rep.extra["points"] = [{"k": k, "n": n} for k, n in points]
    rep.extra["zero_count_points"] = zero_points
    lo, hi = spec.tolerances.get("band_low", 0.2), spec.tolerances.get("band_high", 3.0)
    if finals:
        med = rep.extra["median_running_max"]
        rep.check("median_running_max_band", med, [lo, hi], lo <= med <= hi)
    return rep


# ----------------------------------------------------- coupling identity

def _mixed_copies(masks, pattern: Pattern, n0: int) -> int:
    """Labeled copies using at least one vertex <= n0 and at least one > n0 (0-based split)."""
    n = len(masks)
    total = 0
    for tup in itertools.permutations(range(n), pattern.ell):
        old = sum(1 for v in tup if v < n0)
        if old == 0 or old == pattern.ell:
            continue
        if all((masks[tup[u]] >> tup[v]) & 1 for u, v in pattern.edges):
            total += 1
    return total


@dataclass
class DecompositionResult:
    seed: int
    k: int
    n_k: int
    n_k1: int
    x_small: int
    x_big: int
    eta: int
    zeta: int

    @property
    def holds(self) -> bool:
        return self.x_big == self.eta + self.x_small + self.zeta

    def to_dict(self) -> dict:
        d = dict(self.__dict__)
        d["holds"] = self.holds
        return d


def coupling_decomposition_check(seed: int, h: Pattern, a: float, k: int, p: float = 0.5) -> DecompositionResult:
    """Count copies on [a^(k+1)], on [a^k], inside the new block, and across
    both blocks on one nested instance, each independently."""
    n0, n1 = formulas.block_sizes(a, k)
    g = model.sample(ModelSpec(ModelKind.GNP_NESTED, n1, p=p, seed=seed))
    x_big = count.count_subgraph_copies(g, h).value if n1 >= 1 else 0
    x_small = count.count_subgraph_copies(model.restrict(g, n0), h).value
    masks = g.adjacency_masks()
    new = n1 - n0
    block = [(masks[v] >> n0) & ((1 << new) - 1) for v in range(n0, n1)]
    eta = count.subgraph_copies_masks(block, h) if new else 0
    zeta = _mixed_copies(masks, h, n0)
    return DecompositionResult(seed, k, n0, n1, x_small, x_big, eta, zeta)


# -------------------------------------------------------- moment ratios

def moment_ratio_experiment(n: int, m: int, k: int, structure: str, replicates: int = 0, base_seed: int = 0,
                            grid=(1.5, 2.0, 3.0, 4.0), threads: Optional[int] = None) -> ExperimentReport:
    """E[X^k] / E[X]^k for X the perfect matchings of B(n, m) or Hamilton
    cycles of G(n, m), exact from the union census when in range, plus an
    optional Monte Carlo Markov-tail check."""
    if structure not in ("perfect_matchings", "hamilton_cycles"):
        raise InputError(f"unknown structure {structure!r}")
    mean_fn = formulas.pm_mean if structure == "perfect_matchings" else formulas.hc_mean
    mean = mean_fn(n, m).value_exact
    if mean == 0:
        raise InputError("E[X] = 0: the moment ratio is undefined")
    kind = ModelKind.BNM if structure == "perfect_matchings" else ModelKind.GNM
    ms = ModelSpec(kind, n, m=m, seed=0)
    spec = ExperimentSpec(ms, "pm" if structure == "perfect_matchings" else "hc", max(replicates, 1), base_seed)
    rep = ExperimentReport("moments", {**spec.to_dict(), "k": k, "structure": structure}, spec.fingerprint())
    rep.extra["mean_exact"] = str(mean)
    n_lim, k_lim = count.CENSUS_LIMITS[structure]
    ratio = None
    if k == 1:
        ratio = Fraction(1)
    elif n <= n_lim and k <= k_lim:
        ratio = Fraction(formulas.kth_moment_exact(n, m, k, structure).extra["ratio"])
    if ratio is not None:
        rep.extra["ratio_exact"] = str(ratio)
        rep.extra["ratio"] = float(ratio)
    if replicates:
        sample = run_replicates(spec, threads)
        rep.samples, rep.seeds = sample.samples, sample.seeds
        x = np.array([float(v) for v in sample.samples])
        _fill_moments(rep, sample.samples)
        xk = x**k
        est = float(xk.mean()) / float(mean) ** k
        rep.extra["ratio_mc"] = est
        rep.extra["ratio_mc_se"] = float(xk.std(ddof=1) / math.sqrt(x.size)) / float(mean) ** k
        c = (float(ratio) if ratio is not None else est) ** (1 / k)
        rep.extra["implied_C"] = c
        for kk in grid:
            freq = float((x >= kk * float(mean)).mean())
            se = math.sqrt(max(freq * (1 - freq), 1 / x.size) / x.size)
            bound = (c / kk) ** k
            rep.check(f"markov_K{kk}", freq, bound, freq <= bound + 3 * se)
    elif ratio is not None:
        rep.extra["implied_C"] = float(ratio) ** (1 / k)
    return rep


# ----------------------------------------------------------- tail bounds

def tail_experiment(kind: str, n: int, p: float = 0.5, replicates: int = 10_000, base_seed: int = 0,
                    grid=DEFAULT_GRID, m_cut: Optional[int] = None, k: int = 3,
                    threads: Optional[int] = None) -> ExperimentReport:
    """Compare empirical tails with the Janson, Rinott or Chebyshev bounds.

    A bound counts as violated only when the empirical frequency exceeds it by
    more than three Monte Carlo standard errors.
    """
    p = float(p)
    if kind in ("janson", "rinott"):
        ms = ModelSpec(ModelKind.GNP_NESTED, n, p=p)
        spec = ExperimentSpec(ms, "subgraph", replicates, base_seed, Pattern.triangle())
    elif kind == "chebyshev_hyper":
        ms = ModelSpec(ModelKind.HKNP_NESTED, n, k=k, p=p)
        spec = ExperimentSpec(ms, "hyper", replicates, base_seed)
    else:
        raise InputError(f"tail kind must be janson, rinott or chebyshev_hyper, got {kind!r}")
    seeds = replicate_seeds(base_seed, replicates)
    rep = ExperimentReport(f"tail_{kind}", {**spec.to_dict(), "kind": kind, "grid": list(grid)}, spec.fingerprint(),
                           seeds=seeds)

    if kind == "janson":
        m_cut = n // 2 if m_cut is None else m_cut
        cut_size = len(model.canonical_edges("graph", m_cut))

        def work(a, b):
            rows = model.sample_indicators(ms, seeds[a:b])
            big = triangle_batch(rows, n)
            small = triangle_batch(rows[:, :cut_size], m_cut)
            return [int(x) // 6 for x in big - small]

        xs = np.array(_run_chunks(work, replicates, threads), dtype=float)
        rep.samples = [int(x) for x in xs]
        delta_rep = formulas.triangle_delta(n, m_cut, p)
        mu_s = float(Fraction(delta_rep.extra["mu_S"]))
        delta = delta_rep.value
        scale = math.sqrt(float(Fraction(delta_rep.extra["exact"])))
        rep.extra.update({"mu_S": mu_s, "Delta": delta, "m_cut": m_cut, "scale": scale})
        rows = []
        for c in (0.0,) + tuple(grid):
            t = min(c * scale, mu_s)
            bound = formulas.janson_lower_tail(mu_s, delta, t).value
            freq = float((xs <= mu_s - t).mean())
            se = math.sqrt(freq * (1 - freq) / xs.size)
            rows.append({"t": t, "frequency": freq, "bound": bound, "se": se})
            rep.check(f"janson_t{c}", freq, bound, freq <= bound + 3 * se)
        rep.extra["grid_results"] = rows
    elif kind == "rinott":
        work_spec = spec
        sample = run_replicates(work_spec, threads)
        xs = np.array(sample.samples, dtype=float) / 6  # unlabeled triangles
        rep.samples = [int(round(x)) for x in xs]
        st = formulas.pattern_moments(Pattern.triangle(), n, p)
        mu, sigma = float(st.mean) / 6, st.sd / 6
        dep = formulas.dependency_degree(Pattern.triangle(), n)
        c_dep = max(1.0, dep.value)
        bound = formulas.rinott_bound(1.0, c_dep, sigma, math.comb(n, 3)).value
        sup = ks_normal((xs - mu) / sigma)
        rep.ks_distance_raw = sup
        rep.extra.update({"mu": mu, "sigma": sigma, "C": c_dep, "bound": bound, "sup_distance": sup})
        rep.check("rinott_sup_distance", sup, bound, sup <= bound)
    else:
        sample = run_replicates(spec, threads)
        rep.samples, rep.edges = sample.samples, sample.edges
        exact = n <= count.OVERLAP_CENSUS_LIMIT
        hs = formulas.hyper_stats(n, k, p, exact_overlap=exact)
        mu = float(hs.reports["mean"].value_exact)
        sd = math.sqrt(float(hs.reports["variance_exact"].value_exact)) if exact else mu * math.sqrt(hs.reports["f_upper"].value)
        pop = math.comb(n, k)
        x_star = (np.array(sample.samples, dtype=float) - mu) / sd
        e_star = (np.array(sample.edges, dtype=float) - pop * p) / math.sqrt(pop * p * (1 - p))
        diff = np.abs(x_star - e_star)
        corr_lb = hs.reports["correlation_lower"].value
        second = 2 - 2 * corr_lb  # E[(X* - E*)^2] <= 2 - 2 corr
        rep.extra.update({"second_moment_bound": second, "second_moment_mc": float((diff**2).mean()),
                          "moments": "exact" if exact else "approximate"})
        if exact:
            rep.extra["second_moment_exact"] = 2 - 2 * hs.reports["correlation_exact"].value
        rows = []
        for t in grid:
            freq = float((diff >= t).mean())
            se = math.sqrt(freq * (1 - freq) / diff.size)
            bound = second / t**2
            rows.append({"t": t, "frequency": freq, "bound": bound, "se": se})
            rep.check(f"chebyshev_t{t}", freq, bound, freq <= bound + 3 * se)
        rep.extra["grid_results"] = rows
    _fill_moments(rep, rep.samples)
    return rep
