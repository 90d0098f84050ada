"""Closed-form expectations, variances, approximations and bounds.

Quantities are returned as :class:`BoundReport` objects carrying the natural
log of the value and, where feasible, the exact rational value. Probabilities
given as floats are converted to exact binary fractions before any exact
computation.
"""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from typing import Optional

from .errors import InputError, ResourceLimitError
from .patterns import Pattern

EXACT_FACTORIAL_LIMIT = 170
PATTERN_MOMENT_LIMIT = 5
DEGREE_EXACT_LIMIT = 9


def _log_fraction(x: Fraction) -> float:
    if x < 0:
        raise ValueError("log of a negative quantity")
    if x == 0:
        return -math.inf
    return math.log(x.numerator) - math.log(x.denominator)


@dataclass
class BoundReport:
    name: str
    inputs: dict
    value_log: float
    value_exact: Optional[Fraction] = None
    is_upper_bound: bool = False
    is_lower_bound: bool = False
    is_exact: bool = False
    flags: list = field(default_factory=list)
    extra: dict = field(default_factory=dict)

    @classmethod
    def exact(cls, name, inputs, value, **kw) -> "BoundReport":
        value = Fraction(value)
        return cls(name, inputs, _log_fraction(value), value, is_exact=kw.pop("is_exact", True), **kw)

    @property
    def value(self) -> float:
        if self.value_exact is not None:
            return float(self.value_exact)
        return math.exp(self.value_log)

    def to_dict(self) -> dict:
        d = {
            "name": self.name,
            "inputs": self.inputs,
            "value_log": self.value_log,
            "value_exact": None if self.value_exact is None else _fraction_str(self.value_exact),
            "is_upper_bound": self.is_upper_bound,
            "is_lower_bound": self.is_lower_bound,
            "is_exact": self.is_exact,
            "flags": list(self.flags),
        }
        if self.extra:
            d["extra"] = self.extra
        return d


def _fraction_str(x: Fraction) -> str:
    return str(x.numerator) if x.denominator == 1 else f"{x.numerator}/{x.denominator}"


def _prob(p, allow_one=False) -> Fraction:
    q = Fraction(p)
    if not (0 < q < 1 or (allow_one and q == 1)):
        raise InputError(f"p must lie in (0, 1), got {p!r}")
    return q


def falling(t: int, ell: int) -> int:
    """(t)_ell as an exact integer; 0 when ell > t >= 0."""
    if ell < 0:
        raise InputError(f"falling factorial length must be >= 0, got {ell}")
    if ell > t:
        return 0
    return math.perm(t, ell)


# ----------------------------------------------------------- factorials

def falling_factorial(t: int, ell: int, mode: str = "exact") -> BoundReport:
    """(t)_ell exactly, or its approximation ell*log t - ell(ell-1)/(2t)."""
    if t < 0 or ell < 0:
        raise InputError(f"need t, ell >= 0, got t={t}, ell={ell}")
    inputs = {"t": t, "ell": ell, "mode": mode}
    if mode == "exact":
        return BoundReport.exact("falling_factorial", inputs, falling(t, ell))
    if mode != "approx":
        raise InputError(f"mode must be 'exact' or 'approx', got {mode!r}")
    if t == 0:
        return BoundReport("falling_factorial", inputs, 0.0 if ell == 0 else -math.inf)
    flags = [] if ell <= t ** (2 / 3) else ["outside_regime"]
    return BoundReport("falling_factorial", inputs, ell * math.log(t) - ell * (ell - 1) / (2 * t), flags=flags)


# ----------------------------------------------------------- mean counts

def _check_uniform_m(n, m, pop):
    if n < 1:
        raise InputError(f"n must be >= 1, got {n}")
    if not 0 <= m <= pop:
        raise InputError(f"m must lie in [0, {pop}], got {m}")


def _mean_report(name, n, m, pop, structures, mode, approx_fn):
    _check_uniform_m(n, m, pop)
    inputs = {"n": n, "m": m, "mode": mode, "p_m": m / pop}
    if mode == "exact":
        if n > EXACT_FACTORIAL_LIMIT:
            raise ResourceLimitError(f"exact mode supports n <= {EXACT_FACTORIAL_LIMIT}", EXACT_FACTORIAL_LIMIT)
        return BoundReport.exact(name, inputs, Fraction(structures() * falling(m, n), falling(pop, n)))
    if mode != "approx":
        raise InputError(f"mode must be 'exact' or 'approx', got {mode!r}")
    if m == 0:
        return BoundReport(name, inputs, -math.inf, flags=["approximate"])
    return BoundReport(name, inputs, approx_fn(m / pop), flags=["approximate"])


def pm_mean(n: int, m: int, mode: str = "exact") -> BoundReport:
    """Expected perfect matchings of the uniform bipartite graph with m edges."""
    def approx(pm):
        return math.lgamma(n + 1) + n * math.log(pm) - (1 - pm) / (2 * pm)

    return _mean_report("pm_mean", n, m, n * n, lambda: math.factorial(n), mode, approx)


def hamilton_total(n: int) -> int:
    """(n-1)!/2, the Hamilton cycles of K_n (n >= 3)."""
    return math.factorial(n - 1) // 2


def hc_mean(n: int, m: int, mode: str = "exact") -> BoundReport:
    """Expected Hamilton cycles of the uniform graph G(n, m)."""
    if n < 3:
        raise InputError("Hamilton cycles need n >= 3")

    def approx(pm):
        return math.lgamma(n) - math.log(2) + n * math.log(pm) - (1 - pm) / pm

    return _mean_report("hc_mean", n, m, math.comb(n, 2), lambda: hamilton_total(n), mode, approx)


def half_density_m(n: int, structure: str) -> int:
    """Edge count giving p_m = 1/2 (rounded down when the population is odd)."""
    pop = n * n if structure == "perfect_matchings" else math.comb(n, 2)
    return pop // 2


# ------------------------------------------------------- pattern moments

@dataclass
class PatternStats:
    pattern: Pattern
    ell: int
    m_h: int
    n: int
    p: Fraction
    mean: Fraction
    variance: Fraction
    leading_variance: float  # C n^{2l-2} p^{2m-1}(1-p)
    leading_constant: int
    block: Optional[dict] = None

    @property
    def sd(self) -> float:
        return math.sqrt(self.variance)

    def to_dict(self) -> dict:
        d = {
            "pattern": self.pattern.name,
            "ell": self.ell,
            "m_h": self.m_h,
            "n": self.n,
            "p": float(self.p),
            "mean": _fraction_str(self.mean),
            "variance": _fraction_str(self.variance),
            "mean_float": float(self.mean),
            "variance_float": float(self.variance),
            "leading_variance": self.leading_variance,
            "leading_constant": self.leading_constant,
        }
        if self.block is not None:
            d["block"] = {
                k: (_fraction_str(v) if isinstance(v, Fraction) else v) for k, v in self.block.items()
            }
        return d


@lru_cache(maxsize=64)
def overlap_census(pattern: Pattern) -> tuple:
    """All partial injections between two copies of ``pattern``.

    Returns tuples ``(r, s, pairs)``: ``pairs`` is the partial map as
    ((i, j), ...) identifying vertex i of the first copy with vertex j of the
    second, ``r`` its size and ``s`` the number of shared edges.
    """
    ell = pattern.ell
    es = pattern.edge_set
    out = []
    for r in range(ell + 1):
        for dom in itertools.combinations(range(ell), r):
            for img in itertools.permutations(range(ell), r):
                sigma = dict(zip(dom, img))
                s = sum(
                    1
                    for u, v in pattern.edges
                    if u in sigma and v in sigma and tuple(sorted((sigma[u], sigma[v]))) in es
                )
                out.append((r, s, tuple(zip(dom, img))))
    return tuple(out)


def _census_summary(pattern: Pattern) -> dict:
    """(r, s) -> number of partial injections with that overlap."""
    summary = {}
    for r, s, _ in overlap_census(pattern):
        summary[(r, s)] = summary.get((r, s), 0) + 1
    return summary


def leading_constant(pattern: Pattern) -> int:
    """Number of ways two labeled copies can share exactly one edge and two vertices."""
    return _census_summary(pattern).get((2, 1), 0)


def _pattern_variance(pattern: Pattern, n: int, p: Fraction) -> Fraction:
    m = pattern.m
    total = Fraction(0)
    for (r, s), count in _census_summary(pattern).items():
        if s == 0:
            continue
        total += count * falling(n, 2 * pattern.ell - r) * (p ** (2 * m - s) - p ** (2 * m))
    return total


def _block_variance(pattern: Pattern, n0: int, n1: int, p: Fraction, leading_only=False):
    """Variance of the crossing-copy count: copies meeting both [n0] and (n0, n1]."""
    ell, m = pattern.ell, pattern.m
    new = n1 - n0
    total = Fraction(0) if not leading_only else 0.0
    for r, s, pairs in overlap_census(pattern):
        if s == 0 or (leading_only and (r, s) != (2, 1)):
            continue
        # union vertices: first copy 0..ell-1, then unmatched second-copy vertices
        second_to_union = {}
        matched = {j: i for i, j in pairs}
        nxt = ell
        for j in range(ell):
            if j in matched:
                second_to_union[j] = matched[j]
            else:
                second_to_union[j] = nxt
                nxt += 1
        u = nxt
        second = [second_to_union[j] for j in range(ell)]
        weight = p ** (2 * m - s) - p ** (2 * m) if not leading_only else float(p) ** (2 * m - 1) * (1 - float(p))
        for colors in range(1, (1 << u) - 1):
            a_old = colors & ((1 << ell) - 1)
            if a_old == 0 or a_old == (1 << ell) - 1:
                continue
            b_old = sum(1 << second[j] for j in range(ell) if (colors >> second[j]) & 1)
            b_bits = sum(1 << second[j] for j in range(ell))
            if b_old == 0 or b_old == b_bits:
                continue
            j_old = colors.bit_count()
            if leading_only:
                total += weight * n0 ** j_old * new ** (u - j_old)
            else:
                total += weight * falling(n0, j_old) * falling(new, u - j_old)
    return total


def pattern_moments(h: Pattern, n: int, p, a: Optional[float] = None, k: Optional[int] = None) -> PatternStats:
    """Exact mean and variance of the labeled copy count of ``h`` in G(n, p).

    With block parameters ``(a, k)`` also returns the mean and variance of the
    copies inside ``(floor(a^k), floor(a^(k+1))]`` (eta) and of the copies
    meeting both blocks (zeta).
    """
    if h.ell > PATTERN_MOMENT_LIMIT:
        raise ResourceLimitError(f"pattern moments support ell <= {PATTERN_MOMENT_LIMIT}", PATTERN_MOMENT_LIMIT)
    if h.m == 0:
        raise InputError("pattern must have at least one edge")
    if n < 1:
        raise InputError(f"n must be >= 1, got {n}")
    q = _prob(p)
    ell, m = h.ell, h.m
    mean = falling(n, ell) * q**m
    var = _pattern_variance(h, n, q)
    c = leading_constant(h)
    lead = c * float(n) ** (2 * ell - 2) * float(q) ** (2 * m - 1) * (1 - float(q))
    block = None
    if a is not None and k is not None:
        n0, n1 = block_sizes(a, k)
        new = n1 - n0
        zeta_mean = (falling(n1, ell) - falling(n0, ell) - falling(new, ell)) * q**m
        block = {
            "n_k": n0,
            "n_k1": n1,
            "eta_mean": falling(new, ell) * q**m,
            "eta_variance": _pattern_variance(h, new, q),
            "zeta_mean": zeta_mean,
            "zeta_variance": _block_variance(h, n0, n1, q),
            "zeta_leading_variance": _block_variance(h, n0, n1, q, leading_only=True),
        }
    return PatternStats(h, ell, m, n, q, mean, var, lead, c, block)


def block_sizes(a: float, k: int) -> tuple:
    if a <= 1:
        raise InputError(f"subsequence base a must exceed 1, got {a}")
    return math.floor(a**k), math.floor(a ** (k + 1))


# ----------------------------------------------------- dependency graph

def _unlabeled_copies(h: Pattern, n: int) -> list:
    seen = set()
    for tup in itertools.permutations(range(n), h.ell):
        seen.add(frozenset(tuple(sorted((tup[u], tup[v]))) for u, v in h.edges))
    return list(seen)


def dependency_degree(h: Pattern, n: int) -> BoundReport:
    """Max degree of the dependency graph on unlabeled copies of ``h`` in K_n
    (copies adjacent when they share an edge).

    The bound counts, for a fixed copy, the choice of a shared edge, an edge of
    ``h`` mapped onto it (with orientation) and the remaining ``ell - 2``
    vertices, divided by the automorphisms: ``2 m^2 / |Aut(h)| * n^(ell-2)``.
    """
    if h.ell > PATTERN_MOMENT_LIMIT:
        raise ResourceLimitError(f"dependency degree supports ell <= {PATTERN_MOMENT_LIMIT}", PATTERN_MOMENT_LIMIT)
    if n < h.ell:
        raise InputError(f"n={n} is smaller than the pattern ({h.ell} vertices)")
    aut = len(h.automorphisms)
    bound = Fraction(2 * h.m**2, aut) * n ** (h.ell - 2)
    stab = max(
        sum(1 for perm in h.automorphisms if tuple(sorted((perm[u], perm[v]))) == (u, v)) for u, v in h.edges
    )
    extra = {"automorphisms": aut, "edge_stabilizer_form": stab * h.m * n ** (h.ell - 2)}
    if n <= DEGREE_EXACT_LIMIT:
        copies = _unlabeled_copies(h, n)
        first = copies[0]
        extra["exact"] = sum(1 for c in copies if c is not first and c & first)
    return BoundReport.exact(
        "dependency_degree", {"pattern": h.name, "n": n}, bound, is_exact=False, is_upper_bound=True, extra=extra
    )


# ---------------------------------------------------------- tail bounds

def triangle_delta(n: int, m_cut: int, p) -> BoundReport:
    """Janson's Delta for the triangles of K_n not inside [m_cut].

    The value is the closed-form upper bound obtained by fixing the shared
    edge; the exact Delta is returned in ``extra``.
    """
    if not 0 <= m_cut <= n:
        raise InputError(f"need 0 <= m_cut <= n, got m_cut={m_cut}, n={n}")
    q = _prob(p)
    mu_s = (math.comb(n, 3) - math.comb(m_cut, 3)) * q**3
    nm = n - m_cut
    poly = math.comb(m_cut, 2) * nm**2 + math.comb(nm, 2) * n**2 + m_cut * nm * n**2
    value = mu_s + poly * q**5
    ordered_pairs = math.comb(m_cut, 2) * nm * (nm - 1) + (math.comb(n, 2) - math.comb(m_cut, 2)) * (n - 2) * (n - 3)
    exact = mu_s + ordered_pairs * q**5
    return BoundReport.exact(
        "triangle_delta",
        {"n": n, "m_cut": m_cut, "p": float(q)},
        value,
        is_exact=False,
        is_upper_bound=True,
        extra={"mu_S": _fraction_str(mu_s), "exact": _fraction_str(exact)},
    )


def janson_lower_tail(mu_s: float, delta: float, t: float) -> BoundReport:
    """exp(-t^2 / (2 Delta)) bounding Pr[X_S <= mu_S - t]."""
    if delta <= 0:
        raise InputError(f"Delta must be positive, got {delta}")
    if not 0 <= t <= mu_s:
        raise InputError(f"t must lie in [0, mu_S] = [0, {mu_s}], got {t}")
    return BoundReport(
        "janson_lower_tail",
        {"mu_S": float(mu_s), "Delta": float(delta), "t": float(t)},
        -float(t) ** 2 / (2 * float(delta)),
        is_upper_bound=True,
    )


def rinott_bound(B: float, C: float, sigma: float, n_terms: int, x: Optional[float] = None) -> BoundReport:
    """Sup distance between the normalized sum's CDF and Phi, given the
    summand bound ``B`` and dependency-degree bound ``C``."""
    if sigma <= 0 or B <= 0 or C < 1:
        raise InputError(f"need sigma > 0, B > 0, C >= 1; got sigma={sigma}, B={B}, C={C}")
    r = n_terms / sigma**2
    value = (B * C / sigma) * (math.sqrt(1 / (2 * math.pi)) + 16 * math.sqrt(r) * math.sqrt(C) * B + 10 * r * C * B**2)
    extra = {"order_term": B * C / sigma}
    if x is not None:
        if x <= 0:
            raise InputError(f"tail point x must be positive, got {x}")
        extra["x"] = x
        extra["tail_approx"] = math.exp(-x * x / 2) / (x * math.sqrt(2 * math.pi))
    inputs = {"B": B, "C": C, "sigma": sigma, "n_terms": n_terms}
    return BoundReport("rinott_bound", inputs, math.log(value), is_upper_bound=True, extra=extra)


def bregman_bound(left_degrees) -> BoundReport:
    """prod_i (d_i!)^(1/d_i), an upper bound on the number of perfect matchings."""
    degrees = [int(d) for d in left_degrees]
    if any(d < 0 for d in degrees):
        raise InputError("degrees must be nonnegative")
    if any(d > len(degrees) for d in degrees):
        raise InputError("a degree exceeds the number of vertices")
    inputs = {"left_degrees": degrees}
    if any(d == 0 for d in degrees):
        return BoundReport.exact("bregman_bound", inputs, 0, is_exact=False, is_upper_bound=True)
    log_value = sum(math.lgamma(d + 1) / d for d in degrees)
    return BoundReport("bregman_bound", inputs, log_value, is_upper_bound=True)


# ------------------------------------------------------ moment census

def moment_census_bounds(n: int, k: int, a: int, structure: str, strong: bool = False) -> BoundReport:
    """Upper bounds on M(a) for k-tuples of perfect matchings or Hamilton cycles."""
    if n < 1 or k < 1 or a < 0:
        raise InputError(f"need n, k >= 1 and a >= 0; got n={n}, k={k}, a={a}")
    inputs = {"n": n, "k": k, "a": a, "structure": structure, "strong": strong}
    if structure == "perfect_matchings":
        weak = Fraction(math.factorial(n) ** k * math.comb(k, 2) ** a, math.factorial(a))
        shift = k * math.log(2) - k * (k - 1) / 2
        in_regime = k * a <= 0.1 * n
    elif structure == "hamilton_cycles":
        if n < 3:
            raise InputError("Hamilton cycles need n >= 3")
        weak = Fraction(3**k * hamilton_total(n) ** k * (k * (k - 1)) ** a, math.factorial(a))
        shift = -k * (k - 1)
        in_regime = a <= math.log(n) ** 3
    else:
        raise InputError(f"unknown structure {structure!r}")
    flags = [] if in_regime else ["outside_regime"]
    if not strong:
        return BoundReport.exact("moment_census_bound", inputs, weak, is_exact=False, is_upper_bound=True, flags=flags)
    return BoundReport(
        "moment_census_bound", inputs, _log_fraction(weak) + shift, is_upper_bound=True, flags=flags + ["asymptotic"]
    )


def kth_moment_exact(n: int, m: int, k: int, structure: str) -> BoundReport:
    """E[X^k] for X the perfect matchings of B(n, m) or Hamilton cycles of G(n, m)."""
    from .count import census_union_sizes

    census = census_union_sizes(n, k, structure)
    pop = n * n if structure == "perfect_matchings" else math.comb(n, 2)
    _check_uniform_m(n, m, pop)
    moment = sum(
        (Fraction(c * falling(m, k * n - a), falling(pop, k * n - a)) for a, c in census.counts.items() if c),
        Fraction(0),
    )
    mean = (pm_mean if structure == "perfect_matchings" else hc_mean)(n, m).value_exact
    ratio = moment / mean**k if mean else None
    extra = {"ratio": None if ratio is None else _fraction_str(ratio), "mean": _fraction_str(mean)}
    if ratio is not None:
        extra["ratio_float"] = float(ratio)
        extra["implied_C"] = float(ratio) ** (1 / k)
    return BoundReport.exact("kth_moment_exact", {"n": n, "m": m, "k": k, "structure": structure}, moment, extra=extra)


def stirling_gain(n: int, k: int, a: int, t: int, ell_t: int) -> BoundReport:
    """[(d!)^(1/d) / (D!)^(1/D)]^(n - k a) with d = n - ell_t - (t - 1), D = n - ell_t."""
    d = n - ell_t - (t - 1)
    big_d = n - ell_t
    if t < 1 or d < 1:
        raise InputError(f"need t >= 1 and d = n - ell_t - (t - 1) >= 1; got t={t}, d={d}")
    log_value = (n - k * a) * (math.lgamma(d + 1) / d - math.lgamma(big_d + 1) / big_d)
    return BoundReport(
        "stirling_gain",
        {"n": n, "k": k, "a": a, "t": t, "ell_t": ell_t},
        log_value,
        extra={"d": d, "D": big_d, "target_log": -(t - 1), "ratio_to_target": math.exp(log_value + (t - 1))},
    )


# ------------------------------------------------------ hypergraph cycles

@dataclass
class HyperStats:
    n: int
    k: int
    p: float
    m: int
    N: int
    reports: dict

    def to_dict(self) -> dict:
        return {
            "n": self.n,
            "k": self.k,
            "p": self.p,
            "m": self.m,
            "N": str(self.N),
            "reports": {name: r.to_dict() for name, r in sorted(self.reports.items())},
        }


def loose_alpha_bound(n: int, k: int, t: int) -> float:
    """Upper bound on the fraction of loose cycles sharing exactly t edges with a fixed one."""
    m = n // (k - 1)
    if t == 1:
        return m * m / math.comb(n, k)
    if t == m:
        return 1 / (math.factorial(n) / (2 * m * math.factorial(k - 2) ** m))
    c = math.factorial(k) * math.factorial(k - 2)
    return m * falling(m, t) * float(c) ** t / ((m - t) * math.factorial(t) * falling(n, (k - 1) * t))


def hyper_stats(n: int, k: int, p, exact_overlap: bool = False) -> HyperStats:
    """Mean, covariances and variance bounds for loose Hamilton cycles in H^k(n, p).

    With ``exact_overlap`` the overlap distribution is enumerated and the
    exact variance and correlation are added (small n only).
    """
    from .count import _check_loose, loose_cycle_count_complete, loose_overlap_census

    m = _check_loose(n, k)
    q = _prob(p, allow_one=True)
    pf = float(q)
    big_n = loose_cycle_count_complete(n, k)
    pop = math.comb(n, k)
    inputs = {"n": n, "k": k, "p": pf}
    reports = {}
    mu = big_n * q**m
    reports["count_complete"] = BoundReport.exact("loose_cycles_complete", inputs, big_n)
    reports["mean"] = BoundReport.exact("hyper_mean", inputs, mu)
    reports["edge_variance"] = BoundReport.exact("edge_variance", inputs, pop * q * (1 - q))
    reports["covariance"] = BoundReport.exact("hyper_edge_covariance", inputs, mu * m * (1 - q))
    alphas = {t: loose_alpha_bound(n, k, t) for t in range(1, m + 1)}
    reports["alpha_bounds"] = BoundReport(
        "alpha_bounds", inputs, math.log(alphas[1]), is_upper_bound=True,
        extra={"alpha": {str(t): v for t, v in alphas.items()}, "C": math.factorial(k) * math.factorial(k - 2)},
    )
    if pf < 1:
        lead = m * m / pop * (1 - pf) / pf
        split = math.log(n)
        s1 = sum(alphas[t] / pf**t for t in range(2, m + 1) if t <= split)
        s2 = sum(alphas[t] / pf**t for t in range(2, m + 1) if t > split)
        f_upper = lead + s1 + s2
        reports["f_upper"] = BoundReport(
            "variance_factor_upper", inputs, math.log(f_upper), is_upper_bound=True, flags=["approximate"],
            extra={"leading": lead, "S1": s1, "S2": s2},
        )
        corr_lb = m * (1 - pf) / math.sqrt(pop * pf * (1 - pf) * f_upper)
        reports["correlation_lower"] = BoundReport(
            "correlation_lower", inputs, math.log(corr_lb), is_lower_bound=True, extra={"target_order": n ** (2 - k)}
        )
        reports["variance_approx"] = BoundReport(
            "hyper_variance_approx", inputs, 2 * math.log(float(mu)) + math.log(f_upper), flags=["approximate"]
        )
    if exact_overlap:
        census = loose_overlap_census(n, k)
        f_exact = sum(Fraction(c, big_n) * (q ** (-t) - 1) for t, c in census.items() if t >= 1) if q < 1 else Fraction(0)
        var = mu * mu * f_exact
        reports["overlap_census"] = BoundReport.exact(
            "overlap_census", inputs, big_n, extra={"counts": {str(t): str(c) for t, c in census.items()}}
        )
        reports["variance_exact"] = BoundReport.exact("hyper_variance", inputs, var)
        reports["f_exact"] = BoundReport.exact("variance_factor", inputs, f_exact)
        if var > 0:
            corr = float(mu * m * (1 - q)) / math.sqrt(float(var) * float(pop * q * (1 - q)))
            reports["correlation_exact"] = BoundReport("correlation", inputs, math.log(corr), is_exact=True)
    return HyperStats(n, k, pf, m, big_n, reports)


# ---------------------------------------------------- normalized statistics

def envelope(n: float) -> float:
    """sqrt(2 log log n), defined for n > e."""
    if n <= math.e:
        raise InputError(f"sqrt(2 log log n) needs n > e, got {n}")
    return math.sqrt(2 * math.log(math.log(n)))


@dataclass(frozen=True)
class LilValue:
    z: float
    envelope: float
    ratio: float
    approximate: bool = False

    def to_dict(self) -> dict:
        return {"z": self.z, "envelope": self.envelope, "ratio": self.ratio, "approximate": self.approximate}


def _log_count(x) -> float:
    from .errors import ZeroCountError

    if isinstance(x, float):
        return x  # already a log count
    if x <= 0:
        raise ZeroCountError("count is zero; the log statistic is undefined")
    return math.log(x)


def pm_center(n: int, p: float) -> tuple:
    """(center, scale) of the log perfect-matching count in B(n, p)."""
    return math.lgamma(n + 1) + n * math.log(p) - (1 - p) / (2 * p), math.sqrt((1 - p) / p)


def hc_center(n: int, p: float) -> tuple:
    """(center, scale) of the log Hamilton-cycle count in G(n, p)."""
    return math.lgamma(n) - math.log(2) + n * math.log(p) - (1 - p) / p, math.sqrt(2 * (1 - p) / p)


def lil_statistic(kind: str, raw, n: int, p: float, pattern: Optional[Pattern] = None, k: int = 3,
                  hyper_variance: str = "upper") -> LilValue:
    """Normalized statistic and its ratio to sqrt(2 log log n).

    ``raw`` is the exact count; for ``pm``/``hc`` a float is read as an
    already-computed natural-log count.
    """
    if n < 3:
        raise InputError(f"normalized statistics need n >= 3, got {n}")
    pf = float(_prob(p))
    approximate = False
    if kind == "pm":
        center, scale = pm_center(n, pf)
        z = (_log_count(raw) - center) / scale
    elif kind == "hc":
        center, scale = hc_center(n, pf)
        z = (_log_count(raw) - center) / scale
    elif kind == "subgraph":
        if pattern is None:
            raise InputError("subgraph statistic needs a pattern")
        st = pattern_moments(pattern, n, pf)
        z = float((Fraction(raw) - st.mean)) / st.sd
    elif kind == "hyper":
        hs = hyper_stats(n, k, pf, exact_overlap=hyper_variance == "exact")
        mu = float(hs.reports["mean"].value_exact)
        if hyper_variance == "exact":
            sd = math.sqrt(float(hs.reports["variance_exact"].value_exact))
        else:
            sd = mu * math.sqrt(hs.reports["f_upper"].value)
            approximate = True
        z = (raw - mu) / sd
    else:
        raise InputError(f"unknown statistic kind {kind!r}")
    env = envelope(n)
    return LilValue(z, env, z / env, approximate)
