"""Command-line front end.

Every invocation is turned into a :class:`Manifest` (command, parameters,
output, seed) and dispatched by :func:`run`; ``--manifest FILE`` loads the
same structure from JSON. Exit codes: 0 success, 2 invalid input, 3 resource
limit, 4 failed acceptance check.
"""
from __future__ import annotations

import argparse
import json
import logging
import sys
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional

from . import acceptance, count, formulas, model, serialize, stats
from .errors import DegenerateDistributionError, InputError, ResourceLimitError, ZeroCountError
from .model import ModelKind, ModelSpec
from .patterns import Pattern

EXIT_OK, EXIT_INPUT, EXIT_RESOURCE, EXIT_CHECK = 0, 2, 3, 4
COMMANDS = ("count", "expect", "bound", "census", "moments", "clt", "lil", "tails", "check")

STRUCTURE_ALIASES = {
    "pm": "perfect_matchings", "perfect_matchings": "perfect_matchings",
    "hc": "hamilton_cycles", "hamilton_cycles": "hamilton_cycles",
    "hyper": "loose_hyper_hamilton", "loose_hyper_hamilton": "loose_hyper_hamilton",
    "subgraph": "subgraph_copies", "subgraph_copies": "subgraph_copies",
    "avoiding": "hamilton_avoiding", "hamilton_avoiding": "hamilton_avoiding",
    "edges": "edges",
}
MODEL_ALIASES = {
    "gnp": ModelKind.GNP_NESTED, "bnp": ModelKind.BNP_NESTED, "hknp": ModelKind.HKNP_NESTED,
    "gnm": ModelKind.GNM, "bnm": ModelKind.BNM,
}
DEFAULT_MODEL = {
    "perfect_matchings": "bnp", "hamilton_cycles": "gnp", "loose_hyper_hamilton": "hknp",
    "subgraph_copies": "gnp", "edges": "gnp",
}
STAT_NAME = {"perfect_matchings": "pm", "hamilton_cycles": "hc", "loose_hyper_hamilton": "hyper",
             "subgraph_copies": "subgraph", "edges": "edges"}

log = logging.getLogger("lilverify")


@dataclass
class Manifest:
    command: str
    parameters: dict = field(default_factory=dict)
    output: dict = field(default_factory=lambda: {"path": None, "format": "json"})
    seed: int = 0

    def __post_init__(self):
        if self.command not in COMMANDS:
            raise InputError(f"command must be one of {COMMANDS}, got {self.command!r}")
        fmt = self.output.get("format", "json")
        if fmt not in ("json", "csv"):
            raise InputError(f"format must be json or csv, got {fmt!r}")
        if not 0 <= int(self.seed) < 2**64:
            raise InputError(f"seed must be a 64-bit unsigned integer, got {self.seed}")

    def to_dict(self) -> dict:
        return {"command": self.command, "parameters": dict(sorted(self.parameters.items())),
                "output": {"path": self.output.get("path"), "format": self.output.get("format", "json")},
                "seed": self.seed}

    @classmethod
    def from_dict(cls, d: dict) -> "Manifest":
        unknown = set(d) - {"command", "parameters", "output", "seed"}
        if unknown:
            raise InputError(f"unknown manifest fields {sorted(unknown)}")
        return cls(d["command"], dict(d.get("parameters", {})),
                   dict(d.get("output") or {"path": None, "format": "json"}), int(d.get("seed", 0)))

    @classmethod
    def load(cls, path) -> "Manifest":
        try:
            return cls.from_dict(json.loads(Path(path).read_text()))
        except (OSError, json.JSONDecodeError, KeyError) as exc:
            raise InputError(f"cannot read manifest {path}: {exc}") from None


# ------------------------------------------------------------- helpers

def _need(params, *names):
    for name in names:
        if params.get(name) is None:
            raise InputError(f"missing required parameter --{name.replace('_', '-')}")
    return [params[n] for n in names]


def _structure(params, allowed=None) -> str:
    raw = params.get("structure")
    if raw is None:
        raise InputError("missing required parameter --structure")
    s = STRUCTURE_ALIASES.get(str(raw).lower())
    if s is None or (allowed and s not in allowed):
        raise InputError(f"--structure {raw!r} is not valid here (allowed: {sorted(allowed or STRUCTURE_ALIASES)})")
    return s


def _pattern(params) -> Pattern:
    raw = params.get("pattern") or "triangle"
    path = Path(raw)
    if path.is_file():
        return Pattern.from_instance(model.read_edgelist(path))
    return Pattern.named(raw)


def _model_spec(params, structure, seed) -> ModelSpec:
    name = str(params.get("model") or DEFAULT_MODEL.get(structure, "gnp")).lower()
    kind = MODEL_ALIASES.get(name)
    if kind is None:
        try:
            kind = ModelKind(params.get("model"))
        except ValueError:
            raise InputError(f"--model must be one of {sorted(MODEL_ALIASES)}, got {params.get('model')!r}") from None
    (n,) = _need(params, "n")
    k = params.get("k") or (3 if kind is ModelKind.HKNP_NESTED else 2)
    if kind.nested:
        return ModelSpec(kind, int(n), k=int(k), p=float(_need(params, "p")[0]), seed=seed)
    return ModelSpec(kind, int(n), k=int(k), m=int(_need(params, "m")[0]), seed=seed)


def _edges_file(path) -> list:
    text = Path(path).read_text()
    return [tuple(int(v) for v in ln.split()) for ln in text.splitlines() if ln.strip() and not ln.startswith("#")]


# ------------------------------------------------------------- commands

def cmd_count(params, seed):
    structure = _structure(params, {"perfect_matchings", "hamilton_cycles", "loose_hyper_hamilton",
                                    "subgraph_copies", "hamilton_avoiding"})
    algorithm = params.get("algorithm") or "fast"
    if structure == "hamilton_avoiding":
        (n,) = _need(params, "n")
        forbidden = _edges_file(params["forbidden"]) if params.get("forbidden") else []
        return count.count_hamilton_avoiding(int(n), forbidden, bool(params.get("oriented")), algorithm)
    if params.get("input"):
        g = model.read_edgelist(params["input"])
    else:
        g = model.sample(_model_spec(params, structure, seed))
    if structure == "perfect_matchings":
        return count.count_perfect_matchings(g, algorithm)
    if structure == "hamilton_cycles":
        return count.count_hamilton_cycles(g, algorithm)
    if structure == "loose_hyper_hamilton":
        return count.count_loose_hyper_hamilton(g, algorithm)
    return count.count_subgraph_copies(g, _pattern(params), algorithm)


def cmd_expect(params, seed):
    structure = _structure(params, {"perfect_matchings", "hamilton_cycles", "subgraph_copies", "loose_hyper_hamilton"})
    mode = params.get("mode") or "exact"
    if structure == "perfect_matchings":
        n, m = _need(params, "n", "m")
        return formulas.pm_mean(int(n), int(m), mode)
    if structure == "hamilton_cycles":
        n, m = _need(params, "n", "m")
        return formulas.hc_mean(int(n), int(m), mode)
    if structure == "subgraph_copies":
        n, p = _need(params, "n", "p")
        return formulas.pattern_moments(_pattern(params), int(n), float(p), params.get("base"), params.get("kblock"))
    n, p = _need(params, "n", "p")
    return formulas.hyper_stats(int(n), int(params.get("k") or 3), float(p), exact_overlap=mode == "exact")


BOUNDS = ("falling_factorial", "janson", "triangle_delta", "rinott", "bregman", "census", "stirling",
          "dependency", "envelope")


def cmd_bound(params, seed):
    name = params.get("name")
    if name not in BOUNDS:
        raise InputError(f"--name must be one of {BOUNDS}, got {name!r}")
    if name == "falling_factorial":
        t, ell = _need(params, "t", "ell")
        return formulas.falling_factorial(int(t), int(ell), params.get("mode") or "exact")
    if name == "janson":
        mu, delta, t = _need(params, "mu", "delta", "t")
        return formulas.janson_lower_tail(float(mu), float(delta), float(t))
    if name == "triangle_delta":
        n, p = _need(params, "n", "p")
        return formulas.triangle_delta(int(n), int(params.get("m") if params.get("m") is not None else int(n) // 2), float(p))
    if name == "rinott":
        b, c, sigma, terms = _need(params, "B", "C", "sigma", "terms")
        return formulas.rinott_bound(float(b), float(c), float(sigma), int(terms), params.get("x"))
    if name == "bregman":
        (degrees,) = _need(params, "degrees")
        if isinstance(degrees, str):
            degrees = [int(x) for x in degrees.replace(",", " ").split()]
        return formulas.bregman_bound(degrees)
    if name == "census":
        structure = _structure(params, {"perfect_matchings", "hamilton_cycles"})
        n, k, a = _need(params, "n", "k", "a")
        return formulas.moment_census_bounds(int(n), int(k), int(a), structure, bool(params.get("strong")))
    if name == "stirling":
        n, k, a, t, ell_t = _need(params, "n", "k", "a", "t", "ell")
        return formulas.stirling_gain(int(n), int(k), int(a), int(t), int(ell_t))
    if name == "dependency":
        (n,) = _need(params, "n")
        return formulas.dependency_degree(_pattern(params), int(n))
    (n,) = _need(params, "n")
    value = formulas.envelope(float(n))
    return {"name": "envelope", "inputs": {"n": float(n)}, "value": value}


def cmd_census(params, seed):
    structure = _structure(params, {"perfect_matchings", "hamilton_cycles"})
    n, k = _need(params, "n", "k")
    return count.census_union_sizes(int(n), int(k), structure)


def cmd_moments(params, seed):
    structure = _structure(params, {"perfect_matchings", "hamilton_cycles"})
    n, m, k = _need(params, "n", "m", "k")
    return stats.moment_ratio_experiment(int(n), int(m), int(k), structure, int(params.get("replicates") or 0), seed)


def _experiment(params, seed) -> stats.ExperimentSpec:
    structure = _structure(params, set(STAT_NAME))
    ms = _model_spec(params, structure, 0)
    tolerances = {}
    for key in ("ks", "corr"):
        if params.get(key) is not None:
            tolerances[key] = float(params[key])
    return stats.ExperimentSpec(
        ms, STAT_NAME[structure], int(params.get("replicates") or 1000), seed,
        _pattern(params) if structure == "subgraph_copies" else None,
        base=float(params.get("base") or 1.3), kmax=int(params.get("kmax") or 10),
        n_min=int(params.get("n_min") or 8), tolerances=tolerances,
    )


def cmd_clt(params, seed):
    return stats.clt_experiment(_experiment(params, seed))


def cmd_lil(params, seed):
    # trajectory sizes come from --base/--kmax; --n is only a placeholder here
    if params.get("n") is None:
        params = {**params, "n": int(params.get("n_min") or 8)}
    return stats.lil_trajectory(_experiment(params, seed))


def cmd_tails(params, seed):
    kind = params.get("name")
    (n,) = _need(params, "n")
    return stats.tail_experiment(kind, int(n), float(params.get("p") or 0.5), int(params.get("replicates") or 10_000),
                                 seed, m_cut=params.get("m"), k=int(params.get("k") or 3))


def cmd_check(params, seed):
    suite = params.get("suite") or "all"
    if suite not in list(acceptance.SUITES) + ["all"]:
        raise InputError(f"suite must be one of {list(acceptance.SUITES) + ['all']}, got {suite!r}")
    return acceptance.run_suite(suite, echo=lambda line: print(line, file=sys.stderr))


HANDLERS = {name: globals()[f"cmd_{name}"] for name in COMMANDS}


def run(manifest: Manifest) -> int:
    """Execute a manifest; returns the process exit status."""
    try:
        result = HANDLERS[manifest.command](manifest.parameters, manifest.seed)
    except InputError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except ResourceLimitError as exc:
        print(f"resource limit: {exc}", file=sys.stderr)
        return EXIT_RESOURCE
    except (DegenerateDistributionError, ZeroCountError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    status = EXIT_OK
    if manifest.command == "check":
        failed = [o.cid for o in result if o.gating and not o.passed]
        status = EXIT_CHECK if failed else EXIT_OK
        result = {"suite": manifest.parameters.get("suite") or "all", "failed": failed,
                  "criteria": [o.to_dict() for o in result]}
    fmt = manifest.output.get("format", "json")
    if fmt == "csv":
        if not hasattr(result, "csv_rows"):
            print(f"error: --format csv is only available for experiment commands", file=sys.stderr)
            return EXIT_INPUT
        text = serialize.csv_text(*result.csv_rows())
    else:
        text = serialize.dumps(result)
    serialize.write(text, manifest.output.get("path"))
    return status


# -------------------------------------------------------------- parsing

def _add_common(p, *flags):
    spec = {
        "structure": dict(help="pm | hc | hyper | subgraph | avoiding | edges"),
        "model": dict(help="gnp | bnp | hknp | gnm | bnm"),
        "n": dict(type=int, help="vertex count (per side for bipartite)"),
        "m": dict(type=int, help="edge count (uniform-m models); cut size for janson"),
        "p": dict(type=float, help="edge probability"),
        "k": dict(type=int, help="uniformity, tuple length or moment order"),
        "pattern": dict(help="pattern name (triangle, k4, c5, p3, ...) or edge-list file"),
        "replicates": dict(type=int, help="Monte Carlo replicates"),
        "base": dict(type=float, help="subsequence base a > 1"),
        "kmax": dict(type=int, help="largest subsequence exponent"),
        "mode": dict(choices=("exact", "approx"), help="exact or approximate evaluation"),
        "name": dict(help="which bound / tail experiment"),
    }
    for f in flags:
        p.add_argument(f"--{f}", **spec[f])


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="lilverify", description=__doc__.splitlines()[0])
    parser.add_argument("--manifest", help="JSON manifest; explicit flags override its parameters")
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command")

    def add(name, help_):
        p = sub.add_parser(name, help=help_)
        p.add_argument("--seed", type=int, help="64-bit seed (instance seed or experiment base seed)")
        p.add_argument("--out", help="output path (default stdout)")
        p.add_argument("--format", choices=("json", "csv"), help="output format (default json)")
        return p

    p = add("count", "exact count on a sampled or loaded instance")
    _add_common(p, "structure", "model", "n", "m", "p", "k", "pattern")
    p.add_argument("--input", help="edge-list file instead of sampling")
    p.add_argument("--algorithm", choices=("fast", "oracle"))
    p.add_argument("--forbidden", help="edge-list file of forbidden edges (avoiding)")
    p.add_argument("--oriented", action="store_true", default=None, help="count both orientations (avoiding)")

    p = add("expect", "closed-form means and variances")
    _add_common(p, "structure", "n", "m", "p", "k", "pattern", "mode", "base")
    p.add_argument("--kblock", type=int, help="block index for the eta/zeta statistics")

    p = add("bound", "evaluate an approximation or bound")
    _add_common(p, "name", "structure", "n", "m", "p", "k", "pattern", "mode")
    for flag, typ in (("t", float), ("ell", int), ("a", int), ("mu", float), ("delta", float), ("B", float),
                      ("C", float), ("sigma", float), ("terms", int), ("x", float)):
        p.add_argument(f"--{flag}", type=typ)
    p.add_argument("--degrees", help="comma-separated left degrees (bregman)")
    p.add_argument("--strong", action="store_true", default=None)

    p = add("census", "exact union-size census M(a)")
    _add_common(p, "structure", "n", "k")

    p = add("moments", "moment ratio E[X^k]/E[X]^k")
    _add_common(p, "structure", "n", "m", "k", "replicates")

    for name, help_ in (("clt", "normal approximation experiment"), ("lil", "normalized trajectories")):
        p = add(name, help_)
        _add_common(p, "structure", "model", "n", "m", "p", "k", "pattern", "replicates", "base", "kmax")
        p.add_argument("--n-min", dest="n_min", type=int, help="smallest subsequence point")
        p.add_argument("--ks", type=float, help="KS tolerance to check")
        p.add_argument("--corr", type=float, help="minimum correlation with the edge count")

    p = add("tails", "empirical tails vs Janson / Rinott / Chebyshev bounds")
    _add_common(p, "name", "n", "m", "p", "k", "replicates")

    p = add("check", "run an acceptance suite")
    p.add_argument("suite", nargs="?", choices=list(acceptance.SUITES) + ["all"])
    return parser


def manifest_from_args(args) -> Manifest:
    base = Manifest.load(args.manifest) if args.manifest else None
    command = args.command or (base.command if base else None)
    if command is None:
        raise InputError("no command given (use a subcommand or --manifest)")
    if base and args.command and base.command != args.command:
        raise InputError(f"manifest command {base.command!r} conflicts with {args.command!r}")
    skip = {"command", "manifest", "verbose", "seed", "out", "format"}
    params = dict(base.parameters) if base else {}
    params.update({k: v for k, v in vars(args).items() if k not in skip and v is not None})
    output = dict(base.output) if base else {"path": None, "format": "json"}
    if getattr(args, "out", None):
        output["path"] = args.out
    if getattr(args, "format", None):
        output["format"] = args.format
    seed = args.seed if getattr(args, "seed", None) is not None else (base.seed if base else 0)
    return Manifest(command, params, output, seed)


def main(argv: Optional[list] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(name)s: %(message)s")
    try:
        manifest = manifest_from_args(args)
    except InputError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    return run(manifest)


if __name__ == "__main__":
    sys.exit(main())
