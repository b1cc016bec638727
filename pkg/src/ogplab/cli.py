"""Command line experiment runner.

Every output file embeds a manifest (tool, version, command, configuration)
so it can be regenerated with ``ogplab verify FILE``. JSON outputs carry it
under ``"manifest"``; CSV outputs carry it on a leading ``# `` comment line.
Worker count and output paths never enter the manifest, so outputs are
byte-identical for any worker count.

Exit codes: 0 success, 2 invalid arguments, 3 size guard refusal,
4 unwritable output, 5 verification mismatch.
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys
from concurrent.futures import ProcessPoolExecutor
from decimal import Decimal

import numpy as np

from . import __version__
from .algorithms import greedy_clique, karmarkar_karp, walksat
from .core import SignVector, build_spectrum, detect_gap
from .ensembles import (
    branch_paths,
    chaos_probe,
    graph_resample_path,
    ksat_resample_path,
    make_algorithm,
    npp_resample_path,
    perceptron_resample_path,
    pspin_resample_path,
    stability_run,
)
from .models import (
    GuardError,
    NppInstance,
    gen_gnp,
    gen_ksat,
    gen_npp,
    gen_perceptron,
    gen_pspin,
    npp_value,
)
from .oracles import (
    cluster_decompose,
    dpll_sat,
    enumerate_cliques,
    enumerate_npp,
    enumerate_perceptron,
    enumerate_pspin,
    enumerate_sat,
    exact_max_clique,
    npp_optimum,
    tuple_gap_search,
)
from .rng import RngStream
from .theory import (
    LN2,
    clique_overlap_roots,
    npp_pair_exponent,
    npp_rho0,
    rho_grid,
    rho_star,
    sample_clique_curve,
)

EXIT_OK, EXIT_USAGE, EXIT_GUARD, EXIT_OUTPUT, EXIT_VERIFY = 0, 2, 3, 4, 5
WORKERS_ENV = "OGPLAB_WORKERS"
NOT_CONFIG = {"out", "summary", "workers", "config", "func"}

RANGE_HELP = (
    "Numbers: a single value, a comma list, 'lo:hi:step' (inclusive of hi) "
    "or, for integers, 'a..b' (inclusive)."
)


class UsageError(ValueError):
    pass


# --- value parsing -------------------------------------------------------------


def parse_range(text: str, integer: bool = False) -> list:
    """Parse ``7``, ``1,2,3``, ``3.0:5.5:0.5`` or ``0..99`` into a list."""
    text = str(text).strip()
    conv = int if integer else float
    try:
        if ".." in text:
            lo, hi = text.split("..")
            return [conv(v) for v in range(int(lo), int(hi) + 1)]
        if ":" in text:
            lo, hi, step = (Decimal(p) for p in text.split(":"))
            if step <= 0:
                raise UsageError(f"range step must be positive in {text!r}")
            out, v = [], lo
            while v <= hi:
                out.append(conv(v))
                v += step
            return out
        return [conv(p) for p in text.split(",") if p.strip()]
    except (ValueError, ArithmeticError) as exc:
        if isinstance(exc, UsageError):
            raise
        raise UsageError(f"cannot parse {text!r} as a {'integer' if integer else 'number'} list") from exc


def fmt(v) -> str:
    if v is None:
        return ""
    if isinstance(v, (bool, np.bool_)):
        return str(int(v))
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    return format(float(v), ".12g")


def _jsonable(obj):
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, (np.floating,)):
        return float(obj)
    if isinstance(obj, float) and not math.isfinite(obj):
        return None
    return obj


def dump_json(obj) -> str:
    return json.dumps(_jsonable(obj), sort_keys=True, indent=1) + "\n"


def manifest_of(args) -> dict:
    config = {k: v for k, v in sorted(vars(args).items()) if k not in NOT_CONFIG}
    return {"tool": "ogplab", "version": __version__, "command": args.command, "config": config}


def csv_with_manifest(args, body: str) -> str:
    return "# " + json.dumps(manifest_of(args), sort_keys=True) + "\n" + body


def json_with_manifest(args, payload: dict) -> str:
    return dump_json({"manifest": manifest_of(args), **payload})


# --- instance construction -----------------------------------------------------


def _need(args, *names):
    for name in names:
        if getattr(args, name, None) is None:
            raise UsageError(f"--{name.replace('_', '-')} is required for {args.command} {getattr(args, 'model', '') or ''}".rstrip())


def ksat_m(args) -> int:
    if args.m is not None:
        return int(args.m)
    if args.alpha is not None:
        return int(round(args.alpha * args.n))
    raise UsageError("K-SAT needs --m or --alpha")


def perceptron_kappa(args) -> float:
    if args.kappa is not None:
        return float(args.kappa)
    if args.kappa_scale is not None:
        return float(args.kappa_scale) * math.sqrt(args.n)
    raise UsageError("perceptron needs --kappa or --kappa-scale")


def build_instance(model: str, args):
    if model == "npp":
        if getattr(args, "weights", None):
            return NppInstance.from_weights(parse_range(args.weights))
        _need(args, "n")
        return gen_npp(args.n, args.seed)
    if model in ("gnp", "clique"):
        _need(args, "n")
        return gen_gnp(args.n, args.p, args.seed)
    if model in ("ksat", "sat"):
        _need(args, "n")
        return gen_ksat(args.n, ksat_m(args), args.k, args.seed)
    if model == "pspin":
        _need(args, "n")
        return gen_pspin(args.n, args.order, args.seed)
    if model == "perceptron":
        _need(args, "n", "m")
        return gen_perceptron(args.n, int(args.m), perceptron_kappa(args), args.seed)
    raise UsageError(f"unknown model {model!r}")


def build_path(model: str, args):
    _need(args, "n")
    os_ = args.order_seed if args.order_seed is not None else args.seed + 1
    if model in ("gnp", "clique"):
        return graph_resample_path(args.n, args.p, args.seed, os_)
    if model == "npp":
        return npp_resample_path(args.n, args.seed, os_, rule=args.rule)
    if model in ("ksat", "sat"):
        return ksat_resample_path(args.n, ksat_m(args), args.k, args.seed, os_)
    if model == "pspin":
        return pspin_resample_path(args.n, args.order, args.seed, os_, rule=args.rule)
    if model == "perceptron":
        _need(args, "m")
        return perceptron_resample_path(args.n, int(args.m), perceptron_kappa(args), args.seed, os_)
    raise UsageError(f"unknown model {model!r}")


def enumerate_model(model: str, args):
    inst = build_instance(model, args)
    if model == "npp":
        if args.alpha is None and args.threshold is None:
            raise UsageError("npp enumeration needs --alpha or --threshold")
        return enumerate_npp(inst, alpha=args.alpha, cap=args.cap, threshold=args.threshold)
    if model in ("gnp", "clique"):
        kmin = args.kmin
        if kmin is None:
            kmin = max(1, exact_max_clique(inst).size - 1)
        return enumerate_cliques(inst, kmin, cap=args.cap)
    if model in ("ksat", "sat"):
        return enumerate_sat(inst, cap=args.cap)
    if model == "perceptron":
        return enumerate_perceptron(inst, cap=args.cap)
    if model == "pspin":
        return enumerate_pspin(inst, args.mu, cap=args.cap)
    raise UsageError(f"cannot enumerate model {model!r}")


# --- subcommands ---------------------------------------------------------------


def cmd_gen(args) -> dict:
    inst = build_instance(args.model, args)
    summary: dict = {"n": inst.n}
    if args.model == "npp":
        summary["weights_sum"] = float(np.sum(inst.weights))
        summary["first_weights"] = [float(x) for x in inst.weights[:4]]
    elif args.model in ("gnp", "clique"):
        summary["edges"] = inst.edge_count()
    elif args.model in ("ksat", "sat"):
        summary["m"] = inst.m
        summary["first_clause"] = list(inst.clauses[0]) if inst.m else None
    elif args.model == "pspin":
        summary["entries"] = int(inst.entries.size)
        summary["first_entries"] = [float(x) for x in inst.entries.reshape(-1)[:4]]
    elif args.model == "perceptron":
        summary["m"] = inst.m
        summary["kappa"] = inst.kappa
    return {"primary": json_with_manifest(args, {"instance": inst.manifest(), "summary": summary})}


def cmd_solve(args) -> dict:
    alg = args.algorithm
    out: dict = {"algorithm": alg}
    if alg == "kk":
        inst = build_instance("npp", args)
        if args.n is not None and args.n != inst.n:
            raise UsageError(f"--n {args.n} disagrees with {inst.n} weights")
        tr = karmarkar_karp(inst)
        out.update(
            discrepancy=tr.discrepancy,
            partition=str(tr.partition),
            value_check=npp_value(inst, tr.partition),
            merges=[[a, b, x, y] for a, b, x, y in tr.merges],
        )
    elif alg == "npp-opt":
        inst = build_instance("npp", args)
        value, s = npp_optimum(inst)
        out.update(optimum=value, partition=str(s.canonical()))
    elif alg in ("greedy", "maxclique"):
        g = build_instance("gnp", args)
        if alg == "greedy":
            order = RngStream(args.order_seed).permutation(g.n) if args.order_seed is not None else None
            s = greedy_clique(g, order)
        else:
            s = exact_max_clique(g)
        out.update(size=s.size, nodes=s.nodes())
    elif alg == "walksat":
        f = build_instance("ksat", args)
        r = walksat(f, args.max_flips, args.noise, RngStream(args.rng_seed))
        out.update(success=r.success, flips=r.flips, assignment=str(r.assignment) if r.success else None)
    elif alg == "dpll":
        f = build_instance("ksat", args)
        r = dpll_sat(f)
        out.update(satisfiable=r.satisfiable, decisions=r.decisions,
                   assignment=str(r.witness) if r.witness else None)
    else:
        raise UsageError(f"unknown algorithm {alg!r}")
    return {"primary": json_with_manifest(args, {"result": out})}


def cmd_enumerate(args) -> dict:
    sset = enumerate_model(args.model, args)
    return {"primary": json_with_manifest(args, {"solutions": sset.to_dict()})}


def cmd_spectrum(args) -> dict:
    sset = enumerate_model(args.model, args)
    mode = "intersection" if sset.kind == "subset" else "overlap"
    quotient = args.quotient if args.quotient is not None else args.model == "npp"
    spec = build_spectrum(sset, mode, quotient and mode == "overlap")
    min_width = args.min_width
    gap = detect_gap(spec, min_width, args.floor, include_self=args.include_self, verbose=args.verbose)
    return {"primary": json_with_manifest(args, {
        "count": len(sset),
        "truncated": sset.truncated,
        "threshold": sset.threshold,
        "spectrum": spec.to_dict(),
        "gap": gap.to_dict(),
    })}


def cmd_cluster(args) -> dict:
    sset = enumerate_model(args.model, args)
    dec = cluster_decompose(sset, args.r)
    return {"primary": json_with_manifest(args, {"count": len(sset), "decomposition": dec.to_dict()})}


def cmd_theory(args) -> dict:
    if args.clique_curve:
        _need(args, "alpha")
        curve = sample_clique_curve(args.alpha, rho_grid(args.grid))
        return {"primary": csv_with_manifest(args, curve.to_csv())}
    if args.npp_exponent:
        _need(args, "alpha")
        lines = ["rho,exponent_nat,exponent_log2"]
        for rho in rho_grid(args.grid):
            e = npp_pair_exponent(args.alpha, rho)
            lines.append(f"{fmt(rho)},{fmt(e)},{fmt(e / LN2)}")
        return {"primary": csv_with_manifest(args, "\n".join(lines) + "\n")}
    if args.rho0:
        _need(args, "alpha")
        return {"primary": json_with_manifest(args, {"alpha": args.alpha, "rho0": npp_rho0(args.alpha)})}
    _need(args, "alpha")
    rho = args.rho if args.rho is not None else 0.0
    roots = clique_overlap_roots(args.alpha, rho)
    return {"primary": json_with_manifest(args, {
        "alpha": args.alpha,
        "rho": rho,
        "rho_star": rho_star(args.alpha),
        "roots": None if roots is None else {"x1": roots[0], "x2": roots[1]},
    })}


def cmd_path(args) -> dict:
    path = build_path(args.model, args)
    ts = parse_range(args.t, integer=True) if args.t is not None else [0, path.T]
    base = path.instance(0)
    rows = []
    for t in ts:
        if not 0 <= t <= path.T:
            raise UsageError(f"t={t} outside 0..{path.T}")
        inst = path.instance(t)
        rows.append({
            "t": t,
            "changed": path.changed(t) if t else None,
            "differs_from_start": _coord_diff(base, inst),
        })
    return {"primary": json_with_manifest(args, {"path": path.manifest(), "steps": rows})}


def _coord_diff(a, b) -> int:
    if hasattr(a, "rows"):
        return sum((x ^ y).bit_count() for x, y in zip(a.rows, b.rows)) // 2
    if hasattr(a, "clauses"):
        return sum(1 for x, y in zip(a.clauses, b.clauses) if x != y)
    for attr in ("weights", "entries", "matrix"):
        if hasattr(a, attr):
            return int(np.count_nonzero(getattr(a, attr) != getattr(b, attr)))
    return 0


ALGORITHM_MODELS = {
    "kk": "npp", "npp-opt": "npp", "greedy": "gnp", "maxclique": "gnp",
    "walksat": "ksat", "dpll": "ksat", "ground": "pspin",
}


def cmd_stability(args) -> dict:
    model = args.model
    want = ALGORITHM_MODELS.get(args.algorithm)
    if want is not None and {"clique": "gnp", "sat": "ksat"}.get(model, model) != want:
        raise UsageError(f"algorithm {args.algorithm} does not apply to model {model}")
    params = {}
    if args.algorithm in ("greedy", "maxclique") and args.alg_order_seed is not None:
        params["order_seed"] = args.alg_order_seed
    if args.algorithm == "walksat":
        params = {"seed": args.rng_seed, "max_flips": args.max_flips, "noise": args.noise}
    alg = make_algorithm(args.algorithm, **params)
    path = build_path(model, args)
    trace = stability_run(alg, path, args.stride)
    summary = trace.summary()
    summary["path"] = path.manifest()
    if args.gap_width is not None:
        summary["gap_width"] = args.gap_width
        summary["jumps_gap"] = trace.crosses(args.gap_width)
    out = {"primary": csv_with_manifest(args, trace.to_csv())}
    out["summary"] = json_with_manifest(args, {"summary": summary})
    return out


def cmd_tuple_search(args) -> dict:
    _need(args, "n", "alpha", "nu1", "nu2")
    path = npp_resample_path(args.n, args.seed, args.order_seed if args.order_seed is not None else args.seed + 1)
    t = args.t if args.t is not None else path.T // 2
    sets = []
    for br in branch_paths(path, args.tuple_m):
        sets.append(enumerate_npp(br.instance(t), alpha=args.alpha, cap=args.cap))
    rep = tuple_gap_search(sets, args.tuple_m, args.nu1, args.nu2, budget=args.budget,
                           mode=args.mode, quotient=True, seed=args.seed)
    return {"primary": json_with_manifest(args, {
        "t": t, "T": path.T, "set_sizes": [len(s) for s in sets], "report": rep.to_dict(),
    })}


def cmd_chaos(args) -> dict:
    _need(args, "n")
    rep = chaos_probe(args.n, args.order, args.seed, args.rho, args.mu, args.order_seed)
    return {"primary": json_with_manifest(args, {"chaos": rep.to_dict()})}


# --- sweeps -------------------------------------------------------------------


def sweep_cells(args) -> list[dict]:
    ns = parse_range(args.n, integer=True)
    if args.model == "sat":
        alphas = parse_range(args.alpha) if args.alpha is not None else [4.26]
        ks = parse_range(args.k, integer=True)
        return [{"k": k, "n": n, "alpha": a, "m": int(round(a * n))} for k in ks for n in ns for a in alphas]
    if args.model == "npp":
        return [{"n": n} for n in ns]
    if args.model == "clique":
        return [{"n": n, "p": args.p} for n in ns]
    if args.model == "perceptron":
        ms = parse_range(args.m, integer=True)
        return [{"n": n, "m": m, "kappa": args.kappa_scale * math.sqrt(n), "r": args.r} for n in ns for m in ms]
    raise UsageError(f"unknown sweep model {args.model!r}")


def sweep_task(task):
    """One (cell, seed) evaluation; returns a single number."""
    model, cell, seed = task
    if model == "sat":
        return float(dpll_sat(gen_ksat(cell["n"], cell["m"], cell["k"], seed)).satisfiable)
    if model == "npp":
        inst = gen_npp(cell["n"], seed)
        value, _ = npp_optimum(inst)
        return math.log2(value * 2.0 ** cell["n"] / math.sqrt(cell["n"]))
    if model == "clique":
        return float(greedy_clique(gen_gnp(cell["n"], cell["p"], seed)).size)
    if model == "perceptron":
        inst = gen_perceptron(cell["n"], cell["m"], cell["kappa"], seed)
        sset = enumerate_perceptron(inst)
        if len(sset) == 0:
            return float("nan")
        return cluster_decompose(sset, cell["r"]).singleton_fraction
    raise ValueError(model)


SWEEP_METRIC = {"sat": "sat_fraction", "npp": "mean_log2_scaled_opt", "clique": "mean_greedy_size",
                "perceptron": "median_singleton_fraction"}


def run_tasks(tasks: list, workers: int) -> list:
    if workers <= 1 or len(tasks) <= 1:
        return [sweep_task(t) for t in tasks]
    chunk = max(1, len(tasks) // (4 * workers))
    with ProcessPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(sweep_task, tasks, chunksize=chunk))


def cmd_sweep(args) -> dict:
    seeds = parse_range(args.seeds, integer=True)
    if not seeds:
        raise UsageError("--seeds is empty")
    cells = sweep_cells(args)
    tasks = [(args.model, cell, s) for cell in cells for s in seeds]
    results = run_tasks(tasks, args.workers)
    keys = list(cells[0].keys())
    metric = SWEEP_METRIC[args.model]
    lines = [",".join(keys + ["seeds", metric, "values"])]
    for ci, cell in enumerate(cells):
        vals = np.array(results[ci * len(seeds):(ci + 1) * len(seeds)], dtype=np.float64)
        finite = vals[np.isfinite(vals)]
        if args.model == "perceptron":
            agg = float(np.median(finite)) if len(finite) else None
        else:
            agg = float(np.mean(finite)) if len(finite) else None
        lines.append(",".join([fmt(cell[k]) for k in keys] + [str(len(seeds)), fmt(agg),
                                                            ";".join(fmt(v) for v in vals)]))
    return {"primary": csv_with_manifest(args, "\n".join(lines) + "\n")}


def crossing_point(xs, ys, level: float = 0.5):
    """First x where the piecewise-linear curve through (xs, ys) crosses ``level``."""
    for (x0, y0), (x1, y1) in zip(zip(xs, ys), zip(xs[1:], ys[1:])):
        if (y0 - level) * (y1 - level) <= 0 and y0 != y1:
            return x0 + (level - y0) * (x1 - x0) / (y1 - y0)
    return None


# --- verification ---------------------------------------------------------------


def read_manifest(path: str) -> tuple[dict, str]:
    with open(path, encoding="utf-8") as fh:
        text = fh.read()
    if text.startswith("# "):
        first, _, _ = text.partition("\n")
        return json.loads(first[2:]), text
    return json.loads(text)["manifest"], text


def cmd_verify(args) -> dict:
    man, text = read_manifest(args.file)
    cfg = dict(man["config"])
    ns = argparse.Namespace(**cfg, out="-", summary=None, workers=1, config=None)
    handler = COMMANDS[man["command"]]
    if man["command"] == "sweep":
        seeds = parse_range(cfg["seeds"], integer=True)
        cell = sweep_cells(ns)[0]
        value = sweep_task((cfg["model"], cell, seeds[0]))
        lines = [ln for ln in text.splitlines() if not ln.startswith("#")]
        stored = lines[1].split(",")[-1].split(";")[0]
        ok = stored == fmt(value)
        detail = {"cell": cell, "seed": seeds[0], "stored": stored, "recomputed": fmt(value)}
    else:
        regenerated = handler(ns)["primary"]
        ok = regenerated == text
        detail = {"bytes": len(text)}
    return {"primary": dump_json({"verified": ok, "file": args.file, "command": man["command"], **detail}),
            "ok": ok}


COMMANDS = {
    "gen": cmd_gen,
    "solve": cmd_solve,
    "enumerate": cmd_enumerate,
    "spectrum": cmd_spectrum,
    "cluster": cmd_cluster,
    "theory": cmd_theory,
    "path": cmd_path,
    "stability": cmd_stability,
    "tuple-search": cmd_tuple_search,
    "chaos": cmd_chaos,
    "sweep": cmd_sweep,
    "verify": cmd_verify,
}


# --- argument parser ------------------------------------------------------------


def _model_args(p, models):
    if models is not None:
        p.add_argument("model", nargs="?", choices=models, help="instance family")
    p.add_argument("--n", type=int, help="dimension: items, nodes or variables")
    p.add_argument("--seed", type=int, default=0, help="instance seed (default 0)")
    p.add_argument("--p", type=float, default=0.5, help="edge probability for G(n, p) (default 0.5)")
    p.add_argument("--m", type=int, help="clauses (K-SAT) or constraints (perceptron)")
    p.add_argument("--k", type=int, default=3, help="literals per clause (default 3)")
    p.add_argument("--alpha", type=float, help="NPP value exponent, or K-SAT clause density m/n")
    p.add_argument("--order", type=int, default=2, help="p-spin interaction order (default 2)")
    p.add_argument("--kappa", type=float, help="perceptron margin")
    p.add_argument("--kappa-scale", type=float, help="perceptron margin as a multiple of sqrt(n)")
    p.add_argument("--weights", help="explicit NPP weights, comma separated")


def _path_args(p):
    p.add_argument("--order-seed", type=int, help="seed of the resampling order (default seed+1)")
    p.add_argument("--rule", choices=["resample", "rotate"], default="resample",
                   help="interpolation rule for npp and pspin")


def _enum_args(p):
    p.add_argument("--threshold", type=float, help="explicit NPP value cutoff")
    p.add_argument("--kmin", type=int, help="minimum clique size (default: maximum size - 1)")
    p.add_argument("--mu", type=float, default=0.0, help="p-spin energy window above the ground state")
    p.add_argument("--cap", type=int, default=1 << 20, help="maximum number of stored solutions")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="ogplab",
        description="Overlap gap property experiments on random optimization problems.",
        epilog=RANGE_HELP + f" Worker count defaults to ${WORKERS_ENV} or 1.",
    )
    parser.add_argument("--version", action="version", version=f"ogplab {__version__}")
    parser.add_argument("--config", help="JSON file of option values; command-line flags take precedence")
    sub = parser.add_subparsers(dest="command", metavar="COMMAND")

    def add(name, help_):
        p = sub.add_parser(name, help=help_, description=help_, epilog=RANGE_HELP)
        p.add_argument("--out", default="-", help="output file (default stdout)")
        p.add_argument("--workers", type=int, default=None, help=f"worker processes (default ${WORKERS_ENV} or 1)")
        return p

    p = add("gen", "Generate an instance and print its manifest.")
    _model_args(p, ["npp", "gnp", "ksat", "pspin", "perceptron"])

    p = add("solve", "Run one algorithm on one instance.")
    p.add_argument("algorithm", nargs="?", choices=["kk", "npp-opt", "greedy", "maxclique", "walksat", "dpll"])
    _model_args(p, None)
    p.add_argument("--order-seed", type=int, help="greedy node order seed (default identity order)")
    p.add_argument("--rng-seed", type=int, default=0, help="WalkSAT random stream seed")
    p.add_argument("--max-flips", type=int, default=100_000)
    p.add_argument("--noise", type=float, default=0.5)

    for name, help_ in [("enumerate", "Enumerate near-optimal solutions exhaustively."),
                        ("spectrum", "Pairwise overlap spectrum and overlap gap of an enumerated set."),
                        ("cluster", "Cluster decomposition of an enumerated set.")]:
        p = add(name, help_)
        _model_args(p, ["npp", "clique", "sat", "perceptron", "pspin"])
        _enum_args(p)
        if name == "spectrum":
            p.add_argument("--min-width", type=float, default=0.1, help="smallest reported gap width")
            p.add_argument("--floor", type=float, default=-1.0, help="ignore gaps below this value")
            p.add_argument("--quotient", action=argparse.BooleanOptionalAction, default=None,
                           help="take overlaps modulo global sign (default: on for npp)")
            p.add_argument("--include-self", action="store_true", help="count the self-overlap 1.0 as attained")
            p.add_argument("--verbose", action="store_true", help="list every qualifying gap")
        if name == "cluster":
            p.add_argument("--r", type=int, default=1, help="flip radius (default 1)")

    p = add("theory", "First-moment exponents, roots and the clique overlap curve.")
    p.add_argument("--clique-curve", action="store_true", help="CSV of clique overlap roots over a rho grid")
    p.add_argument("--npp-exponent", action="store_true", help="CSV of the NPP pair exponent over a rho grid")
    p.add_argument("--rho0", action="store_true", help="NPP overlap threshold rho0(alpha)")
    p.add_argument("--alpha", type=float)
    p.add_argument("--rho", type=float)
    p.add_argument("--grid", type=float, default=0.01, help="rho grid step (default 0.01)")

    p = add("path", "Describe an interpolation path at chosen steps.")
    _model_args(p, ["npp", "gnp", "ksat", "pspin", "perceptron"])
    _path_args(p)
    p.add_argument("--t", help="steps to materialize (range syntax; default 0 and T)")

    p = add("stability", "Run an algorithm along an interpolation path (CSV trace).")
    p.add_argument("algorithm", nargs="?", choices=["kk", "npp-opt", "greedy", "maxclique", "walksat", "dpll",
                                                    "ground", "constant"])
    _model_args(p, ["npp", "gnp", "ksat", "pspin", "perceptron"])
    _path_args(p)
    p.add_argument("--stride", type=int, help="evaluate every stride-th step (default T//200)")
    p.add_argument("--alg-order-seed", type=int, help="fixed greedy node order seed")
    p.add_argument("--rng-seed", type=int, default=0, help="WalkSAT random stream seed")
    p.add_argument("--max-flips", type=int, default=10_000)
    p.add_argument("--noise", type=float, default=0.5)
    p.add_argument("--gap-width", type=float, help="report whether some step moved this far (distance units)")
    p.add_argument("--summary", help="JSON summary output file")

    p = add("tuple-search", "Search m correlated NPP instances for an m-tuple inside (nu1, nu2).")
    p.add_argument("--n", type=int)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--order-seed", type=int)
    p.add_argument("--alpha", type=float)
    p.add_argument("--tuple-m", "--m", dest="tuple_m", type=int, default=3, help="tuple size m (default 3)")
    p.add_argument("--nu1", type=float)
    p.add_argument("--nu2", type=float)
    p.add_argument("--t", type=int, help="step along each branch (default T//2)")
    p.add_argument("--budget", type=int, default=10_000_000)
    p.add_argument("--mode", choices=["exhaustive", "random"], default="exhaustive")
    p.add_argument("--cap", type=int, default=1 << 20)

    p = add("chaos", "Near ground states of a p-spin instance before and after partial resampling.")
    p.add_argument("--n", type=int)
    p.add_argument("--order", type=int, default=2, help="interaction order p (default 2)")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--order-seed", type=int)
    p.add_argument("--rho", type=float, default=0.25, help="fraction of couplings redrawn")
    p.add_argument("--mu", type=float, default=0.0, help="energy window above the ground state")

    p = add("sweep", "Parameter grid x seeds; one CSV row per grid cell.")
    p.add_argument("model", nargs="?", choices=["sat", "npp", "clique", "perceptron"])
    p.add_argument("--n", default="50", help="dimension grid")
    p.add_argument("--k", default="3", help="clause length grid (sat)")
    p.add_argument("--alpha", help="clause density grid (sat), e.g. 3.0:5.5:0.5")
    p.add_argument("--m", default="8", help="constraint count grid (perceptron)")
    p.add_argument("--p", type=float, default=0.5, help="edge probability (clique)")
    p.add_argument("--kappa-scale", type=float, default=0.3, help="perceptron margin / sqrt(n)")
    p.add_argument("--r", type=int, default=1, help="cluster flip radius (perceptron)")
    p.add_argument("--seeds", default="0..9", help="seed list or range, e.g. 0..99")

    p = sub.add_parser("verify", help="Re-run a 1-seed spot check from an output file's manifest.")
    p.add_argument("file")
    p.add_argument("--out", default="-")
    p.add_argument("--workers", type=int, default=None)
    return parser


def parse(argv: list[str]) -> argparse.Namespace:
    pre = argparse.ArgumentParser(add_help=False)
    pre.add_argument("--config")
    known, rest = pre.parse_known_args(argv)
    parser = build_parser()
    if known.config:
        try:
            with open(known.config, encoding="utf-8") as fh:
                text = fh.read()
            # an output file works as a config: take its embedded manifest
            cfg = json.loads(text[2:].partition("\n")[0] if text.startswith("# ") else text)
        except (OSError, json.JSONDecodeError) as exc:
            raise UsageError(f"cannot read config {known.config}: {exc}") from exc
        cfg = cfg.get("manifest", cfg)
        if isinstance(cfg.get("config"), dict) and "command" in cfg:
            cfg = {**cfg["config"], "command": cfg["command"]}
        command = cfg.pop("command", None)
        if not any(a in COMMANDS for a in rest):
            if command is None:
                raise UsageError("config has no 'command' and none was given")
            rest = [command] + rest
        command = next(a for a in rest if a in COMMANDS)
        sub = parser._subparsers._group_actions[0].choices[command]  # noqa: SLF001
        valid = {a.dest for a in sub._actions}  # noqa: SLF001
        unknown = set(cfg) - valid
        if unknown:
            raise UsageError(f"unknown config keys: {', '.join(sorted(unknown))}")
        sub.set_defaults(**cfg)
    args = parser.parse_args(rest)
    if args.command is None:
        parser.print_help(sys.stderr)
        raise UsageError("no command given")
    args.config = known.config
    if getattr(args, "workers", None) is None:
        try:
            args.workers = int(os.environ.get(WORKERS_ENV, "1"))
        except ValueError as exc:
            raise UsageError(f"${WORKERS_ENV} must be an integer") from exc
    if args.workers < 1:
        raise UsageError("--workers must be at least 1")
    for name in ("model", "algorithm"):
        if name in vars(args) and getattr(args, name) is None:
            raise UsageError(f"{args.command}: missing {name}")
    return args


def _write(path: str | None, text: str) -> None:
    if path is None:
        return
    if path == "-":
        sys.stdout.write(text)
        return
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(text)


def run(argv: list[str] | None = None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    try:
        args = parse(argv)
    except UsageError as exc:
        print(f"ogplab: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except SystemExit as exc:  # argparse: --help, --version, bad flags
        return int(exc.code or 0)
    try:
        result = COMMANDS[args.command](args)
    except GuardError as exc:
        print(f"ogplab: refused: {exc}", file=sys.stderr)
        return EXIT_GUARD
    except (UsageError, ValueError) as exc:
        print(f"ogplab: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except OSError as exc:
        print(f"ogplab: cannot read input: {exc}", file=sys.stderr)
        return EXIT_USAGE
    try:
        _write(args.out, result["primary"])
        if "summary" in result:
            _write(getattr(args, "summary", None), result["summary"])
    except OSError as exc:
        print(f"ogplab: cannot write output: {exc}", file=sys.stderr)
        return EXIT_OUTPUT
    if result.get("ok") is False:
        return EXIT_VERIFY
    return EXIT_OK


def main() -> None:
    sys.exit(run())
