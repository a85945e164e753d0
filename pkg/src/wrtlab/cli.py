"""Command line interface: ``wrtlab <subcommand> [options]``.

Subcommands grow trees, compute statistics, run urns, sample limit laws,
run the exact certificates, grow multigraphs and run the acceptance suite.
The exit code is 0 exactly when every requested check passes.
"""
from __future__ import annotations

import argparse
import csv
import json
import math
import sys
from pathlib import Path

import numpy as np

from .errors import ParameterError
from .harness import ConfigError, replicate_rng, run_experiment
from .sequences import FitnessSequence, WeightSequence, make_constant_fitness, sequence_from_json

DEFAULT_SEED = 0


def _json_arg(text: str):
    p = Path(text)
    if not text.lstrip().startswith(("{", "[")) and p.exists():
        text = p.read_text()
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise argparse.ArgumentTypeError(f"invalid JSON: {exc}") from exc


def _emit(obj, args) -> None:
    text = json.dumps(obj, indent=2, default=float)
    if args.out and args.format == "json":
        Path(args.out).write_text(text + "\n")
    else:
        print(text)


def _write_rows(path, header, rows) -> None:
    fh = open(path, "w", newline="") if path else sys.stdout
    try:
        w = csv.writer(fh)
        w.writerow(header)
        for r in rows:
            w.writerow(r)
    finally:
        if path:
            fh.close()


def _grow(model: str, seq, n: int, rng):
    from .trees import grow_pat, grow_wrt
    if model == "wrt":
        if not isinstance(seq, WeightSequence):
            raise ParameterError("--model wrt needs a weight sequence")
        return grow_wrt(seq, n, rng)[0]
    if not isinstance(seq, FitnessSequence):
        raise ParameterError("--model pat needs a fitness sequence")
    return grow_pat(seq, n, rng)[0]


def _default_seq(model: str) -> dict:
    if model == "wrt":
        return {"kind": "power", "gamma": 1.0, "C": 1.0}
    return {"kind": "constant_fitness", "a": 1.0, "b": 1.0}


# ---------------------------------------------------------------------------
# Subcommands
# ---------------------------------------------------------------------------


def cmd_grow(args) -> int:
    from .trees import write_trace_csv, write_tree_csv
    seq = sequence_from_json(args.seq or _default_seq(args.model), args.n)
    tree = _grow(args.model, seq, args.n, np.random.default_rng(args.seed))
    if args.format == "json":
        _emit({"n": tree.n, "height": tree.height, "parent": tree.parent.tolist()}, args)
    elif args.trace:
        if args.out:
            write_trace_csv(tree.trace, args.out)
        else:
            _write_rows(None, ["step", "choice"],
                        [[m, int(k)] for m, k in enumerate(tree.trace.choices, start=2)])
    elif args.out:
        write_tree_csv(tree, args.out)
    else:
        _write_rows(None, ["i", "parent"],
                    [[i, int(p) if i > 1 else ""] for i, p in enumerate(tree.parent, start=1)])
    return 0


def cmd_stats(args) -> int:
    from . import stats
    seq = sequence_from_json(args.seq or _default_seq(args.model), args.n)
    rng = np.random.default_rng(args.seed)
    tree = _grow(args.model, seq, args.n, rng)
    gamma = args.gamma
    if args.stat == "profile":
        prof = stats.profile(tree)
        pred = stats.gaussian_profile_prediction(tree.n, gamma, np.arange(len(prof))) if tree.n >= 3 else None
        if args.format == "json":
            _emit({"counts": prof.counts.tolist(),
                   "prediction": None if pred is None else pred.tolist()}, args)
        else:
            rows = [[k, int(c), "" if pred is None else repr(float(pred[k]))]
                    for k, c in enumerate(prof.counts)]
            _write_rows(args.out, ["k", "count", "prediction"], rows)
        return 0
    if args.stat == "height":
        pa = stats.profile_asymptotics(gamma)
        obj = {"n": tree.n, "height": tree.height, "height_over_log_n": tree.height / math.log(tree.n),
               "height_constant": pa.height_constant}
        if isinstance(seq, WeightSequence):
            obj["f_n"] = stats.expected_height_sum(seq, tree.n)
    elif args.stat == "laplace":
        z = args.z
        obj = {"z": z, "log_laplace": stats.log_laplace_profile(tree, z),
               "normalized_N": stats.normalized_N(tree, gamma, z)}
        if isinstance(seq, WeightSequence):
            obj["C_n"] = stats.C_n(seq, z, tree.n)
            obj["M_n"] = stats.M_n(tree, seq, z)
    elif args.stat == "measures":
        b = make_constant_fitness(1.0, 1.0, tree.n)
        k = min(2, tree.n)
        obj = {"k": k, "uniform": stats.subtree_mass(stats.tree_measure(tree, "uniform"), tree, k),
               "degree": stats.subtree_mass(stats.tree_measure(tree, "degree", fitness=b), tree, k)
               if tree.n >= 2 else None}
        if isinstance(seq, WeightSequence):
            obj["weight"] = stats.subtree_mass(stats.tree_measure(tree, "weight", weights=seq), tree, k)
    elif args.stat == "mrca":
        if not isinstance(seq, WeightSequence):
            raise ParameterError("mrca needs a weight sequence")
        reg = stats.measure_regime(seq) if seq.n_max >= 16 else None
        law = {}
        if reg is not None and reg.regime not in ("atomic", "single_leaf"):
            law = {k: stats.mrca_law(seq, k) for k in range(1, min(10, seq.n_max) + 1)}
        sample = stats.sample_mrca_pairs(seq, tree.n, args.replicates, rng)
        obj = {"regime": None if reg is None else reg.regime, "law": law,
               "empirical": {k: float(np.mean(sample == k)) for k in range(1, min(10, tree.n) + 1)}}
    else:
        deg = tree.degrees
        obj = {"n": tree.n, "degrees": deg[:10].tolist(),
               "scaled": (deg[:10] * tree.n ** -(1 - gamma)).tolist() if gamma < 1 else None}
        if isinstance(seq, WeightSequence):
            obj["expected"] = [stats.degree_expectation(seq, k, tree.n) for k in range(1, min(10, tree.n) + 1)]
    if args.format == "csv" and args.out:
        _write_rows(args.out, ["key", "value"], [[k, json.dumps(v, default=float)] for k, v in obj.items()])
    else:
        _emit(obj, args)
    return 0


def cmd_urn(args) -> int:
    from .urns import grow_pat_via_urns, run_immigration_urn, run_time_dependent_urn
    params = args.params or {}
    R = args.replicates
    rows = []
    if args.kind == "timedep":
        a, b = params.get("a", 1.0), params.get("b", 1.0)
        s = params.get("s", 1.0)
        rng = np.random.default_rng(args.seed)
        traj = run_time_dependent_urn(a, b, params.get("start", 1), s, args.n - params.get("start", 1),
                                      rng, replicates=R, record="final")
        for i in range(R):
            rows.append([i, args.n, repr(float(traj.red[i, -1])), repr(float(traj.total[i, -1]))])
    else:
        fit = sequence_from_json(params.get("fitness", {"kind": "constant_fitness", "a": 1.0, "b": 1.0}),
                                 args.n)
        for i in range(R):
            rng = replicate_rng(args.seed, i)
            if args.kind == "immigration":
                traj = run_immigration_urn(fit, args.n, rng, params.get("method", "auto"))
                red, total = traj.red[-1], traj.total[-1]
            else:
                tree, _ = grow_pat_via_urns(fit, args.n, rng, params.get("mode", "exchangeable"))
                red = fit.values(args.n)[0] + tree.degrees[0]
                total = float(np.sum(fit.values(args.n))) + args.n - 1
            rows.append([i, args.n, repr(float(red)), repr(float(total))])
    _write_rows(args.out, ["replicate", "n", "red", "total"], rows)
    return 0


def cmd_limits(args) -> int:
    from . import limits
    from .sequences import sample_beta_coupling
    p = args.params or {}
    rng = np.random.default_rng(args.seed)
    S = args.samples
    orders = p.get("moments", [1, 2])
    exact = {}
    if args.law == "beta":
        a, b = p.get("a", 1.0), p.get("b", 1.0)
        x = rng.beta(a, b, S)
        exact = {q: limits.beta_moment(a, b, q) for q in orders}
    elif args.law == "ml":
        al, th = p.get("alpha", 0.5), p.get("theta", 0.5)
        x = limits.sample_mlmc(al, th, 1, p.get("N", 10**4), rng, replicates=S)[:, 0]
        exact = {q: limits.ml_moment(al, th, q) for q in orders}
    elif args.law == "mlmc":
        al, th, k = p.get("alpha", 0.5), p.get("theta", 0.5), p.get("k", 1)
        x = limits.sample_mlmc(al, th, k, p.get("N", 10**4), rng, replicates=S)[:, k - 1]
        fit = make_constant_fitness(th / al, 1 / al - 1, 8)
        spec = limits.limit_chain_spec(fit)
        exact = {q: limits.limit_chain_moment(spec, k, q) for q in orders}
    elif args.law == "ggp":
        z, r, k = p.get("z", 1.0), p.get("r", 1.0), p.get("k", 1)
        x = limits.sample_ggp(limits.GGPSpec(z, r), k, rng, size=S)[:, k - 1]
    elif args.law == "ipggp":
        a, pattern, k = p.get("a", 1.0), p.get("pattern", [0, 1]), p.get("k", 1)
        x = limits.ipggp_scale(pattern) * limits.sample_ipggp(a, pattern, k, rng, size=S)[:, k - 1]
        from .sequences import make_periodic_fitness
        spec = limits.limit_chain_spec(make_periodic_fitness(a, pattern, 8))
        exact = {q: limits.limit_chain_moment(spec, k, q) for q in orders}
    else:
        fit = sequence_from_json(p.get("fitness", {"kind": "constant_fitness", "a": 1.0, "b": 1.0}), 8)
        k = p.get("k", 1)
        spec = limits.limit_chain_spec(fit, p.get("c"))
        x = np.array([limits.sample_limit_chain(fit, spec.c, k, p.get("N", 10**4), rng)[k - 1]
                      for _ in range(S)])
        exact = {q: limits.limit_chain_moment(spec, k, q) for q in orders}
    obj = {str(q): float(np.mean(x ** q)) for q in orders}
    if exact:
        obj["exact"] = {str(q): v for q, v in exact.items()}
    _emit(obj, args)
    return 0


def cmd_verify(args) -> int:
    if args.target == "theorem1":
        from .oracle import certify_theorem1
        fit = sequence_from_json(args.fitness or {"kind": "constant_fitness", "a": 1.0, "b": 1.0}, max(args.n, 1))
        if not isinstance(fit, FitnessSequence):
            raise ParameterError("--fitness must describe a fitness sequence")
        rep = certify_theorem1(fit, args.n, args.tol)
    else:
        from .pagraph import certify_pagraph_coupling
        rep = certify_pagraph_coupling(args.seed_degrees, args.m, args.alpha, args.n, args.tol)
    _emit(rep.to_json(), args)
    return 0 if rep.passed else 1


def cmd_pagraph(args) -> int:
    from .pagraph import grow_pa_graph, write_edge_csv
    summary = []
    for i in range(args.replicates):
        g = grow_pa_graph(args.seed_degrees, args.m, args.alpha, args.n, replicate_rng(args.seed, i))
        if args.out:
            path = Path(args.out)
            if args.replicates > 1:
                path = path.with_name(f"{path.stem}_r{i}{path.suffix}")
            write_edge_csv(g, path)
        elif args.replicates == 1:
            _write_rows(None, ["u", "v"], g.edges.tolist())
        deg = g.degrees()
        summary.append({"replicate": i, "max_degree": float(deg.max()),
                        "seed_degrees": deg[:g.k].tolist()})
    if args.replicates > 1 or args.out:
        print(json.dumps(summary), file=sys.stderr)
    return 0


def cmd_accept(args) -> int:
    from .acceptance import DEFAULT_SEED as ACCEPT_SEED, run_acceptance_suite
    seed = ACCEPT_SEED if args.seed is None else args.seed
    report = run_acceptance_suite(args.level, seed, args.criteria or None,
                                  echo=lambda s: print(s, file=sys.stderr))
    _emit(report, args)
    return 0 if report["pass"] else 1


def cmd_run(args) -> int:
    res = run_experiment(args.config)
    print(json.dumps(res.summary["checks"] or {"replicates": res.summary["replicates"]}))
    return 0 if res.summary["pass"] else 1


# ---------------------------------------------------------------------------
# Parser
# ---------------------------------------------------------------------------


def _seed_degrees(text: str) -> list:
    return [float(x) for x in text.split(",") if x.strip()]


def build_parser() -> argparse.ArgumentParser:
    def global_flags(parser, suppress):
        d = (lambda v: argparse.SUPPRESS) if suppress else (lambda v: v)
        parser.add_argument("--seed", type=int, default=d(None), help="master seed (u64)")
        parser.add_argument("--threads", type=int, default=d(1), help="worker threads")
        parser.add_argument("--out", default=d(None), help="output path (stdout if absent)")
        parser.add_argument("--format", choices=["csv", "json"], default=d(None))

    # flags are accepted before or after the subcommand; the subcommand
    # copies suppress their defaults so they never overwrite earlier values
    common = argparse.ArgumentParser(add_help=False)
    global_flags(common, suppress=True)

    ap = argparse.ArgumentParser(prog="wrtlab", description=__doc__)
    global_flags(ap, suppress=False)
    sub = ap.add_subparsers(dest="command", required=True)

    g = sub.add_parser("grow", parents=[common], help="grow one tree")
    g.add_argument("--model", choices=["wrt", "pat"], default="wrt")
    g.add_argument("--seq", type=_json_arg, default=None)
    g.add_argument("--n", type=int, required=True)
    g.add_argument("--trace", action="store_true", help="write step,choice instead of i,parent")
    g.set_defaults(func=cmd_grow)

    s = sub.add_parser("stats", parents=[common], help="statistics of one tree")
    s.add_argument("--stat", choices=["profile", "height", "laplace", "measures", "mrca", "degrees"],
                   required=True)
    s.add_argument("--model", choices=["wrt", "pat"], default="wrt")
    s.add_argument("--seq", type=_json_arg, default=None)
    s.add_argument("--n", type=int, default=1000)
    s.add_argument("--z", type=float, default=0.5)
    s.add_argument("--gamma", type=float, default=1.0)
    s.add_argument("--replicates", type=int, default=10**4, help="pairs for --stat mrca")
    s.set_defaults(func=cmd_stats)

    u = sub.add_parser("urn", parents=[common], help="run urns")
    u.add_argument("--kind", choices=["timedep", "immigration", "nested-pat"], required=True)
    u.add_argument("--params", type=_json_arg, default=None)
    u.add_argument("--n", type=int, required=True)
    u.add_argument("--replicates", type=int, default=1)
    u.set_defaults(func=cmd_urn)

    li = sub.add_parser("limits", parents=[common], help="sample limit laws and print moments")
    li.add_argument("--law", choices=["beta", "ml", "mlmc", "ggp", "ipggp", "chain"], required=True)
    li.add_argument("--params", type=_json_arg, default=None)
    li.add_argument("--samples", type=int, default=10**4)
    li.set_defaults(func=cmd_limits, default_format="json")

    v = sub.add_parser("verify", parents=[common], help="exact certificates")
    v.add_argument("target", choices=["theorem1", "pagraph"])
    v.add_argument("--fitness", type=_json_arg, default=None)
    v.add_argument("--n", type=int, required=True)
    v.add_argument("--tol", type=float, default=1e-10)
    v.add_argument("--seed-degrees", type=_seed_degrees, default=[1.0, 1.0])
    v.add_argument("--m", type=int, default=2)
    v.add_argument("--alpha", type=float, default=0.0)
    v.set_defaults(func=cmd_verify, default_format="json")

    pg = sub.add_parser("pagraph", parents=[common], help="grow (m, alpha) multigraphs")
    pg.add_argument("--seed-degrees", type=_seed_degrees, default=[1.0, 1.0])
    pg.add_argument("--m", type=int, default=2)
    pg.add_argument("--alpha", type=float, default=0.0)
    pg.add_argument("--n", type=int, required=True)
    pg.add_argument("--replicates", type=int, default=1)
    pg.set_defaults(func=cmd_pagraph)

    ac = sub.add_parser("accept", parents=[common], help="run the acceptance suite")
    ac.add_argument("--level", choices=["fast", "full"], default="fast")
    ac.add_argument("--criteria", type=int, nargs="*", default=None)
    ac.set_defaults(func=cmd_accept, default_format="json")

    ex = sub.add_parser("run", parents=[common], help="run an experiment config (JSON)")
    ex.add_argument("config")
    ex.set_defaults(func=cmd_run)
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    if args.command != "accept" and args.seed is None:
        args.seed = DEFAULT_SEED
    if args.format is None:
        args.format = getattr(args, "default_format", "csv")
    try:
        return int(args.func(args))
    except (ParameterError, ConfigError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
