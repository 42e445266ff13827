"""Command-line front end.

Subcommands: eval (exact oracles), simulate (Monte Carlo against an oracle),
verify (grid certificates and exact checks), polytope (geometry dump),
sampford (subset-sampling modes). Exit codes: 0 pass, 1 statistical or
verification failure, 2 usage error, 3 resource limit.
"""
from __future__ import annotations

import argparse
import json
import sys
from fractions import Fraction

from .domains import AffineCubeDomain, resample_domination_check
from .errors import ResourceLimitError, UsageError
from .faces import BoundCertificate, check_1d, check_poly_bounded
from .harness import outcome_label, run_trials
from .lattice import (
    FactoryRecursion,
    LevelSchedule,
    TargetFunction,
    margin_certificate,
)
from .polytopes import (
    CombinatorialFactory,
    PolytopeP,
    facet_separation_check,
    free_triangle,
    polytope_separation_check,
)
from .programs import exact_eval, run, tree_from_json
from .rationals import format_rational, parse_bias_vector, parse_point, parse_rational
from .sampford import (
    BoundarySampford,
    all_subsets,
    classic_sampford,
    naive_sampford,
    subset_prob_closed,
)

EXIT_PASS = 0
EXIT_FAIL = 1
EXIT_USAGE = 2
EXIT_RESOURCE = 3


def _load_json(path_or_literal: str):
    """Accept either a JSON literal or a path to a JSON file."""
    s = path_or_literal.strip()
    if s.startswith(("{", "[", '"')) or s[:1].isdigit() or s.startswith("-"):
        return json.loads(s)
    with open(path_or_literal) as fh:
        return json.load(fh)


def _target_from_args(args) -> TargetFunction:
    if getattr(args, "poly", None):
        doc = _load_json(args.poly)
        return TargetFunction.from_polynomial(int(args.n), doc, "polynomial")
    if getattr(args, "named", None):
        return _named_target(args.named)
    raise UsageError("supply a target via --poly or --named")


def _named_target(name: str) -> TargetFunction:
    registry = {
        "half": TargetFunction(1, lambda p: Fraction(1, 2), "half"),
        "affine14": TargetFunction(1, lambda p: (1 + 2 * p[0]) / 4, "affine14"),
        "ratio": TargetFunction(
            2, lambda p: p[0] / (p[0] + p[1]), "ratio"
        ),
    }
    if name not in registry:
        raise UsageError(f"unknown named target {name!r}; choose from {sorted(registry)}")
    return registry[name]


def _schedule_from_args(args) -> LevelSchedule:
    return LevelSchedule(
        t_const=args.t, max_level=args.levels, level_cap=getattr(args, "level_cap", 512)
    )


def _emit(args, json_doc, text: str) -> None:
    if getattr(args, "json", False):
        print(json.dumps(json_doc, indent=2))
    else:
        sys.stdout.write(text)


# -- eval -----------------------------------------------------------------------


def cmd_eval(args) -> int:
    at = parse_point(_load_json(args.at))
    if args.tree:
        tree = tree_from_json(_load_json(args.tree))
        v = exact_eval(tree, at)
        _emit(args, {"value": format_rational(v)}, format_rational(v) + "\n")
        return EXIT_PASS
    if args.polytope:
        P = PolytopeP(AffineCubeDomain.from_json(_load_json(args.polytope)))
        mix = P.mixture(at)
        rows = [
            {"vertex": outcome_label(v), "coeff": format_rational(c)}
            for v, c in mix.items()
        ]
        text = "vertex,coeff\n" + "".join(
            f"{outcome_label(v)},{format_rational(c)}\n" for v, c in mix.items()
        )
        _emit(args, rows, text)
        return EXIT_PASS
    if args.subset_k:
        k = int(args.subset_k)
        rows = []
        text = "subset,prob\n"
        for U in all_subsets(len(at), k):
            pr = subset_prob_closed(at, U)
            rows.append({"subset": outcome_label(U), "prob": format_rational(pr)})
            text += f"{outcome_label(U)},{format_rational(pr)}\n"
        _emit(args, rows, text)
        return EXIT_PASS
    if args.level:
        target = _target_from_args(args)
        domain = eps = None
        if args.domain:
            domain = AffineCubeDomain.from_json(_load_json(args.domain))
            eps = parse_rational(args.eps)
        engine = FactoryRecursion(
            target, _schedule_from_args(args), domain=domain, eps=eps
        )
        v = engine.value(int(args.level), at)
        g = engine.success_prob(int(args.level), at)
        _emit(
            args,
            {"residual": format_rational(v), "success_prob": format_rational(g)},
            f"residual={format_rational(v)} success_prob={format_rational(g)}\n",
        )
        return EXIT_PASS
    raise UsageError("eval needs one of --tree/--polytope/--subset-k/--level")


# -- simulate --------------------------------------------------------------------


def cmd_simulate(args) -> int:
    biases = parse_bias_vector(_load_json(args.p))
    if args.tree:
        tree = tree_from_json(_load_json(args.tree))
        oracle_p = exact_eval(tree, biases)
        sampler = lambda coins: run_tree(tree, coins)
        sampler_id = "tree"
    else:
        target = _target_from_args(args)
        domain = eps = None
        if args.domain:
            domain = AffineCubeDomain.from_json(_load_json(args.domain))
            eps = parse_rational(args.eps)
        engine = FactoryRecursion(target, _schedule_from_args(args), domain=domain, eps=eps)
        oracle_p = target(biases)
        program = engine.factory_program()
        sampler = program.sample
        sampler_id = program.name
    oracle = {1: oracle_p, 0: 1 - oracle_p}
    report = run_trials(
        sampler, biases, args.trials, seed=args.seed, budget=args.budget,
        oracle=oracle, sampler_id=sampler_id,
    )
    _emit(args, report.to_json(), report.to_csv())
    ok = report.chi2 is None or report.chi2.passed
    return EXIT_PASS if ok else EXIT_FAIL


def run_tree(tree, coins) -> int:
    from .combinators import _walk_tree

    return _walk_tree(tree, coins)


# -- verify ----------------------------------------------------------------------


def cmd_verify(args) -> int:
    if args.check == "margin":
        target = _target_from_args(args)
        domain = eps = None
        if args.domain:
            domain = AffineCubeDomain.from_json(_load_json(args.domain))
            eps = parse_rational(args.eps)
        engine = FactoryRecursion(target, _schedule_from_args(args), domain=domain, eps=eps)
        report = margin_certificate(engine, mesh_den=args.mesh, max_level=args.levels)
        _emit(args, report.to_json(), f"margin certificate holds={report.holds} "
              f"worst_margin={format_rational(report.worst_margin)}\n")
        return EXIT_PASS if report.holds else EXIT_FAIL
    if args.check == "domination":
        domain = AffineCubeDomain.from_json(_load_json(args.domain))
        p = parse_point(_load_json(args.p))
        eps = parse_rational(args.eps)
        import random

        rng = random.Random(args.seed)
        ok = True
        for _ in range(args.events):
            marked = rng.random()
            event = lambda pt, m=marked: (hash(pt) & 0xFFFF) / 0x10000 < m
            rep = resample_domination_check(domain, p, args.t, eps, event)
            ok = ok and rep.holds
        _emit(args, {"holds": ok, "events": args.events},
              f"domination holds={ok} over {args.events} random events\n")
        return EXIT_PASS if ok else EXIT_FAIL
    if args.check == "facet-witness":
        if args.free_triangle:
            vertices, facets = free_triangle()
            rep = facet_separation_check(vertices, facets)
        else:
            P = PolytopeP(AffineCubeDomain.from_json(_load_json(args.domain)))
            rep = polytope_separation_check(P)
        _emit(args, {"holds": rep.holds, "counterexamples": len(rep.counterexamples)},
              f"facet-witness holds={rep.holds} "
              f"counterexamples={len(rep.counterexamples)}\n")
        return EXIT_PASS if rep.holds else EXIT_FAIL
    if args.check == "face-bound":
        tree = tree_from_json(_load_json(args.tree))
        from .programs import exact_eval as ev, n_coins

        n = max(1, n_coins(tree))
        cert = BoundCertificate(parse_rational(args.c), int(args.m))
        domain = None
        if args.domain:
            domain = AffineCubeDomain.from_json(_load_json(args.domain))
        reports = check_poly_bounded(lambda p: ev(tree, p), n, cert, args.mesh, domain)
        ok = all(r.passed for r in reports)
        _emit(args, [r.to_json() for r in reports],
              f"face-bound holds={ok} ({len(reports)} faces)\n")
        return EXIT_PASS if ok else EXIT_FAIL
    if args.check == "scalar":
        tree = tree_from_json(_load_json(args.tree))
        from .programs import exact_eval as ev

        rep = check_1d(lambda p: ev(tree, p), int(args.m), args.mesh)
        _emit(args, {"holds": rep.passed, "constant": rep.constant},
              f"scalar-bound holds={rep.passed}\n")
        return EXIT_PASS if rep.passed else EXIT_FAIL
    raise UsageError(f"unknown verify check {args.check!r}")


# -- polytope --------------------------------------------------------------------


def cmd_polytope(args) -> int:
    P = PolytopeP(AffineCubeDomain.from_json(_load_json(args.domain)))
    doc = {
        "n": P.n,
        "dim": P.dim,
        "vertices": [outcome_label(v) for v in P.vertices],
        "facets": [
            {"coordinate": i, "bound": format_rational(s), "vertices": len(m)}
            for i, s, m in P.facets()
        ],
        "triangulation_sizes": {
            outcome_label(w): len(P.fan_triangulation(w)) for w in P.vertices
        },
    }
    text = f"dim={P.dim} vertices={len(P.vertices)} facets={len(P.facets())}\n"
    for v in P.vertices:
        text += f"vertex {outcome_label(v)} fan_size={len(P.fan_triangulation(v))}\n"
    if args.at:
        at = parse_point(_load_json(args.at))
        mix = P.mixture(at)
        doc["mixture"] = {outcome_label(v): format_rational(c) for v, c in mix.items()}
        text += "vertex,coeff\n" + "".join(
            f"{outcome_label(v)},{format_rational(c)}\n" for v, c in mix.items()
        )
    if args.sample:
        factory = CombinatorialFactory(P, _schedule_from_args(args), parse_rational(args.eps))
        at = parse_point(_load_json(args.at)) if args.at else None
        if at is None:
            raise UsageError("--sample needs --at biases")
        oracle = P.mixture(at)
        report = run_trials(
            factory.sample, at, args.trials, seed=args.seed, budget=args.budget,
            oracle=oracle, sampler_id="combinatorial-factory",
        )
        doc["simulation"] = report.to_json()
        text += report.to_csv()
        ok = report.chi2 is None or report.chi2.passed
        _emit(args, doc, text)
        return EXIT_PASS if ok else EXIT_FAIL
    _emit(args, doc, text)
    return EXIT_PASS


# -- sampford --------------------------------------------------------------------


def cmd_sampford(args) -> int:
    biases = parse_bias_vector(_load_json(args.p))
    n, k = len(biases), args.k
    oracle = {U: subset_prob_closed(biases, U) for U in all_subsets(n, k)}
    if args.mode == "classic":
        sampler = lambda coins: classic_sampford(coins, n, k)
    elif args.mode == "naive":
        sampler = lambda coins: naive_sampford(coins, n, k)
    else:
        schedule = _schedule_from_args(args)
        boundary = BoundarySampford(n, k, schedule, parse_rational(args.eps))
        sampler = boundary.sample
    report = run_trials(
        sampler, biases, args.trials, seed=args.seed, budget=args.budget,
        oracle=oracle, sampler_id=f"sampford-{args.mode}",
    )
    _emit(args, report.to_json(), report.to_csv())
    ok = report.chi2 is None or report.chi2.passed
    return EXIT_PASS if ok else EXIT_FAIL


# -- wiring ----------------------------------------------------------------------


def _common(parser, trials_default=100000):
    parser.add_argument("--seed", type=int, default=0)
    parser.add_argument("--trials", type=int, default=trials_default)
    parser.add_argument("--budget", type=int, default=None)
    parser.add_argument("--mesh", type=int, default=16)
    parser.add_argument("--json", action="store_true", help="emit JSON instead of CSV/text")
    parser.add_argument("--csv", action="store_true", help="emit CSV/text (default)")


def _engine_opts(parser):
    parser.add_argument("--t", type=int, default=64, help="flips per coin per level")
    parser.add_argument("--levels", type=int, default=4, help="certificate depth")
    parser.add_argument("--level-cap", dest="level_cap", type=int, default=512)
    parser.add_argument("--eps", default="1/4", help="acceptance radius for domains")
    parser.add_argument("--domain", default=None, help="domain JSON (file or literal)")
    parser.add_argument("--poly", default=None, help="polynomial target JSON")
    parser.add_argument("--named", default=None, help="named target (half/affine14/ratio)")
    parser.add_argument("--n", type=int, default=1, help="coin count for --poly targets")


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="coinfactory",
        description="Exact sampling from functions of unknown coin biases.",
    )
    sub = ap.add_subparsers(dest="command", required=True)

    p_eval = sub.add_parser("eval", help="exact oracle evaluation")
    p_eval.add_argument("--tree", default=None)
    p_eval.add_argument("--polytope", default=None)
    p_eval.add_argument("--subset-k", dest="subset_k", default=None)
    p_eval.add_argument("--level", default=None)
    p_eval.add_argument("--at", required=True, help="rational point JSON")
    _engine_opts(p_eval)
    _common(p_eval)
    p_eval.set_defaults(func=cmd_eval)

    p_sim = sub.add_parser("simulate", help="Monte Carlo trials against the exact oracle")
    p_sim.add_argument("--tree", default=None)
    p_sim.add_argument("--p", required=True, help='bias JSON, e.g. {"p": ["1/2"]}')
    _engine_opts(p_sim)
    _common(p_sim)
    p_sim.set_defaults(func=cmd_simulate)

    p_ver = sub.add_parser("verify", help="grid certificates and exact checks")
    p_ver.add_argument("check", choices=["margin", "domination", "facet-witness", "face-bound", "scalar"])
    p_ver.add_argument("--tree", default=None)
    p_ver.add_argument("--p", default=None)
    p_ver.add_argument("--c", default="1")
    p_ver.add_argument("--m", default="0")
    p_ver.add_argument("--events", type=int, default=10)
    p_ver.add_argument("--free-triangle", action="store_true")
    _engine_opts(p_ver)
    _common(p_ver)
    p_ver.set_defaults(func=cmd_verify)

    p_poly = sub.add_parser("polytope", help="vertices, facets, triangulations, sampling")
    p_poly.add_argument("--domain", required=True)
    p_poly.add_argument("--at", default=None)
    p_poly.add_argument("--sample", action="store_true")
    p_poly.add_argument("--t", type=int, default=8)
    p_poly.add_argument("--levels", type=int, default=3)
    p_poly.add_argument("--level-cap", dest="level_cap", type=int, default=512)
    p_poly.add_argument("--eps", default="1/3")
    _common(p_poly, trials_default=10000)
    p_poly.set_defaults(func=cmd_polytope)

    p_samp = sub.add_parser("sampford", help="fixed-size subset sampling")
    p_samp.add_argument("--p", required=True)
    p_samp.add_argument("--k", type=int, required=True)
    p_samp.add_argument("--mode", choices=["classic", "boundary", "naive"], default="classic")
    p_samp.add_argument("--t", type=int, default=8)
    p_samp.add_argument("--levels", type=int, default=3)
    p_samp.add_argument("--level-cap", dest="level_cap", type=int, default=512)
    p_samp.add_argument("--eps", default="1/2")
    _common(p_samp, trials_default=10000)
    p_samp.set_defaults(func=cmd_sampford)

    return ap


def main(argv=None) -> int:
    ap = build_parser()
    try:
        args = ap.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code not in (0, None) else 0
    try:
        return args.func(args)
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except ResourceLimitError as exc:
        print(f"resource limit: {exc}", file=sys.stderr)
        return EXIT_RESOURCE


if __name__ == "__main__":
    sys.exit(main())
