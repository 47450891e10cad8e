"""Command-line front end.

Exit codes: 0 success, 1 usage or input error, 2 infeasibility, invariant
breach, failed check or replay mismatch.
"""
from __future__ import annotations

import argparse
import csv
import os
import sys
from concurrent.futures import ProcessPoolExecutor
from fractions import Fraction
from pathlib import Path

from . import generators
from .bounds import to_decimal
from .engine import InvariantError, simulate
from .harness import ALGS, CSV_COLUMNS, eval_param, evaluate, make_policy, parse_pair_grid, parse_theta_grid
from .hpd import format_decomposition, min_caterpillar_decomposition, size_heavy_decomposition
from .model import InstanceFormatError, TreeError, format_fraction, parse_instance, serialize_instance, serialize_solution
from .opt import OptLimitError, OptLimits, exact_opt, lemma2_check
from .traceio import TraceFormatError, render_trace, replay_against
from .verify import check_run

WORKERS_ENV = "MLAGG_WORKERS"

EXIT_OK, EXIT_USAGE, EXIT_CHECK = 0, 1, 2


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _fraction(text: str) -> Fraction:
    try:
        return Fraction(text)
    except (ValueError, ZeroDivisionError):
        raise argparse.ArgumentTypeError(f"not an exact rational: {text!r}") from None


def _load(path: str):
    try:
        return parse_instance(Path(path).read_bytes())
    except OSError as exc:
        raise UsageError(f"cannot read {path}: {exc.strerror}") from None
    except (InstanceFormatError, TreeError) as exc:
        raise UsageError(f"{path}: {exc}") from None


def _write(path: str | None, text: str) -> None:
    if path is None or path == "-":
        sys.stdout.write(text)
    else:
        Path(path).write_text(text)


def _limits(args) -> OptLimits:
    return OptLimits(max_requests=args.max_requests, max_vertices=args.max_vertices)


# subcommands


def cmd_gen(args) -> int:
    if args.corpus is not None:
        if not args.output:
            raise UsageError("--corpus needs -o <directory>")
        shapes = tuple(args.shape.split(",")) if args.shape else generators.SHAPES
        corpus = generators.gen_corpus(args.corpus, args.seed, args.n, args.m, shapes)
        paths = generators.write_corpus(corpus, args.output)
        print(f"wrote {len(paths)} instances to {args.output}")
        return EXIT_OK
    if not args.shape:
        raise UsageError("--shape is required")
    try:
        inst = generators.gen_instance(args.shape, args.n, args.m, args.seed, args.horizon, args.overlap)
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    _write(args.output, serialize_instance(inst))
    return EXIT_OK


def cmd_decompose(args) -> int:
    tree = _load(args.instance).tree
    dec = min_caterpillar_decomposition(tree) if args.decomp == "min" else size_heavy_decomposition(tree)
    sys.stdout.write(format_decomposition(dec, tree))
    return EXIT_OK


def _policy(args, inst):
    try:
        return make_policy(args.alg, inst, args.theta, args.theta1, args.theta2, args.decomp)
    except ValueError as exc:
        raise UsageError(str(exc)) from None


def cmd_run(args) -> int:
    inst = _load(args.instance)
    policy = _policy(args, inst)
    try:
        solution, trace = simulate(inst, policy)
    except InvariantError as exc:
        print(f"invariant breach: {exc}", file=sys.stderr)
        return EXIT_CHECK
    if args.solution:
        _write(args.solution, serialize_solution(solution))
    if args.trace:
        _write(args.trace, render_trace(trace, sorted(inst.tree.parent)))
    for rec in trace:
        print(f"t {format_fraction(rec.time)} cost {format_fraction(rec.cost)} "
              f"abar {format_fraction(rec.unanticipated_cost)}")
    abar = sum((r.unanticipated_cost for r in trace), Fraction(0))
    print(f"total {format_fraction(solution.total_cost)}")
    print(f"sum_abar {format_fraction(abar)}")
    rep = check_run(inst, policy, solution, trace)
    if not rep.feasible:
        print("infeasible solution", file=sys.stderr)
        return EXIT_CHECK
    return EXIT_OK


def cmd_replay(args) -> int:
    inst = _load(args.instance)
    try:
        golden = Path(args.golden).read_text()
    except OSError as exc:
        raise UsageError(f"cannot read {args.golden}: {exc.strerror}") from None
    solution, trace = simulate(inst, make_policy("depth", inst, args.theta))
    try:
        verdict = replay_against(golden, trace)
    except TraceFormatError as exc:
        raise UsageError(f"{args.golden}: {exc}") from None
    if verdict.ok:
        print("replay: pass")
        return EXIT_OK
    for m in verdict.mismatches:
        print(m)
    print(f"replay: FAIL ({len(verdict.mismatches)} differences)")
    return EXIT_CHECK


def cmd_opt(args) -> int:
    inst = _load(args.instance)
    try:
        res = exact_opt(inst, _limits(args), backend=args.backend)
    except OptLimitError as exc:
        raise UsageError(str(exc)) from None
    sys.stdout.write(res.format())
    return EXIT_OK


def cmd_check(args) -> int:
    inst = _load(args.instance)
    policy = _policy(args, inst)
    try:
        solution, trace = simulate(inst, policy)
    except InvariantError as exc:
        print(f"invariant breach: {exc}", file=sys.stderr)
        return EXIT_CHECK
    rep = check_run(inst, policy, solution, trace)
    print(f"ALG {format_fraction(rep.alg_cost)}")
    print(f"bound {format_fraction(rep.amortized_factor)} ({to_decimal(rep.amortized_factor, 12)})")
    amort = "lemma3" if args.alg == "depth" else "lemma5h"
    print(f"{amort} {str(rep.amortized_ok).lower()}: ALG <= bound * sum c(Abar) = "
          f"{format_fraction(rep.amortized_factor * rep.unanticipated_total)}")
    failed = not rep.ok
    try:
        opt = exact_opt(inst, _limits(args))
    except OptLimitError as exc:
        print(f"OPT skipped ({exc})")
    else:
        print(f"OPT {format_fraction(opt.cost)}")
        if opt.cost > 0:
            ratio = rep.alg_cost / opt.cost
            within = ratio <= rep.amortized_factor
            print(f"ratio {format_fraction(ratio)} ({to_decimal(ratio, 12)}) within bound: {str(within).lower()}")
            failed = failed or not within
        l2 = lemma2_check(trace, opt)
        print(f"lemma2 {str(l2.holds).lower()}: {l2}")
        failed = failed or not l2.holds
    budget = [v for v in rep.violations if v.check in ("anticipated_expanded", "depth_budget", "deepest_budget", "path_budget")]
    print(f"budget lemmas {str(not budget).lower()}")
    print(f"feasible {str(rep.feasible).lower()}")
    for v in rep.violations:
        print(f"violation {v}")
    return EXIT_CHECK if failed else EXIT_OK


def _sweep_jobs(args, instances):
    thetas = parse_theta_grid(args.thetas) if args.thetas else [None]
    pairs = parse_pair_grid(args.theta_pairs) if args.theta_pairs else [(None, None)]
    jobs = []
    for name, inst in instances:
        D = inst.tree.max_depth
        H = min_caterpillar_decomposition(inst.tree).dimension
        for alg in args.algs:
            if alg == "depth":
                for th in thetas:
                    jobs.append((name, inst, alg, th and eval_param(th, D=D, H=H), None, None))
            else:
                for a, b in pairs:
                    jobs.append((name, inst, alg, None, a and eval_param(a, D=D, H=H), b and eval_param(b, D=D, H=H)))
    return jobs


def _run_job(job, decomp, limits):
    name, inst, alg, th, t1, t2 = job
    return evaluate(name, inst, alg, th, t1, t2, decomp, limits)


def cmd_sweep(args) -> int:
    corpus = Path(args.corpus)
    if not corpus.is_dir():
        raise UsageError(f"{corpus} is not a directory")
    instances = [(p.stem, _load(str(p))) for p in sorted(corpus.glob("*.inst"))]
    try:
        jobs = _sweep_jobs(args, instances)
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    limits = _limits(args)
    workers = args.workers
    if workers > 1 and len(jobs) > 1:
        with ProcessPoolExecutor(workers) as ex:
            results = list(ex.map(_run_job, jobs, [args.decomp] * len(jobs), [limits] * len(jobs), chunksize=8))
    else:
        results = [_run_job(j, args.decomp, limits) for j in jobs]
    out = open(args.output, "w", newline="") if args.output else sys.stdout
    try:
        writer = csv.DictWriter(out, fieldnames=CSV_COLUMNS, lineterminator="\n")
        writer.writeheader()
        for res in results:
            writer.writerow(res.row)
    finally:
        if out is not sys.stdout:
            out.close()
    bad = sum(not r.ok for r in results)
    if bad:
        print(f"{bad} of {len(results)} rows failed a check", file=sys.stderr)
        return EXIT_CHECK
    return EXIT_OK


def _default_workers() -> int:
    try:
        return max(1, int(os.environ.get(WORKERS_ENV, "1")))
    except ValueError:
        return 1


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="mlagg", description="Online multi-level aggregation with deadlines.")
    sub = p.add_subparsers(dest="command", required=True)

    g = sub.add_parser("gen", help="generate an instance or a corpus")
    g.add_argument("--shape", help=f"one of {', '.join(generators.SHAPES)} (comma list with --corpus)")
    g.add_argument("--n", type=int, default=10, help="vertices (maximum with --corpus)")
    g.add_argument("--m", type=int, default=5, help="requests (maximum with --corpus)")
    g.add_argument("--seed", type=int, default=0)
    g.add_argument("--horizon", type=_fraction, default=Fraction(10))
    g.add_argument("--overlap", type=float, default=0.3)
    g.add_argument("--corpus", type=int, metavar="COUNT", help="write COUNT mixed-shape instances into -o DIR")
    g.add_argument("-o", "--output")
    g.set_defaults(func=cmd_gen)

    d = sub.add_parser("decompose", help="print a heavy path decomposition")
    d.add_argument("instance")
    d.add_argument("--decomp", choices=("min", "size"), default="min")
    d.set_defaults(func=cmd_decompose)

    def alg_flags(sp):
        sp.add_argument("--alg", choices=ALGS, required=True)
        sp.add_argument("--theta", type=_fraction)
        sp.add_argument("--theta1", type=_fraction)
        sp.add_argument("--theta2", type=_fraction)
        sp.add_argument("--decomp", choices=("min", "size"), default="min")

    def opt_flags(sp):
        sp.add_argument("--max-requests", type=int, default=OptLimits.max_requests)
        sp.add_argument("--max-vertices", type=int, default=None)

    r = sub.add_parser("run", help="simulate one algorithm")
    r.add_argument("instance")
    alg_flags(r)
    r.add_argument("--solution", help="write the solution here")
    r.add_argument("--trace", help="write the trace here")
    r.set_defaults(func=cmd_run)

    rp = sub.add_parser("replay", help="diff the depth policy's trace against a golden file")
    rp.add_argument("instance")
    rp.add_argument("golden")
    rp.add_argument("--theta", type=_fraction, default=Fraction(3))
    rp.set_defaults(func=cmd_replay)

    o = sub.add_parser("opt", help="exact offline optimum")
    o.add_argument("instance")
    opt_flags(o)
    o.add_argument("--backend", choices=("python", "compiled"))
    o.set_defaults(func=cmd_opt)

    c = sub.add_parser("check", help="ALG, OPT, ratio, bound and lemma verdicts")
    c.add_argument("instance")
    alg_flags(c)
    opt_flags(c)
    c.set_defaults(func=cmd_check)

    s = sub.add_parser("sweep", help="evaluate a corpus directory into CSV")
    s.add_argument("corpus")
    s.add_argument("--algs", type=lambda x: x.split(","), default=list(ALGS))
    s.add_argument("--thetas", help="depth grid, e.g. '1,D/2,D,2D'")
    s.add_argument("--theta-pairs", help="caterpillar grid, e.g. '2H+1:2H,H:H'")
    s.add_argument("--decomp", choices=("min", "size"), default="min")
    s.add_argument("--workers", type=int, default=_default_workers(), help=f"default from ${WORKERS_ENV}")
    s.add_argument("-o", "--output")
    opt_flags(s)
    s.set_defaults(func=cmd_sweep)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    if getattr(args, "algs", None):
        unknown = [a for a in args.algs if a not in ALGS]
        if unknown:
            print(f"mlagg: error: unknown algorithm {unknown[0]!r}", file=sys.stderr)
            return EXIT_USAGE
    try:
        return args.func(args)
    except UsageError as exc:
        print(f"mlagg: error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
