"""Command-line front end.

Subcommands
-----------
``solve``   solve a SIPP problem file end to end.
``pmi``     solve a matrix-inequality file; optionally emit a feasibility
            grid as CSV for external plotting.
``gen``     generate a random coupled instance and print its problem file.
``corpus``  run the built-in golden corpus.

The environment variable ``SIPSOLVE_SOLVER_TOL`` overrides the conic
backend tolerance for every subcommand.
"""

from __future__ import annotations

import argparse
import os
import sys

import numpy as np

from . import corpus as corpus_mod
from . import probio
from .exchange import ExchangeOptions
from .pmi import feasibility_grid, pmi_to_sipp
from .probio import (EXIT_NUMERICAL, ProblemFileError, format_report,
                     generate_random_instance, parse_pmi, parse_problem,
                     render_problem, run_pipeline, RandomInstanceSpec)


def _apply_env(opts: ExchangeOptions) -> ExchangeOptions:
    tol = os.environ.get("SIPSOLVE_SOLVER_TOL")
    if tol:
        try:
            opts.solver.tol = float(tol)
        except ValueError:
            raise SystemExit(f"bad SIPSOLVE_SOLVER_TOL value {tol!r}")
    return opts


def _apply_overrides(opts: ExchangeOptions, args) -> ExchangeOptions:
    if args.eps is not None:
        opts.eps = args.eps
    if args.kmax is not None:
        opts.k_max = args.kmax
    if args.order_cap is not None:
        opts.master_order_cap = args.order_cap
        opts.inner_order_cap = args.order_cap
    if args.seed is not None:
        opts.seed = args.seed
    return _apply_env(opts)


def _add_solve_flags(sub):
    sub.add_argument("--eps", type=float, default=None,
                     help="certification tolerance on the worst-case value")
    sub.add_argument("--kmax", type=int, default=None,
                     help="exchange iteration cap")
    sub.add_argument("--order-cap", type=int, default=None,
                     help="relaxation order cap for master and inner solves")
    sub.add_argument("--seed", type=int, default=None)
    sub.add_argument("--homogenize", action="store_true",
                     help="lift the index set to the unit sphere first")
    sub.add_argument("--export-sdpa", metavar="DIR", default=None,
                     help="write the final master relaxation in SDPA "
                          "sparse format to DIR")
    sub.add_argument("--report", metavar="OUT.json", default=None,
                     help="write the JSON run report")


def _read(path):
    try:
        with open(path, encoding="utf-8") as fh:
            return fh.read()
    except OSError as exc:
        raise SystemExit(f"cannot read {path}: {exc}")


def _cmd_solve(args):
    try:
        problem, opts, homogenize = parse_problem(_read(args.file))
    except ProblemFileError as exc:
        print(f"{args.file}: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    opts = _apply_overrides(opts, args)
    report, code = run_pipeline(problem, opts,
                                homogenize=homogenize or args.homogenize,
                                report_path=args.report,
                                sdpa_dir=args.export_sdpa)
    print(format_report(report))
    return code


def _cmd_pmi(args):
    try:
        f, G, X, opts, homogenize = parse_pmi(_read(args.file))
    except ProblemFileError as exc:
        print(f"{args.file}: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    if args.grid is not None:
        pts, flags = feasibility_grid(G, (args.grid_lo, args.grid_hi),
                                      args.grid_res)
        with open(args.grid, "w", encoding="utf-8") as fh:
            fh.write("x1,x2,feasible\n")
            for (a, b), ok in zip(pts, flags):
                fh.write(f"{float(a)!r},{float(b)!r},{int(ok)}\n")
        print(f"wrote feasibility grid to {args.grid}")
    problem = pmi_to_sipp(f, G, X, name=os.path.basename(args.file))
    opts = _apply_overrides(opts, args)
    report, code = run_pipeline(problem, opts,
                                homogenize=homogenize or args.homogenize,
                                report_path=args.report,
                                sdpa_dir=args.export_sdpa)
    print(format_report(report))
    return code


def _cmd_gen(args):
    spec = RandomInstanceSpec(n=args.n, p=args.p, d1=args.d1, d2=args.d2,
                              uset=args.uset, seed=args.seed)
    problem = generate_random_instance(spec)
    text = render_problem(problem)
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(text)
        print(f"wrote {problem.name} to {args.out}")
    else:
        sys.stdout.write(text)
    return 0


def _cmd_corpus(args):
    if args.action != "run":
        raise SystemExit(f"unknown corpus action {args.action!r}")
    names = args.names or corpus_mod.names()
    failures = 0
    for name in names:
        entry = corpus_mod.get(name)
        opts = _apply_env(entry.options)
        report, _ = run_pipeline(entry.problem, opts)
        ok = report.status == entry.expect_status
        parts = [f"{name:20s}", f"{report.status:26s}"]
        if entry.f_star is not None and report.f_star is not None:
            df = abs(report.f_star - entry.f_star)
            ok &= df <= entry.f_tol
            parts.append(f"f*={report.f_star: .6f} (ref {entry.f_star: .6f})")
        if entry.x_star is not None and report.minimizers:
            dx = min(float(np.max(np.abs(np.asarray(m) - entry.x_star)))
                     for m in report.minimizers)
            ok &= dx <= entry.x_tol
            parts.append(f"|x-x*|={dx:.1e}")
        if report.obj2 is not None:
            ok &= report.obj2 >= entry.obj2_floor
            parts.append(f"Obj_2={report.obj2: .1e}")
        parts.append(f"{report.iterations} iters")
        parts.append(f"{report.wall_time:.1f}s")
        parts.append("ok" if ok else "MISMATCH")
        print("  ".join(parts), flush=True)
        failures += not ok
    return 1 if failures else 0


def build_parser():
    ap = argparse.ArgumentParser(
        prog="sipsolve",
        description="Globally solve semi-infinite polynomial programs via "
                    "semidefinite relaxations and an exchange loop.")
    sub = ap.add_subparsers(dest="command", required=True)

    sp = sub.add_parser("solve", help="solve a SIPP problem file")
    sp.add_argument("file")
    _add_solve_flags(sp)
    sp.set_defaults(func=_cmd_solve)

    pp = sub.add_parser("pmi", help="solve a matrix-inequality problem file")
    pp.add_argument("file")
    _add_solve_flags(pp)
    pp.add_argument("--grid", metavar="OUT.csv", default=None,
                    help="emit a feasibility-region grid sampling as CSV")
    pp.add_argument("--grid-lo", type=float, default=-3.0)
    pp.add_argument("--grid-hi", type=float, default=3.0)
    pp.add_argument("--grid-res", type=int, default=101)
    pp.set_defaults(func=_cmd_pmi)

    gp = sub.add_parser("gen", help="generate a random coupled instance")
    gp.add_argument("--n", type=int, required=True, help="decision dimension")
    gp.add_argument("--p", type=int, required=True, help="index dimension")
    gp.add_argument("--d1", type=int, required=True,
                    help="objective half-degree")
    gp.add_argument("--d2", type=int, required=True,
                    help="coupling monomial degree")
    gp.add_argument("--uset", choices=("ball", "box", "simplex"),
                    default="ball")
    gp.add_argument("--seed", type=int, default=0)
    gp.add_argument("-o", "--out", default=None)
    gp.set_defaults(func=_cmd_gen)

    cp = sub.add_parser("corpus", help="run the built-in golden corpus")
    cp.add_argument("action", choices=("run",))
    cp.add_argument("names", nargs="*",
                    help="subset of corpus problem names (default: all)")
    cp.set_defaults(func=_cmd_corpus)
    return ap


def main(argv=None):
    args = build_parser().parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
