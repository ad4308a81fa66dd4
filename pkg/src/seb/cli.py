"""Command-line interface: ``seb solve | analyze | gen | bench``.

Exit codes: 0 success, 1 input or usage error, 2 iteration budget
exhausted, 3 rank condition violated (``solve --method equidistant``).
"""
from __future__ import annotations

import argparse
import sys
from pathlib import Path

from . import bench as bench_mod
from .errors import DiagnosticsError, InputError, RankConditionError, SEBError
from .geometry import PointSet, dump_points, load_points
from .report import SOLVE_METHODS, analyze, dumps, solve

EXIT_OK = 0
EXIT_INPUT = 1
EXIT_BUDGET = 2
EXIT_RANK = 3


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        raise SystemExit(EXIT_INPUT)


def _fail(msg: str, code: int) -> int:
    print(f"error: {msg}", file=sys.stderr)
    return code


def _emit(text: str, path) -> None:
    if path is None or str(path) == "-":
        sys.stdout.write(text)
    else:
        Path(path).write_text(text, encoding="utf-8")


def _load(args) -> PointSet:
    try:
        with open(args.input, "rb") as fh:
            return load_points(fh, header=args.header)
    except OSError as exc:
        raise InputError(f"cannot read {args.input}: {exc.strerror or exc}") from None


def cmd_solve(args) -> int:
    try:
        ps = _load(args)
        # None lets solve() pick the default sampling
        every = args.trace_every if args.trace else 0
        rep = solve(
            ps,
            method=args.method,
            tol=args.tol,
            max_iter=args.max_iter,
            init=args.init,
            seed=args.seed,
            trace_every=every,
            drop_policy=args.drop_policy,
        )
    except RankConditionError as exc:
        return _fail(str(exc), EXIT_RANK)
    except (InputError, ValueError) as exc:
        return _fail(str(exc), EXIT_INPUT)
    except SEBError as exc:
        return _fail(f"{type(exc).__name__}: {exc}", EXIT_INPUT)
    if args.trace and rep.trace is not None:
        Path(args.trace).write_text(rep.trace.to_csv(), encoding="utf-8")
    _emit(rep.to_json(), args.output)
    return EXIT_OK if rep.converged else EXIT_BUDGET


def cmd_analyze(args) -> int:
    try:
        out = analyze(_load(args))
    except (InputError, ValueError) as exc:
        return _fail(str(exc), EXIT_INPUT)
    except DiagnosticsError as exc:
        return _fail(f"diagnostics failed: {exc}", EXIT_INPUT)
    _emit(dumps(out), args.output)
    return EXIT_OK


def cmd_gen(args) -> int:
    if args.dim < 1 or args.count < 1:
        return _fail(f"--dim and --count must be positive (got {args.dim}, {args.count})", EXIT_INPUT)
    ps = bench_mod.gen_uniform_hypercube(args.dim, args.count, args.seed)
    _emit(dump_points(ps), args.output)
    return EXIT_OK


def cmd_bench(args) -> int:
    try:
        text = Path(args.cases).read_text(encoding="utf-8")
    except OSError as exc:
        return _fail(f"cannot read {args.cases}: {exc.strerror or exc}", EXIT_INPUT)
    methods = [m.strip() for m in args.methods.split(",") if m.strip()]
    try:
        cases = bench_mod.parse_cases(text)
        unknown = [m for m in methods if m not in bench_mod.METHODS]
        if unknown or not methods:
            raise InputError(f"unknown methods {unknown}; choose from {','.join(bench_mod.METHODS)}")
        results = [
            bench_mod.run_comparison(c, methods, repeats=args.repeats, tol_step=args.tol, max_iter=args.max_iter)
            for c in cases
        ]
    except InputError as exc:
        return _fail(str(exc), EXIT_INPUT)
    out = Path(args.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    (out / "instances.csv").write_text(bench_mod.instances_csv(results), encoding="utf-8")
    (out / "aggregate.csv").write_text(bench_mod.aggregate_csv(results), encoding="utf-8")
    sys.stdout.write(bench_mod.aggregate_csv(results))
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="seb", description="Smallest enclosing ball solvers and diagnostics.")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def add_input(sp):
        sp.add_argument("--input", required=True, help="points CSV, one point per row")
        sp.add_argument("--header", action="store_true", help="skip the first row of the CSV")
        sp.add_argument("--output", default=None, help="write JSON here instead of stdout")

    s = sub.add_parser("solve", help="compute the enclosing ball with one method")
    add_input(s)
    s.add_argument("--method", choices=SOLVE_METHODS, default="welzl")
    s.add_argument("--tol", type=float, default=1e-12, help="stop when the step residual (inf-norm) falls below this")
    s.add_argument("--max-iter", type=int, default=1_000_000)
    s.add_argument("--init", choices=("uniform", "concentrated"), default="uniform")
    s.add_argument("--seed", type=int, default=0, help="shuffle seed for welzl")
    s.add_argument("--drop-policy", choices=("all-negative", "most-negative"), default="all-negative")
    s.add_argument("--trace", default=None, help="write the iteration trace CSV here")
    s.add_argument("--trace-every", type=int, default=None, help="trace sampling period (default 1 for n<=64, else 10)")
    s.set_defaults(func=cmd_solve)

    a = sub.add_parser("analyze", help="spectral diagnostics of the recurrence")
    add_input(a)
    a.set_defaults(func=cmd_analyze)

    g = sub.add_parser("gen", help="uniform random points in the unit hypercube")
    g.add_argument("--dim", type=int, required=True)
    g.add_argument("--count", type=int, required=True)
    g.add_argument("--seed", type=int, default=0)
    g.add_argument("--output", default=None)
    g.set_defaults(func=cmd_gen)

    b = sub.add_parser("bench", help="compare methods against welzl on random instances")
    b.add_argument("--cases", required=True, help="file with one 'd,n,count,seed' per line")
    b.add_argument("--methods", default="welzl,heuristic")
    b.add_argument("--out-dir", required=True)
    b.add_argument("--repeats", type=int, default=3, help="timing repetitions; the median is reported")
    b.add_argument("--tol", type=float, default=1e-12)
    b.add_argument("--max-iter", type=int, default=1_000_000)
    b.set_defaults(func=cmd_bench)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
