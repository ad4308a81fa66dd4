"""Random-instance benchmark: timing and accuracy of each solver against Welzl.

Points are drawn i.i.d. uniform on ``[0, 1]^d`` from the counter-based
Philox-4x64 bit generator (``Generator(Philox(seed))``), so a given seed
always maps to the same point set on any platform running the same
generator algorithm.
"""
from __future__ import annotations

import csv
import io
import os
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field
from statistics import median
from typing import Dict, List, Optional, Sequence

import numpy as np

from .equidistant import solve_equidistant
from .errors import InputError, RankConditionError
from .geometry import PointSet, check_rank_condition, enclosing_radius, preprocess_nonzero
from .heuristic import HeuristicConfig, solve_heuristic
from .recurrence import CONVERGED, StopRule, build_system, iterate
from .welzl import solve_welzl

METHODS = ("welzl", "heuristic", "equidistant", "recurrence")
INSTANCE_COLUMNS = [
    "case_id", "d", "n", "seed", "method", "time_s",
    "rel_radius_err", "center_err", "iterations", "drops",
]
AGGREGATE_COLUMNS = [
    "case_id", "d", "n", "count", "seed", "method", "instances", "skipped",
    "time_s", "rel_radius_err", "center_err", "iterations", "drops",
]


@dataclass(frozen=True)
class BenchCase:
    """``count`` instances of ``n`` points in ``[0,1]^d``, seeded ``seed, seed+1, ...``."""

    d: int
    n: int
    count: int = 1
    seed: int = 0
    case_id: str = ""

    def __post_init__(self):
        if self.d < 1 or self.n < 1 or self.count < 1:
            raise ValueError(f"need d, n, count >= 1, got d={self.d}, n={self.n}, count={self.count}")
        if not self.case_id:
            object.__setattr__(self, "case_id", f"d{self.d}_n{self.n}_s{self.seed}")

    @property
    def seeds(self) -> List[int]:
        return [self.seed + k for k in range(self.count)]


@dataclass
class InstanceResult:
    case_id: str
    d: int
    n: int
    seed: int
    method: str
    time_s: float
    rel_radius_err: Optional[float]
    center_err: Optional[float]
    iterations: Optional[int]
    drops: Optional[int]
    skipped: bool = False
    note: str = ""


@dataclass
class MethodAggregate:
    method: str
    instances: int
    skipped: int
    time_s: float
    rel_radius_err: float
    center_err: float
    iterations: float
    drops: float


@dataclass
class BenchResult:
    case: BenchCase
    instances: List[InstanceResult] = field(default_factory=list)
    aggregates: Dict[str, MethodAggregate] = field(default_factory=dict)


def gen_uniform_hypercube(d: int, n: int, seed: int) -> PointSet:
    """``n`` points uniform on ``[0, 1]^d`` from ``Generator(Philox(seed))``.

    Draws an ``(n, d)`` block in row-major order, one point per row.
    """
    if d < 1 or n < 1:
        raise ValueError(f"need d, n >= 1, got d={d}, n={n}")
    rows = np.random.Generator(np.random.Philox(seed)).random((n, d))
    return PointSet(rows.T)


class _Skip(Exception):
    pass


def _run_method(method: str, ps: PointSet, tol_step: float, max_iter: int):
    """Returns ``(center, iterations, drops)``; raises ``_Skip`` if inapplicable."""
    if method == "welzl":
        ball, _, _ = solve_welzl(ps, seed=0)
        return ball.center, None, None
    if method == "heuristic":
        rep = solve_heuristic(ps, HeuristicConfig(tol_step=tol_step, max_iter_total=max_iter))
        return rep.ball.center, rep.iterations, len(rep.dropped)
    if method == "equidistant":
        try:
            _, center = solve_equidistant(ps)
        except RankConditionError as exc:
            raise _Skip(str(exc)) from None
        return center, None, None
    if method == "recurrence":
        if not check_rank_condition(ps):
            raise _Skip("rank condition fails; the recurrence has no unique fixed point")
        work = preprocess_nonzero(ps)
        sys_ = build_system(work)
        lam, trace = iterate(sys_, np.full(ps.n, 1.0 / ps.n), StopRule(tol_step, max_iter), trace_every=0)
        if trace.stop_reason != CONVERGED:
            raise _Skip(f"recurrence stopped with {trace.stop_reason}")
        return ps.points @ lam.weights, trace.iterations, 0
    raise ValueError(f"unknown method {method!r}")


def _time_solve(method, ps, repeats, tol_step, max_iter):
    times = []
    out = None
    for _ in range(repeats):
        t0 = time.perf_counter()
        out = _run_method(method, ps, tol_step, max_iter)
        times.append(time.perf_counter() - t0)
    return median(times), out


def _run_instance(case: BenchCase, seed: int, methods, repeats, tol_step, max_iter) -> List[InstanceResult]:
    ps = gen_uniform_hypercube(case.d, case.n, seed)
    timed = {}
    if "welzl" in methods:
        timed["welzl"] = _time_solve("welzl", ps, repeats, tol_step, max_iter)
        q_star = timed["welzl"][1][0]
    else:
        q_star = solve_welzl(ps, seed=0)[0].center
    r_star = enclosing_radius(ps, q_star)
    rows = []
    for m in methods:
        try:
            t, (center, iters, drops) = timed[m] if m in timed else _time_solve(m, ps, repeats, tol_step, max_iter)
        except _Skip as exc:
            rows.append(InstanceResult(case.case_id, case.d, case.n, seed, m, float("nan"),
                                       None, None, None, None, skipped=True, note=str(exc)))
            continue
        radius = enclosing_radius(ps, center)
        # signed: a negative value would mean the method's ball misses a point
        rel = (radius - r_star) / r_star if r_star > 0 else radius
        cerr = float(np.linalg.norm(center - q_star))
        if m == "welzl":
            rel, cerr = 0.0, 0.0
        rows.append(InstanceResult(case.case_id, case.d, case.n, seed, m, t, float(rel), cerr, iters, drops))
    return rows


def _aggregate(rows: Sequence[InstanceResult], methods) -> Dict[str, MethodAggregate]:
    out = {}
    for m in methods:
        mine = [r for r in rows if r.method == m]
        done = [r for r in mine if not r.skipped]

        def mean(attr):
            vals = [getattr(r, attr) for r in done if getattr(r, attr) is not None]
            return float(np.mean(vals)) if vals else float("nan")

        out[m] = MethodAggregate(
            method=m,
            instances=len(done),
            skipped=len(mine) - len(done),
            time_s=mean("time_s"),
            rel_radius_err=mean("rel_radius_err"),
            center_err=mean("center_err"),
            iterations=mean("iterations"),
            drops=mean("drops"),
        )
    return out


def bench_threads() -> int:
    """Worker count from ``SEB_THREADS``, defaulting to the machine's core count."""
    raw = os.environ.get("SEB_THREADS")
    if raw:
        try:
            val = int(raw)
        except ValueError:
            raise InputError(f"SEB_THREADS must be an integer, got {raw!r}") from None
        if val < 1:
            raise InputError("SEB_THREADS must be at least 1")
        return val
    return os.cpu_count() or 1


def run_comparison(
    case: BenchCase,
    methods: Sequence[str] = ("welzl", "heuristic"),
    repeats: int = 3,
    tol_step: float = 1e-12,
    max_iter: int = 1_000_000,
    workers: Optional[int] = None,
) -> BenchResult:
    """Solve every instance of ``case`` with each method and score it against Welzl.

    Wall time is the median of ``repeats`` runs of the solve call alone.
    Instances may run in parallel processes (``workers``, default from
    ``SEB_THREADS``); the methods of one instance always run sequentially in
    one process. Results are ordered by seed regardless of completion order.
    """
    methods = list(methods)
    bad = [m for m in methods if m not in METHODS]
    if bad or not methods:
        raise ValueError(f"methods must be a nonempty subset of {METHODS}, got {methods}")
    if repeats < 1:
        raise ValueError("repeats must be at least 1")
    workers = bench_threads() if workers is None else workers
    args = [(case, s, methods, repeats, tol_step, max_iter) for s in case.seeds]
    if workers > 1 and len(args) > 1:
        with ProcessPoolExecutor(max_workers=min(workers, len(args))) as pool:
            chunks = list(pool.map(_run_instance, *zip(*args)))
    else:
        chunks = [_run_instance(*a) for a in args]
    rows = [r for chunk in chunks for r in chunk]
    return BenchResult(case=case, instances=rows, aggregates=_aggregate(rows, methods))


def _fmt(v):
    if v is None:
        return ""
    if isinstance(v, float):
        return format(v, ".17g")
    return str(v)


def instances_csv(results: Sequence[BenchResult]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(INSTANCE_COLUMNS)
    for res in results:
        for r in res.instances:
            row = asdict(r)
            w.writerow([_fmt(row[c]) for c in INSTANCE_COLUMNS])
    return buf.getvalue()


def aggregate_csv(results: Sequence[BenchResult]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(AGGREGATE_COLUMNS)
    for res in results:
        c = res.case
        for agg in res.aggregates.values():
            a = asdict(agg)
            w.writerow([c.case_id, c.d, c.n, c.count, c.seed] + [_fmt(a[k]) for k in AGGREGATE_COLUMNS[5:]])
    return buf.getvalue()


def parse_cases(text: str) -> List[BenchCase]:
    """One case per line as ``d,n,count,seed``; blank lines and ``#`` comments are ignored."""
    cases = []
    for lineno, line in enumerate(text.splitlines(), 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        parts = [p.strip() for p in line.split(",")]
        if len(parts) != 4:
            raise InputError(f"case line {lineno}: expected d,n,count,seed, got {line!r}")
        try:
            d, n, count, seed = (int(p) for p in parts)
        except ValueError:
            raise InputError(f"case line {lineno}: non-integer field in {line!r}") from None
        try:
            cases.append(BenchCase(d, n, count, seed))
        except ValueError as exc:
            raise InputError(f"case line {lineno}: {exc}") from None
    if not cases:
        raise InputError("no bench cases given")
    return cases
