"""One entry point per solver, returning a JSON-serializable :class:`SolveReport`."""
from __future__ import annotations

import json
import math
import time
from dataclasses import asdict, dataclass, field
from typing import Any, List, Optional

import numpy as np

from .equidistant import solve_equidistant
from .errors import DiagnosticsError
from .geometry import BarycentricCoord, PointSet, as_pointset, enclosing_radius, preprocess_nonzero
from .heuristic import HeuristicConfig, solve_heuristic
from .recurrence import CONVERGED, IterationTrace, StopRule, build_system, default_trace_every, iterate
from .spectral import compute_spectrum
from .welzl import solve_welzl

SOLVE_METHODS = ("welzl", "recurrence", "heuristic", "equidistant")
EXACT = "exact"


@dataclass
class SolveReport:
    method: str
    lam: List[float]
    center: List[float]
    radius: float
    iterations: Optional[int] = None
    stop_reason: Optional[str] = None
    eta2: Optional[float] = None
    kappa: Optional[float] = None
    rho: Optional[List[float]] = None
    dropped: Optional[List[dict]] = None
    support: Optional[List[int]] = None
    augmented: bool = False
    wall_time_s: float = 0.0
    # tracing is a by-product of the solve, not part of the JSON document
    trace: Optional[IterationTrace] = field(default=None, repr=False, compare=False)

    @property
    def converged(self) -> bool:
        return self.stop_reason in (CONVERGED, EXACT)

    def to_dict(self) -> dict:
        d = asdict(self)
        d.pop("trace")
        lam = d.pop("lam")
        return {"method": d.pop("method"), "lambda": lam, **d}

    def to_json(self) -> str:
        return dumps(self.to_dict())

    @classmethod
    def from_json(cls, text: str) -> "SolveReport":
        d = json.loads(text)
        d["lam"] = d.pop("lambda")
        return cls(**d)


def _encode(obj: Any, indent: int, level: int) -> str:
    pad = " " * (indent * (level + 1))
    end = " " * (indent * level)
    if obj is None or isinstance(obj, bool):
        return json.dumps(obj)
    if isinstance(obj, (int, np.integer)):
        return str(int(obj))
    if isinstance(obj, (float, np.floating)):
        x = float(obj)
        if not math.isfinite(x):
            return "null"
        text = format(x, ".17g")
        # keep floats recognizable as floats after a round trip
        return text if any(ch in text for ch in ".en") else text + ".0"
    if isinstance(obj, str):
        return json.dumps(obj)
    if isinstance(obj, dict):
        if not obj:
            return "{}"
        items = [f"{pad}{json.dumps(str(k))}: {_encode(v, indent, level + 1)}" for k, v in obj.items()]
        return "{\n" + ",\n".join(items) + "\n" + end + "}"
    if isinstance(obj, (list, tuple, np.ndarray)):
        seq = list(obj)
        if not seq:
            return "[]"
        # numeric arrays stay on one line
        if all(isinstance(v, (int, float, np.integer, np.floating)) and not isinstance(v, bool) for v in seq):
            return "[" + ", ".join(_encode(v, indent, level + 1) for v in seq) + "]"
        return "[\n" + ",\n".join(pad + _encode(v, indent, level + 1) for v in seq) + "\n" + end + "]"
    raise TypeError(f"cannot serialize {type(obj).__name__}")


def dumps(obj: Any, indent: int = 2) -> str:
    """JSON with every float written at 17 significant digits (lossless round trip); NaN/inf become null."""
    return _encode(obj, indent, 0) + "\n"


def initial_weights(n: int, init: str = "uniform") -> BarycentricCoord:
    if init == "uniform":
        return BarycentricCoord.uniform(n)
    if init == "concentrated":
        return BarycentricCoord.concentrated(n)
    raise ValueError(f"unknown init {init!r}; expected 'uniform' or 'concentrated'")


def _spectrum_fields(sys_) -> dict:
    try:
        diag = compute_spectrum(sys_)
    except DiagnosticsError:
        return {}
    return {"eta2": diag.eta2, "kappa": diag.kappa, "rho": [float(r) for r in diag.rho]}


def _merge_traces(traces: List[IterationTrace]) -> IterationTrace:
    merged = IterationTrace()
    for t in traces:
        merged.records.extend(t.records)
    if traces:
        last = traces[-1]
        merged.stop_reason = last.stop_reason
        merged.final_residual = last.final_residual
        merged.offending_index = last.offending_index
        merged.iterations = sum(t.iterations for t in traces)
    return merged


def solve(
    ps,
    method: str = "welzl",
    tol: float = 1e-12,
    max_iter: int = 1_000_000,
    init: str = "uniform",
    seed: int = 0,
    trace_every: Optional[int] = 0,
    drop_policy: str = "all-negative",
) -> SolveReport:
    """Solve with ``method`` and package the result.

    ``trace_every=None`` picks the default sampling for ``n``; ``0`` turns
    tracing off. Tracing applies to the iterative methods only.
    Exceptions from the solvers (e.g. :class:`RankConditionError` for the
    equidistant method) propagate.
    """
    ps = as_pointset(ps)
    if method not in SOLVE_METHODS:
        raise ValueError(f"unknown method {method!r}; expected one of {SOLVE_METHODS}")
    if trace_every is None:
        trace_every = default_trace_every(ps.n)
    extra: dict = {}
    t0 = time.perf_counter()
    if method == "welzl":
        ball, support, lam = solve_welzl(ps, seed=seed)
        elapsed = time.perf_counter() - t0
        weights, center = lam.weights, ball.center
        extra = {"stop_reason": EXACT, "support": list(support.indices)}
    elif method == "equidistant":
        lam, center = solve_equidistant(ps)
        elapsed = time.perf_counter() - t0
        weights = lam.weights
        extra = {"stop_reason": EXACT}
    elif method == "recurrence":
        work = preprocess_nonzero(ps)
        sys_ = build_system(work)
        lam, trace = iterate(sys_, initial_weights(ps.n, init), StopRule(tol, max_iter), trace_every=trace_every)
        elapsed = time.perf_counter() - t0
        weights = lam.weights
        center = ps.points @ weights
        extra = {
            "iterations": trace.iterations,
            "stop_reason": trace.stop_reason,
            "augmented": work.augmented,
            "trace": trace if trace_every else None,
            **_spectrum_fields(sys_),
        }
    else:
        cfg = HeuristicConfig(tol_step=tol, max_iter_total=max_iter, drop_policy=drop_policy, trace_every=trace_every)
        rep = solve_heuristic(ps, cfg, lam0=initial_weights(ps.n, init))
        elapsed = time.perf_counter() - t0
        weights, center = rep.lam_full.weights, rep.ball.center
        extra = {
            "iterations": rep.iterations,
            "stop_reason": rep.stop_reason,
            "augmented": rep.augmented,
            "dropped": [asdict(e) for e in rep.dropped],
            "trace": _merge_traces(rep.traces) if trace_every else None,
        }
    center = np.asarray(center, dtype=float)
    return SolveReport(
        method=method,
        lam=[float(w) for w in weights],
        center=[float(c) for c in center],
        radius=enclosing_radius(ps, center),
        wall_time_s=elapsed,
        **extra,
    )


def analyze(ps) -> dict:
    """Spectral diagnostics of the recurrence built on ``ps`` as a plain dict."""
    ps = as_pointset(ps)
    work = preprocess_nonzero(ps)
    diag = compute_spectrum(build_system(work))
    return {
        "n": ps.n,
        "d": ps.d,
        "augmented": work.augmented,
        "rho": [float(r) for r in diag.rho],
        "eta": [float(e) for e in diag.eta],
        "eta2": diag.eta2,
        "kappa": diag.kappa,
        "kappa_unbounded": diag.kappa_unbounded,
        "det_w": diag.det_w,
        "rank_condition": diag.rank_condition,
    }
