"""The affine fixed-point iteration ``lam <- R lam + c`` on barycentric weights.

With ``D = diag(1/||P^i||^2)`` and ``s = trace(D)``::

    Omega = (s D - D 1 1^T D) / (n s)
    R     = I - Omega Phi^T Phi
    c     = 1/(2n) 1 - 1/(2s) D 1

Under the rank condition the iteration converges linearly to the
barycentric coordinate of the equidistant point, at rate equal to the
second-largest eigenvalue of ``R`` (see :mod:`seb.spectral`).
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import List, Optional

import numpy as np

from .errors import DimensionError, ZeroNormError
from .geometry import SIMPLEX_TOL, BarycentricCoord, PointSet, _frozen, _weights

CONVERGED = "converged"
MAX_ITER = "max_iter"
NEGATIVE_COORDINATE = "negative_coordinate"


@dataclass(frozen=True, eq=False)
class RecurrenceSystem:
    R: np.ndarray
    c: np.ndarray
    Omega: np.ndarray
    D: np.ndarray
    s: float
    points: PointSet
    A: np.ndarray  # Omega Phi^T Phi, so R = I - A

    @property
    def n(self) -> int:
        return self.c.size


def build_system(ps: PointSet) -> RecurrenceSystem:
    """Materialize ``D, s, Omega, R, c`` for ``ps``.

    Every point must have nonzero norm; run
    :func:`seb.geometry.preprocess_nonzero` first if unsure.
    """
    u = ps.squared_norms()
    zero = np.flatnonzero(u == 0.0)
    if zero.size:
        raise ZeroNormError(int(zero[0]))
    n = ps.n
    D = 1.0 / u
    s = float(D.sum())
    Omega = (s * np.diag(D) - np.outer(D, D)) / (n * s)
    A = Omega @ (ps.points.T @ ps.points)
    R = np.eye(n) - A
    c = 1.0 / (2 * n) - D / (2 * s)
    return RecurrenceSystem(
        R=_frozen(R), c=_frozen(c), Omega=_frozen(Omega), D=_frozen(D), s=s, points=ps, A=_frozen(A)
    )


def _vec(sys: RecurrenceSystem, lam) -> np.ndarray:
    w = lam.weights if isinstance(lam, BarycentricCoord) else np.asarray(lam, dtype=float)
    if w.shape != (sys.n,):
        raise DimensionError(f"expected {sys.n} weights, got shape {w.shape}")
    return w


def _increment(sys: RecurrenceSystem, w: np.ndarray) -> np.ndarray:
    """``(R w + c) - w``, projected onto the sum-zero plane.

    ``1^T c = 0`` and ``1^T A = 0`` exactly, so the projection only removes
    round-off. Without it the weight sum random-walks by ~1e-17 per step,
    which slow instances (1e5+ steps) turn into a visible drift.
    """
    inc = sys.c - sys.A @ w
    return inc - inc.mean()


def step(sys: RecurrenceSystem, lam) -> BarycentricCoord:
    """One application of ``lam -> R lam + c``."""
    w = _vec(sys, lam)
    tol = lam.simplex_tol if isinstance(lam, BarycentricCoord) else SIMPLEX_TOL
    return BarycentricCoord(w + _increment(sys, w), simplex_tol=tol)


def fixed_point_residual(sys: RecurrenceSystem, lam) -> float:
    """``||lam - (R lam + c)||_inf``; zero exactly at the fixed point."""
    w = _vec(sys, lam)
    return float(np.abs(_increment(sys, w)).max())


@dataclass(frozen=True)
class StopRule:
    tol_step: float = 1e-12
    max_iter: int = 1_000_000
    watch_negative: bool = False
    simplex_tol: float = SIMPLEX_TOL

    def __post_init__(self):
        if not self.tol_step > 0:
            raise ValueError("tol_step must be positive")
        if self.max_iter < 1:
            raise ValueError("max_iter must be at least 1")


@dataclass
class TraceRecord:
    iteration: int
    residual_inf: float
    j_value: float
    radius: float
    lambda_min: float
    error_norm: Optional[float] = None
    weights: Optional[np.ndarray] = None


@dataclass
class IterationTrace:
    records: List[TraceRecord] = field(default_factory=list)
    stop_reason: Optional[str] = None
    iterations: int = 0
    final_residual: float = float("nan")
    offending_index: Optional[int] = None

    def column(self, name: str) -> np.ndarray:
        return np.array([getattr(r, name) for r in self.records], dtype=float)

    def to_csv(self) -> str:
        lines = ["iter,residual_inf,j_value,radius,lambda_min"]
        for r in self.records:
            vals = (r.residual_inf, r.j_value, r.radius, r.lambda_min)
            lines.append(str(r.iteration) + "," + ",".join(format(v, ".17g") for v in vals))
        return "\n".join(lines) + "\n"


def default_trace_every(n: int) -> int:
    return 1 if n <= 64 else 10


def iterate(
    sys: RecurrenceSystem,
    lam0,
    stop: StopRule = StopRule(),
    trace_every: Optional[int] = None,
    reference=None,
    keep_weights: bool = False,
    start_iteration: int = 0,
):
    """Run the recurrence from ``lam0`` until a stop condition fires.

    Stops when the successive-step residual in the infinity norm drops below
    ``stop.tol_step``, after ``stop.max_iter`` steps, or (with
    ``stop.watch_negative``) as soon as an iterate has a weight below
    ``-stop.simplex_tol``. In the last case the negative iterate is returned
    and ``trace.offending_index`` is the most negative position.

    ``reference`` (e.g. the known fixed point) adds ``||lam^N - reference||_2``
    to every trace record. ``trace_every=0`` disables tracing; otherwise the
    first and last iterates are always recorded. ``start_iteration`` offsets
    the iteration counter, for callers that chain several runs.

    Returns ``(lam, trace)``.
    """
    lam = _vec(sys, lam0).copy()
    if trace_every is None:
        trace_every = default_trace_every(sys.n)
    ref = None if reference is None else _vec(sys, reference)
    ps = sys.points
    trace = IterationTrace()

    def record(k, w, res):
        q = ps.points @ w
        diff = ps.points - q[:, None]
        trace.records.append(
            TraceRecord(
                iteration=start_iteration + k,
                residual_inf=res,
                j_value=float(ps.squared_norms() @ w - q @ q),
                radius=float(np.sqrt(np.einsum("ji,ji->i", diff, diff).max())),
                lambda_min=float(w.min()),
                error_norm=None if ref is None else float(np.linalg.norm(w - ref)),
                weights=w.copy() if keep_weights else None,
            )
        )

    if trace_every:
        record(0, lam, 0.0)
    k = 0
    res = float("nan")
    neg_tol = -stop.simplex_tol
    # Kahan compensation: the increments keep their sign for long
    # stretches, so plain rounding of lam + inc is biased and adds up
    comp = np.zeros_like(lam)
    while True:
        inc = _increment(sys, lam)
        k += 1
        res = float(np.abs(inc).max())
        y = inc - comp
        nxt = lam + y
        comp = (nxt - lam) - y
        lam = nxt
        reason = None
        if stop.watch_negative and lam.min() < neg_tol:
            reason = NEGATIVE_COORDINATE
            trace.offending_index = int(np.argmin(lam))
        elif res < stop.tol_step:
            reason = CONVERGED
        elif k >= stop.max_iter:
            reason = MAX_ITER
        if trace_every and (reason is not None or k % trace_every == 0):
            record(k, lam, res)
        if reason is not None:
            trace.stop_reason = reason
            break
    trace.iterations = k
    trace.final_residual = res
    return BarycentricCoord(lam, simplex_tol=stop.simplex_tol), trace
