"""Drop-and-restart heuristic for point sets whose circumcenter is not the SEB center.

The recurrence is run while watching the weights. Whenever a weight goes
negative the corresponding point is discarded, the surviving weights are
rescaled to sum to one, the system is rebuilt on the smaller set and the
iteration continues. Dropped points are never re-added, so the result can
miss a support point; the final ball is always measured against the full
original set and any dropped point left outside the survivors' ball is
reported.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import List, Optional

import numpy as np

from .errors import DegenerateReductionError
from .geometry import (
    SIMPLEX_TOL,
    Ball,
    BarycentricCoord,
    PointSet,
    as_pointset,
    enclosing_radius,
    preprocess_nonzero,
)
from .recurrence import (
    CONVERGED,
    NEGATIVE_COORDINATE,
    IterationTrace,
    StopRule,
    build_system,
    iterate,
)

ALL_NEGATIVE = "all-negative"
MOST_NEGATIVE = "most-negative"


@dataclass(frozen=True)
class HeuristicConfig:
    tol_step: float = 1e-12
    max_iter_total: int = 1_000_000
    max_restarts: Optional[int] = None  # None -> n - 1
    drop_policy: str = ALL_NEGATIVE
    simplex_tol: float = SIMPLEX_TOL
    trace_every: Optional[int] = 0

    def __post_init__(self):
        if self.drop_policy not in (ALL_NEGATIVE, MOST_NEGATIVE):
            raise ValueError(f"unknown drop policy {self.drop_policy!r}")


@dataclass(frozen=True)
class DropEvent:
    iteration: int
    index: int  # in the original point set
    value: float


@dataclass
class HeuristicReport:
    lam: BarycentricCoord  # over the surviving points
    survivors: np.ndarray  # original indices of the surviving points
    lam_full: BarycentricCoord  # zero-padded, one entry per input column
    ball: Ball  # center from lam_full, radius over ALL original points
    survivor_radius: float
    dropped: List[DropEvent]
    restarts: int
    iterations: int
    converged_within: bool
    stop_reason: str
    uncovered: List[int] = field(default_factory=list)
    restart_weights: List[np.ndarray] = field(default_factory=list)
    traces: List[IterationTrace] = field(default_factory=list)
    augmented: bool = False

    @property
    def center_suspect(self) -> bool:
        """True when a dropped point lies outside the survivors' ball.

        The survivors' ball is then not the smallest ball of the full set, so
        the returned center is not the true SEB center.
        """
        return bool(self.uncovered)


def _drop_mask(w: np.ndarray, policy: str, tol: float) -> np.ndarray:
    if policy == ALL_NEGATIVE:
        return w < -tol
    mask = np.zeros(w.size, dtype=bool)
    mask[int(np.argmin(w))] = True
    return mask


def solve_heuristic(ps, cfg: HeuristicConfig = HeuristicConfig(), lam0=None, reference=None) -> HeuristicReport:
    """Run the recurrence with drop-and-restart until the step residual falls below ``cfg.tol_step``.

    ``lam0`` defaults to uniform weights. ``reference`` (weights over the
    original points) is forwarded to the traces as an error target, which is
    only useful together with ``cfg.trace_every``.

    Raises :class:`DegenerateReductionError` if a drop would leave a single point
    (or none) out of two or more.
    """
    original = as_pointset(ps)
    work = preprocess_nonzero(original)
    n = work.n
    max_restarts = n - 1 if cfg.max_restarts is None else cfg.max_restarts

    lam = np.full(n, 1.0 / n) if lam0 is None else np.asarray(BarycentricCoord(lam0).weights, dtype=float)
    if lam.shape != (n,):
        raise ValueError(f"lam0 must have {n} entries")
    ref_full = None if reference is None else np.asarray(reference, dtype=float)

    current = work
    pos = np.arange(n)  # columns of ``work`` still in play
    dropped: List[DropEvent] = []
    restart_weights: List[np.ndarray] = []
    traces: List[IterationTrace] = []
    total = 0
    restarts = 0
    converged = False
    reason = None

    while True:
        budget = cfg.max_iter_total - total
        if budget <= 0:
            reason = "max_iter"
            break
        system = build_system(current)
        stop = StopRule(
            tol_step=cfg.tol_step,
            max_iter=budget,
            watch_negative=True,
            simplex_tol=cfg.simplex_tol,
        )
        ref = None if ref_full is None else ref_full[pos]
        out, trace = iterate(
            system, lam, stop, trace_every=cfg.trace_every, reference=ref, start_iteration=total
        )
        traces.append(trace)
        total += trace.iterations
        lam = np.array(out.weights)
        reason = trace.stop_reason
        if reason == CONVERGED:
            converged = True
            break
        if reason != NEGATIVE_COORDINATE:
            break
        if restarts >= max_restarts:
            reason = "max_restarts"
            break
        mask = _drop_mask(lam, cfg.drop_policy, cfg.simplex_tol)
        keep = ~mask
        kept_sum = lam[keep].sum()
        if keep.sum() < min(2, n) or not kept_sum > 0.0:
            raise DegenerateReductionError(
                f"dropping at iteration {total} would leave {int(keep.sum())} of {n} points"
            )
        for k in np.flatnonzero(mask):
            dropped.append(DropEvent(total, int(work.original_indices[pos[k]]), float(lam[k])))
        lam = lam[keep] / kept_sum
        restart_weights.append(lam.copy())
        current = current.subset(keep)
        pos = pos[keep]
        restarts += 1

    survivors = np.array(work.original_indices[pos])
    full = np.zeros(n)
    full[pos] = lam
    lam_full = BarycentricCoord(full, simplex_tol=cfg.simplex_tol)
    center = original.points @ full
    radius = enclosing_radius(original, center)
    surv_radius = enclosing_radius(original.subset(pos), center)
    dists = np.sqrt(((original.points - center[:, None]) ** 2).sum(axis=0))
    outside = work.original_indices[dists > surv_radius * (1.0 + 1e-9) + 1e-12]
    return HeuristicReport(
        lam=BarycentricCoord(lam, simplex_tol=cfg.simplex_tol),
        survivors=survivors,
        lam_full=lam_full,
        ball=Ball(center, radius),
        survivor_radius=surv_radius,
        dropped=dropped,
        restarts=restarts,
        iterations=total,
        converged_within=converged,
        stop_reason=reason,
        uncovered=[int(i) for i in outside],
        restart_weights=restart_weights,
        traces=traces,
        augmented=work.augmented,
    )
