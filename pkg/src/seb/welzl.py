"""Exact smallest enclosing ball via Welzl's ``mb(P, Q)`` recursion.

The recursion is run in its move-to-front form with an outer pivoting loop
(Gärtner, "Fast and robust smallest enclosing balls", 1999). Both are
reorderings of the same ``mb(P, Q)`` recursion: each recursive call still
forces the violating point onto the boundary and the base case is the
circumball of ``Q``. They keep the oracle fast in 30+ dimensions, where the
plain recursion needs millions of circumball solves.

This module is the ground truth for every other solver and must not depend
on the recurrence code.
"""
from __future__ import annotations

import sys
from dataclasses import dataclass
from typing import Optional, Sequence, Tuple

import numpy as np

from .equidistant import _solve_lifted
from .errors import DegenerateSupportError, EmptyInputError, RankConditionError
from .geometry import SIMPLEX_TOL, Ball, BarycentricCoord, PointSet, as_pointset

OUTSIDE_RTOL = 1e-12
MAX_RETRIES = 3


@dataclass(frozen=True)
class SupportSet:
    """Indices (ascending) of the points that determine the ball."""

    indices: Tuple[int, ...]

    def __len__(self):
        return len(self.indices)

    def __iter__(self):
        return iter(self.indices)


def _circumball_weights(pts: np.ndarray) -> np.ndarray:
    """Barycentric weights of the circumcenter of the ``(d, k)`` columns ``pts``."""
    k = pts.shape[1]
    if k == 1:
        return np.ones(1)
    # translation-invariant; centering keeps M well conditioned
    shifted = pts - pts.mean(axis=1, keepdims=True)
    try:
        _, _, _, lam = _solve_lifted(shifted)
    except RankConditionError as exc:
        raise DegenerateSupportError(str(exc)) from None
    return lam / lam.sum()


def circumball(points) -> Ball:
    """Smallest ball with every given point on its surface.

    ``points`` is a :class:`PointSet` or an ``(k, d)`` array of rows, and the
    points must be affinely independent (``k <= d + 1``).

    >>> b = circumball([[1.0, 0.0], [3.0, 0.0], [2.0, 2.0]])
    >>> b.center.tolist(), b.radius
    ([2.0, 0.75], 1.25)
    """
    ps = as_pointset(points)
    if ps.n > ps.d + 1:
        raise DegenerateSupportError(f"{ps.n} points cannot be affinely independent in R^{ps.d}")
    lam = _circumball_weights(ps.points)
    center = ps.points @ lam
    diff = ps.points - center[:, None]
    return Ball(center, float(np.sqrt(np.einsum("ji,ji->i", diff, diff).max())))


class _Basis:
    """Incremental circumball of a stack of boundary points.

    Each push orthogonalizes the new point against the current affine hull
    and moves the center along the new direction, so a push costs
    ``O(d m)`` instead of a fresh ``O(m^3)`` solve. ``center`` and ``sqr_r``
    keep the most recently computed ball even after pops; that is the value
    a recursive call hands back to its caller.
    """

    def __init__(self, d: int):
        self.m = 0
        self.q0 = None
        # orthonormal basis of the support's affine directions, one per row
        self.dirs = np.zeros((d + 1, d))
        self.cs = np.zeros((d + 2, d))
        self.r2s = np.zeros(d + 2)
        self.center = np.zeros(d)
        self.sqr_r = -1.0

    def push(self, p: np.ndarray) -> bool:
        m = self.m
        if m == 0:
            self.q0 = p
            self.cs[0] = p
            self.r2s[0] = 0.0
        else:
            v = p - self.q0
            norm0 = v @ v
            if m > 1:
                basis = self.dirs[: m - 1]
                v = v - (basis @ v) @ basis
                vv = v @ v
                # heavy cancellation: one more pass restores orthogonality (Kahan-Parlett)
                if vv < 0.5 * norm0:
                    v = v - (basis @ v) @ basis
                    vv = v @ v
            else:
                vv = norm0
            # affinely dependent on the current support: refuse
            if vv <= 1e-28 * norm0 or vv == 0.0:
                return False
            c_prev = self.cs[m - 1]
            diff = p - c_prev
            e = diff @ diff - self.r2s[m - 1]
            f = e / (2.0 * vv)
            self.cs[m] = c_prev + f * v
            self.r2s[m] = self.r2s[m - 1] + 0.5 * e * f
            self.dirs[m - 1] = v / np.sqrt(vv)
        # a view is safe: cs[m] is only rewritten by a later push, which repoints center
        self.center = self.cs[m]
        self.sqr_r = float(self.r2s[m])
        self.m = m + 1
        return True

    def pop(self):
        self.m -= 1


def _move_to_front(order: np.ndarray, j: int):
    p = order[j]
    order[1 : j + 1] = order[0:j].copy()
    order[0] = p


def _miniball(rows: np.ndarray, order: np.ndarray):
    """Run the pivoting move-to-front recursion; returns support indices (in ``rows``)."""
    n, d = rows.shape
    basis = _Basis(d)
    sq_norms = np.einsum("ij,ij->i", rows, rows)
    state = {"support_end": 0}

    def excess(lo, hi):
        # one matvec over all points beats gathering the rows first
        c = basis.center
        ex = (sq_norms - 2.0 * (rows @ c))[order[lo:hi]] + (c @ c - basis.sqr_r)
        r2 = basis.sqr_r
        return ex, (r2 if r2 > 0.0 else 0.0) * (2.0 * OUTSIDE_RTOL)

    def mtf(end):
        state["support_end"] = 0
        if basis.m == d + 1:
            return
        k = 0
        while k < end:
            if basis.sqr_r < 0.0:
                j = k
            else:
                ex, thresh = excess(k, end)
                hits = ex > thresh
                first = int(hits.argmax())
                if not hits[first]:
                    break
                j = k + first
            if basis.push(rows[order[j]]):
                mtf(j)
                basis.pop()
                # support_end <= j here, so the front insertion shifts it by one
                state["support_end"] += 1
                _move_to_front(order, j)
            k = j + 1

    t = 1
    mtf(t)
    while t < n:
        ex, thresh = excess(t, n)
        a = int(np.argmax(ex))
        if not ex[a] > thresh:
            break
        pivot = t + a
        t = state["support_end"]
        if t == pivot:
            t += 1
        old = basis.sqr_r
        basis.push(rows[order[pivot]])
        mtf(state["support_end"])
        basis.pop()
        _move_to_front(order, pivot)
        # list positions before the pivot shift right by one
        if state["support_end"] <= pivot:
            state["support_end"] += 1
        if t < pivot:
            t += 1
        if not basis.sqr_r > old:
            break
    return order[: state["support_end"]].copy(), basis.sqr_r


def _finalize(ps: PointSet, support: np.ndarray, simplex_tol: float):
    support = np.sort(support)
    while True:
        lam_s = _circumball_weights(ps.points[:, support])
        worst = int(np.argmin(lam_s))
        # co-spherical extras can enter the support with a negative weight
        if lam_s[worst] >= -simplex_tol or support.size == 1:
            break
        support = np.delete(support, worst)
    lam = np.zeros(ps.n)
    lam[support] = lam_s
    center = ps.points[:, support] @ lam_s
    diff = ps.points - center[:, None]
    radius = float(np.sqrt(np.einsum("ji,ji->i", diff, diff).max()))
    return Ball(center, radius), SupportSet(tuple(int(i) for i in support)), lam


def solve_welzl(ps: PointSet, seed=0, simplex_tol: float = SIMPLEX_TOL):
    """Exact smallest enclosing ball of ``ps``.

    The initial point order is a permutation drawn from
    ``numpy.random.default_rng(seed)``. Returns ``(ball, support, lam)``
    where ``lam`` is the barycentric coordinate of the center, nonzero only
    on the support. If the final support turns out numerically degenerate
    the solve is repeated with a fresh order, up to three times.
    """
    ps = as_pointset(ps)
    if ps.n == 0:
        raise EmptyInputError("no points")
    if ps.n == 1:
        lam = BarycentricCoord(np.ones(1), simplex_tol=simplex_tol)
        return Ball(ps.points[:, 0], 0.0), SupportSet((0,)), lam

    rows = np.ascontiguousarray(ps.rows)
    rng = np.random.default_rng(seed)
    last_error: Optional[Exception] = None
    limit = max(sys.getrecursionlimit(), ps.d + 100)
    for _ in range(1 + MAX_RETRIES):
        order = rng.permutation(ps.n)
        old_limit = sys.getrecursionlimit()
        sys.setrecursionlimit(limit)
        try:
            support, sqr_r = _miniball(rows, order)
        finally:
            sys.setrecursionlimit(old_limit)
        try:
            ball, sup, lam = _finalize(ps, support, simplex_tol)
        except DegenerateSupportError as exc:
            last_error = exc
            continue
        if abs(ball.radius ** 2 - sqr_r) <= 1e-9 * max(sqr_r, 1e-300):
            return ball, sup, BarycentricCoord(lam, simplex_tol=simplex_tol)
        last_error = DegenerateSupportError(
            f"support re-solve disagrees with the recursion (r^2 {ball.radius ** 2!r} vs {sqr_r!r})"
        )
    raise DegenerateSupportError(f"Welzl recursion failed after {MAX_RETRIES} retries: {last_error}")
