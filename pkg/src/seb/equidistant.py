"""Direct solve for the equidistant point (circumcenter) of affinely independent points."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.linalg import LinAlgError, cho_factor, cho_solve

from .errors import RankConditionError
from .geometry import BarycentricCoord, PointSet, _frozen

# smallest admissible Cholesky pivot, relative to the largest
PIVOT_RATIO = 1e-7
EQUIDISTANCE_RTOL = 1e-9


@dataclass(frozen=True, eq=False)
class EquidistantSystem:
    M: np.ndarray
    u: np.ndarray
    tau: float
    lambda_tilde: BarycentricCoord
    center: np.ndarray
    squared_radius: float

    @property
    def radius(self) -> float:
        return float(np.sqrt(self.squared_radius))


def _solve_lifted(points: np.ndarray):
    """Solve ``M lam = u + tau 1`` with ``M = 2 Phi+^T Phi+`` and ``1^T lam = 1``.

    ``points`` is ``(d, k)``. Returns ``(M, u, tau, lam)``; raises
    :class:`RankConditionError` if ``M`` is not numerically positive definite.
    """
    k = points.shape[1]
    lifted = np.vstack([np.ones((1, k)), points])
    M = 2.0 * lifted.T @ lifted
    u = np.einsum("ji,ji->i", points, points)
    try:
        factor = cho_factor(M, lower=True, check_finite=False)
    except LinAlgError:
        raise RankConditionError("M is not positive definite; points are affinely dependent") from None
    piv = np.abs(np.diag(factor[0]))
    if piv.min() <= PIVOT_RATIO * piv.max():
        raise RankConditionError("M is numerically singular; points are affinely dependent")
    ones = np.ones(k)
    x_u = cho_solve(factor, u, check_finite=False)
    x_1 = cho_solve(factor, ones, check_finite=False)
    tau = (1.0 - ones @ x_u) / (ones @ x_1)
    lam = x_u + tau * x_1
    return M, u, float(tau), lam


def equidistant_system(ps: PointSet) -> EquidistantSystem:
    """Full solve including ``M``, ``u`` and ``tau``, with a-posteriori checks."""
    M, u, tau, lam = _solve_lifted(ps.points)
    # the two-solve formula preserves the sum only to round-off
    lam = lam / lam.sum()
    center = ps.points @ lam
    diff = ps.points - center[:, None]
    sq = np.einsum("ji,ji->i", diff, diff)
    dist = np.sqrt(sq)
    if dist.max() - dist.min() > EQUIDISTANCE_RTOL * max(dist.max(), np.finfo(float).tiny):
        raise RankConditionError(
            f"equidistance check failed (spread {dist.max() - dist.min():.3g}); "
            "points are not in general position"
        )
    return EquidistantSystem(
        M=_frozen(M),
        u=_frozen(u),
        tau=tau,
        lambda_tilde=BarycentricCoord(lam),
        center=_frozen(center),
        squared_radius=float(sq.mean()),
    )


def solve_equidistant(ps: PointSet):
    """Barycentric coordinate and location of the point equidistant from all of ``ps``.

    Raises :class:`RankConditionError` when the points are not affinely
    independent (no such point, or not a unique one).

    >>> lam, q = solve_equidistant(PointSet.from_rows([[1, 0], [3, 0]]))
    >>> lam.weights.tolist(), q.tolist()
    ([0.5, 0.5], [2.0, 0.0])
    """
    es = equidistant_system(ps)
    return es.lambda_tilde, np.array(es.center)
