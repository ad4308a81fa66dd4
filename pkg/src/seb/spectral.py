"""Eigenvalue structure of the recurrence and the resulting convergence rate.

The eigenvalues ``rho`` of ``Omega Phi^T Phi`` are real and lie in
``[0, 1]``; ``R = I - Omega Phi^T Phi`` therefore has eigenvalues
``eta = 1 - rho``. The second-largest, ``eta2``, is the linear rate of
convergence and ``kappa = 1 / ln(1 / eta2)`` scales the iteration count.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .errors import DiagnosticsError, UnboundedKappaError
from .geometry import PointSet, check_rank_condition
from .recurrence import RecurrenceSystem

KAPPA_LIMIT = 1e-14
SPECTRUM_TOL = 1e-10


@dataclass(frozen=True, eq=False)
class SpectralDiagnostics:
    rho: np.ndarray
    eta: np.ndarray
    eta2: Optional[float]
    kappa: Optional[float]
    det_w: Optional[float]
    rank_condition: bool

    @property
    def kappa_unbounded(self) -> bool:
        return self.eta2 is not None and self.kappa is None

    def predicted_iterations(self, eps: float) -> float:
        """``kappa * ln(1/eps)``: the iteration-count estimate without the unknown ``ln K`` term."""
        return estimate_kappa(self) * math.log(1.0 / eps)


def _psd_sqrt(a: np.ndarray) -> np.ndarray:
    w, v = np.linalg.eigh(a)
    w = np.clip(w, 0.0, None)
    return (v * np.sqrt(w)) @ v.T


def _symmetrized(sys: RecurrenceSystem) -> np.ndarray:
    """``Omega^1/2 G Omega^1/2``: symmetric and similar to ``Omega G``."""
    pts = sys.points.points
    root = _psd_sqrt(np.asarray(sys.Omega))
    half = root @ pts.T
    sym = half @ half.T
    return 0.5 * (sym + sym.T)


def reduced_matrix(sys: RecurrenceSystem, ps: Optional[PointSet] = None) -> np.ndarray:
    """The ``(n-1) x (n-1)`` matrix ``W = E0 Omega Phi^T Phi E1``.

    ``E0`` drops the last coordinate and ``E1`` restores it from the sum-zero
    constraint, so the eigenvalues of ``W`` are the full spectrum of
    ``Omega Phi^T Phi`` minus the zero belonging to the all-ones direction.
    """
    ps = sys.points if ps is None else ps
    n = sys.n
    if n < 2:
        raise ValueError("reduced matrix needs at least two points")
    A = np.asarray(sys.A) if ps is sys.points else np.asarray(sys.Omega) @ (ps.points.T @ ps.points)
    # A @ E1 == A[:, :-1] - A[:, -1:]
    return A[:-1, :-1] - A[:-1, -1:]


def compute_spectrum(sys: RecurrenceSystem, ps: Optional[PointSet] = None) -> SpectralDiagnostics:
    """Eigenvalues of ``Omega Phi^T Phi`` (ascending) and of ``R`` (descending), with ``eta2`` and ``kappa``.

    Raises :class:`DiagnosticsError` if the eigensolve fails or the spectrum
    leaves ``[0, 1]`` by more than round-off, which the theory rules out.
    """
    ps = sys.points if ps is None else ps
    try:
        rho = np.linalg.eigvalsh(_symmetrized(sys))
    except np.linalg.LinAlgError as exc:
        raise DiagnosticsError(f"symmetric eigensolve did not converge: {exc}") from None
    rho = np.sort(rho)
    if rho[0] < -SPECTRUM_TOL or rho[-1] > 1.0 + SPECTRUM_TOL:
        raise DiagnosticsError(f"spectrum [{rho[0]:.3g}, {rho[-1]:.3g}] lies outside [0, 1]")
    if rho.sum() > 1.0 + SPECTRUM_TOL:
        raise DiagnosticsError(f"trace {rho.sum():.17g} exceeds 1")
    rank_ok = check_rank_condition(ps)
    if rank_ok and ps.n >= 2 and not (rho[0] <= SPECTRUM_TOL < rho[1]):
        raise DiagnosticsError("rank condition holds but the zero eigenvalue is not simple")
    eta = 1.0 - rho
    eta2 = kappa = det_w = None
    if ps.n >= 2:
        eta2 = float(eta[1])
        kappa = None if eta2 >= 1.0 - KAPPA_LIMIT else _kappa(eta2)
        det_w = float(np.linalg.det(reduced_matrix(sys, ps)))
    return SpectralDiagnostics(
        rho=rho, eta=eta, eta2=eta2, kappa=kappa, det_w=det_w, rank_condition=rank_ok
    )


def _kappa(eta2: float) -> float:
    if eta2 <= 0.0:
        return 0.0
    return 1.0 / math.log(1.0 / eta2)


def estimate_kappa(diag) -> float:
    """``1 / ln(1 / eta2)``; accepts diagnostics or a bare ``eta2``.

    Raises :class:`UnboundedKappaError` when ``eta2`` is within 1e-14 of 1.

    >>> round(estimate_kappa(0.5), 6)
    1.442695
    """
    eta2 = diag.eta2 if isinstance(diag, SpectralDiagnostics) else float(diag)
    if eta2 is None:
        raise DiagnosticsError("eta2 is undefined for a single point")
    if eta2 >= 1.0 - KAPPA_LIMIT:
        raise UnboundedKappaError(f"eta2 = {eta2!r} is too close to 1; kappa is unbounded")
    return _kappa(eta2)
