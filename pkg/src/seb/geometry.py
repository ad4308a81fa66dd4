"""Point sets, balls, barycentric coordinates and the basic SEB quantities.

Points are stored column-wise: ``PointSet.points`` has shape ``(d, n)`` so
that a barycentric vector ``lam`` maps to the point ``points @ lam``.
"""
from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass, field
from os import PathLike
from typing import BinaryIO, Sequence, Union

import numpy as np

from .errors import DimensionError, EmptyInputError, FormatError, ParseError

SIMPLEX_TOL = 1e-9
RANK_TOL = 1e-10
SUM_TOL = 1e-12
NORM_TOL = 1e-9


def _frozen(a, dtype=float):
    a = np.array(a, dtype=dtype, copy=True)
    a.setflags(write=False)
    return a


@dataclass(frozen=True, eq=False)
class PointSet:
    """``n`` points in ``R^d`` held as the columns of a ``(d, n)`` matrix.

    ``original_indices[k]`` is the index in the originally loaded set of
    column ``k``; it is the identity unless the set was reduced by the
    heuristic. ``augmented`` records whether a constant coordinate was
    prepended to move every point away from the origin.
    """

    points: np.ndarray
    original_indices: np.ndarray = None
    augmented: bool = False

    def __post_init__(self):
        pts = np.asarray(self.points, dtype=float)
        if pts.ndim != 2:
            raise DimensionError(f"points must be a (d, n) matrix, got shape {pts.shape}")
        d, n = pts.shape
        if n < 1 or d < 1:
            raise EmptyInputError(f"need n >= 1 and d >= 1, got d={d}, n={n}")
        if not np.all(np.isfinite(pts)):
            raise ParseError("point coordinates must be finite")
        object.__setattr__(self, "points", _frozen(pts))
        if self.original_indices is None:
            idx = np.arange(n)
        else:
            idx = np.asarray(self.original_indices, dtype=np.intp)
            if idx.shape != (n,):
                raise DimensionError("original_indices must have one entry per point")
            if len(np.unique(idx)) != n:
                raise ValueError("original_indices must be injective")
        object.__setattr__(self, "original_indices", _frozen(idx, np.intp))

    @classmethod
    def from_rows(cls, rows) -> "PointSet":
        """Build from an ``(n, d)`` array-like, one point per row."""
        rows = np.atleast_2d(np.asarray(rows, dtype=float))
        return cls(rows.T)

    @property
    def d(self) -> int:
        return self.points.shape[0]

    @property
    def n(self) -> int:
        return self.points.shape[1]

    @property
    def rows(self) -> np.ndarray:
        """Points as an ``(n, d)`` array."""
        return self.points.T

    def squared_norms(self) -> np.ndarray:
        """The vector ``u`` with ``u_i = ||P^i||^2``."""
        return np.einsum("ji,ji->i", self.points, self.points)

    def lifted(self) -> np.ndarray:
        """``(d+1, n)`` matrix with a row of ones stacked on top of the points."""
        return np.vstack([np.ones((1, self.n)), self.points])

    def subset(self, keep) -> "PointSet":
        """Columns selected by ``keep`` (boolean mask or index array), indices tracked."""
        keep = np.asarray(keep)
        if keep.dtype == bool:
            keep = np.flatnonzero(keep)
        return PointSet(
            self.points[:, keep],
            original_indices=self.original_indices[keep],
            augmented=self.augmented,
        )


@dataclass(frozen=True, eq=False)
class BarycentricCoord:
    """Weights ``lam`` with ``sum(lam) == 1``; membership in the simplex is tested
    with ``simplex_tol``."""

    weights: np.ndarray
    simplex_tol: float = SIMPLEX_TOL

    def __post_init__(self):
        w = np.asarray(self.weights, dtype=float)
        if w.ndim != 1 or w.size == 0:
            raise DimensionError("barycentric weights must be a non-empty vector")
        if self.simplex_tol < 0:
            raise ValueError("simplex_tol must be non-negative")
        total = math.fsum(w)
        # absolute 1e-12, relaxed only when the weights themselves are large
        if abs(total - 1.0) > SUM_TOL * max(1.0, float(np.abs(w).sum())):
            raise ValueError(f"barycentric weights sum to {total!r}, not 1")
        object.__setattr__(self, "weights", _frozen(w))

    @classmethod
    def uniform(cls, n: int, **kw) -> "BarycentricCoord":
        return cls(np.full(n, 1.0 / n), **kw)

    @classmethod
    def concentrated(cls, n: int, head: float = 0.9, **kw) -> "BarycentricCoord":
        """``(head, (1-head)/(n-1), ...)``; for ``n == 1`` this is just ``(1,)``."""
        if n == 1:
            return cls(np.ones(1), **kw)
        w = np.full(n, (1.0 - head) / (n - 1))
        w[0] = head
        return cls(w, **kw)

    @classmethod
    def vertex(cls, n: int, i: int, **kw) -> "BarycentricCoord":
        w = np.zeros(n)
        w[i] = 1.0
        return cls(w, **kw)

    @property
    def n(self) -> int:
        return self.weights.size

    def in_simplex(self) -> bool:
        return bool(self.weights.min() >= -self.simplex_tol)

    def __len__(self):
        return self.weights.size

    def __array__(self, dtype=None, copy=None):
        return np.asarray(self.weights, dtype=dtype)


@dataclass(frozen=True, eq=False)
class Ball:
    center: np.ndarray
    radius: float

    def __post_init__(self):
        c = np.asarray(self.center, dtype=float).ravel()
        if not np.all(np.isfinite(c)):
            raise ValueError("ball center must be finite")
        if not (self.radius >= 0.0):
            raise ValueError(f"ball radius must be non-negative, got {self.radius}")
        object.__setattr__(self, "center", _frozen(c))
        object.__setattr__(self, "radius", float(self.radius))

    def contains(self, ps: PointSet, rel_tol: float = 1e-9) -> bool:
        dist = np.sqrt(_sq_dists(ps, self.center))
        return bool(np.all(dist <= self.radius * (1.0 + rel_tol) + 1e-300))


def _weights(ps: PointSet, lam) -> np.ndarray:
    w = lam.weights if isinstance(lam, BarycentricCoord) else np.asarray(lam, dtype=float)
    if w.shape != (ps.n,):
        raise DimensionError(f"expected {ps.n} barycentric weights, got shape {w.shape}")
    return w


def _sq_dists(ps: PointSet, center) -> np.ndarray:
    c = np.asarray(center, dtype=float).ravel()
    if c.shape != (ps.d,):
        raise DimensionError(f"center has dimension {c.size}, points have {ps.d}")
    diff = ps.points - c[:, None]
    return np.einsum("ji,ji->i", diff, diff)


def load_points(source: Union[BinaryIO, bytes, str, PathLike], header: bool = False) -> PointSet:
    """Read a CSV points file, one point per row.

    ``source`` may be a binary stream, raw bytes, or a filesystem path.
    With ``header=True`` the first row is skipped. Blank lines are ignored.
    No preprocessing is applied.
    """
    if isinstance(source, (bytes, bytearray)):
        raw = bytes(source)
    elif isinstance(source, (str, PathLike)):
        with open(source, "rb") as fh:
            raw = fh.read()
    else:
        raw = source.read()
    try:
        text = raw.decode("utf-8-sig")
    except UnicodeDecodeError as exc:
        raise FormatError(f"points file is not valid UTF-8: {exc}") from None

    rows = [r for r in csv.reader(io.StringIO(text, newline="")) if any(f.strip() for f in r)]
    if header and rows:
        rows = rows[1:]
    if not rows:
        raise EmptyInputError("points file contains no points")

    width = len(rows[0])
    data = np.empty((len(rows), width))
    for i, row in enumerate(rows, start=1):
        if len(row) != width:
            raise FormatError(f"row {i} has {len(row)} fields, expected {width}")
        for j, tok in enumerate(row, start=1):
            try:
                data[i - 1, j - 1] = float(tok)
            except ValueError:
                raise ParseError(
                    f"row {i}, column {j}: cannot parse {tok.strip()!r} as a number",
                    row=i, column=j,
                ) from None
    if not np.all(np.isfinite(data)):
        raise ParseError("points file contains non-finite coordinates")
    return PointSet(data.T)


def dump_points(ps: PointSet) -> str:
    """CSV text for ``ps``, 17 significant digits per coordinate."""
    return "".join(",".join(format(x, ".17g") for x in row) + "\n" for row in ps.rows)


def preprocess_nonzero(ps: PointSet, constant: float = 1.0, tol_norm: float = NORM_TOL) -> PointSet:
    """Lift every point to ``(constant, P_1, ..., P_d)`` if any point is (near) the origin.

    The lift is affine, so barycentric coordinates of any combination are
    unchanged. Sets whose points all have norm above ``tol_norm`` are
    returned as-is.
    """
    if constant == 0:
        raise ValueError("constant must be nonzero")
    if tol_norm <= 0:
        raise ValueError("tol_norm must be positive")
    if np.sqrt(ps.squared_norms()).min() > tol_norm:
        return ps
    top = np.full((1, ps.n), float(constant))
    return PointSet(np.vstack([top, ps.points]), original_indices=ps.original_indices, augmented=True)


def evaluate_J(ps: PointSet, lam) -> float:
    """``(u, lam) - ||Phi lam||^2``.

    Non-negative and concave on the simplex; off the simplex it is still
    defined (the recurrence visits such points) but may be negative.
    """
    w = _weights(ps, lam)
    q = ps.points @ w
    return float(ps.squared_norms() @ w - q @ q)


def barycentric_to_point(ps: PointSet, lam) -> np.ndarray:
    return ps.points @ _weights(ps, lam)


def enclosing_radius(ps: PointSet, center) -> float:
    """Radius of the smallest ball around ``center`` that covers every point."""
    return float(np.sqrt(_sq_dists(ps, center).max()))


def check_rank_condition(ps: PointSet, tol_rank: float = RANK_TOL) -> bool:
    """True iff ``(P^2 - P^1, ..., P^n - P^1)`` has numerical rank ``n - 1``.

    Rank is the number of singular values above ``tol_rank`` times the
    largest one. A single point satisfies the (empty) condition.
    """
    if ps.n == 1:
        return True
    if ps.n - 1 > ps.d:
        return False
    diffs = ps.points[:, 1:] - ps.points[:, :1]
    sv = np.linalg.svd(diffs, compute_uv=False)
    if sv[0] == 0.0:
        return False
    return int(np.sum(sv > tol_rank * sv[0])) == ps.n - 1


def as_pointset(points: Union[PointSet, Sequence, np.ndarray]) -> PointSet:
    """Accept a ``PointSet`` or an ``(n, d)`` array of rows."""
    if isinstance(points, PointSet):
        return points
    return PointSet.from_rows(points)
