"""Shared fixtures and independent oracles.

The oracles here deliberately avoid the package: exact rational arithmetic
for the recurrence matrices and Cramer's rule for planar circumcenters.
"""
from fractions import Fraction

import numpy as np
import pytest

from seb import PointSet

EX1 = [[1, 0], [3, 0], [2, 2]]
EX2 = [[1, 0], [5, 0], [3, 1]]
EX5 = [
    [0.441234, 0.375473],
    [-0.405275, 0.405980],
    [-0.499223, 0.333663],
    [0.470587, -0.422787],
]


def appendix_b(p):
    """Three points (-1,0), (p,q), (p,-q) on the unit circle, p^2 + q^2 = 1."""
    q = np.sqrt(1.0 - p * p)
    return PointSet(np.array([[-1.0, p, p], [0.0, q, -q]]))


def exact_system(rows):
    """``R`` and ``c`` in exact rationals, straight from the closed forms."""
    pts = [[Fraction(x) for x in r] for r in rows]
    n = len(pts)
    dot = lambda a, b: sum(x * y for x, y in zip(a, b))
    D = [1 / dot(p, p) for p in pts]
    s = sum(D)
    omega = [[(s * D[i] * (i == j) - D[i] * D[j]) / (n * s) for j in range(n)] for i in range(n)]
    gram = [[dot(pts[i], pts[j]) for j in range(n)] for i in range(n)]
    R = [
        [(i == j) - sum(omega[i][k] * gram[k][j] for k in range(n)) for j in range(n)]
        for i in range(n)
    ]
    c = [Fraction(1, 2 * n) - D[i] / (2 * s) for i in range(n)]
    return R, c


def circumcenter_2d(a, b, c):
    """Circumcenter of a planar triangle by Cramer's rule on the bisector equations."""
    a, b, c = ([Fraction(v) for v in p] for p in (a, b, c))
    # 2(b-a).x = |b|^2 - |a|^2, 2(c-a).x = |c|^2 - |a|^2
    a11, a12 = 2 * (b[0] - a[0]), 2 * (b[1] - a[1])
    a21, a22 = 2 * (c[0] - a[0]), 2 * (c[1] - a[1])
    r1 = b[0] ** 2 + b[1] ** 2 - a[0] ** 2 - a[1] ** 2
    r2 = c[0] ** 2 + c[1] ** 2 - a[0] ** 2 - a[1] ** 2
    det = a11 * a22 - a12 * a21
    return ((r1 * a22 - a12 * r2) / det, (a11 * r2 - r1 * a21) / det)


def general_position(rng, n_max=8, d_max=6, margin=1e-2):
    """Gaussian points with ``n <= d + 1`` and well-separated singular values of the differences."""
    while True:
        d = int(rng.integers(1, d_max + 1))
        n = int(rng.integers(2, min(n_max, d + 1) + 1))
        X = rng.standard_normal((d, n))
        sv = np.linalg.svd(X[:, 1:] - X[:, :1], compute_uv=False)
        if sv[-1] > margin * sv[0]:
            return PointSet(X)


def random_simplex_point(rng, n):
    return rng.dirichlet(np.ones(n))


@pytest.fixture
def ex1():
    return PointSet.from_rows(EX1)


@pytest.fixture
def ex2():
    return PointSet.from_rows(EX2)


@pytest.fixture
def ex5():
    return PointSet.from_rows(EX5)
