"""Numerical integration rules on triangles and edges.

Triangle rules use the centroid rule (degree <= 1), the classic 3-point
edge-midpoint rule (degree 2) and a collapsed tensor Gauss rule (Duffy
transform) for higher degrees.  Weights are normalized to sum to one, so
integrals are ``area * sum(w * f)`` resp. ``length * sum(w * f)``.
"""
from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np

MAX_DEGREE = 20


@dataclass(frozen=True)
class TriangleRule:
    points: np.ndarray   # (n, 3) barycentric coordinates
    weights: np.ndarray  # (n,), positive, sums to 1
    exact_degree: int


@dataclass(frozen=True)
class EdgeRule:
    points: np.ndarray   # (n,) in [0, 1]
    weights: np.ndarray  # (n,), positive, sums to 1
    exact_degree: int


def _gauss01(n: int) -> tuple[np.ndarray, np.ndarray]:
    """Gauss-Legendre nodes/weights on [0, 1]; weights sum to 1."""
    x, w = np.polynomial.legendre.leggauss(n)
    return 0.5 * (x + 1.0), 0.5 * w


@lru_cache(maxsize=None)
def triangle_rule(exact_degree: int) -> TriangleRule:
    """Rule integrating polynomials up to ``exact_degree`` on any triangle."""
    if not 0 <= exact_degree <= MAX_DEGREE:
        raise ValueError(f"unsupported triangle quadrature degree {exact_degree}")
    if exact_degree <= 1:
        points = np.array([[1.0, 1.0, 1.0]]) / 3.0
        weights = np.array([1.0])
    elif exact_degree == 2:
        points = np.array([[0.0, 0.5, 0.5], [0.5, 0.0, 0.5], [0.5, 0.5, 0.0]])
        weights = np.full(3, 1.0 / 3.0)
    else:
        # Duffy transform x = u, y = v(1-u): the monomial x^a y^b pulls back
        # to u^a (1-u)^(b+1) v^b, so the u-direction needs degree d+1.
        nu = (exact_degree + 3) // 2
        nv = (exact_degree + 2) // 2
        u, wu = _gauss01(nu)
        v, wv = _gauss01(nv)
        U, V = np.meshgrid(u, v, indexing="ij")
        x = U.ravel()
        y = (V * (1.0 - U)).ravel()
        w = (np.outer(wu, wv) * (1.0 - U)).ravel()
        points = np.column_stack((1.0 - x - y, x, y))
        weights = 2.0 * w  # raw weights sum to 1/2 (the reference area)
    points.setflags(write=False)
    weights.setflags(write=False)
    return TriangleRule(points, weights, exact_degree)


@lru_cache(maxsize=None)
def edge_rule(exact_degree: int) -> EdgeRule:
    """Gauss rule on [0, 1] with ceil((degree+1)/2) points."""
    if not 0 <= exact_degree <= MAX_DEGREE:
        raise ValueError(f"unsupported edge quadrature degree {exact_degree}")
    n = max(1, (exact_degree + 2) // 2)
    points, weights = _gauss01(n)
    points.setflags(write=False)
    weights.setflags(write=False)
    return EdgeRule(points, weights, exact_degree)
