"""Jacobi-preconditioned conjugate gradients for the reduced SPD system."""
from __future__ import annotations

import time
from dataclasses import dataclass

import numpy as np

from .assembly import SparseSPDSystem


class SolverError(RuntimeError):
    pass


class NonConvergenceError(SolverError):
    """CG hit the iteration limit; carries the best iterate found."""

    def __init__(self, iterations, relative_residual, x):
        super().__init__(
            f"CG did not converge in {iterations} iterations "
            f"(relative residual {relative_residual:.3e})")
        self.iterations = iterations
        self.relative_residual = relative_residual
        self.x = x


class IndefiniteSystemError(SolverError):
    """Negative curvature encountered: the matrix is not positive definite."""


@dataclass
class SolveReport:
    iterations: int
    relative_residual: float
    wall_time: float


def pcg(A, b, tol: float = 1e-13, max_iter: int | None = None,
        callback=None) -> tuple[np.ndarray, int, float]:
    """Conjugate gradients with Jacobi preconditioning.

    Returns ``(x, iterations, relative_residual)``; convergence means
    ``||b - Ax|| <= tol * ||b||``.  Raises IndefiniteSystemError on
    negative curvature and NonConvergenceError at the iteration limit.
    """
    b = np.asarray(b, dtype=float)
    n = len(b)
    if max_iter is None:
        max_iter = int(20 * np.sqrt(n)) + 1000
    bnorm = np.linalg.norm(b)
    if bnorm == 0.0:
        return np.zeros(n), 0, 0.0

    diag = A.diagonal()
    if np.any(diag <= 0):
        raise IndefiniteSystemError("nonpositive diagonal entry")
    inv_diag = 1.0 / diag

    x = np.zeros(n)
    r = b.copy()
    z = inv_diag * r
    p = z.copy()
    rz = r @ z
    best_x, best_res = x.copy(), 1.0
    for it in range(1, max_iter + 1):
        Ap = A @ p
        pAp = p @ Ap
        if pAp <= 0.0:
            raise IndefiniteSystemError(
                f"negative curvature at iteration {it} (p'Ap = {pAp:.3e})")
        alpha = rz / pAp
        x = x + alpha * p
        r = r - alpha * Ap
        res = np.linalg.norm(r) / bnorm
        if callback is not None:
            callback(x)
        if res < best_res:
            best_res = res
            best_x = x.copy()
        if res <= tol:
            return x, it, res
        z = inv_diag * r
        rz_new = r @ z
        p = z + (rz_new / rz) * p
        rz = rz_new
    raise NonConvergenceError(max_iter, best_res, best_x)


def solve_spd(system: SparseSPDSystem, tol: float = 1e-13,
              max_iter: int | None = None, callback=None) -> tuple[np.ndarray, SolveReport]:
    """Solve the reduced system and reinsert the boundary values.

    Returns the full DOF vector over the whole DG space plus a SolveReport.
    """
    t0 = time.perf_counter()
    x_free, iters, res = pcg(system.A, system.b, tol=tol, max_iter=max_iter,
                             callback=callback)
    report = SolveReport(iters, res, time.perf_counter() - t0)
    return system.expand(x_free), report
