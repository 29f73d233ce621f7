"""Error norms and convergence-rate bookkeeping.

Provides the L2 error against the exact solution, the L2 and energy
distances to the degree-k interpolant (the two columns of the reference
convergence tables), the discrete H1 norm with interior-edge jump terms,
observed convergence rates, and an empirical probe of the equivalence
between the energy and discrete H1 norms.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .basis import DGSpace, interpolate
from .quadrature import edge_rule, triangle_rule
from .weakgrad import WeakGradientFactory


@dataclass
class ErrorRecord:
    level: int
    h: float
    ndof: int
    l2_error: float
    energy_error: float
    h1h_norm: float | None = None
    l2_rate: float | None = None
    energy_rate: float | None = None
    cg_iters: int | None = None
    assemble_ms: float | None = None
    solve_ms: float | None = None


def _areas(tv: np.ndarray) -> np.ndarray:
    e1, e2 = tv[:, 1] - tv[:, 0], tv[:, 2] - tv[:, 0]
    return 0.5 * np.abs(e1[:, 0] * e2[:, 1] - e1[:, 1] * e2[:, 0])


def l2_error(space: DGSpace, u_h: np.ndarray, u, degree: int | None = None) -> float:
    """||u - u_h|| over the mesh; the exact u is evaluated at quadrature points."""
    mesh = space.mesh
    rule = triangle_rule(2 * space.degree + 6 if degree is None else degree)
    v = mesh.vertices[mesh.triangles]
    pts = np.einsum("qc,tcd->tqd", rule.points, v)
    areas = _areas(v)
    lag = space.basis.values(rule.points)                       # (nloc, nq)
    uh_vals = np.einsum("tl,lq->tq", u_h.reshape(mesh.n_triangles, -1), lag)
    diff = uh_vals - (u(pts[..., 0], pts[..., 1]) + np.zeros(uh_vals.shape))
    return float(np.sqrt(np.einsum("t,tq,q->", areas, diff ** 2, rule.weights)))


def l2_interp_error(space: DGSpace, u_h: np.ndarray, u) -> float:
    """||u_h - I_h u||: L2 distance to the degree-k interpolant of u.

    Both arguments live in the discrete space, so a degree-2k rule
    integrates the error exactly.  This is the quantity tabulated in the
    reference convergence tables alongside |||u_h - I_h u|||.
    """
    return l2_error(space, u_h - interpolate(space, u),
                    lambda x, y: 0.0 * x, degree=2 * space.degree)


def energy_norm(space: DGSpace, factory: WeakGradientFactory, v: np.ndarray) -> float:
    """|||v|||: root sum over elements of the squared L2 norm of grad_w v."""
    total = 0.0
    for t in range(space.mesh.n_triangles):
        dofs, G, M = factory.gradient_and_mass(t)
        c = G @ v[dofs]
        total += c @ M @ c
    return float(np.sqrt(total))


def energy_error(space: DGSpace, factory: WeakGradientFactory,
                 u_h: np.ndarray, u) -> float:
    """|||u_h - I_h u||| with I_h the degree-k nodal interpolation of u."""
    return energy_norm(space, factory, u_h - interpolate(space, u))


def h1h_norm(space: DGSpace, v: np.ndarray) -> float:
    """Broken H1 norm: element gradients plus h_e^{-1}-weighted interior jumps."""
    mesh = space.mesh
    basis = space.basis
    k = space.degree
    vt = v.reshape(mesh.n_triangles, -1)

    rule = triangle_rule(max(2 * k - 2, 0) + 2)
    tv = mesh.vertices[mesh.triangles]
    areas = _areas(tv)
    _, grads_ref = basis.eval(rule.points)                      # (nloc, nq, 2)
    # Physical gradient = J^{-T} grad_ref per element.
    J = np.stack((tv[:, 1] - tv[:, 0], tv[:, 2] - tv[:, 0]), axis=-1)  # (nt,2,2)
    Jinv = np.linalg.inv(J)
    g_ref = np.einsum("tl,lqd->tqd", vt, grads_ref)
    g_phys = np.einsum("tde,tqd->tqe", Jinv, g_ref)
    total = float(np.einsum("t,tqd,tqd,q->", areas, g_phys, g_phys, rule.weights))

    erule = edge_rule(2 * k)
    tq = erule.points
    for e in np.nonzero(~mesh.boundary_edge_mask)[0]:
        a, b = mesh.edges[e]
        pts = mesh.vertices[a] + tq[:, None] * (mesh.vertices[b] - mesh.vertices[a])
        h_e = mesh.edge_lengths[e]
        traces = []
        for t in mesh.edge_tris[e]:
            bary = _bary_points(mesh, t, pts)
            traces.append(basis.values(bary).T @ vt[t])
        jump = traces[0] - traces[1]
        total += float(h_e ** -1 * h_e * np.sum(erule.weights * jump ** 2))
    return float(np.sqrt(total))


def _bary_points(mesh, t, pts):
    tv = mesh.triangle_vertices(t)
    J = np.column_stack((tv[1] - tv[0], tv[2] - tv[0]))
    lam12 = np.linalg.solve(J, (pts - tv[0]).T).T
    return np.column_stack((1.0 - lam12.sum(axis=1), lam12))


def convergence_rates(records: list[ErrorRecord]) -> list[ErrorRecord]:
    """Fill in rate = log2(e_prev / e_cur) between consecutive levels."""
    for prev, cur in zip(records, records[1:]):
        if cur.level != prev.level + 1:
            raise ValueError("levels must be consecutive")
        cur.l2_rate = _rate(prev.l2_error, cur.l2_error)
        cur.energy_rate = _rate(prev.energy_error, cur.energy_error)
    return records


def _rate(e_prev: float, e_cur: float) -> float | None:
    if e_prev > 0 and e_cur > 0 and np.isfinite(e_prev) and np.isfinite(e_cur):
        return float(np.log2(e_prev / e_cur))
    return None


def norm_equivalence_probe(space: DGSpace, factory: WeakGradientFactory,
                           samples: int, seed: int) -> tuple[float, float]:
    """Min and max of |||v||| / ||v||_{1,h} over random v with zero boundary DOFs."""
    if samples < 1:
        raise ValueError("samples must be >= 1")
    rng = np.random.default_rng(seed)
    lo, hi = np.inf, 0.0
    for _ in range(samples):
        v = rng.uniform(-1.0, 1.0, space.n_dofs)
        v[space.boundary_mask] = 0.0
        ratio = energy_norm(space, factory, v) / h1h_norm(space, v)
        lo = min(lo, ratio)
        hi = max(hi, ratio)
    return float(lo), float(hi)
