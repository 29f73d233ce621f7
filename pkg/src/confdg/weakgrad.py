"""Element-local weak gradient operators.

On each element T the weak gradient of a DG function v is the RT_k(T)
field defined by

    (grad_w v, tau)_T = -(v, div tau)_T + <{v}, tau . n>_dT

for all tau in RT_k(T), where {v} is the edge average (the single trace on
boundary edges).  The operator is a dense matrix G mapping the DOF values
of the patch (T plus its edge neighbors) to RT coefficients, G = M^{-1} B
with M the RT mass matrix.

All geometry inside the build is expressed relative to the element's first
vertex, so congruent translated patches yield bitwise identical matrices;
the factory exploits this with a signature cache on structured meshes.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.linalg import solve_triangular

from .basis import DGSpace, RTBasis
from .mesh import Mesh
from .quadrature import EdgeRule, TriangleRule, edge_rule, triangle_rule


@dataclass
class LocalWeakGradient:
    """Weak gradient operator of one element.

    ``patch`` lists the owner element first, then its edge neighbors in
    ascending index order; ``patch_dofs`` are the corresponding global DOF
    ids (local node order within each element).  ``G`` has shape
    (rt_dim, len(patch_dofs)).
    """

    element: int
    patch: tuple[int, ...]
    patch_dofs: np.ndarray
    G: np.ndarray
    M: np.ndarray
    rt: RTBasis


def _tri_area(verts: np.ndarray) -> float:
    e1, e2 = verts[1] - verts[0], verts[2] - verts[0]
    return 0.5 * abs(e1[0] * e2[1] - e1[1] * e2[0])


def _mirror_upper(a: np.ndarray) -> np.ndarray:
    """Exactly symmetric matrix built from the upper triangle of ``a``."""
    return np.triu(a) + np.triu(a, 1).T


def _bary_in(rel_verts: np.ndarray, pts_rel: np.ndarray) -> np.ndarray:
    """Barycentric coordinates of points w.r.t. a triangle, both relative."""
    r0 = rel_verts[0]
    J = np.column_stack((rel_verts[1] - r0, rel_verts[2] - r0))
    lam12 = np.linalg.solve(J, (pts_rel - r0).T).T
    return np.column_stack((1.0 - lam12.sum(axis=1), lam12))


def rt_mass_matrix(rt: RTBasis, rule: TriangleRule) -> np.ndarray:
    """SPD mass matrix of the RT basis, integrated with ``rule``."""
    pts_rel = rule.points @ rt.rel_verts
    vals = rt.values_rel(pts_rel)
    area = _tri_area(rt.rel_verts)
    M = area * np.einsum("iqd,jqd,q->ij", vals, vals, rule.weights)
    return _mirror_upper(M)


def _outward_normal(rel_a: np.ndarray, rel_b: np.ndarray, rel_opp: np.ndarray) -> np.ndarray:
    t = rel_b - rel_a
    n = np.array([t[1], -t[0]]) / np.hypot(t[0], t[1])
    if np.dot(n, 0.5 * (rel_a + rel_b) - rel_opp) < 0:
        n = -n
    return n


class WeakGradientFactory:
    """Builds (and caches) weak gradient operators for all elements.

    The cache is keyed on the exact relative geometry of the patch, which on
    the structured dyadic meshes used here collapses to a handful of classes
    per level; cached and freshly built matrices are bitwise identical.
    """

    def __init__(self, mesh: Mesh, space: DGSpace,
                 vol_degree: int | None = None, edge_degree: int | None = None):
        if space.mesh is not mesh:
            raise ValueError("space was built on a different mesh")
        k = space.degree
        self.mesh = mesh
        self.space = space
        self.vol_rule: TriangleRule = triangle_rule(2 * k + 2 if vol_degree is None else vol_degree)
        self.edge_rule: EdgeRule = edge_rule(2 * k + 1 if edge_degree is None else edge_degree)
        self._cache: dict = {}

    def _patch(self, t: int) -> tuple[list[int], list[int]]:
        """Edge neighbor per local edge (-1 on boundary) and the patch list."""
        mesh = self.mesh
        nbs = []
        for e in mesh.tri_edges[t]:
            lt, rt_ = mesh.edge_tris[e]
            nbs.append(int(rt_) if lt == t else int(lt))
        patch = [t] + sorted(n for n in set(nbs) if n >= 0)
        return nbs, patch

    def _build_matrices(self, t: int, nbs: list[int], patch: list[int]):
        mesh, space = self.mesh, self.space
        basis = space.basis
        k = space.degree
        nloc = basis.n_nodes
        pos = {e: i for i, e in enumerate(patch)}

        v0 = mesh.vertices[mesh.triangles[t, 0]]
        rel_T = mesh.vertices[mesh.triangles[t]] - v0
        rt = RTBasis(rel_T, k)
        area = _tri_area(rel_T)

        M = rt_mass_matrix(rt, self.vol_rule)
        B = np.zeros((rt.n_dofs, len(patch) * nloc))

        # Volume term -(v, div tau)_T hits only the owner block.
        vol_pts = self.vol_rule.points @ rel_T
        divs = rt.divergences_rel(vol_pts)
        lag_vals = basis.values(self.vol_rule.points)
        B[:, :nloc] -= area * np.einsum("iq,jq,q->ij", divs, lag_vals, self.vol_rule.weights)

        # Edge terms <{v}, tau . n>_dT.
        tq, wq = self.edge_rule.points, self.edge_rule.weights
        for m in range(3):
            e = mesh.tri_edges[t, m]
            a, b = mesh.edges[e]
            rel_a = mesh.vertices[a] - v0
            rel_b = mesh.vertices[b] - v0
            pts = rel_a + tq[:, None] * (rel_b - rel_a)
            h_e = mesh.edge_lengths[e]
            n = _outward_normal(rel_a, rel_b, rel_T[m])
            taun = np.einsum("iqd,d->iq", rt.values_rel(pts), n)

            own_vals = basis.values(_bary_in(rel_T, pts))
            interior = nbs[m] >= 0
            factor = 0.5 if interior else 1.0
            B[:, :nloc] += h_e * factor * np.einsum("iq,jq,q->ij", taun, own_vals, wq)
            if interior:
                rel_N = mesh.vertices[mesh.triangles[nbs[m]]] - v0
                nb_vals = basis.values(_bary_in(rel_N, pts))
                c = pos[nbs[m]] * nloc
                B[:, c:c + nloc] += h_e * 0.5 * np.einsum("iq,jq,q->ij", taun, nb_vals, wq)

        try:
            L = np.linalg.cholesky(M)
        except np.linalg.LinAlgError as exc:
            raise np.linalg.LinAlgError(
                f"RT mass matrix on element {t} is not SPD "
                "(degenerate triangle or insufficient quadrature)") from exc
        W = solve_triangular(L, B, lower=True)
        G = solve_triangular(L.T, W, lower=False)
        S = _mirror_upper(W.T @ W)  # = G^T M G, exactly symmetric
        return M, G, S

    def _get(self, t: int):
        mesh = self.mesh
        nbs, patch = self._patch(t)
        pos = {e: i for i, e in enumerate(patch)}
        v0 = mesh.vertices[mesh.triangles[t, 0]]

        def rel_key(elem):
            return tuple((mesh.vertices[mesh.triangles[elem]] - v0).ravel())

        key = (rel_key(t),
               tuple((rel_key(n), pos[n]) if n >= 0 else None for n in nbs))
        hit = self._cache.get(key)
        if hit is None:
            hit = self._build_matrices(t, nbs, patch)
            self._cache[key] = hit
        return hit, patch

    def patch_dofs(self, patch: list[int]) -> np.ndarray:
        return self.space.elem_dofs[patch].ravel()

    def operator(self, t: int) -> LocalWeakGradient:
        (M, G, _), patch = self._get(t)
        v = self.mesh.triangle_vertices(t)
        rt = RTBasis(v - v[0], self.space.degree, origin=v[0])
        return LocalWeakGradient(t, tuple(patch), self.patch_dofs(patch), G, M, rt)

    def stiffness(self, t: int) -> tuple[np.ndarray, np.ndarray]:
        """Patch DOF ids and the exactly symmetric local stiffness G^T M G."""
        (_, _, S), patch = self._get(t)
        return self.patch_dofs(patch), S

    def gradient_and_mass(self, t: int) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        (M, G, _), patch = self._get(t)
        return self.patch_dofs(patch), G, M


def build_local_weak_gradient(mesh: Mesh, space: DGSpace, t: int,
                              factory: WeakGradientFactory | None = None) -> LocalWeakGradient:
    """Weak gradient operator of element ``t`` (convenience wrapper)."""
    if factory is None:
        factory = WeakGradientFactory(mesh, space)
    return factory.operator(t)


def apply_weak_gradient(op: LocalWeakGradient, dofs: np.ndarray, points: np.ndarray) -> np.ndarray:
    """Evaluate grad_w of the patch DOF vector at physical points, (npts, 2)."""
    coeffs = op.G @ np.asarray(dofs, dtype=float)
    vals = op.rt.values(points)
    return np.einsum("i,ipd->pd", coeffs, vals)
