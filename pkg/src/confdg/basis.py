"""Element bases: nodal Lagrange P_k, Raviart-Thomas RT_k, and the DG space.

The scalar space is piecewise P_k with element-local Lagrange nodes on the
principal lattice; nothing is shared between elements.  The vector space
RT_k(T) = [P_k(T)]^2 + x P_k(T) is built directly on the physical element
using monomials centered at the centroid and scaled by the diameter.
"""
from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .mesh import Mesh

MIN_DEGREE = 1
MAX_DEGREE = 5


def p_dim(k: int) -> int:
    """Dimension of P_k on a triangle."""
    return (k + 1) * (k + 2) // 2


def _check_degree(k: int) -> None:
    if not MIN_DEGREE <= k <= MAX_DEGREE:
        raise ValueError(f"polynomial degree must be in [{MIN_DEGREE}, {MAX_DEGREE}], got {k}")


class LagrangeBasis:
    """Lagrange basis of degree k on the reference triangle (0,0),(1,0),(0,1).

    Nodes sit on the principal lattice (i/k, j/k), i + j <= k, ordered with
    j as the outer loop; the three vertex nodes are indices 0, k and -1.
    Coefficients come from inverting the monomial Vandermonde matrix, which
    is well conditioned for k <= 5.
    """

    def __init__(self, degree: int):
        _check_degree(degree)
        self.degree = degree
        k = degree
        self.lattice = np.array([(i, j) for j in range(k + 1) for i in range(k + 1 - j)],
                                dtype=np.int64)
        self.nodes_xy = self.lattice / k
        self.n_nodes = p_dim(k)
        self._exps = np.array([(a, d - a) for d in range(k + 1) for a in range(d + 1)],
                              dtype=np.int64)
        vand = self._monomials(self.nodes_xy)          # (nodes, monos)
        self._coeffs = np.linalg.inv(vand)             # (monos, nodes)

    @property
    def nodes_bary(self) -> np.ndarray:
        x, y = self.nodes_xy[:, 0], self.nodes_xy[:, 1]
        return np.column_stack((1.0 - x - y, x, y))

    def _monomials(self, xy: np.ndarray) -> np.ndarray:
        a, b = self._exps[:, 0], self._exps[:, 1]
        return xy[:, 0:1] ** a * xy[:, 1:2] ** b       # (pts, monos)

    def _monomial_grads(self, xy: np.ndarray) -> np.ndarray:
        a, b = self._exps[:, 0], self._exps[:, 1]
        x, y = xy[:, 0:1], xy[:, 1:2]
        dx = np.where(a > 0, a * x ** np.maximum(a - 1, 0) * y ** b, 0.0)
        dy = np.where(b > 0, b * x ** a * y ** np.maximum(b - 1, 0), 0.0)
        return np.stack((dx, dy), axis=-1)             # (pts, monos, 2)

    def eval(self, bary: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        """Values and reference gradients of all basis functions.

        Parameters
        ----------
        bary : (npts, 3) array of barycentric coordinates (rows sum to 1).

        Returns
        -------
        values : (n_nodes, npts)
        grads : (n_nodes, npts, 2) gradients in reference coordinates.
        """
        bary = np.atleast_2d(np.asarray(bary, dtype=float))
        xy = bary[:, 1:3]
        values = self._coeffs.T @ self._monomials(xy).T
        grads = np.einsum("mn,pmd->npd", self._coeffs, self._monomial_grads(xy))
        return values, grads

    def values(self, bary: np.ndarray) -> np.ndarray:
        return self.eval(bary)[0]


@lru_cache(maxsize=None)
def lagrange_basis(degree: int) -> LagrangeBasis:
    return LagrangeBasis(degree)


class RTBasis:
    """Basis of RT_k(T) on a physical triangle, dimension (k+1)(k+3).

    Members are (m, 0) and (0, m) for the scaled monomials m of degree <= k,
    followed by X q for the k+1 scaled monomials q of exact degree k, where
    X = (x - centroid) / diameter.  The triangle is passed through its
    vertex offsets relative to an origin so that congruent translated
    elements produce bitwise identical matrices.
    """

    def __init__(self, rel_verts: np.ndarray, degree: int, origin: np.ndarray | None = None):
        _check_degree(degree)
        rel_verts = np.asarray(rel_verts, dtype=float)
        e1, e2 = rel_verts[1] - rel_verts[0], rel_verts[2] - rel_verts[0]
        area2 = e1[0] * e2[1] - e1[1] * e2[0]
        if area2 == 0.0:
            raise ValueError("degenerate triangle")
        self.degree = degree
        self.rel_verts = rel_verts
        self.origin = np.zeros(2) if origin is None else np.asarray(origin, dtype=float)
        self.centroid_rel = rel_verts.mean(axis=0)
        d = rel_verts - np.roll(rel_verts, 1, axis=0)
        self.diam = float(np.hypot(d[:, 0], d[:, 1]).max())
        k = degree
        self._exps = np.array([(a, d - a) for d in range(k + 1) for a in range(d + 1)],
                              dtype=np.int64)
        self.n_dofs = 2 * p_dim(k) + (k + 1)

    def _scaled(self, pts_rel: np.ndarray) -> np.ndarray:
        return (pts_rel - self.centroid_rel) / self.diam

    def _monos(self, X: np.ndarray) -> np.ndarray:
        a, b = self._exps[:, 0], self._exps[:, 1]
        return X[:, 0:1] ** a * X[:, 1:2] ** b         # (pts, nP)

    def values_rel(self, pts_rel: np.ndarray) -> np.ndarray:
        """Basis values at points given relative to the origin, (n_dofs, npts, 2)."""
        pts_rel = np.atleast_2d(np.asarray(pts_rel, dtype=float))
        X = self._scaled(pts_rel)
        m = self._monos(X)                              # (pts, nP)
        npts, nP = m.shape
        k = self.degree
        out = np.zeros((self.n_dofs, npts, 2))
        out[:nP, :, 0] = m.T
        out[nP:2 * nP, :, 1] = m.T
        q = m[:, nP - (k + 1):]                         # exact-degree-k monomials
        out[2 * nP:, :, 0] = (q * X[:, 0:1]).T
        out[2 * nP:, :, 1] = (q * X[:, 1:2]).T
        return out

    def divergences_rel(self, pts_rel: np.ndarray) -> np.ndarray:
        """Divergence of each basis member at relative points, (n_dofs, npts)."""
        pts_rel = np.atleast_2d(np.asarray(pts_rel, dtype=float))
        X = self._scaled(pts_rel)
        a, b = self._exps[:, 0], self._exps[:, 1]
        x, y = X[:, 0:1], X[:, 1:2]
        dx = np.where(a > 0, a * x ** np.maximum(a - 1, 0) * y ** b, 0.0)
        dy = np.where(b > 0, b * x ** a * y ** np.maximum(b - 1, 0), 0.0)
        m = self._monos(X)
        k = self.degree
        nP = m.shape[1]
        npts = len(pts_rel)
        out = np.zeros((self.n_dofs, npts))
        out[:nP] = dx.T / self.diam
        out[nP:2 * nP] = dy.T / self.diam
        # div(X q) = 2q + X . grad q = (k + 2) q for q homogeneous of degree k.
        out[2 * nP:] = (k + 2) / self.diam * m[:, nP - (k + 1):].T
        return out

    def values(self, pts: np.ndarray) -> np.ndarray:
        """Basis values at absolute physical points, (n_dofs, npts, 2)."""
        return self.values_rel(np.atleast_2d(np.asarray(pts, dtype=float)) - self.origin)

    def divergences(self, pts: np.ndarray) -> np.ndarray:
        return self.divergences_rel(np.atleast_2d(np.asarray(pts, dtype=float)) - self.origin)


def build_rt_basis(verts: np.ndarray, degree: int) -> RTBasis:
    """RT_k basis on the physical triangle given by absolute vertex coords."""
    verts = np.asarray(verts, dtype=float)
    return RTBasis(verts - verts[0], degree, origin=verts[0])


@dataclass(frozen=True)
class DGSpace:
    """Element-local piecewise P_k space over a mesh.

    Every element owns its own copy of the (k+1)(k+2)/2 Lagrange node DOFs;
    global ids are element-major.  A DOF is constrained (boundary) iff its
    node lies geometrically on the domain boundary: on a boundary edge of
    its own element, or at a triangle corner whose mesh vertex touches the
    boundary.  (Constraining vertex copies of elements that only touch the
    boundary at a point is what reproduces the reference convergence
    tables.)
    """

    mesh: Mesh
    degree: int
    basis: LagrangeBasis
    elem_dofs: np.ndarray      # (nt, nloc) global DOF ids
    node_coords: np.ndarray    # (n_dofs, 2)
    boundary_mask: np.ndarray  # (n_dofs,) bool: node lies on the domain boundary

    @property
    def n_dofs(self) -> int:
        return len(self.node_coords)

    @property
    def n_local(self) -> int:
        return self.basis.n_nodes

    def element_of_dof(self, dof: int) -> int:
        return dof // self.n_local


def dg_space(mesh: Mesh, degree: int) -> DGSpace:
    basis = lagrange_basis(degree)
    k = degree
    nt = mesh.n_triangles
    nloc = basis.n_nodes
    elem_dofs = np.arange(nt * nloc, dtype=np.int64).reshape(nt, nloc)

    v = mesh.vertices[mesh.triangles]                 # (nt, 3, 2)
    # x = v0 + xi*(v1-v0) + eta*(v2-v0) at the reference nodes
    ref = basis.nodes_xy                              # (nloc, 2)
    coords = (v[:, None, 0]
              + ref[None, :, 0, None] * (v[:, None, 1] - v[:, None, 0])
              + ref[None, :, 1, None] * (v[:, None, 2] - v[:, None, 0]))
    node_coords = coords.reshape(nt * nloc, 2)

    # Exact lattice logic, no coordinate tolerances: a node is on the
    # boundary iff it sits on a boundary edge of its own element, or is a
    # corner node whose mesh vertex belongs to some boundary edge.
    i, j = basis.lattice[:, 0], basis.lattice[:, 1]
    on_local_edge = np.stack((i + j == k, i == 0, j == 0))  # (3, nloc)
    boundary = np.zeros((nt, nloc), dtype=bool)
    edge_is_boundary = mesh.boundary_edge_mask
    for m in range(3):
        tris = np.nonzero(edge_is_boundary[mesh.tri_edges[:, m]])[0]
        boundary[tris] |= on_local_edge[m]

    vertex_on_boundary = np.zeros(mesh.n_vertices, dtype=bool)
    vertex_on_boundary[mesh.edges[edge_is_boundary].ravel()] = True
    corner_nodes = [0, k, nloc - 1]  # lattice corners = triangle vertices
    for c, node in enumerate(corner_nodes):
        boundary[:, node] |= vertex_on_boundary[mesh.triangles[:, c]]
    return DGSpace(mesh, degree, basis, elem_dofs, node_coords, boundary.ravel())


def interpolate(space: DGSpace, f) -> np.ndarray:
    """Degree-k Lagrange interpolation: DOF_i = f(node_i).

    ``f`` must accept numpy arrays ``f(x, y)``.
    """
    x, y = space.node_coords[:, 0], space.node_coords[:, 1]
    return np.asarray(f(x, y), dtype=float) + np.zeros(space.n_dofs)
