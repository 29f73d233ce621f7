"""Triangulations of the unit square with uniform quadrisection refinement.

The base grid consists of the two right triangles obtained by cutting the
unit square along the forward-slash diagonal from (1, 0) to (0, 1).  Each
refinement splits every triangle into four congruent children through the
edge midpoints.  All numbering is deterministic: vertices lexicographic by
(y, x), triangles in parent-then-child order, edges sorted by their vertex
id pair.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True)
class Mesh:
    """Immutable triangle mesh.

    Attributes
    ----------
    vertices : (nv, 2) float array
        Vertex coordinates.
    triangles : (nt, 3) int array
        Counterclockwise vertex ids per triangle.
    tri_edges : (nt, 3) int array
        ``tri_edges[t, i]`` is the edge of triangle ``t`` opposite vertex
        ``triangles[t, i]``.
    edges : (ne, 2) int array
        Vertex id pairs, each sorted ascending; rows sorted lexicographically.
    edge_tris : (ne, 2) int array
        Left and right incident triangle; the right entry is -1 on boundary
        edges.  The left triangle is the one with the smaller index.
    normals : (ne, 2) float array
        Unit normals pointing out of the left triangle.
    edge_lengths : (ne,) float array
    level : int
        Refinement level; the base mesh has level 1.
    h : float
        Mesh size (largest triangle diameter).
    """

    vertices: np.ndarray
    triangles: np.ndarray
    tri_edges: np.ndarray
    edges: np.ndarray
    edge_tris: np.ndarray
    normals: np.ndarray
    edge_lengths: np.ndarray
    level: int
    h: float

    @property
    def n_vertices(self) -> int:
        return len(self.vertices)

    @property
    def n_triangles(self) -> int:
        return len(self.triangles)

    @property
    def n_edges(self) -> int:
        return len(self.edges)

    @property
    def boundary_edge_mask(self) -> np.ndarray:
        return self.edge_tris[:, 1] < 0

    def triangle_vertices(self, t: int) -> np.ndarray:
        """Coordinates of the three vertices of triangle ``t``, shape (3, 2)."""
        return self.vertices[self.triangles[t]]


def _build(vertices: np.ndarray, triangles: np.ndarray, level: int) -> Mesh:
    """Assemble a Mesh from raw vertex/triangle arrays (deterministic numbering)."""
    vertices = np.asarray(vertices, dtype=float)
    triangles = np.asarray(triangles, dtype=np.int64)

    # Renumber vertices lexicographically by (y, x).
    order = np.lexsort((vertices[:, 0], vertices[:, 1]))
    perm = np.empty(len(vertices), dtype=np.int64)
    perm[order] = np.arange(len(vertices))
    vertices = vertices[order]
    triangles = perm[triangles]

    # Enforce counterclockwise orientation (positive signed area).
    tv = vertices[triangles]
    e1, e2 = tv[:, 1] - tv[:, 0], tv[:, 2] - tv[:, 0]
    area2 = e1[:, 0] * e2[:, 1] - e1[:, 1] * e2[:, 0]
    if np.any(area2 == 0.0):
        raise ValueError("degenerate triangle in mesh")
    flip = area2 < 0
    triangles[flip] = triangles[flip][:, [0, 2, 1]]

    # Edge i of a triangle is opposite vertex i.
    pairs = triangles[:, [[1, 2], [2, 0], [0, 1]]].reshape(-1, 2)
    pairs = np.sort(pairs, axis=1)
    edges, inverse = np.unique(pairs, axis=0, return_inverse=True)
    tri_edges = inverse.reshape(-1, 3).astype(np.int64)

    edge_tris = np.full((len(edges), 2), -1, dtype=np.int64)
    for t in range(len(triangles)):
        for e in tri_edges[t]:
            if edge_tris[e, 0] < 0:
                edge_tris[e, 0] = t
            else:
                edge_tris[e, 1] = t

    va = vertices[edges[:, 0]]
    vb = vertices[edges[:, 1]]
    tangent = vb - va
    edge_lengths = np.hypot(tangent[:, 0], tangent[:, 1])
    normals = np.column_stack((tangent[:, 1], -tangent[:, 0])) / edge_lengths[:, None]
    # Orient out of the left triangle.
    left_centroid = vertices[triangles[edge_tris[:, 0]]].mean(axis=1)
    midpoints = 0.5 * (va + vb)
    wrong = np.einsum("ij,ij->i", normals, midpoints - left_centroid) < 0
    normals[wrong] *= -1.0

    h = float(edge_lengths.max())
    return Mesh(vertices, triangles, tri_edges, edges, edge_tris,
                normals, edge_lengths, level, h)


def base_mesh() -> Mesh:
    """Level-1 mesh: the unit square cut by the diagonal from (1,0) to (0,1)."""
    vertices = np.array([[0.0, 0.0], [1.0, 0.0], [0.0, 1.0], [1.0, 1.0]])
    triangles = np.array([[0, 1, 2], [1, 3, 2]])
    return _build(vertices, triangles, level=1)


def refine(m: Mesh) -> Mesh:
    """Quadrisect every triangle through its edge midpoints."""
    nv = m.n_vertices
    mids = 0.5 * (m.vertices[m.edges[:, 0]] + m.vertices[m.edges[:, 1]])
    vertices = np.vstack((m.vertices, mids))
    mid_id = nv + np.arange(m.n_edges)

    v0, v1, v2 = m.triangles[:, 0], m.triangles[:, 1], m.triangles[:, 2]
    m12 = mid_id[m.tri_edges[:, 0]]  # midpoint of edge opposite v0
    m20 = mid_id[m.tri_edges[:, 1]]
    m01 = mid_id[m.tri_edges[:, 2]]
    children = np.stack([
        np.column_stack((v0, m01, m20)),
        np.column_stack((m01, v1, m12)),
        np.column_stack((m20, m12, v2)),
        np.column_stack((m01, m12, m20)),
    ], axis=1).reshape(-1, 3)
    return _build(vertices, children, level=m.level + 1)


def edge_patch(m: Mesh, t: int) -> list[int]:
    """Triangle ``t`` together with its edge neighbors, ascending indices."""
    patch = {t}
    for e in m.tri_edges[t]:
        for nb in m.edge_tris[e]:
            if nb >= 0:
                patch.add(int(nb))
    return sorted(patch)


def dump_mesh(m: Mesh, stream) -> None:
    """Write the mesh as plain text, one line per entity.

    Lines are ``v x y``, ``t i j k`` and ``e i j left right`` (right is -1
    for boundary edges).  Intended for debugging and cross-implementation
    diffs.
    """
    for x, y in m.vertices:
        stream.write(f"v {x!r} {y!r}\n")
    for i, j, k in m.triangles:
        stream.write(f"t {i} {j} {k}\n")
    for (i, j), (lt, rt) in zip(m.edges, m.edge_tris):
        stream.write(f"e {i} {j} {lt} {rt}\n")
