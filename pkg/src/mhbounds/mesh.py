"""Uniform right-triangle mesh of the unit square.

Every square cell of an n x n grid is split along the bottom-left ->
top-right diagonal, so all triangles fall into two congruent orientation
classes and every element matrix is one of two constants.  Nodes are
numbered lexicographically by (row, column), which makes assembly and the
sparse matrix layout deterministic.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True)
class UniformMesh:
    """Triangulation of (0,1)^2 into 2 n^2 right triangles.

    Attributes:
        n: number of cells per side.
        h: mesh size, 1/n.
        nodes: node coordinates, shape (num_nodes, 2).
        triangles: node indices per triangle, counterclockwise, shape (T, 3).
        edges: node index pairs (low index first), shape (E, 2).
        edge_tris: triangles adjacent to each edge, shape (E, 2); the second
            entry is -1 for boundary edges.
        edge_length: edge lengths, shape (E,).
        edge_normal: global unit normal per edge (edge direction rotated
            clockwise by 90 degrees), shape (E, 2).
        tri_edges: global edge index opposite each local vertex, shape (T, 3).
        tri_edge_sign: +1 where the global edge normal points out of the
            triangle, -1 otherwise, shape (T, 3).
        boundary_node: True for nodes on the boundary, shape (num_nodes,).
        interior_nodes: indices of interior nodes in lexicographic order.
    """

    n: int
    h: float
    nodes: np.ndarray
    triangles: np.ndarray
    edges: np.ndarray
    edge_tris: np.ndarray
    edge_length: np.ndarray
    edge_normal: np.ndarray
    tri_edges: np.ndarray
    tri_edge_sign: np.ndarray
    boundary_node: np.ndarray
    interior_nodes: np.ndarray

    @property
    def num_nodes(self) -> int:
        return self.nodes.shape[0]

    @property
    def num_triangles(self) -> int:
        return self.triangles.shape[0]

    @property
    def num_edges(self) -> int:
        return self.edges.shape[0]

    @property
    def num_interior(self) -> int:
        return self.interior_nodes.shape[0]

    @property
    def tri_area(self) -> float:
        return 0.5 * self.h * self.h

    def edge_of(self, tri: int, local_edge: int) -> int:
        """Global edge index of the edge opposite local vertex `local_edge`."""
        return int(self.tri_edges[tri, local_edge])

    def dump(self, path) -> None:
        """Plain-text node and triangle listing (debugging aid)."""
        with open(path, "w") as fh:
            fh.write(f"# nodes {self.num_nodes}\n")
            for i, (x, y) in enumerate(self.nodes):
                fh.write(f"{i} {x:.17g} {y:.17g}\n")
            fh.write(f"# triangles {self.num_triangles}\n")
            for t, (a, b, c) in enumerate(self.triangles):
                fh.write(f"{t} {a} {b} {c}\n")


def build(n: int) -> UniformMesh:
    """Build the uniform mesh with n cells per side.

    Raises:
        ValueError: if n < 1.
    """
    if n < 1:
        raise ValueError(f"grid parameter must be a positive integer, got {n}")
    h = 1.0 / n
    side = n + 1
    ix, iy = np.meshgrid(np.arange(side), np.arange(side))
    nodes = np.column_stack([ix.ravel() * h, iy.ravel() * h])

    # cell (cx, cy): lower triangle (v00, v10, v11), upper (v00, v11, v01)
    cx, cy = np.meshgrid(np.arange(n), np.arange(n))
    cx = cx.ravel()
    cy = cy.ravel()
    v00 = cy * side + cx
    v10 = v00 + 1
    v01 = v00 + side
    v11 = v01 + 1
    lower = np.column_stack([v00, v10, v11])
    upper = np.column_stack([v00, v11, v01])
    triangles = np.empty((2 * n * n, 3), dtype=np.int64)
    triangles[0::2] = lower
    triangles[1::2] = upper

    # edge i is opposite local vertex i
    pairs = np.concatenate(
        [
            triangles[:, [1, 2]],
            triangles[:, [2, 0]],
            triangles[:, [0, 1]],
        ]
    )
    pairs_sorted = np.sort(pairs, axis=1)
    edges, tri_edges_flat = np.unique(pairs_sorted, axis=0, return_inverse=True)
    num_tris = triangles.shape[0]
    tri_edges = tri_edges_flat.reshape(3, num_tris).T.copy()

    num_edges = edges.shape[0]
    edge_tris = np.full((num_edges, 2), -1, dtype=np.int64)
    tri_ids = np.tile(np.arange(num_tris), 3)
    order = np.argsort(tri_edges_flat, kind="stable")
    sorted_tris = tri_ids[order]
    first = np.searchsorted(tri_edges_flat[order], np.arange(num_edges))
    counts = np.diff(np.append(first, 3 * num_tris))
    edge_tris[:, 0] = sorted_tris[first]
    two = counts == 2
    edge_tris[two, 1] = sorted_tris[first[two] + 1]

    vec = nodes[edges[:, 1]] - nodes[edges[:, 0]]
    edge_length = np.hypot(vec[:, 0], vec[:, 1])
    edge_normal = np.column_stack([vec[:, 1], -vec[:, 0]]) / edge_length[:, None]

    # outward test: normal against (edge midpoint - opposite vertex)
    mid = 0.5 * (nodes[edges[:, 0]] + nodes[edges[:, 1]])
    tri_edge_sign = np.empty((num_tris, 3))
    for local in range(3):
        e = tri_edges[:, local]
        opp = nodes[triangles[:, local]]
        dot = np.einsum("ij,ij->i", edge_normal[e], mid[e] - opp)
        tri_edge_sign[:, local] = np.where(dot > 0.0, 1.0, -1.0)

    on_boundary = (
        (nodes[:, 0] == 0.0)
        | (nodes[:, 0] == 1.0)
        | (nodes[:, 1] == 0.0)
        | (nodes[:, 1] == 1.0)
    )
    interior_nodes = np.flatnonzero(~on_boundary)

    return UniformMesh(
        n=n,
        h=h,
        nodes=nodes,
        triangles=triangles,
        edges=edges,
        edge_tris=edge_tris,
        edge_length=edge_length,
        edge_normal=edge_normal,
        tri_edges=tri_edges,
        tri_edge_sign=tri_edge_sign,
        boundary_node=on_boundary,
        interior_nodes=interior_nodes,
    )
