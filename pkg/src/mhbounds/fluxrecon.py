"""Lowest-order Raviart-Thomas flux reconstruction.

A reconstructed flux is stored as one normal-flux degree of freedom per
edge (the integral of the normal component over the edge, with respect to
the mesh's global edge normal).  The normal component is single-valued
across interior edges by construction, the field is linear per triangle,
and its divergence is constant per triangle.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .femcore import FemContext


@dataclass
class RTFlux:
    """Raviart-Thomas field of lowest order on a UniformMesh.

    coeffs[e] = integral over edge e of (flux . global_normal_e).
    """

    mesh: object
    coeffs: np.ndarray

    def __add__(self, other: "RTFlux") -> "RTFlux":
        return RTFlux(self.mesh, self.coeffs + other.coeffs)

    def __sub__(self, other: "RTFlux") -> "RTFlux":
        return RTFlux(self.mesh, self.coeffs - other.coeffs)

    def __mul__(self, s: float) -> "RTFlux":
        return RTFlux(self.mesh, s * self.coeffs)

    __rmul__ = __mul__


def reconstruct_p0(mesh, field: np.ndarray) -> RTFlux:
    """Edge-average a per-triangle constant vector field, (T, 2) -> RTFlux.

    Interior edges take the arithmetic mean of the two one-sided normal
    traces; boundary edges the single trace.
    """
    t0 = mesh.edge_tris[:, 0]
    t1 = mesh.edge_tris[:, 1]
    flux0 = np.einsum("ed,ed->e", field[t0], mesh.edge_normal)
    flux1 = np.where(
        t1 >= 0,
        np.einsum("ed,ed->e", field[np.maximum(t1, 0)], mesh.edge_normal),
        flux0,
    )
    return RTFlux(mesh, 0.5 * (flux0 + flux1) * mesh.edge_length)


def reconstruct(ctx: FemContext, w_full: np.ndarray, nu: float = 1.0) -> RTFlux:
    """Averaged-flux reconstruction of nu * grad(w) for a nodal P1 field."""
    return reconstruct_p0(ctx.mesh, nu * ctx.p1_grad(w_full))


def reconstruct_from_callable(mesh, g) -> RTFlux:
    """Edge degrees of freedom of continuous vector data, by midpoint value."""
    mid = 0.5 * (mesh.nodes[mesh.edges[:, 0]] + mesh.nodes[mesh.edges[:, 1]])
    gx, gy = g(mid[:, 0], mid[:, 1])
    normal_flux = gx * mesh.edge_normal[:, 0] + gy * mesh.edge_normal[:, 1]
    return RTFlux(mesh, normal_flux * mesh.edge_length)


def divergence(flux: RTFlux) -> np.ndarray:
    """Per-triangle divergence, (T,)."""
    mesh = flux.mesh
    signed = flux.coeffs[mesh.tri_edges] * mesh.tri_edge_sign  # (T, 3)
    return signed.sum(axis=1) / (0.5 * mesh.h * mesh.h)


def at_points(flux: RTFlux, points: np.ndarray) -> np.ndarray:
    """Evaluate the flux at points given per triangle, (T, Q, 2) -> (T, Q, 2).

    Basis: the function attached to edge e (opposite local vertex i) inside
    triangle t is sign * (x - P_i) / (2 A); its normal-flux integral is one
    on edge e and zero on the other two.
    """
    mesh = flux.mesh
    area2 = mesh.h * mesh.h  # = 2 * triangle area
    opp = mesh.nodes[mesh.triangles]  # (T, 3, 2)
    coef = flux.coeffs[mesh.tri_edges] * mesh.tri_edge_sign / area2  # (T, 3)
    # sum_i coef_i * (x - P_i) = (sum coef_i) * x - sum coef_i P_i
    total = coef.sum(axis=1)
    offset = np.einsum("tk,tkd->td", coef, opp)
    return total[:, None, None] * points - offset[:, None, :]


def at_qp(ctx: FemContext, flux: RTFlux) -> np.ndarray:
    """Evaluate the flux at the context's quadrature points."""
    return at_points(flux, ctx.qp)


def normal_jumps(ctx: FemContext, flux: RTFlux) -> np.ndarray:
    """Mismatch of the normal component across interior edges (should be 0).

    Evaluates the reconstructed field from both adjacent triangles at the
    edge midpoint and differences the normal components.
    """
    mesh = flux.mesh
    interior = np.flatnonzero(mesh.edge_tris[:, 1] >= 0)
    mid = 0.5 * (mesh.nodes[mesh.edges[:, 0]] + mesh.nodes[mesh.edges[:, 1]])
    jumps = np.empty(len(interior))
    for j, e in enumerate(interior):
        vals = []
        for t in mesh.edge_tris[e]:
            pts = mid[e][None, None, :]
            area2 = mesh.h * mesh.h
            coef = flux.coeffs[mesh.tri_edges[t]] * mesh.tri_edge_sign[t] / area2
            opp = mesh.nodes[mesh.triangles[t]]
            val = coef.sum() * pts[0, 0] - coef @ opp
            vals.append(val @ mesh.edge_normal[e])
        jumps[j] = vals[0] - vals[1]
    return jumps
