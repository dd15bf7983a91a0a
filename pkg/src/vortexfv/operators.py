"""Node/cell difference operators built on the node-normals.

Cell vector fields have shape ``(n_cells, 2)``, nodal scalars ``(n_nodes,)``.
All functions are pure; the only cached data live on the mesh.
"""

from __future__ import annotations

import numpy as np

from .mesh import Mesh, cross


def _cell_sum(mesh: Mesh, values: np.ndarray) -> np.ndarray:
    """Sum per-corner values (last axis corners) into cells."""
    return np.bincount(mesh.corner_cell, values, mesh.n_cells)


def _node_sum(mesh: Mesh, values: np.ndarray) -> np.ndarray:
    return np.bincount(mesh.corner_node, values, mesh.n_nodes)


def gradient_G(mesh: Mesh, phi) -> np.ndarray:
    """Cell gradient of a nodal scalar, ``(1/|c|) sum_n l_nc n_nc phi_n``.

    Exact for affine nodal data on any mesh.
    """
    phi = np.asarray(phi, dtype=float)
    w = phi[mesh.corner_node]
    g = np.stack([_cell_sum(mesh, mesh.corner_normal[:, 0] * w), _cell_sum(mesh, mesh.corner_normal[:, 1] * w)], axis=1)
    return g / mesh.cell_area[:, None]


def divergence_D(mesh: Mesh, v) -> np.ndarray:
    """Nodal divergence of a cell vector field, the negative adjoint of :func:`gradient_G`."""
    v = np.asarray(v, dtype=float)
    dots = np.einsum("ki,ki->k", mesh.corner_normal, v[mesh.corner_cell])
    return -_node_sum(mesh, dots) / mesh.dual_area


def curl_C(mesh: Mesh, v) -> np.ndarray:
    """Nodal curl, ``-(1/|c_n|) sum_c l_nc n_nc x v_c`` with the scalar 2D cross product."""
    v = np.asarray(v, dtype=float)
    crs = cross(mesh.corner_normal, v[mesh.corner_cell])
    return -_node_sum(mesh, crs) / mesh.dual_area


def subedge_total(mesh: Mesh) -> np.ndarray:
    """Per node, the total length of the subedges touching it."""
    # interior half edges appear in two corners, boundary ones in one
    return 0.5 * (_node_sum(mesh, mesh.corner_sublen) + np.bincount(mesh.bsub_node, mesh.bsub_len, mesh.n_nodes))


def alpha_coeffs(mesh: Mesh) -> np.ndarray:
    """Per-corner weights ``alpha_nc``.

    ``alpha_nc = (1/|c|) * (l_nc / sum_{s at n} |s|) * |c_n| / 2`` where
    ``l_nc`` is the half-edge length of c at n.  They satisfy
    ``sum_c |c| sum_n alpha_nc phi_n = sum_n |c_n| phi_n``.
    """
    tot = subedge_total(mesh)[mesh.corner_node]
    return mesh.corner_sublen / tot * 0.5 * mesh.dual_area[mesh.corner_node] / mesh.cell_area[mesh.corner_cell]


def cell_divergence_Dtilde(mesh: Mesh, v) -> np.ndarray:
    """Cell-centred divergence ``sum_n alpha_nc D_n v`` weighting nodal divergences by :func:`alpha_coeffs`."""
    d = divergence_D(mesh, v)
    return _cell_sum(mesh, alpha_coeffs(mesh) * d[mesh.corner_node])


def duality_residual(mesh: Mesh, v, phi) -> float:
    """``|sum_n D_n v phi_n |c_n| + sum_c v_c . (G phi)_c |c||``; vanishes on periodic meshes."""
    lhs = float(np.sum(divergence_D(mesh, v) * phi * mesh.dual_area))
    rhs = float(np.sum(np.einsum("ci,ci->c", v, gradient_G(mesh, phi)) * mesh.cell_area))
    return abs(lhs + rhs)


def alpha_residual(mesh: Mesh, phi) -> float:
    """Absolute mismatch of the alpha averaging identity for a nodal field."""
    phi = np.asarray(phi, dtype=float)
    lhs = np.sum(mesh.cell_area[mesh.corner_cell] * alpha_coeffs(mesh) * phi[mesh.corner_node])
    return float(abs(lhs - np.sum(mesh.dual_area * phi)))


def edge_cancellation(mesh: Mesh) -> np.ndarray:
    """Per interior edge, the two per-cell coefficients of ``C(G phi)`` in front of the edge's node pair.

    For an interior edge between nodes n and m, every cell on it contributes
    ``(l_nc n_nc x l_mc n_mc) / |c|`` (oriented along the cell's traversal).
    On cells with at most four sides this equals +1/2 for one cell and -1/2
    for the other, so the contributions cancel.  Returns an array of shape
    ``(n_interior_edges, 2)``.
    """
    out = []
    for e in range(mesh.n_edges):
        cl, cr = mesh.edge_cells[e]
        if cr < 0:
            continue
        n0, n1 = mesh.edge_nodes[e]
        vals = []
        for c in (cl, cr):
            sl = mesh.corner_slice(c)
            ks = np.arange(sl.start, sl.stop)
            ka = ks[mesh.corner_node[ks] == n0][0]
            kb = ks[mesh.corner_node[ks] == n1][0]
            val = cross(mesh.corner_normal[ka], mesh.corner_normal[kb]) / mesh.cell_area[c]
            vals.append(float(val))
        out.append(vals)
    return np.array(out).reshape(-1, 2)


def curl_of_gradient_matrix(mesh: Mesh) -> np.ndarray:
    """Dense matrix of ``C o G`` acting on nodal scalars (columns are canonical basis images)."""
    n = mesh.n_nodes
    out = np.empty((n, n))
    eye = np.eye(n)
    for j in range(n):
        out[:, j] = curl_C(mesh, gradient_G(mesh, eye[j]))
    return out
