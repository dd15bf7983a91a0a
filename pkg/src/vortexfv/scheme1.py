"""First-order semi-discrete right-hand sides with nodal closures.

A state is an array of shape ``(3, n_cells)`` holding ``u, v, p``.  Both
schemes work in two passes: a closure value per node (a pressure ``p*_n`` or
a velocity ``v*_n``), then a cell update summing subedge fluxes.

Zero-gradient boundaries use the mirror ghost corners stored on the mesh:
around a boundary node the ring of cells is completed by reflected copies
of the interior cells carrying the same states, so boundary nodes use the
same nodal formulas as interior ones.
"""

from __future__ import annotations

import os

import numpy as np

from .mesh import Mesh
from .operators import divergence_D, gradient_G, subedge_total

DEBUG = os.environ.get("VORTEXFV_DEBUG", "") not in ("", "0")


class SingularNodalSystem(ArithmeticError):
    pass


class ConsistencyError(AssertionError):
    """Raised by debug cross-checks between two evaluation routes."""


def as_state(state) -> np.ndarray:
    q = np.asarray(state, dtype=float)
    if q.ndim != 2 or q.shape[0] != 3:
        raise ValueError("state must have shape (3, n_cells)")
    return q


def _node_sum(mesh: Mesh, w) -> np.ndarray:
    return np.bincount(mesh.corner_node, w, mesh.n_nodes)


def ring_weight(mesh: Mesh) -> np.ndarray:
    """Total subedge length of the full (ghost-completed) ring of each node."""
    return 0.5 * (_node_sum(mesh, mesh.corner_sublen) + np.bincount(mesh.ghost_node, mesh.ghost_sublen, mesh.n_nodes))


def nodal_pressure_from_corners(mesh: Mesh, vk, pk) -> np.ndarray:
    """Nodal pressure from the values ``vk, pk`` each cell presents at each of its corners.

    ``p*_n`` is the length-weighted average over the subedges at n of the
    classical interface pressure ``(pL + pR)/2 - (vR - vL).n/2``, rewritten
    as a sum over corners.  Ghost corners reuse the values of the interior
    corner they mirror.
    """
    num = _node_sum(mesh, mesh.corner_sublen * pk + np.einsum("ki,ki->k", mesh.corner_normal, vk))
    if len(mesh.ghost_node):
        g = mesh.ghost_corner
        ghost = mesh.ghost_sublen * pk[g] + np.einsum("gi,gi->g", mesh.ghost_normal, vk[g])
        num += np.bincount(mesh.ghost_node, ghost, mesh.n_nodes)
    return 0.5 * num / ring_weight(mesh)


def nodal_pressure(mesh: Mesh, state) -> np.ndarray:
    """First-order nodal pressure ``p*_n`` per node."""
    q = as_state(state)
    k = mesh.corner_cell
    p_star = nodal_pressure_from_corners(mesh, q[:2, k].T, q[2, k])
    if DEBUG:
        _check_close(p_star, nodal_pressure_subedges(mesh, q), "nodal pressure (subedge route)")
        if mesh.periodic:
            _check_close(p_star, nodal_pressure_divergence_form(mesh, q), "nodal pressure (divergence form)")
    return p_star


def _reflections(mesh: Mesh, n: int) -> list:
    """Identity plus the reflections across the boundary lines through node n.

    Two perpendicular lines generate the four-element group; other corners
    use one reflection per line.
    """
    lines = []
    for m in mesh.bsub_normal[mesh.bsub_node == n]:
        if not any(abs(abs(m @ l) - 1) < 1e-9 for l in lines):
            lines.append(m)
    refl = [np.eye(2) - 2 * np.outer(m, m) for m in lines]
    if len(lines) == 2 and abs(lines[0] @ lines[1]) < 1e-9:
        refl.append(refl[0] @ refl[1])
    return [np.eye(2)] + refl


def nodal_pressure_subedges(mesh: Mesh, state) -> np.ndarray:
    """Same as :func:`nodal_pressure`, summing the classical pressure edge by edge.

    At boundary nodes every edge is also counted in each mirrored copy
    (reflected normal, same states).  A boundary half edge contributes one
    side per image; on straight and right-angled boundaries the sides pair
    up into interfaces between a cell and its own copy, with pressure ``p_c``.
    """
    q = as_state(state)
    num = np.zeros(mesh.n_nodes)
    den = np.zeros(mesh.n_nodes)
    refl = {int(n): _reflections(mesh, n) for n in np.unique(mesh.bsub_node)}
    for e in range(mesh.n_edges):
        cl, cr = mesh.edge_cells[e]
        half = 0.5 * mesh.edge_length[e]
        for n in mesh.edge_nodes[e]:
            group = refl.get(int(n), [np.eye(2)])
            if cr < 0:
                # one side of the half edge per image; images pair up into cell|mirror interfaces
                for r in group:
                    num[n] += 0.5 * half * (q[2, cl] + q[:2, cl] @ (r @ mesh.edge_normal[e]))
                    den[n] += 0.5 * half
                continue
            for r in group:
                jump = (q[:2, cr] - q[:2, cl]) @ (r @ mesh.edge_normal[e])
                num[n] += half * (0.5 * (q[2, cl] + q[2, cr]) - 0.5 * jump)
                den[n] += half
    return num / den


def nodal_pressure_divergence_form(mesh: Mesh, state) -> np.ndarray:
    """Periodic-mesh form: weighted pressure average plus a nodal-divergence correction."""
    q = as_state(state)
    tot = subedge_total(mesh)
    avg = 0.5 * _node_sum(mesh, mesh.corner_sublen * q[2, mesh.corner_cell]) / tot
    return avg - mesh.dual_area * divergence_D(mesh, q[:2].T) / (2.0 * tot)


def rhs_nodal_pressure(mesh: Mesh, state) -> np.ndarray:
    """Time derivative of the nodal-pressure scheme."""
    q = as_state(state)
    p_star = nodal_pressure(mesh, q)
    return _update_nodal_pressure(mesh, q, p_star)


def _update_nodal_pressure(mesh, q, p_star):
    out = np.empty_like(q)
    out[:2] = -gradient_G(mesh, p_star).T
    k = mesh.corner_cell
    jump = mesh.corner_sublen * (q[2, k] - p_star[mesh.corner_node])
    out[2] = -np.bincount(k, jump, mesh.n_cells) / mesh.cell_area
    if DEBUG:
        full = jump + np.einsum("ki,ki->k", mesh.corner_normal, q[:2, k].T)
        dp_full = -np.bincount(k, full, mesh.n_cells) / mesh.cell_area
        _check_close(out[2], dp_full, "pressure update (unsimplified)")
    return out


def _corner_tensor_apply(mesh, vec):
    return np.einsum("kij,kj->ki", mesh.corner_tensor, vec)


def nodal_velocity(mesh: Mesh, state) -> np.ndarray:
    """Nodal velocity ``v*_n`` per node, shape ``(n_nodes, 2)``.

    Solves ``(sum_c T_nc) v* = sum_c (p_c l_nc n_nc + T_nc v_c)`` where
    ``T_nc`` sums ``|s| n n^T`` over the two half edges of c at n and the
    sums include ghost corners.  This is the statement that the one-sided
    momentum fluxes of the free-velocity solver cancel around the node.
    """
    q = as_state(state)
    k = mesh.corner_cell
    vk = q[:2, k].T
    pk = q[2, k]
    mat = np.zeros((mesh.n_nodes, 2, 2))
    np.add.at(mat, mesh.corner_node, mesh.corner_tensor)
    rhs = np.zeros((mesh.n_nodes, 2))
    np.add.at(rhs, mesh.corner_node, pk[:, None] * mesh.corner_normal + _corner_tensor_apply(mesh, vk))
    if len(mesh.ghost_node):
        g = mesh.ghost_corner
        np.add.at(mat, mesh.ghost_node, mesh.ghost_tensor)
        gr = pk[g][:, None] * mesh.ghost_normal + np.einsum("gij,gj->gi", mesh.ghost_tensor, vk[g])
        np.add.at(rhs, mesh.ghost_node, gr)
    det = mat[:, 0, 0] * mat[:, 1, 1] - mat[:, 0, 1] * mat[:, 1, 0]
    scale = mat[:, 0, 0] + mat[:, 1, 1]
    bad = np.flatnonzero(np.abs(det) <= 1e-12 * scale * scale)
    if len(bad):
        raise SingularNodalSystem(f"nodal velocity system at node {int(bad[0])} is singular")
    vx = (mat[:, 1, 1] * rhs[:, 0] - mat[:, 0, 1] * rhs[:, 1]) / det
    vy = (mat[:, 0, 0] * rhs[:, 1] - mat[:, 1, 0] * rhs[:, 0]) / det
    return np.stack([vx, vy], axis=1)


def rhs_nodal_velocity(mesh: Mesh, state) -> np.ndarray:
    """Time derivative of the nodal-velocity scheme."""
    q = as_state(state)
    v_star = nodal_velocity(mesh, q)
    k = mesh.corner_cell
    vs = v_star[mesh.corner_node]
    mom = q[2, k][:, None] * mesh.corner_normal + _corner_tensor_apply(mesh, q[:2, k].T - vs)
    out = np.empty_like(q)
    out[0] = -np.bincount(k, mom[:, 0], mesh.n_cells) / mesh.cell_area
    out[1] = -np.bincount(k, mom[:, 1], mesh.n_cells) / mesh.cell_area
    out[2] = -np.bincount(k, np.einsum("ki,ki->k", mesh.corner_normal, vs), mesh.n_cells) / mesh.cell_area
    return out


def corner_fluxes(mesh: Mesh, state, scheme: str = "nodal_pressure"):
    """Per-corner and per-ghost-corner fluxes of ``(v, p)`` integrated over their subedges.

    Returns ``(corner, ghost)`` with shapes ``(n_corners, 3)`` and
    ``(n_ghost_corners, 3)``: columns 0-1 the momentum flux, column 2 the
    pressure flux.  Used to check that fluxes balance around every node.
    """
    q = as_state(state)
    k = mesh.corner_cell
    g = mesh.ghost_corner
    normals = np.concatenate([mesh.corner_normal, mesh.ghost_normal])
    sublen = np.concatenate([mesh.corner_sublen, mesh.ghost_sublen])
    tensor = np.concatenate([mesh.corner_tensor, mesh.ghost_tensor])
    node = np.concatenate([mesh.corner_node, mesh.ghost_node])
    src = np.concatenate([k, k[g]])
    v = q[:2, src].T
    p = q[2, src]
    out = np.empty((len(src), 3))
    if scheme == "nodal_pressure":
        ps = nodal_pressure(mesh, q)[node]
        out[:, :2] = ps[:, None] * normals
        out[:, 2] = np.einsum("ki,ki->k", normals, v) + sublen * (p - ps)
    elif scheme == "nodal_velocity":
        vs = nodal_velocity(mesh, q)[node]
        out[:, :2] = p[:, None] * normals + np.einsum("kij,kj->ki", tensor, v - vs)
        out[:, 2] = np.einsum("ki,ki->k", normals, vs)
    else:
        raise ValueError(f"unknown scheme {scheme!r}")
    return out[: mesh.n_corners], out[mesh.n_corners:]


def nodal_flux_balance(mesh: Mesh, state, scheme: str = "nodal_pressure") -> np.ndarray:
    """Sum of all subedge fluxes around each node, shape ``(n_nodes, 3)``; zero for both closures."""
    corner, ghost = corner_fluxes(mesh, state, scheme)
    out = np.zeros((mesh.n_nodes, 3))
    np.add.at(out, mesh.corner_node, corner)
    np.add.at(out, mesh.ghost_node, ghost)
    return out


def _check_close(a, b, what, tol=1e-10):
    scale = max(1.0, float(np.max(np.abs(b))) if np.size(b) else 1.0)
    err = float(np.max(np.abs(np.asarray(a) - np.asarray(b)))) if np.size(b) else 0.0
    if err > tol * scale:
        raise ConsistencyError(f"{what}: routes differ by {err:.3e}")
