"""Second-order nodal-pressure scheme with least-squares linear reconstruction.

Each cell carries ``q_c + a . (x - x_c)`` per variable, with slopes fitted to
the neighbour averages.  Because the reconstruction is centred at the cell
centroid it is conservative.  Nodal pressures then use the reconstructed
values at the nodes instead of the cell averages; no edge quadrature is
involved.
"""

from __future__ import annotations

import enum
import warnings

import numpy as np

from .mesh import DegenerateStencil, Mesh
from .operators import gradient_G
from . import scheme1
from .scheme1 import _check_close, as_state, nodal_pressure_from_corners

__all__ = [
    "DegenerateStencil",
    "StencilKind",
    "nodal_pressure_2",
    "reconstruct",
    "rhs_second_order",
]


class StencilKind(str, enum.Enum):
    EDGE_NEIGHBORS = "edge"
    NODE_NEIGHBORS = "node"


def reconstruct(mesh: Mesh, state, stencil=StencilKind.NODE_NEIGHBORS) -> np.ndarray:
    """Least-squares slopes for every variable, shape ``(3, n_cells, 2)``.

    The fit minimises the squared misfit of the reconstruction's averages
    over the stencil cells.  The average of a linear function over a polygon
    is its value at the centroid, so this is a fit to centroid offsets.
    """
    q = as_state(state)
    st = mesh.stencil(getattr(stencil, "value", stencil))
    diff = q[:, st.nbr] - q[:, st.cell]
    out = np.empty((3, mesh.n_cells, 2))
    for d in range(2):
        w = st.weight[:, d]
        for var in range(3):
            out[var, :, d] = np.bincount(st.cell, w * diff[var], mesh.n_cells)
    return out


def corner_values(mesh: Mesh, state, gradients) -> np.ndarray:
    """Reconstructed value of every cell at each of its nodes, shape ``(3, n_corners)``.

    Ghost corners mirror an interior corner and present the same value.
    """
    q = as_state(state)
    k = mesh.corner_cell
    rel = mesh.corner_xy - mesh.cell_centroid[k]
    return q[:, k] + np.einsum("vki,ki->vk", gradients[:, k], rel)


def nodal_pressure_2(mesh: Mesh, state, gradients) -> np.ndarray:
    """Nodal pressure built from reconstructed values at the nodes."""
    corner = corner_values(mesh, state, gradients)
    return nodal_pressure_from_corners(mesh, corner[:2].T, corner[2])


def velocity_trace(mesh: Mesh, gradients) -> np.ndarray:
    """Divergence of each cell's reconstructed velocity, ``du/dx + dv/dy``."""
    return gradients[0, :, 0] + gradients[1, :, 1]


def rhs_second_order(mesh: Mesh, state, gradients=None, stencil=StencilKind.NODE_NEIGHBORS) -> np.ndarray:
    """Time derivative of the second-order nodal-pressure scheme.

    Velocity: ``-G p*``.  Pressure: minus the cell average of
    ``l_nc n_nc . v_{c,r}(x_n) + l_nc (p_{c,r}(x_n) - p*_n)`` summed over the
    corners; the velocity part equals the trace of the reconstructed
    velocity gradient.
    """
    q = as_state(state)
    if mesh.cell_sides.max() > 4:
        warnings.warn(
            "second-order reconstruction on meshes with pentagons or hexagons may be unstable over long times",
            RuntimeWarning,
            stacklevel=2,
        )
    if gradients is None:
        gradients = reconstruct(mesh, q, stencil)
    corner = corner_values(mesh, q, gradients)
    p_star = nodal_pressure_from_corners(mesh, corner[:2].T, corner[2])
    out = np.empty_like(q)
    out[:2] = -gradient_G(mesh, p_star).T
    k = mesh.corner_cell
    jump = mesh.corner_sublen * (corner[2] - p_star[mesh.corner_node])
    trace = velocity_trace(mesh, gradients)
    out[2] = -trace - np.bincount(k, jump, mesh.n_cells) / mesh.cell_area
    if scheme1.DEBUG:
        direct = np.bincount(k, np.einsum("ki,ik->k", mesh.corner_normal, corner[:2]), mesh.n_cells) / mesh.cell_area
        _check_close(direct, trace, "reconstructed velocity trace")
    return out


def trace_routes(mesh: Mesh, state, gradients):
    """Both evaluations of the velocity self-contribution: subedge sum and gradient trace."""
    corner = corner_values(mesh, state, gradients)
    direct = np.bincount(
        mesh.corner_cell, np.einsum("ki,ik->k", mesh.corner_normal, corner[:2]), mesh.n_cells
    ) / mesh.cell_area
    return direct, velocity_trace(mesh, gradients)
