"""Closed-form finite-difference versions of the schemes on periodic uniform grids.

These are written directly as array stencils and share no code with the
mesh-based path, so they serve as an independent cross-check.  Fields are
2D arrays indexed ``[j, i]`` (row = y index).  Nodal arrays are indexed by
the cell whose north-east corner they sit on: ``N[j, i]`` lives at
``(x_{i+1/2}, y_{j+1/2})``.
"""

from __future__ import annotations

import numpy as np


def east(q):
    return np.roll(q, -1, axis=1)


def west(q):
    return np.roll(q, 1, axis=1)


def north(q):
    return np.roll(q, -1, axis=0)


def south(q):
    return np.roll(q, 1, axis=0)


def node_sum(q):
    """Sum of the four cells around each north-east node."""
    return q + east(q) + north(q) + north(east(q))


def node_jump_x(q):
    """x-jump across the node, summed over the two cell rows."""
    return (east(q) + north(east(q))) - (q + north(q))


def node_jump_y(q):
    return (north(q) + north(east(q))) - (q + east(q))


def cell_sum(n):
    """Sum of the four nodal values at a cell's corners (nodes indexed by their SW cell)."""
    return n + west(n) + south(n) + south(west(n))


def cell_jump_x(n):
    return (n + south(n)) - (west(n) + south(west(n)))


def cell_jump_y(n):
    return (n + west(n)) - (south(n) + south(west(n)))


def nodal_pressure(u, v, p, dx, dy):
    return 0.25 * node_sum(p) - 0.25 * (dy * node_jump_x(u) + dx * node_jump_y(v)) / (dx + dy)


def rhs_nodal_pressure(u, v, p, dx, dy):
    ps = nodal_pressure(u, v, p, dx, dy)
    du = -cell_jump_x(ps) / (2 * dx)
    dv = -cell_jump_y(ps) / (2 * dy)
    dp = 0.5 * (1 / dx + 1 / dy) * (cell_sum(ps) - 4 * p)
    return du, dv, dp


def nodal_velocity(u, v, p, dx, dy):
    us = 0.25 * node_sum(u) - 0.25 * node_jump_x(p)
    vs = 0.25 * node_sum(v) - 0.25 * node_jump_y(p)
    return us, vs


def rhs_nodal_velocity(u, v, p, dx, dy):
    us, vs = nodal_velocity(u, v, p, dx, dy)
    du = (cell_sum(us) - 4 * u) / (2 * dx)
    dv = (cell_sum(vs) - 4 * v) / (2 * dy)
    dp = -cell_jump_x(us) / (2 * dx) - cell_jump_y(vs) / (2 * dy)
    return du, dv, dp


def slopes(q, dx, dy, stencil="node"):
    """Least-squares slopes on the 9-point (``"node"``) or 5-point (``"edge"``) stencil."""
    if stencil == "edge":
        return (east(q) - west(q)) / (2 * dx), (north(q) - south(q)) / (2 * dy)
    dqx = east(q) - west(q)
    dqy = north(q) - south(q)
    ax = (dqx + north(dqx) + south(dqx)) / (6 * dx)
    ay = (dqy + east(dqy) + west(dqy)) / (6 * dy)
    return ax, ay


def _corner_values(q, a, dx, dy):
    """Reconstructed values of each cell at its four corners, keyed by (sx, sy) = (+-1, +-1)."""
    ax, ay = a
    return {(sx, sy): q + ax * sx * dx / 2 + ay * sy * dy / 2 for sx in (1, -1) for sy in (1, -1)}


def nodal_pressure_2(u, v, p, dx, dy, stencil="node"):
    cu = _corner_values(u, slopes(u, dx, dy, stencil), dx, dy)
    cv = _corner_values(v, slopes(v, dx, dy, stencil), dx, dy)
    cp = _corner_values(p, slopes(p, dx, dy, stencil), dx, dy)
    # cells around NE node of [j, i]: SW cell shows its (+,+) corner, etc.
    ps = (cp[1, 1] + east(cp[-1, 1]) + north(cp[1, -1]) + north(east(cp[-1, -1]))) / 4
    jx = (east(cu[-1, 1]) + north(east(cu[-1, -1]))) - (cu[1, 1] + north(cu[1, -1]))
    jy = (north(cv[1, -1]) + north(east(cv[-1, -1]))) - (cv[1, 1] + east(cv[-1, 1]))
    return ps - 0.25 * (dy * jx + dx * jy) / (dx + dy)


def rhs_second_order(u, v, p, dx, dy, stencil="node"):
    ps = nodal_pressure_2(u, v, p, dx, dy, stencil)
    du = -cell_jump_x(ps) / (2 * dx)
    dv = -cell_jump_y(ps) / (2 * dy)
    cu = _corner_values(u, slopes(u, dx, dy, stencil), dx, dy)
    cv = _corner_values(v, slopes(v, dx, dy, stencil), dx, dy)
    cp = _corner_values(p, slopes(p, dx, dy, stencil), dx, dy)
    node_of = {(1, 1): ps, (-1, 1): west(ps), (1, -1): south(ps), (-1, -1): south(west(ps))}
    acc = 0.0
    for (sx, sy), pv in cp.items():
        acc = acc + sx * dy / 2 * cu[sx, sy] + sy * dx / 2 * cv[sx, sy] + (dx + dy) / 2 * (pv - node_of[sx, sy])
    dp = -acc / (dx * dy)
    return du, dv, dp


def vorticity(u, v, dx, dy):
    """Nodal vorticity stencil ``{[u]}_y/(2 dy) - {[v]}_x/(2 dx)`` conserved by the nodal-pressure schemes."""
    return node_jump_y(u) / (2 * dy) - node_jump_x(v) / (2 * dx)


def nodal_divergence(u, v, dx, dy):
    return node_jump_x(u) / (2 * dx) + node_jump_y(v) / (2 * dy)


RHS = {
    "nodal_pressure_1": rhs_nodal_pressure,
    "nodal_velocity_1": rhs_nodal_velocity,
    "nodal_pressure_2": rhs_second_order,
}
