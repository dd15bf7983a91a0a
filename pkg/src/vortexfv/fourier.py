"""Fourier symbols of the Cartesian schemes, kernels and forward-Euler stability.

A grid function ``q_{i+a, j+b} = q_hat * t_x**a * t_y**b`` with
``|t_x| = |t_y| = 1`` is mapped by each semi-discrete scheme to
``dq_hat/dt = -E(t_x, t_y) q_hat``.  The symbols below are written out by
hand from the Cartesian stencils and are vectorised over arrays of
``t_x, t_y`` (leading axes), returning ``(..., 3, 3)`` matrices ordered
``(u, v, p)``.
"""

from __future__ import annotations

import numpy as np

SCHEMES = ("nodal_pressure_1", "nodal_velocity_1", "nodal_pressure_2")


def _rows(*rows):
    """Stack three row vectors (each a list of 3 broadcastable arrays) into ``(..., 3, 3)``."""
    shape = np.broadcast(*[c for r in rows for c in r]).shape
    return np.stack([np.stack([np.broadcast_to(c, shape) for c in r], axis=-1) for r in rows], axis=-2)


def _node_factors(tx, ty):
    s = (1 + tx) * (1 + ty)
    dxf = (tx - 1) * (1 + ty)
    dyf = (1 + tx) * (ty - 1)
    return s, dxf, dyf


def _cell_factors(tx, ty):
    sc = (1 + 1 / tx) * (1 + 1 / ty)
    jx = (1 - 1 / tx) * (1 + 1 / ty)
    jy = (1 + 1 / tx) * (1 - 1 / ty)
    return sc, jx, jy


def _rhs_nodal_pressure(tx, ty, dx, dy):
    s, dxf, dyf = _node_factors(tx, ty)
    sc, jx, jy = _cell_factors(tx, ty)
    pstar = [-0.25 * dy * dxf / (dx + dy), -0.25 * dx * dyf / (dx + dy), 0.25 * s]
    return _pressure_update(pstar, jx, jy, sc, dx, dy)


def _pressure_update(pstar, jx, jy, sc, dx, dy):
    row_u = [-jx * c / (2 * dx) for c in pstar]
    row_v = [-jy * c / (2 * dy) for c in pstar]
    k = 0.5 * (1 / dx + 1 / dy)
    row_p = [k * sc * pstar[0], k * sc * pstar[1], k * (sc * pstar[2] - 4)]
    return _rows(row_u, row_v, row_p)


def _rhs_nodal_velocity(tx, ty, dx, dy):
    s, dxf, dyf = _node_factors(tx, ty)
    sc, jx, jy = _cell_factors(tx, ty)
    zero = 0 * s
    ustar = [0.25 * s, zero, -0.25 * dxf]
    vstar = [zero, 0.25 * s, -0.25 * dyf]
    row_u = [(sc * ustar[0] - 4) / (2 * dx), zero, sc * ustar[2] / (2 * dx)]
    row_v = [zero, (sc * vstar[1] - 4) / (2 * dy), sc * vstar[2] / (2 * dy)]
    row_p = [-jx * ustar[i] / (2 * dx) - jy * vstar[i] / (2 * dy) for i in range(3)]
    return _rows(row_u, row_v, row_p)


def slope_factors(tx, ty, dx, dy, stencil="node"):
    """Symbols of the x- and y-slopes of the least-squares reconstruction."""
    if stencil == "edge":
        return (tx - 1 / tx) / (2 * dx), (ty - 1 / ty) / (2 * dy)
    return (tx - 1 / tx) * (1 / ty + 1 + ty) / (6 * dx), (ty - 1 / ty) * (1 / tx + 1 + tx) / (6 * dy)


def _rhs_second_order(tx, ty, dx, dy, stencil="node"):
    sx_, sy_ = slope_factors(tx, ty, dx, dy, stencil)
    sc, jx, jy = _cell_factors(tx, ty)

    def rho(sx, sy):
        return 1 + sx_ * sx * dx / 2 + sy_ * sy * dy / 2

    # the four cells around the NE node of cell (i, j); each shows the corner facing the node
    cells = [((0, 0), (1, 1)), ((1, 0), (-1, 1)), ((0, 1), (1, -1)), ((1, 1), (-1, -1))]
    pu = pv = pp = 0
    for (a, b), (sx, sy) in cells:
        r = tx**a * ty**b * rho(sx, sy)
        pu = pu + r * sx * dy / 2
        pv = pv + r * sy * dx / 2
        pp = pp + r
    pstar = [0.5 * pu / (dx + dy), 0.5 * pv / (dx + dy), 0.25 * pp]

    row_u = [-jx * c / (2 * dx) for c in pstar]
    row_v = [-jy * c / (2 * dy) for c in pstar]
    row_p = [0, 0, 0]
    for sx in (1, -1):
        for sy in (1, -1):
            r = rho(sx, sy)
            shift = tx ** ((sx - 1) // 2) * ty ** ((sy - 1) // 2)
            w = (dx + dy) / 2
            row_p[0] = row_p[0] + r * sx * dy / 2 - w * shift * pstar[0]
            row_p[1] = row_p[1] + r * sy * dx / 2 - w * shift * pstar[1]
            row_p[2] = row_p[2] + w * r - w * shift * pstar[2]
    row_p = [-c / (dx * dy) for c in row_p]
    return _rows(row_u, row_v, row_p)


def rhs_symbol(scheme, tx, ty, dx=1.0, dy=1.0, stencil="node"):
    """Matrix ``M`` with ``dq_hat/dt = M q_hat``."""
    tx = np.asarray(tx, dtype=complex)
    ty = np.asarray(ty, dtype=complex)
    if scheme == "nodal_pressure_1":
        return _rhs_nodal_pressure(tx, ty, dx, dy)
    if scheme == "nodal_velocity_1":
        return _rhs_nodal_velocity(tx, ty, dx, dy)
    if scheme == "nodal_pressure_2":
        return _rhs_second_order(tx, ty, dx, dy, stencil)
    raise ValueError(f"unknown scheme {scheme!r}")


def symbol(scheme, tx, ty, dx=1.0, dy=1.0, stencil="node"):
    """Evolution matrix ``E`` with ``dq_hat/dt + E q_hat = 0``."""
    return -rhs_symbol(scheme, tx, ty, dx, dy, stencil)


def nodal_velocity_determinant(tx, ty, dx=1.0, dy=1.0):
    """Closed-form determinant of the nodal-velocity right-hand-side symbol ``M = -E``."""
    a = dx * (tx + 1) ** 2 * (ty - 1) ** 2 + dy * (tx - 1) ** 2 * (ty + 1) ** 2
    b = (ty + 1) ** 2 + tx**2 * (ty + 1) ** 2 + 2 * tx * (1 + (-6 + ty) * ty)
    return -a / (32 * dx**2 * dy**2 * tx**2 * ty**2) * b


def involution_vector(tx, ty, dx=1.0, dy=1.0):
    """Row vector annihilating the nodal-pressure symbols from the left (nodal vorticity)."""
    tx = np.asarray(tx, dtype=complex)
    ty = np.asarray(ty, dtype=complex)
    return np.stack(
        [(ty - 1) * (tx + 1) / (2 * dy), -(tx - 1) * (ty + 1) / (2 * dx), 0 * tx], axis=-1
    )


def kernel_dimension(E, tolerance=1e-10) -> int:
    """Number of singular values below ``tolerance * sigma_max`` (3 for the zero matrix)."""
    s = np.linalg.svd(np.asarray(E), compute_uv=False)
    if s[0] == 0:
        return len(s)
    return int(np.sum(s < tolerance * s[0]))


def left_kernel(E, tolerance=1e-10):
    """Row vector ``y`` with ``y E = 0`` when the kernel is one-dimensional, else ``None``."""
    E = np.asarray(E)
    if kernel_dimension(E, tolerance) != 1:
        return None
    u, _, _ = np.linalg.svd(E)
    return np.conj(u[:, -1])


def right_kernel(E, tolerance=1e-10):
    E = np.asarray(E)
    if kernel_dimension(E, tolerance) != 1:
        return None
    _, _, vh = np.linalg.svd(E)
    return np.conj(vh[-1])


def collinearity_residual(a, b) -> float:
    """``1 - |<a, b>| / (|a| |b|)``; zero iff the complex vectors are parallel."""
    a = np.asarray(a)
    b = np.asarray(b)
    return float(1 - abs(np.vdot(a, b)) / (np.linalg.norm(a) * np.linalg.norm(b)))


def unit_samples(samples: int):
    """Uniform ``samples x samples`` grid of ``(t_x, t_y)`` on the unit torus."""
    th = 2 * np.pi * np.arange(samples) / samples
    tx, ty = np.meshgrid(np.exp(1j * th), np.exp(1j * th), indexing="ij")
    return tx.ravel(), ty.ravel()


def amplification(scheme, tx, ty, cfl, dx=1.0, dy=1.0, stencil="node"):
    """Amplification matrix of one time step with ``dt = cfl * 2 dx dy / (dx + dy)``.

    Forward Euler for the first-order schemes, Heun for the second-order one.
    """
    dt = cfl * 2 * dx * dy / (dx + dy)
    A = -dt * symbol(scheme, tx, ty, dx, dy, stencil)
    eye = np.eye(3)
    if scheme == "nodal_pressure_2":
        return eye + A + 0.5 * A @ A
    return eye + A


def spectral_radii(scheme, cfl, samples=128, dx=1.0, dy=1.0, stencil="node"):
    tx, ty = unit_samples(samples)
    G = amplification(scheme, tx, ty, cfl, dx, dy, stencil)
    return tx, ty, np.abs(np.linalg.eigvals(G)).max(axis=-1)


def stability_scan(scheme, cfl, samples=128, dx=1.0, dy=1.0, stencil="node") -> float:
    """Largest spectral radius of the one-step amplification matrix over the sample grid."""
    return float(spectral_radii(scheme, cfl, samples, dx, dy, stencil)[2].max())


def scan_table(scheme, cfl, samples=64, dx=1.0, dy=1.0, tolerance=1e-10, stencil="node"):
    """Rows ``(k_x, k_y, kernel_dim, spectral_radius)`` over the sample grid."""
    tx, ty, rad = spectral_radii(scheme, cfl, samples, dx, dy, stencil)
    E = symbol(scheme, tx, ty, dx, dy, stencil)
    s = np.linalg.svd(E, compute_uv=False)
    smax = s[:, 0]
    dims = np.where(smax == 0, 3, np.sum(s < tolerance * smax[:, None], axis=1))
    kx = np.angle(tx) / dx
    ky = np.angle(ty) / dy
    return np.column_stack([kx, ky, dims, rad])
