"""Benchmark set-ups, reference solutions, error norms and diagnostics."""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .mesh import Boundary, Mesh
from .operators import curl_C, divergence_D
from . import cartesian


class DomainError(ValueError):
    pass


@dataclass(frozen=True)
class ObliqueWave:
    """Plane cosine pressure pulse at rest, rotated by ``theta``; periodic on the unit square for the defaults."""

    lam: float = 0.5
    theta: float = math.pi / 4
    boundary: str = "periodic"
    name: str = "oblique"

    def initial(self, x, y):
        return exact_oblique(0.0, x, y, self.lam, self.theta)

    def exact(self, t, x, y):
        return exact_oblique(t, x, y, self.lam, self.theta)


@dataclass(frozen=True)
class FourQuadrant:
    """Unit normal velocity in the upper-right quadrant, everything else at rest."""

    center: tuple = (0.5, 0.5)
    boundary: str = "zerogradient"
    name: str = "fourquadrant"

    def initial(self, x, y):
        x = np.asarray(x, dtype=float)
        u = ((x > self.center[0]) & (np.asarray(y) > self.center[1])).astype(float)
        return u, np.zeros_like(u), np.zeros_like(u)


@dataclass(frozen=True)
class SphericalRP:
    """Pressure 1 inside a disc, 0 outside, fluid at rest."""

    radius: float = 0.2
    center: tuple = (0.5, 0.5)
    boundary: str = "zerogradient"
    name: str = "spherical"

    def initial(self, x, y):
        r = np.hypot(np.asarray(x) - self.center[0], np.asarray(y) - self.center[1])
        p = (r < self.radius).astype(float)
        return np.zeros_like(p), np.zeros_like(p), p


@dataclass(frozen=True)
class StationaryVortex:
    """Divergence-free vortex with piecewise-linear angular velocity profile and zero pressure."""

    w: float = 0.2
    center: tuple = (0.5, 0.5)
    boundary: str = "periodic"
    name: str = "vortex"

    def initial(self, x, y):
        dx = np.asarray(x, dtype=float) - self.center[0]
        dy = np.asarray(y, dtype=float) - self.center[1]
        r = np.hypot(dx, dy)
        speed = vortex_speed(r, self.w)
        with np.errstate(invalid="ignore", divide="ignore"):
            ex = np.where(r > 0, -dy / r, 0.0)
            ey = np.where(r > 0, dx / r, 0.0)
        return speed * ex, speed * ey, np.zeros_like(r)

    def exact(self, t, x, y):
        return self.initial(x, y)


CASES = {
    "oblique": ObliqueWave,
    "fourquadrant": FourQuadrant,
    "spherical": SphericalRP,
    "vortex": StationaryVortex,
}


def make_case(name: str, **params):
    try:
        cls = CASES[name.lower()]
    except KeyError:
        raise ValueError(f"unknown case {name!r}; choose from {sorted(CASES)}") from None
    return cls(**params)


def vortex_speed(r, w):
    r = np.asarray(r, dtype=float)
    return np.where(r < w, r / w, np.where(r < 2 * w, 2 - r / w, 0.0))


def exact_oblique(t, x, y, lam=0.5, theta=math.pi / 4):
    """Exact ``(u, v, p)`` of the rotated standing cosine pulse."""
    xi = np.asarray(x) * math.cos(theta) + np.asarray(y) * math.sin(theta)
    k = 2 * math.pi / (lam * math.cos(theta))
    plus = np.cos(k * (xi + t))
    minus = np.cos(k * (xi - t))
    p = 0.5 * (plus + minus)
    un = -0.5 * (plus - minus)
    return un * math.cos(theta), un * math.sin(theta), p


def singular_profile(s):
    """``ln((1 + sqrt(1 - s^2)) / s)`` for ``0 < s <= 1``."""
    s = np.asarray(s, dtype=float)
    return np.log((1 + np.sqrt(1 - s * s)) / s)


def exact_fourquadrant_v(t, r):
    """Transverse velocity near the quadrant meeting point, ``L(r/t) / (2 pi)``.

    Returns ``None`` (or NaN entries for arrays) where ``r > t``.
    """
    if t <= 0:
        raise DomainError("t must be positive")
    s = np.asarray(r, dtype=float) / t
    if np.any(s <= 0):
        raise DomainError("r/t must be positive")
    if s.ndim == 0:
        return None if s > 1 else float(singular_profile(s) / (2 * math.pi))
    out = np.full(s.shape, np.nan)
    ok = s <= 1
    out[ok] = singular_profile(s[ok]) / (2 * math.pi)
    return out


def initialize(case, mesh: Mesh) -> np.ndarray:
    """Cell values by point evaluation at the centroids, shape ``(3, n_cells)``."""
    x, y = mesh.cell_centroid.T
    return np.array(case.initial(x, y), dtype=float)


@dataclass
class ErrorReport:
    errors: dict
    h: float
    n_cells: int

    def __getitem__(self, key):
        return self.errors[key]


def mesh_size(mesh: Mesh) -> float:
    """Length scale for convergence plots: ``sqrt(area / N)``, i.e. 1/N for N x N unit grids."""
    return math.sqrt(mesh.cell_area.sum() / mesh.n_cells)


def error_l1(mesh: Mesh, numerical, exact) -> ErrorReport:
    """``sum_c |c| |q_c - q_exact(x_c)|`` per variable; ``exact(x, y)`` returns ``(u, v, p)``."""
    x, y = mesh.cell_centroid.T
    ref = np.array(exact(x, y), dtype=float)
    err = np.abs(np.asarray(numerical) - ref) @ mesh.cell_area
    return ErrorReport(dict(zip("uvp", map(float, err))), mesh_size(mesh), mesh.n_cells)


def rates(reports: list[ErrorReport]) -> list[dict]:
    """Observed orders ``log(e1/e2) / log(h1/h2)`` between consecutive reports."""
    out = []
    for a, b in zip(reports[:-1], reports[1:]):
        out.append({k: math.log(a.errors[k] / b.errors[k]) / math.log(a.h / b.h) for k in a.errors})
    return out


def convergence_study(case, meshes, scheme="nodal_pressure", order=1, t_end=0.5, cfl=0.3, stencil="node"):
    """Run ``case`` on each mesh to ``t_end`` and return ``(reports, rates)``."""
    from .timeint import TimeControl, run, select_rhs

    reports = []
    rhs = select_rhs(scheme, order, stencil)
    for mesh in meshes:
        q0 = initialize(case, mesh)
        res = run(mesh, q0, TimeControl(cfl=cfl, t_end=t_end, order=order, observe_every=0), rhs=rhs)
        reports.append(error_l1(mesh, res.state, lambda x, y: case.exact(t_end, x, y)))
    return reports, rates(reports)


def cartesian_shape(mesh: Mesh):
    """``(nx, ny, dx, dy)`` if ``mesh`` is a uniform grid in generator ordering, else ``None``."""
    if np.any(mesh.cell_sides != 4):
        return None
    area = mesh.cell_area
    x0 = mesh.corner_xy[mesh.cell_ptr[:-1]]
    x2 = mesh.corner_xy[mesh.cell_ptr[:-1] + 2]
    dx, dy = (x2 - x0)[0]
    if dx <= 0 or dy <= 0 or not np.allclose(area, dx * dy, rtol=1e-12, atol=0):
        return None
    if not np.allclose(x2 - x0, [dx, dy], rtol=0, atol=1e-12 * max(dx, dy)):
        return None
    nx = int(round(mesh.period[0] / dx))
    ny = int(round(mesh.period[1] / dy))
    if nx * ny != mesh.n_cells:
        return None
    i = np.round((x0[:, 0] - mesh.origin[0]) / dx).astype(int)
    j = np.round((x0[:, 1] - mesh.origin[1]) / dy).astype(int)
    if not np.array_equal(i + nx * j, np.arange(mesh.n_cells)):
        return None
    return nx, ny, float(dx), float(dy)


def interior_nodes(mesh: Mesh) -> np.ndarray:
    return ~mesh.boundary_node


def diagnostics(mesh: Mesh, state) -> dict:
    """Dual-area weighted L1 norms of the nodal vorticity and divergence.

    On zero-gradient meshes only interior nodes enter.  On uniform grids
    the norm of the four-cell vorticity stencil is reported as well.
    """
    q = np.asarray(state, dtype=float)
    v = q[:2].T
    mask = interior_nodes(mesh)
    w = mesh.dual_area * mask
    out = {
        "vorticity_l1": float(np.sum(w * np.abs(curl_C(mesh, v)))),
        "divergence_l1": float(np.sum(w * np.abs(divergence_D(mesh, v)))),
    }
    shape = cartesian_shape(mesh)
    if shape is not None:
        nx, ny, dx, dy = shape
        u2 = q[0].reshape(ny, nx)
        v2 = q[1].reshape(ny, nx)
        om = cartesian.vorticity(u2, v2, dx, dy)
        if not mesh.periodic:
            om = om[:-1, :-1]
        out["stencil_vorticity_l1"] = float(dx * dy * np.abs(om).sum())
    return out


def totals(mesh: Mesh, state) -> np.ndarray:
    """Area-weighted totals of ``u, v, p``."""
    return np.asarray(state) @ mesh.cell_area


def radial_scatter(mesh: Mesh, values, center=(0.5, 0.5)):
    """``(r, value)`` pairs per cell about ``center``."""
    r = np.hypot(mesh.cell_centroid[:, 0] - center[0], mesh.cell_centroid[:, 1] - center[1])
    return np.column_stack([r, np.asarray(values)])


def fourquadrant_band_error(mesh: Mesh, state, t, lo=0.2, hi=0.9, band=0.01, center=(0.5, 0.5)):
    """Relative L1 mismatch of ``v`` against the singular profile for ``lo <= r/t <= hi``.

    Cells whose centroid lies within ``band`` of the initial discontinuity
    lines (x = 0.5 for y > 0.5 and y = 0.5 for x > 0.5) are excluded.
    """
    x, y = mesh.cell_centroid.T
    cx, cy = center
    r = np.hypot(x - cx, y - cy)
    s = r / t
    keep = (s >= lo) & (s <= hi)
    near_v = (np.abs(x - cx) <= band) & (y >= cy - band)
    near_h = (np.abs(y - cy) <= band) & (x >= cx - band)
    keep &= ~(near_v | near_h)
    ref = singular_profile(s[keep]) / (2 * math.pi)
    a = mesh.cell_area[keep]
    num = np.asarray(state)[1, keep]
    return float(np.sum(a * np.abs(num - ref)) / np.sum(a * np.abs(ref)))
