"""Structured and randomised mesh generators on rectangular domains.

All generators place the domain at ``[0, nx*dx] x [0, ny*dy]`` and, unless
told otherwise, use the unit square.  Random generators take an explicit
``seed`` and are fully deterministic.
"""

from __future__ import annotations

import numpy as np

from .mesh import Mesh, TangledMesh, build_mesh, shoelace


def _spacing(n, d, length):
    if n < 1:
        raise ValueError("cell counts must be at least 1")
    if d is None:
        d = length / n
    if d <= 0:
        raise ValueError("spacings must be positive")
    return float(d)


def _grid(nx, ny, dx, dy):
    i, j = np.meshgrid(np.arange(nx + 1), np.arange(ny + 1), indexing="xy")
    return np.stack([i.ravel() * dx, j.ravel() * dy], axis=1)


def _quads(nx, ny):
    def nid(i, j):
        return i + (nx + 1) * j

    return [[nid(i, j), nid(i + 1, j), nid(i + 1, j + 1), nid(i, j + 1)] for j in range(ny) for i in range(nx)]


def generate_cartesian(nx: int, ny: int, dx: float | None = None, dy: float | None = None,
                       boundary="periodic") -> Mesh:
    """Uniform rectangular grid; cell ``i + nx*j`` is the rectangle at column i, row j."""
    dx = _spacing(nx, dx, 1.0)
    dy = _spacing(ny, dy, 1.0)
    return build_mesh(_grid(nx, ny, dx, dy), _quads(nx, ny), boundary)


def _perturbed_nodes(nx, ny, dx, dy, amplitude, rng, boundary):
    xy = _grid(nx, ny, dx, dy)
    if amplitude == 0:
        return xy
    h = amplitude * min(dx, dy)
    i = np.tile(np.arange(nx + 1), ny + 1)
    j = np.repeat(np.arange(ny + 1), nx + 1)
    on_x = (i == 0) | (i == nx)
    on_y = (j == 0) | (j == ny)
    inner = ~(on_x | on_y)
    r = h * np.sqrt(rng.random(len(xy)))
    phi = 2 * np.pi * rng.random(len(xy))
    disp = np.stack([r * np.cos(phi), r * np.sin(phi)], axis=1)
    xy[inner] += disp[inner]
    if str(boundary).lower().startswith("periodic"):
        # move boundary nodes along the boundary, identically on both copies
        edge_y = on_x & ~on_y
        shift_y = h * (2 * rng.random(ny + 1) - 1)
        xy[edge_y, 1] += shift_y[j[edge_y]]
        edge_x = on_y & ~on_x
        shift_x = h * (2 * rng.random(nx + 1) - 1)
        xy[edge_x, 0] += shift_x[i[edge_x]]
    return xy


def _check_tangle(xy, cells):
    for ci, c in enumerate(cells):
        if shoelace(xy[c]) <= 0:
            raise TangledMesh(f"cell {ci} is inverted after perturbation")


def generate_perturbed_quad(nx: int, ny: int, amplitude: float = 0.2, seed: int = 0, *,
                            dx: float | None = None, dy: float | None = None,
                            boundary="periodic") -> Mesh:
    """Cartesian grid with randomly displaced nodes.

    Interior nodes move by at most ``amplitude * min(dx, dy)``.  On periodic
    meshes boundary nodes slide along the boundary (the same amount on both
    periodic copies, domain corners fixed); on zero-gradient meshes they stay.
    """
    if not 0 <= amplitude <= 0.3:
        raise ValueError("amplitude must lie in [0, 0.3]")
    dx = _spacing(nx, dx, 1.0)
    dy = _spacing(ny, dy, 1.0)
    rng = np.random.default_rng(seed)
    xy = _perturbed_nodes(nx, ny, dx, dy, amplitude, rng, boundary)
    cells = _quads(nx, ny)
    _check_tangle(xy, cells)
    return build_mesh(xy, cells, boundary)


def generate_mixed_triquad(nx: int, ny: int, split_fraction: float = 0.5, seed: int = 0, *,
                           amplitude: float = 0.0, dx: float | None = None, dy: float | None = None,
                           boundary="periodic") -> Mesh:
    """Quad grid where a random subset of cells is cut into two triangles.

    Each split cell uses a randomly chosen diagonal.  ``amplitude`` optionally
    perturbs the nodes first, exactly as :func:`generate_perturbed_quad`.
    """
    if not 0 <= split_fraction <= 1:
        raise ValueError("split_fraction must lie in [0, 1]")
    if not 0 <= amplitude <= 0.3:
        raise ValueError("amplitude must lie in [0, 0.3]")
    dx = _spacing(nx, dx, 1.0)
    dy = _spacing(ny, dy, 1.0)
    rng = np.random.default_rng(seed)
    xy = _perturbed_nodes(nx, ny, dx, dy, amplitude, rng, boundary)
    quads = _quads(nx, ny)
    split = rng.random(len(quads)) < split_fraction
    diag = rng.random(len(quads)) < 0.5
    cells = []
    for q, s, d in zip(quads, split, diag):
        a, b, c, e = q
        if not s:
            cells.append(q)
        elif d:
            cells += [[a, b, c], [a, c, e]]
        else:
            cells += [[a, b, e], [b, c, e]]
    _check_tangle(xy, cells)
    return build_mesh(xy, cells, boundary)


def generate_polygonal(nx: int, ny: int, seed: int = 0, *, amplitude: float = 0.1,
                       bulge: float = 0.15, dx: float | None = None, dy: float | None = None,
                       boundary="periodic") -> Mesh:
    """Mesh of quadrilaterals, pentagons and hexagons.

    Starting from an ``nx x ny`` grid (both even), an extra node is inserted
    on every interior vertical grid line segment at odd column index and even
    row, and on every interior horizontal segment at odd row line and even
    column.  The inserted nodes are pushed off the line by ``bulge * h`` so
    the polygons are genuinely non-quadrilateral.  Over a 2x2 block this
    gives one hexagon, two pentagons and one quadrilateral.  Grid nodes away
    from the boundary are then jittered by at most ``amplitude * h``.
    """
    if nx % 2 or ny % 2:
        raise ValueError("generate_polygonal needs even nx and ny")
    dx = _spacing(nx, dx, 1.0)
    dy = _spacing(ny, dy, 1.0)
    rng = np.random.default_rng(seed)
    grid = _perturbed_nodes(nx, ny, dx, dy, amplitude, rng, "zerogradient")
    nodes = [p for p in grid]

    def nid(i, j):
        return i + (nx + 1) * j

    vmid = {}
    for j in range(0, ny, 2):
        for i in range(1, nx, 2):
            a, b = grid[nid(i, j)], grid[nid(i, j + 1)]
            sign = 1.0 if (i // 2 + j // 2) % 2 == 0 else -1.0
            vmid[(i, j)] = len(nodes)
            nodes.append(0.5 * (a + b) + np.array([sign * bulge * dx, 0.0]))
    hmid = {}
    for j in range(1, ny, 2):
        for i in range(0, nx, 2):
            a, b = grid[nid(i, j)], grid[nid(i + 1, j)]
            sign = 1.0 if (i // 2 + j // 2) % 2 == 0 else -1.0
            hmid[(i, j)] = len(nodes)
            nodes.append(0.5 * (a + b) + np.array([0.0, sign * bulge * dy]))

    cells = []
    for j in range(ny):
        for i in range(nx):
            poly = [nid(i, j)]
            if (i, j) in hmid:
                poly.append(hmid[(i, j)])
            poly.append(nid(i + 1, j))
            if (i + 1, j) in vmid:
                poly.append(vmid[(i + 1, j)])
            poly.append(nid(i + 1, j + 1))
            if (i, j + 1) in hmid:
                poly.append(hmid[(i, j + 1)])
            poly.append(nid(i, j + 1))
            if (i, j) in vmid:
                poly.append(vmid[(i, j)])
            cells.append(poly)
    xy = np.array(nodes)
    _check_tangle(xy, cells)
    return build_mesh(xy, cells, boundary)


GENERATORS = {
    "cartesian": generate_cartesian,
    "quad": generate_perturbed_quad,
    "triquad": generate_mixed_triquad,
    "polygonal": generate_polygonal,
}


def generate(kind: str, n: int, seed: int = 0, boundary="periodic", **kw) -> Mesh:
    """Build an ``n x n`` mesh of a named family on the unit square."""
    kind = kind.lower()
    if kind == "cartesian":
        return generate_cartesian(n, n, boundary=boundary)
    if kind in ("quad", "perturbed_quad"):
        return generate_perturbed_quad(n, n, kw.pop("amplitude", 0.2), seed, boundary=boundary, **kw)
    if kind in ("triquad", "mixed_triquad"):
        return generate_mixed_triquad(n, n, kw.pop("split_fraction", 0.5), seed, boundary=boundary, **kw)
    if kind == "polygonal":
        return generate_polygonal(n, n, seed, boundary=boundary, **kw)
    raise ValueError(f"unknown mesh family {kind!r}")
