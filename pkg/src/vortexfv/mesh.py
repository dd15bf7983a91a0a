"""Polygonal meshes with the node/cell/subedge connectivity used by the schemes.

A mesh is stored "corner based": every (cell, local vertex) pair is a corner
and carries the node-normal of that cell at that node, the length of the two
half edges touching it and the node position expressed in the frame of the
cell.  On periodic meshes the latter differs from ``node_coords`` for cells
that wrap around the domain, which is what keeps all geometric identities
local and exact.

Boundaries are either fully periodic (nodes on opposite sides of the bounding
box are identified) or zero-gradient.  For zero-gradient meshes every half of
a boundary edge is paired with a virtual ghost copy of the adjacent cell; the
arrays ``bsub_*`` describe those boundary subedges.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from pathlib import Path

import numpy as np


class MeshError(ValueError):
    """Base class for invalid mesh input."""


class NonSimplePolygon(MeshError):
    pass


class ZeroAreaCell(MeshError):
    pass


class DanglingNode(MeshError):
    pass


class InconsistentOrientation(MeshError):
    pass


class TangledMesh(MeshError):
    pass


class ParseError(MeshError):
    def __init__(self, message: str, line: int | None = None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


class Boundary(str, enum.Enum):
    PERIODIC = "periodic"
    ZERO_GRADIENT = "zerogradient"

    @classmethod
    def parse(cls, value) -> "Boundary":
        if isinstance(value, cls):
            return value
        key = str(value).strip().lower().replace("_", "").replace("-", "")
        for member in cls:
            if member.value == key:
                return member
        raise MeshError(f"unknown boundary kind {value!r}")


def cross(a, b):
    """Scalar 2D cross product a_x b_y - a_y b_x (broadcasting over leading axes)."""
    a = np.asarray(a)
    b = np.asarray(b)
    return a[..., 0] * b[..., 1] - a[..., 1] * b[..., 0]


def shoelace(xy: np.ndarray) -> float:
    x, y = xy[:, 0], xy[:, 1]
    return 0.5 * float(np.dot(x, np.roll(y, -1)) - np.dot(np.roll(x, -1), y))


@dataclass(frozen=True)
class Stencil:
    """Least-squares neighbourhood of every cell, flattened.

    ``cell[j]`` gets a contribution from ``nbr[j]`` whose centroid sits at
    ``offset[j]`` relative to the centroid of ``cell[j]``; ``weight[j]`` is
    the precomputed row of the pseudo-inverse, so that the slope of a field
    ``q`` is ``sum_j weight[j] * (q[nbr[j]] - q[cell[j]])``.
    """

    kind: str
    cell: np.ndarray
    nbr: np.ndarray
    offset: np.ndarray
    weight: np.ndarray


class Mesh:
    """Immutable polygonal mesh. Build it with :func:`build_mesh`."""

    def __init__(self, **fields):
        for name, value in fields.items():
            if isinstance(value, np.ndarray):
                value.setflags(write=False)
            object.__setattr__(self, name, value)
        object.__setattr__(self, "_stencils", {})

    def __setattr__(self, name, value):
        raise AttributeError("Mesh is immutable")

    def __repr__(self):
        return (
            f"Mesh(cells={self.n_cells}, edges={self.n_edges}, nodes={self.n_nodes}, "
            f"boundary={self.boundary_kind.value})"
        )

    @property
    def n_cells(self) -> int:
        return len(self.cell_area)

    @property
    def n_nodes(self) -> int:
        return len(self.node_coords)

    @property
    def n_edges(self) -> int:
        return len(self.edge_length)

    @property
    def n_corners(self) -> int:
        return len(self.corner_node)

    @property
    def periodic(self) -> bool:
        return self.boundary_kind is Boundary.PERIODIC

    @property
    def cell_nodes(self) -> list[np.ndarray]:
        return [self.corner_node[a:b] for a, b in zip(self.cell_ptr[:-1], self.cell_ptr[1:])]

    @property
    def cell_sides(self) -> np.ndarray:
        return np.diff(self.cell_ptr)

    @property
    def node_normal(self) -> np.ndarray:
        """Unnormalised node-normals per corner (cell, node)."""
        return self.corner_normal

    @property
    def length_scale(self) -> np.ndarray:
        """Per-cell CFL length, twice the inscribed-radius proxy 2|c|/|dc|."""
        return 4.0 * self.cell_area / self.cell_perimeter

    def corner_slice(self, cell: int) -> slice:
        return slice(int(self.cell_ptr[cell]), int(self.cell_ptr[cell + 1]))

    def stencil(self, kind: str = "node") -> Stencil:
        kind = _stencil_key(kind)
        if kind not in self._stencils:
            self._stencils[kind] = _build_stencil(self, kind)
        return self._stencils[kind]

    def wrap(self, d: np.ndarray) -> np.ndarray:
        """Minimum-image displacement on periodic meshes (identity otherwise)."""
        d = np.array(d, dtype=float)
        if self.periodic:
            d[..., 0] -= self.period[0] * np.round(d[..., 0] / self.period[0])
            d[..., 1] -= self.period[1] * np.round(d[..., 1] / self.period[1])
        return d


def _stencil_key(kind) -> str:
    key = str(getattr(kind, "value", kind)).lower()
    if key in ("node", "nodes", "node_neighbors", "nodeneighbors", "s9", "sn"):
        return "node"
    if key in ("edge", "edges", "edge_neighbors", "edgeneighbors", "s5", "se"):
        return "edge"
    raise ValueError(f"unknown stencil kind {kind!r}")


class DegenerateStencil(MeshError):
    pass


def _build_stencil(mesh: Mesh, kind: str) -> Stencil:
    cen = mesh.cell_centroid
    rel = mesh.corner_xy - cen[mesh.corner_cell]
    if kind == "node":
        # every ordered pair of corners sharing a node
        srt = np.argsort(mesh.corner_node, kind="stable")
        cnt = np.bincount(mesh.corner_node, minlength=mesh.n_nodes)
        ptr = np.concatenate([[0], np.cumsum(cnt)])
        m = cnt[mesh.corner_node[srt]]
        ka = np.repeat(srt, m)
        base = np.repeat(ptr[mesh.corner_node[srt]], m)
        within = np.arange(len(ka)) - np.repeat(np.cumsum(m) - m, m)
        kb = srt[base + within]
        ca = mesh.corner_cell[ka]
        cb = mesh.corner_cell[kb]
        d = rel[ka] - rel[kb]
        if len(mesh.ghost_node):
            # mirror images of the ring cells at boundary nodes
            g_order = np.argsort(mesh.ghost_node, kind="stable")
            gcnt = np.bincount(mesh.ghost_node, minlength=mesh.n_nodes)
            gptr = np.concatenate([[0], np.cumsum(gcnt)])
            m = gcnt[mesh.corner_node]
            ka = np.repeat(np.arange(mesh.n_corners), m)
            within = np.arange(len(ka)) - np.repeat(np.cumsum(m) - m, m)
            g = g_order[np.repeat(gptr[mesh.corner_node], m) + within]
            src = mesh.ghost_corner[g]
            ca = np.concatenate([ca, mesh.corner_cell[ka]])
            cb = np.concatenate([cb, mesh.corner_cell[src]])
            d = np.concatenate([d, rel[ka] - np.einsum("gij,gj->gi", mesh.ghost_reflection[g], rel[src])])
    else:
        inner = mesh.edge_cells[:, 1] >= 0
        cl, cr = mesh.edge_cells[inner].T
        kl, kr = mesh.edge_corner_pair[inner].T
        # corner kl of L and kr of R sit on the same node
        dl = rel[kl] - rel[kr]
        # boundary edges: the mirror image of the cell itself
        bnd = ~inner
        cb_ = mesh.edge_cells[bnd, 0]
        nb = mesh.edge_normal[bnd]
        db = 2.0 * np.einsum("ei,ei->e", rel[mesh.edge_corner_pair[bnd, 0]], nb)[:, None] * nb
        ca = np.concatenate([cl, cr, cb_])
        cb = np.concatenate([cr, cl, cb_])
        d = np.concatenate([dl, -dl, db])
    keys = np.column_stack([ca, cb, np.rint(d / mesh.scale * 1e7).astype(np.int64)])
    keep = ~((ca == cb) & np.all(keys[:, 2:] == 0, axis=1))
    _, idx = np.unique(keys[keep], axis=0, return_index=True)
    cell = ca[keep][idx]
    nbr = cb[keep][idx]
    offset = d[keep][idx]

    a = np.zeros((mesh.n_cells, 2, 2))
    np.add.at(a, cell, offset[:, :, None] * offset[:, None, :])
    det = a[:, 0, 0] * a[:, 1, 1] - a[:, 0, 1] * a[:, 1, 0]
    tr = a[:, 0, 0] + a[:, 1, 1]
    disc = np.sqrt(np.maximum(tr * tr / 4 - det, 0.0))
    lmax = tr / 2 + disc
    lmin = tr / 2 - disc
    with np.errstate(divide="ignore", invalid="ignore"):
        cond = np.where(lmin > 0, lmax / lmin, np.inf)
    bad = np.flatnonzero(~(cond <= 1e12))
    if len(bad):
        raise DegenerateStencil(
            f"least-squares stencil of cell {int(bad[0])} is degenerate (condition {cond[bad[0]]:.3g})"
        )
    inv = np.empty_like(a)
    inv[:, 0, 0] = a[:, 1, 1] / det
    inv[:, 1, 1] = a[:, 0, 0] / det
    inv[:, 0, 1] = -a[:, 0, 1] / det
    inv[:, 1, 0] = -a[:, 1, 0] / det
    weight = np.einsum("jab,jb->ja", inv[cell], offset)
    return Stencil(kind, cell, nbr, offset, weight)


def _segments_cross(p1, p2, q1, q2, eps):
    """Vectorised proper-intersection test for segment pairs (leading axes broadcast)."""
    d1 = cross(p2 - p1, q1 - p1)
    d2 = cross(p2 - p1, q2 - p1)
    d3 = cross(q2 - q1, p1 - q1)
    d4 = cross(q2 - q1, p2 - q1)
    s1 = ((d1 > eps) & (d2 < -eps)) | ((d1 < -eps) & (d2 > eps))
    s2 = ((d3 > eps) & (d4 < -eps)) | ((d3 < -eps) & (d4 > eps))
    return s1 & s2


def _simple_polygons(xy: np.ndarray, ptr: np.ndarray, nxt: np.ndarray) -> np.ndarray:
    """Boolean per cell: no two non-adjacent edges of the polygon cross."""
    sides = np.diff(ptr)
    ok = np.ones(len(sides), dtype=bool)
    for k in np.unique(sides):
        if k < 4:
            continue
        cells = np.flatnonzero(sides == k)
        idx = ptr[cells][:, None] + np.arange(k)[None, :]
        p = xy[idx]
        q = xy[nxt[idx]]
        scale = np.ptp(p, axis=1).max(axis=1)
        eps = (1e-14 * scale * scale)
        for i in range(k):
            for j in range(i + 2, k):
                if i == 0 and j == k - 1:
                    continue
                ok[cells] &= ~_segments_cross(p[:, i], q[:, i], p[:, j], q[:, j], eps)
    return ok


def _first_occurrence_unique(keys: np.ndarray):
    """Like ``np.unique(keys, axis=0, return_inverse=True)`` but numbering rows by first appearance."""
    _, first, inv = np.unique(keys, axis=0, return_index=True, return_inverse=True)
    inv = inv.ravel()
    order = np.argsort(first, kind="stable")
    rank = np.empty_like(order)
    rank[order] = np.arange(len(order))
    return first[order], rank[inv]


def build_mesh(nodes, cells, boundary="zerogradient", *, allow_reorient: bool = False) -> Mesh:
    """Build a validated mesh from node coordinates and counterclockwise cells.

    Parameters
    ----------
    nodes : array_like, shape (N, 2)
    cells : sequence of int sequences
        Node indices of each polygon, counterclockwise.
    boundary : {"periodic", "zerogradient"}
        For periodic meshes, nodes lying on opposite sides of the bounding
        box are identified; the node list must contain both copies.
    allow_reorient : bool
        Silently reverse clockwise cells instead of raising
        :class:`InconsistentOrientation`.
    """
    boundary = Boundary.parse(boundary)
    xy = np.asarray(nodes, dtype=float)
    if xy.ndim != 2 or xy.shape[1] != 2:
        raise MeshError("nodes must have shape (N, 2)")
    if not np.all(np.isfinite(xy)):
        raise MeshError("non-finite node coordinate")
    n_in = len(xy)
    cells = [list(map(int, c)) for c in cells]
    if not cells:
        raise MeshError("mesh has no cells")
    n_cells = len(cells)
    sides = np.array([len(c) for c in cells], dtype=np.int64)
    bad = np.flatnonzero(sides < 3)
    if len(bad):
        raise NonSimplePolygon(f"cell {int(bad[0])} has fewer than 3 nodes")
    cell_ptr = np.zeros(n_cells + 1, dtype=np.int64)
    cell_ptr[1:] = np.cumsum(sides)
    corner_orig = np.fromiter((n for c in cells for n in c), dtype=np.int64, count=int(cell_ptr[-1]))
    corner_cell = np.repeat(np.arange(n_cells), sides)

    out_of_range = np.flatnonzero((corner_orig < 0) | (corner_orig >= n_in))
    if len(out_of_range):
        k = out_of_range[0]
        raise DanglingNode(
            f"cell {int(corner_cell[k])} references node {int(corner_orig[k])}, mesh has {n_in} nodes"
        )
    pair = np.unique(np.stack([corner_cell, corner_orig], axis=1), axis=0)
    if len(pair) != len(corner_orig):
        counts = np.bincount(pair[:, 0], minlength=n_cells)
        raise NonSimplePolygon(f"cell {int(np.flatnonzero(counts != sides)[0])} repeats a node")
    used = np.zeros(n_in, dtype=bool)
    used[corner_orig] = True
    if not used.all():
        raise DanglingNode(f"node {int(np.flatnonzero(~used)[0])} belongs to no cell")

    scale = float(np.ptp(xy, axis=0).max())
    if scale <= 0:
        raise ZeroAreaCell("all nodes coincide")

    # successor / predecessor corner indices
    nxt = np.arange(len(corner_orig)) + 1
    nxt[cell_ptr[1:] - 1] = cell_ptr[:-1]
    prv = np.arange(len(corner_orig)) - 1
    prv[cell_ptr[:-1]] = cell_ptr[1:] - 1

    def signed_areas(idx):
        p = xy[idx]
        return 0.5 * np.bincount(corner_cell, cross(p, p[nxt]), n_cells)

    area = signed_areas(corner_orig)
    lo_c = np.full((n_cells, 2), np.inf)
    hi_c = np.full((n_cells, 2), -np.inf)
    np.minimum.at(lo_c, corner_cell, xy[corner_orig])
    np.maximum.at(hi_c, corner_cell, xy[corner_orig])
    local = (hi_c - lo_c).max(axis=1)
    zero = np.flatnonzero(np.abs(area) <= 1e-14 * local * local)
    if len(zero):
        raise ZeroAreaCell(f"cell {int(zero[0])} has zero area")
    simple_ok = _simple_polygons(xy[corner_orig], cell_ptr, nxt)
    if not simple_ok.all():
        raise NonSimplePolygon(f"cell {int(np.flatnonzero(~simple_ok)[0])} is self-intersecting")
    neg = np.flatnonzero(area < 0)
    if len(neg):
        if not allow_reorient:
            raise InconsistentOrientation(f"cell {int(neg[0])} is ordered clockwise")
        for ci in neg:
            s = slice(cell_ptr[ci], cell_ptr[ci + 1])
            corner_orig[s] = corner_orig[s][::-1]

    # node identification
    lo = xy.min(axis=0)
    hi = xy.max(axis=0)
    period = hi - lo
    if boundary is Boundary.PERIODIC:
        tol = 1e-9 * scale
        wrapped = xy.copy()
        for ax in range(2):
            at_hi = np.abs(xy[:, ax] - hi[ax]) <= tol
            wrapped[at_hi, ax] -= period[ax]
        keys = np.rint((wrapped - lo) / (10 * tol)).astype(np.int64)
        first, remap = _first_occurrence_unique(keys)
        node_coords = wrapped[first]
    else:
        remap = np.arange(n_in)
        node_coords = xy.copy()
    n_nodes = len(node_coords)

    corner_node = remap[corner_orig]
    corner_xy = xy[corner_orig]
    dup = np.unique(np.stack([corner_cell, corner_node], axis=1), axis=0)
    if len(dup) != len(corner_node):
        counts = np.bincount(dup[:, 0], minlength=n_cells)
        raise MeshError(
            f"cell {int(np.flatnonzero(counts != sides)[0])} touches the same node twice after periodic identification"
        )

    # local edge k runs from corner k to corner nxt[k]
    evec = corner_xy[nxt] - corner_xy
    elen = np.hypot(evec[:, 0], evec[:, 1])
    enrm = np.stack([evec[:, 1], -evec[:, 0]], axis=1) / elen[:, None]

    corner_normal = 0.5 * np.stack(
        [corner_xy[nxt, 1] - corner_xy[prv, 1], -(corner_xy[nxt, 0] - corner_xy[prv, 0])], axis=1
    )
    corner_sublen = 0.5 * (elen + elen[prv])
    corner_tensor = 0.5 * (
        elen[:, None, None] * enrm[:, :, None] * enrm[:, None, :]
        + elen[prv, None, None] * enrm[prv, :, None] * enrm[prv, None, :]
    )

    # cell area, centroid, perimeter (local frame)
    cr = cross(corner_xy, corner_xy[nxt])
    cell_area = 0.5 * np.bincount(corner_cell, cr, n_cells)
    cx = np.bincount(corner_cell, (corner_xy[:, 0] + corner_xy[nxt, 0]) * cr, n_cells)
    cy = np.bincount(corner_cell, (corner_xy[:, 1] + corner_xy[nxt, 1]) * cr, n_cells)
    cell_centroid = np.stack([cx, cy], axis=1) / (6.0 * cell_area[:, None])
    cell_perimeter = np.bincount(corner_cell, elen, n_cells)

    # edges: group local edges by (node pair, displacement)
    a = corner_node
    b = corner_node[nxt]
    lo_n = np.minimum(a, b)
    hi_n = np.maximum(a, b)
    if boundary is Boundary.PERIODIC:
        d = np.where((a < b)[:, None], evec, -evec)
        disp = np.rint(d / scale * 1e7).astype(np.int64)
        ekeys = np.column_stack([lo_n, hi_n, disp])
    else:
        ekeys = np.column_stack([lo_n, hi_n])
    _, corner_edge = _first_occurrence_unique(ekeys)
    n_edges = int(corner_edge.max()) + 1
    counts = np.bincount(corner_edge, minlength=n_edges)
    if np.any(counts > 2):
        e = int(np.flatnonzero(counts > 2)[0])
        raise NonSimplePolygon(f"edge {e} is shared by more than two cells")
    order = np.argsort(corner_edge, kind="stable")
    starts = np.zeros(n_edges + 1, dtype=np.int64)
    starts[1:] = np.cumsum(counts)
    k1 = order[starts[:-1]]
    two = counts == 2
    k2 = np.full(n_edges, -1, dtype=np.int64)
    k2[two] = order[starts[:-1][two] + 1]

    if boundary is Boundary.PERIODIC and not two.all():
        e = int(np.flatnonzero(~two)[0])
        raise MeshError(
            f"periodic mesh has an unmatched boundary edge between nodes {int(lo_n[k1[e]])} and {int(hi_n[k1[e]])}"
        )
    wrong = two & (corner_node[k1] != corner_node[nxt[np.maximum(k2, 0)]])
    if wrong.any():
        e = int(np.flatnonzero(wrong)[0])
        raise InconsistentOrientation(
            f"cells {int(corner_cell[k1[e]])} and {int(corner_cell[k2[e]])} traverse a shared edge in the same direction"
        )
    # L is the lower cell id
    swap = two & (corner_cell[np.maximum(k2, 0)] < corner_cell[k1])
    kL = np.where(swap, k2, k1)
    kR = np.where(swap, k1, k2)
    edge_cells = np.full((n_edges, 2), -1, dtype=np.int64)
    edge_cells[:, 0] = corner_cell[kL]
    edge_cells[two, 1] = corner_cell[kR[two]]
    edge_corner_pair = np.full((n_edges, 2), -1, dtype=np.int64)
    edge_corner_pair[:, 0] = kL
    edge_corner_pair[two, 1] = nxt[kR[two]]
    edge_nodes = np.stack([corner_node[kL], corner_node[nxt[kL]]], axis=1)
    edge_normal = enrm[kL]
    edge_length = elen[kL]

    # boundary subedges: two halves per boundary edge
    b_corners = kL[~two]
    bsub_corner = np.concatenate([b_corners, nxt[b_corners]])
    bsub_edge_corner = np.concatenate([b_corners, b_corners])
    bsub_node = corner_node[bsub_corner]
    bsub_cell = corner_cell[bsub_corner]
    bsub_len = 0.5 * elen[bsub_edge_corner]
    bsub_normal = enrm[bsub_edge_corner].reshape(-1, 2)
    bsub_xy = corner_xy[bsub_corner].reshape(-1, 2)

    # node -> corners, counterclockwise around the node
    rel = cell_centroid[corner_cell] - corner_xy
    ang = np.arctan2(rel[:, 1], rel[:, 0])
    order = np.lexsort((ang, corner_node))
    ncount = np.bincount(corner_node, minlength=n_nodes)
    node_ptr = np.zeros(n_nodes + 1, dtype=np.int64)
    node_ptr[1:] = np.cumsum(ncount)
    node_corners = np.split(order, node_ptr[1:-1])
    node_cells = [corner_cell[ks] for ks in node_corners]
    en = np.concatenate([edge_nodes[:, 0], edge_nodes[:, 1]])
    ei = np.concatenate([np.arange(n_edges), np.arange(n_edges)])
    o = np.lexsort((ei, en))
    ecount = np.bincount(en, minlength=n_nodes)
    node_edges = [np.unique(x) for x in np.split(ei[o], np.cumsum(ecount)[:-1])]

    # dual areas as a sum of corner quadrilaterals (node, next midpoint, centroid, prev midpoint)
    m_next = 0.5 * (corner_xy + corner_xy[nxt])
    m_prev = 0.5 * (corner_xy + corner_xy[prv])
    cen_k = cell_centroid[corner_cell]
    quad = 0.5 * (
        cross(corner_xy, m_next) + cross(m_next, cen_k) + cross(cen_k, m_prev) + cross(m_prev, corner_xy)
    )
    dual_area = np.bincount(corner_node, quad, n_nodes)

    boundary_node = np.zeros(n_nodes, dtype=bool)
    boundary_node[bsub_node] = True
    ghosts = _mirror_ghosts(corner_node, corner_normal, corner_sublen, corner_tensor, bsub_node, bsub_normal, n_nodes)

    return Mesh(
        boundary_kind=boundary,
        scale=scale,
        origin=lo,
        period=period,
        node_coords=node_coords,
        cell_ptr=cell_ptr,
        corner_node=corner_node,
        corner_cell=corner_cell,
        corner_xy=corner_xy,
        corner_next=nxt,
        corner_prev=prv,
        corner_normal=corner_normal,
        corner_sublen=corner_sublen,
        corner_tensor=corner_tensor,
        corner_edge=corner_edge,
        cell_area=cell_area,
        cell_centroid=cell_centroid,
        cell_perimeter=cell_perimeter,
        edge_nodes=edge_nodes,
        edge_cells=edge_cells,
        edge_normal=edge_normal,
        edge_length=edge_length,
        edge_corner_pair=edge_corner_pair,
        bsub_node=bsub_node,
        bsub_cell=bsub_cell,
        bsub_len=bsub_len,
        bsub_normal=bsub_normal,
        bsub_xy=bsub_xy,
        node_corners=node_corners,
        node_cells=node_cells,
        node_edges=node_edges,
        dual_area=dual_area,
        boundary_node=boundary_node,
        **ghosts,
    )


def _reflection(n):
    return np.eye(2) - 2.0 * np.outer(n, n)


def _mirror_ghosts(corner_node, corner_normal, corner_sublen, corner_tensor, bsub_node, bsub_normal, n_nodes):
    """Mirror images of the corner ring around every boundary node.

    A zero-gradient boundary is modelled by a layer of ghost cells that are
    mirror images of the interior cells and carry copies of their states.
    Around a node on a straight boundary the ring of cells is completed by
    reflecting it across the boundary line; at a right-angled domain corner
    by the two reflections and their product.  Other corners get one
    reflection per boundary line, which is only approximately closed.  Each
    ghost corner refers back to the interior corner it copies.
    """
    src, node, normal, tensor, sublen, mats = [], [], [], [], [], []
    group = np.ones(n_nodes, dtype=np.int64)
    if len(bsub_node) == 0:
        empty = np.zeros(0, dtype=np.int64)
        return dict(ghost_corner=empty, ghost_node=empty, ghost_normal=np.zeros((0, 2)),
                    ghost_sublen=np.zeros(0), ghost_tensor=np.zeros((0, 2, 2)),
                    ghost_reflection=np.zeros((0, 2, 2)), ghost_group=group)
    order = np.argsort(corner_node, kind="stable")
    cptr = np.concatenate([[0], np.cumsum(np.bincount(corner_node, minlength=n_nodes))])
    for n in np.unique(bsub_node):
        normals = bsub_normal[bsub_node == n]
        lines = [normals[0]]
        for m in normals[1:]:
            if all(abs(abs(float(m @ l)) - 1.0) > 1e-9 for l in lines):
                lines.append(m)
        refl = [_reflection(m) for m in lines]
        if len(lines) == 2 and abs(float(lines[0] @ lines[1])) <= 1e-9:
            refl.append(refl[0] @ refl[1])
        group[n] = len(refl) + 1
        ks = order[cptr[n]:cptr[n + 1]]
        for r in refl:
            src.append(ks)
            node.append(np.full(len(ks), n))
            normal.append(corner_normal[ks] @ r.T)
            tensor.append(r @ corner_tensor[ks] @ r.T)
            sublen.append(corner_sublen[ks])
            mats.append(np.broadcast_to(r, (len(ks), 2, 2)))
    return dict(
        ghost_corner=np.concatenate(src),
        ghost_node=np.concatenate(node),
        ghost_normal=np.concatenate(normal),
        ghost_sublen=np.concatenate(sublen),
        ghost_tensor=np.concatenate(tensor),
        ghost_reflection=np.concatenate(mats),
        ghost_group=group,
    )


def check_mesh(mesh: Mesh) -> dict[str, float]:
    """Residuals of the geometric identities every valid mesh satisfies.

    Returned values are relative residuals; all should sit at round-off.
    """
    k = mesh.corner_cell
    n_cells = mesh.n_cells
    area = mesh.cell_area
    sum_n = np.stack([np.bincount(k, mesh.corner_normal[:, i], n_cells) for i in range(2)], axis=1)
    res_i = np.abs(sum_n).max(axis=1) / mesh.cell_perimeter

    outer = mesh.corner_normal[:, :, None] * mesh.corner_xy[:, None, :]
    m = np.zeros((n_cells, 2, 2))
    np.add.at(m, k, outer)
    res_ii = np.abs(m - area[:, None, None] * np.eye(2)).max(axis=(1, 2)) / area

    shoe = np.array([shoelace(mesh.corner_xy[mesh.corner_slice(c)]) for c in range(n_cells)])

    out = {
        "node_normal_sum": float(res_i.max()),
        "node_normal_outer": float(res_ii.max()),
        "shoelace_area": float(np.abs(shoe - area).max() / area.max()),
        "min_cell_area": float(area.min()),
    }
    interior = ~mesh.boundary_node
    out["min_interior_dual_area"] = float(mesh.dual_area[interior].min()) if interior.any() else float("nan")
    if mesh.periodic:
        out["euler_characteristic"] = float(mesh.n_cells - mesh.n_edges + mesh.n_nodes)
        out["total_area"] = float(area.sum() / (mesh.period[0] * mesh.period[1]) - 1.0)
    return out


def corner_area_residual(mesh: Mesh) -> float:
    """Max relative deviation of |c| = 2 (l_n n_n) x (l_m n_m) over adjacent ccw corners.

    Only cells with at most four sides enter.
    """
    k = np.flatnonzero(mesh.cell_sides[mesh.corner_cell] <= 4)
    if len(k) == 0:
        return 0.0
    val = 2.0 * cross(mesh.corner_normal[k], mesh.corner_normal[mesh.corner_next[k]])
    area = mesh.cell_area[mesh.corner_cell[k]]
    return float(np.abs(val / area - 1.0).max())


def write_mesh(mesh: Mesh, path) -> None:
    """Write the ``polymesh 1`` text format.

    Periodic meshes are written with the duplicated boundary nodes so that
    the file describes a plain polygon soup that :func:`read_mesh` can
    identify again.
    """
    path = Path(path)
    pts: dict[tuple, int] = {}
    coords = []
    cell_lines = []
    for c in range(mesh.n_cells):
        idx = []
        for kk in range(mesh.cell_ptr[c], mesh.cell_ptr[c + 1]):
            key = (int(mesh.corner_node[kk]), *np.round(mesh.corner_xy[kk] / mesh.scale, 9).tolist())
            if key not in pts:
                pts[key] = len(coords)
                coords.append(mesh.corner_xy[kk])
            idx.append(pts[key])
        cell_lines.append(f"{len(idx)} " + " ".join(map(str, idx)))
    lines = ["polymesh 1", f"nodes {len(coords)}"]
    lines += [f"{x!r} {y!r}" for x, y in (tuple(map(float, c)) for c in coords)]
    lines.append(f"cells {len(cell_lines)}")
    lines += cell_lines
    lines.append(f"boundary {mesh.boundary_kind.value}")
    path.write_text("\n".join(lines) + "\n")


def read_mesh(path) -> Mesh:
    """Parse a ``polymesh 1`` file and validate it with :func:`build_mesh`."""
    rows = []
    for lineno, raw in enumerate(Path(path).read_text().splitlines(), start=1):
        text = raw.split("#", 1)[0].split()
        if text:
            rows.append((lineno, text))
    it = iter(rows)

    def take(what):
        try:
            return next(it)
        except StopIteration:
            raise ParseError(f"unexpected end of file, expected {what}") from None

    def count(tokens, lineno, word):
        if len(tokens) != 2 or tokens[0] != word:
            raise ParseError(f"expected '{word} <count>'", lineno)
        try:
            value = int(tokens[1])
        except ValueError:
            raise ParseError(f"bad count {tokens[1]!r}", lineno) from None
        if value < 0:
            raise ParseError("negative count", lineno)
        return value

    lineno, tok = take("header")
    if tok != ["polymesh", "1"]:
        raise ParseError("missing 'polymesh 1' header", lineno)
    lineno, tok = take("nodes")
    n = count(tok, lineno, "nodes")
    nodes = []
    for _ in range(n):
        lineno, tok = take("node coordinates")
        if len(tok) != 2:
            raise ParseError("node line needs two coordinates", lineno)
        try:
            nodes.append((float(tok[0]), float(tok[1])))
        except ValueError:
            raise ParseError("bad coordinate", lineno) from None
    lineno, tok = take("cells")
    m = count(tok, lineno, "cells")
    cells = []
    for _ in range(m):
        lineno, tok = take("cell")
        try:
            vals = [int(t) for t in tok]
        except ValueError:
            raise ParseError("bad node index", lineno) from None
        if not vals or vals[0] != len(vals) - 1:
            raise ParseError("cell line must be 'k i1 ... ik'", lineno)
        cells.append(vals[1:])
    lineno, tok = take("boundary")
    if len(tok) != 2 or tok[0] != "boundary":
        raise ParseError("expected 'boundary periodic|zerogradient'", lineno)
    try:
        kind = Boundary.parse(tok[1])
    except MeshError:
        raise ParseError(f"unknown boundary kind {tok[1]!r}", lineno) from None
    extra = next(it, None)
    if extra is not None:
        raise ParseError("trailing content", extra[0])
    return build_mesh(nodes, cells, kind)
