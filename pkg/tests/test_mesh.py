import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from vortexfv.mesh import (
    Boundary, DanglingNode, DegenerateStencil, InconsistentOrientation, MeshError, NonSimplePolygon,
    ParseError, ZeroAreaCell, build_mesh, check_mesh, corner_area_residual, read_mesh, shoelace, write_mesh,
)
from vortexfv.meshgen import generate, generate_cartesian

UNIT = np.array([[0.0, 0.0], [1.0, 0.0], [1.0, 1.0], [0.0, 1.0]])


def unit_square():
    return build_mesh(UNIT, [[0, 1, 2, 3]])


def corner_at(mesh, node):
    return int(np.flatnonzero(mesh.corner_node == node)[0])


def test_unit_square_node_normal():
    m = unit_square()
    assert m.cell_area[0] == 1.0
    k = corner_at(m, 2)
    ln = m.corner_normal[k]
    np.testing.assert_allclose(ln, [0.5, 0.5], atol=1e-15)
    assert math.isclose(np.linalg.norm(ln), math.sqrt(2) / 2)


def test_unit_square_normal_sums():
    m = unit_square()
    np.testing.assert_allclose(m.corner_normal.sum(axis=0), 0.0, atol=1e-15)
    outer = np.einsum("ki,kj->ij", m.corner_normal, m.corner_xy)
    np.testing.assert_allclose(outer, np.eye(2), atol=1e-15)


def test_unit_square_subedges():
    m = unit_square()
    np.testing.assert_allclose(m.corner_sublen, 1.0)
    np.testing.assert_allclose(m.bsub_len, 0.5)
    np.testing.assert_allclose(m.length_scale, 1.0)


def test_shoelace():
    assert shoelace(UNIT) == 1.0
    assert shoelace(UNIT[::-1]) == -1.0


def test_boundary_parse():
    assert Boundary.parse("Periodic") is Boundary.PERIODIC
    assert Boundary.parse(Boundary.ZERO_GRADIENT) is Boundary.ZERO_GRADIENT
    with pytest.raises(ValueError):
        Boundary.parse("wall")


def test_dangling_node():
    with pytest.raises(DanglingNode):
        build_mesh(UNIT, [[0, 1, 2, 4]])


def test_zero_area():
    with pytest.raises(ZeroAreaCell):
        build_mesh([[0, 0], [1, 0], [2, 0]], [[0, 1, 2]])


BOW_TIE = [[0.0, 0.0], [2.0, 0.0], [0.0, 1.0], [1.0, 2.0]]


def test_bow_tie():
    with pytest.raises(NonSimplePolygon):
        build_mesh(BOW_TIE, [[0, 1, 2, 3]])


def test_clockwise_rejected_unless_allowed():
    with pytest.raises(InconsistentOrientation):
        build_mesh(UNIT, [[0, 3, 2, 1]])
    m = build_mesh(UNIT, [[0, 3, 2, 1]], allow_reorient=True)
    assert m.cell_area[0] == 1.0


def test_mesh_is_immutable():
    m = unit_square()
    with pytest.raises(AttributeError):
        m.cell_area = None


def test_cartesian_counts():
    m = generate_cartesian(2, 2, 1.0, 1.0, boundary="zerogradient")
    assert (m.n_cells, m.n_nodes, m.n_edges) == (4, 9, 12)
    inner = ~m.boundary_node
    k = np.isin(m.corner_node, np.flatnonzero(inner))
    np.testing.assert_allclose(np.linalg.norm(m.corner_normal[k], axis=1), math.sqrt(2) / 2)


def test_single_cell_generator_matches_unit_square():
    m = generate_cartesian(1, 1, 1.0, 1.0, boundary="zerogradient")
    u = unit_square()
    np.testing.assert_allclose(m.cell_area, u.cell_area)
    np.testing.assert_allclose(np.sort(m.corner_normal, axis=0), np.sort(u.corner_normal, axis=0))


@pytest.mark.parametrize("kind", ["cartesian", "quad", "triquad", "polygonal"])
@pytest.mark.parametrize("boundary", ["periodic", "zerogradient"])
def test_geometric_identities(kind, boundary):
    m = generate(kind, 8, seed=2, boundary=boundary)
    res = check_mesh(m)
    assert res["node_normal_sum"] < 1e-12
    assert res["node_normal_outer"] < 1e-12
    assert res["shoelace_area"] < 1e-12
    assert abs(m.cell_area.sum() - 1.0) < 1e-10
    if boundary == "periodic":
        assert res["euler_characteristic"] == 0.0
        assert abs(res["total_area"]) < 1e-10


@pytest.mark.parametrize("kind", ["cartesian", "quad", "triquad"])
def test_corner_area_identity(kind):
    assert corner_area_residual(generate(kind, 8, seed=5)) < 1e-12


def test_corner_area_identity_fails_beyond_quads():
    m = generate("polygonal", 8, seed=5)
    k = np.flatnonzero(m.cell_sides[m.corner_cell] > 4)
    from vortexfv.mesh import cross

    val = 2 * cross(m.corner_normal[k], m.corner_normal[m.corner_next[k]])
    assert np.abs(val / m.cell_area[m.corner_cell[k]] - 1).max() > 1e-3


@pytest.mark.parametrize("kind", ["quad", "triquad", "polygonal"])
def test_subedge_counting_identity(kind):
    # each interior subedge is seen from its two cells
    m = generate(kind, 8, seed=1, boundary="zerogradient")
    seen = np.bincount(m.corner_node, m.corner_sublen, m.n_nodes)
    own = np.zeros(m.n_nodes)
    for e in range(m.n_edges):
        for n in m.edge_nodes[e]:
            own[n] += 0.5 * m.edge_length[e]
    inner = ~m.boundary_node
    np.testing.assert_allclose(seen[inner], 2 * own[inner], rtol=1e-13)


def test_dual_areas_tile_domain(periodic_meshes):
    for m in periodic_meshes.values():
        assert abs(m.dual_area.sum() - 1.0) < 1e-12


def test_ghost_ring_layout():
    m = generate_cartesian(4, 4, boundary="zerogradient")
    sizes = m.ghost_group[m.boundary_node]
    # straight boundary nodes mirror once, the four domain corners three times
    assert np.sum(sizes == 2) == 12 and np.sum(sizes == 4) == 4
    assert np.all(m.ghost_group[~m.boundary_node] == 1)
    np.testing.assert_allclose(m.ghost_sublen, m.corner_sublen[m.ghost_corner])


def test_ghost_ring_closes():
    # with the mirror images the normals around every node sum to zero
    m = generate("quad", 6, seed=4, boundary="zerogradient")
    s = np.zeros((m.n_nodes, 2))
    np.add.at(s, m.corner_node, m.corner_normal)
    np.add.at(s, m.ghost_node, m.ghost_normal)
    np.testing.assert_allclose(s, 0.0, atol=1e-14)


def test_periodic_mesh_has_no_ghosts():
    m = generate("triquad", 4, seed=0)
    assert len(m.ghost_node) == 0 and len(m.bsub_node) == 0


def test_stencil_sizes():
    m = generate_cartesian(5, 5)
    assert np.all(np.bincount(m.stencil("node").cell) == 8)
    assert np.all(np.bincount(m.stencil("edge").cell) == 4)
    w = generate_cartesian(5, 5, boundary="zerogradient")
    # mirror images complete the stencils of boundary cells
    assert np.all(np.bincount(w.stencil("node").cell) == 8)
    assert np.all(np.bincount(w.stencil("edge").cell) == 4)


def test_stencil_on_tiny_periodic_grid_keeps_distinct_images():
    m = generate_cartesian(2, 2)
    st_ = m.stencil("node")
    assert np.all(np.bincount(st_.cell) == 8)


def test_degenerate_stencil():
    m = generate_cartesian(3, 3, dx=1.0, dy=1e-7, boundary="zerogradient")
    with pytest.raises(DegenerateStencil):
        m.stencil("edge")


def test_round_trip(tmp_path):
    m = unit_square()
    path = tmp_path / "unit.mesh"
    write_mesh(m, path)
    r = read_mesh(path)
    assert r.n_nodes == m.n_nodes
    assert [list(c) for c in r.cell_nodes] == [list(c) for c in m.cell_nodes]
    np.testing.assert_allclose(r.cell_area, m.cell_area, atol=1e-15)


@pytest.mark.parametrize("kind", ["quad", "polygonal"])
@pytest.mark.parametrize("boundary", ["periodic", "zerogradient"])
def test_round_trip_generated(tmp_path, kind, boundary):
    m = generate(kind, 6, seed=9, boundary=boundary)
    path = tmp_path / "m.mesh"
    write_mesh(m, path)
    r = read_mesh(path)
    assert (r.n_cells, r.n_nodes, r.n_edges) == (m.n_cells, m.n_nodes, m.n_edges)
    assert r.periodic == m.periodic
    np.testing.assert_allclose(r.cell_area, m.cell_area, atol=1e-15)
    np.testing.assert_allclose(r.corner_normal, m.corner_normal, atol=1e-15)


def _write(tmp_path, text):
    p = tmp_path / "bad.mesh"
    p.write_text(text)
    return p


def test_read_dangling(tmp_path):
    p = _write(tmp_path, "polymesh 1\nnodes 4\n0 0\n1 0\n1 1\n0 1\ncells 1\n4 0 1 2 4\nboundary zerogradient\n")
    with pytest.raises(DanglingNode):
        read_mesh(p)


def test_read_bow_tie(tmp_path):
    p = _write(tmp_path, "polymesh 1\nnodes 4\n0 0\n2 0\n0 1\n1 2\ncells 1\n4 0 1 2 3\nboundary zerogradient\n")
    with pytest.raises(NonSimplePolygon):
        read_mesh(p)


def test_parse_error_reports_line(tmp_path):
    p = _write(tmp_path, "polymesh 1\nnodes 4\n0 0\n1 zero\n")
    with pytest.raises(ParseError) as err:
        read_mesh(p)
    assert err.value.line == 4


def test_mesh_error_hierarchy():
    assert issubclass(ParseError, MeshError) and issubclass(MeshError, ValueError)


@given(st.lists(st.tuples(st.floats(-0.3, 0.3), st.floats(-0.3, 0.3)), min_size=4, max_size=4))
def test_perturbed_square_identities(shift):
    xy = UNIT + np.array(shift)
    try:
        m = build_mesh(xy, [[0, 1, 2, 3]])
    except MeshError:
        return
    np.testing.assert_allclose(m.corner_normal.sum(axis=0), 0.0, atol=1e-14)
    outer = np.einsum("ki,kj->ij", m.corner_normal, m.corner_xy)
    np.testing.assert_allclose(outer, m.cell_area[0] * np.eye(2), atol=1e-14)
    assert corner_area_residual(m) < 1e-12
