import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from vortexfv.cases import (
    DomainError, FourQuadrant, ObliqueWave, SphericalRP, StationaryVortex, cartesian_shape, convergence_study,
    diagnostics, error_l1, exact_fourquadrant_v, exact_oblique, fourquadrant_band_error, initialize, make_case,
    mesh_size, radial_scatter, rates, singular_profile, totals, vortex_speed,
)
from vortexfv.meshgen import generate, generate_cartesian


def test_vortex_profile():
    w = 0.2
    np.testing.assert_allclose(vortex_speed([w, 2 * w, 1.5 * w, 0.0, 0.5], w), [1.0, 0.0, 0.5, 0.0, 0.0], atol=1e-15)
    c = StationaryVortex()
    u, v, p = c.initial(np.array([0.5 + 0.1]), np.array([0.5]))
    np.testing.assert_allclose([u[0], v[0], p[0]], [0.0, 0.5, 0.0], atol=1e-15)


def test_vortex_center_is_finite():
    u, v, p = StationaryVortex().initial(np.array([0.5]), np.array([0.5]))
    assert u[0] == 0 and v[0] == 0


def test_four_quadrant_initial():
    u, v, p = FourQuadrant().initial(np.array([0.75, 0.25]), np.array([0.75, 0.75]))
    assert list(u) == [1.0, 0.0] and not v.any() and not p.any()


def test_spherical_initial():
    u, v, p = SphericalRP().initial(np.array([0.5, 0.9]), np.array([0.55, 0.5]))
    assert list(p) == [1.0, 0.0] and not u.any() and not v.any()


def test_oblique_examples():
    u, v, p = exact_oblique(0.0, 0.0, 0.0, 0.5, 0.0)
    assert (u, v, p) == (0.0, 0.0, 1.0)
    u, v, p = exact_oblique(0.25, 0.0, 0.0, 0.5, 0.0)
    assert p == pytest.approx(-1.0, abs=1e-15) and u == pytest.approx(0.0, abs=1e-15)


def test_oblique_initial_data():
    x, y = np.random.default_rng(0).random((2, 50))
    u, v, p = exact_oblique(0.0, x, y)
    xi = (x + y) * math.sqrt(0.5)
    np.testing.assert_allclose(p, np.cos(2 * math.pi * xi / (0.5 * math.sqrt(0.5))), atol=1e-14)
    assert not u.any() and not v.any()


@given(st.floats(0, 3), st.floats(-1, 2), st.floats(-1, 2))
def test_oblique_symmetry(t, x, y):
    u, v, _ = exact_oblique(t, x, y)
    assert u == pytest.approx(v, abs=1e-14)


@pytest.mark.parametrize("theta", [0.0, math.pi / 4, 0.3])
def test_oblique_solves_acoustics(theta):
    t, x, y = 0.37, 0.21, 0.68
    residuals = []
    for eps in (1e-3, 5e-4):
        def d(axis):
            step = [0.0, 0.0, 0.0]
            step[axis] = eps
            plus = np.array(exact_oblique(t + step[0], x + step[1], y + step[2], 0.5, theta))
            minus = np.array(exact_oblique(t - step[0], x - step[1], y - step[2], 0.5, theta))
            return (plus - minus) / (2 * eps)

        dt_, dx_, dy_ = d(0), d(1), d(2)
        res = [dt_[0] + dx_[2], dt_[1] + dy_[2], dt_[2] + dx_[0] + dy_[1]]
        residuals.append(max(map(abs, res)))
    # central differences: the residual is O(eps^2)
    assert residuals[0] < 1e-3
    assert residuals[1] <= residuals[0] / 3 + 1e-9


def test_singular_profile_values():
    assert singular_profile(1.0) == 0.0
    assert exact_fourquadrant_v(1.0, 0.6) == pytest.approx(math.log(3) / (2 * math.pi), rel=1e-14)
    assert exact_fourquadrant_v(1.0, 0.6) == pytest.approx(0.17485, abs=1e-5)
    assert exact_fourquadrant_v(1.0, 1.5) is None
    out = exact_fourquadrant_v(2.0, np.array([1.0, 3.0]))
    assert np.isfinite(out[0]) and np.isnan(out[1])


def test_singular_profile_expansion():
    s = 1e-3
    assert abs(singular_profile(s) + math.log(s / 2) + s * s / 4) < 1e-10


def test_singular_profile_domain():
    with pytest.raises(DomainError):
        exact_fourquadrant_v(0.0, 0.5)
    with pytest.raises(DomainError):
        exact_fourquadrant_v(1.0, 0.0)


def test_make_case():
    assert make_case("Vortex", w=0.1).w == 0.1
    with pytest.raises(ValueError):
        make_case("sod")


def test_error_norm():
    m = generate_cartesian(8, 8)
    case = ObliqueWave()
    q = initialize(case, m)
    rep = error_l1(m, q, lambda x, y: case.exact(0.0, x, y))
    assert rep.errors == {"u": 0.0, "v": 0.0, "p": 0.0}
    assert rep.h == pytest.approx(1 / 8) and mesh_size(m) == pytest.approx(1 / 8)
    rep2 = error_l1(m, q + 1.0, lambda x, y: case.exact(0.0, x, y))
    assert rep2["p"] == pytest.approx(1.0)


def test_rates():
    from vortexfv.cases import ErrorReport

    r = rates([ErrorReport({"u": 4.0}, 0.2, 25), ErrorReport({"u": 1.0}, 0.1, 100)])
    assert r[0]["u"] == pytest.approx(2.0)


def test_diagnostics_zero_velocity():
    for boundary in ("periodic", "zerogradient"):
        m = generate("triquad", 8, seed=1, boundary=boundary)
        q = initialize(SphericalRP(), m)
        d = diagnostics(m, q)
        assert d["vorticity_l1"] == 0.0 and d["divergence_l1"] == 0.0


def test_vortex_has_discrete_divergence():
    m = generate_cartesian(32, 32)
    d = diagnostics(m, initialize(StationaryVortex(), m))
    assert d["divergence_l1"] > 1e-4
    assert "stencil_vorticity_l1" in d


def test_cartesian_shape():
    assert cartesian_shape(generate_cartesian(4, 6)) == (4, 6, 0.25, 1 / 6)
    assert cartesian_shape(generate("quad", 4, seed=1)) is None
    assert cartesian_shape(generate("triquad", 4, seed=1)) is None


def test_totals_and_scatter():
    m = generate_cartesian(4, 4)
    q = np.ones((3, m.n_cells))
    np.testing.assert_allclose(totals(m, q), 1.0)
    rv = radial_scatter(m, q[2])
    assert rv.shape == (16, 2)
    assert rv[:, 0].min() == pytest.approx(math.hypot(0.125, 0.125))


def test_band_error_of_exact_profile():
    m = generate_cartesian(100, 100, boundary="zerogradient")
    x, y = m.cell_centroid.T
    s = np.hypot(x - 0.5, y - 0.5) / 0.4
    v = np.where(s <= 1, singular_profile(np.clip(s, 1e-9, 1)) / (2 * math.pi), 0.0)
    q = np.zeros((3, m.n_cells))
    q[1] = v
    assert fourquadrant_band_error(m, q, 0.4) == pytest.approx(0.0, abs=1e-14)
    q[1] *= 1.1
    assert fourquadrant_band_error(m, q, 0.4) == pytest.approx(0.1, rel=1e-12)


def test_rotated_waves_give_swapped_errors():
    m = generate_cartesian(16, 16)
    errs = []
    for theta in (math.pi / 4, 3 * math.pi / 4):
        case = ObliqueWave(theta=theta)
        reports, _ = convergence_study(case, [m], t_end=0.2)
        errs.append(reports[0].errors)
    assert errs[0]["u"] == pytest.approx(errs[1]["v"], abs=1e-13)
    assert errs[0]["v"] == pytest.approx(errs[1]["u"], abs=1e-13)
    assert errs[0]["p"] == pytest.approx(errs[1]["p"], abs=1e-13)
