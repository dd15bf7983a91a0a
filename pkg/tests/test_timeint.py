import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from vortexfv import cartesian, fourier
from vortexfv.cases import ObliqueWave, initialize
from vortexfv.meshgen import generate, generate_cartesian
from vortexfv.operators import divergence_D, gradient_G
from vortexfv.scheme1 import rhs_nodal_pressure
from vortexfv.timeint import (
    NonFiniteState, TimeControl, UnsupportedCombination, run, select_rhs, step_euler, step_rk2, time_step,
)

from conftest import FAMILIES, random_state


def plane_wave(n, a, b, qhat):
    """Grid function ``qhat * t_x**i * t_y**j`` on an n x n grid, cell order ``i + n*j``."""
    j, i = np.divmod(np.arange(n * n), n)
    phase = np.exp(2j * np.pi * (a * i + b * j) / n)
    return np.asarray(qhat)[:, None] * phase[None, :], np.exp(2j * np.pi * a / n), np.exp(2j * np.pi * b / n)


def test_time_step_is_grid_spacing():
    assert time_step(generate_cartesian(10, 10), 0.3) == pytest.approx(0.03)


def test_stationary_state_unchanged():
    m = generate("triquad", 8, seed=1)
    g = gradient_G(m, np.random.default_rng(0).standard_normal(m.n_nodes))
    q = np.vstack([-g[:, 1], g[:, 0], np.full(m.n_cells, 2.0)])
    assert np.abs(divergence_D(m, q[:2].T)).max() < 1e-10
    assert np.abs(step_euler(m, q, 0.01, rhs_nodal_pressure) - q).max() < 1e-13
    zero = np.zeros((3, m.n_cells))
    assert np.array_equal(step_euler(m, zero, 0.01, rhs_nodal_pressure), zero)


def test_euler_step_matches_symbol():
    n = 8
    m = generate_cartesian(n, n)
    qhat = np.array([0.3 + 0.1j, -0.2j, 1.0])
    dt = time_step(m, 0.3)
    for a, b in [(1, 0), (2, 3), (5, 7)]:
        q, tx, ty = plane_wave(n, a, b, qhat)
        step = step_euler(m, q.real, dt, rhs_nodal_pressure) + 1j * step_euler(m, q.imag, dt, rhs_nodal_pressure)
        want = (np.eye(3) - dt * fourier.symbol("nodal_pressure_1", tx, ty, 1 / n, 1 / n)) @ qhat
        np.testing.assert_allclose(step, want[:, None] * (q / qhat[:, None]), atol=1e-12)


def test_heun_step_matches_symbol():
    n = 8
    m = generate_cartesian(n, n)
    qhat = np.array([0.1, 0.5j, -1.0])
    dt = time_step(m, 0.3)
    rhs = select_rhs("nodal_pressure", 2)
    q, tx, ty = plane_wave(n, 3, 1, qhat)
    step = step_rk2(m, q.real, dt, rhs) + 1j * step_rk2(m, q.imag, dt, rhs)
    G = fourier.amplification("nodal_pressure_2", tx, ty, 0.3, 1 / n, 1 / n)
    np.testing.assert_allclose(step, (G @ qhat)[:, None] * (q / qhat[:, None]), atol=1e-12)


def test_stable_below_threshold():
    m = generate_cartesian(32, 32)
    q0 = initialize(ObliqueWave(), m)
    dt = time_step(m, 0.45)
    res = run(m, q0, TimeControl(cfl=0.45, t_end=1000 * dt * (1 - 1e-12), observe_every=0))
    assert res.steps == 1000
    assert np.abs(res.state).max() <= np.abs(q0).max() * 1.0 + 1e-12


def test_unstable_above_threshold():
    m = generate_cartesian(32, 32)
    q0 = initialize(ObliqueWave(), m)
    dt = time_step(m, 0.75)
    with pytest.raises(NonFiniteState) as err:
        run(m, q0, TimeControl(cfl=0.75, t_end=2000 * dt, observe_every=0))
    assert err.value.step <= 2000


def test_zero_end_time():
    m = generate_cartesian(4, 4)
    q0 = random_state(m, 0)
    res = run(m, q0, TimeControl(t_end=0.0))
    assert res.steps == 0 and res.time == 0.0
    assert np.array_equal(res.state, q0)


def test_last_step_clipped():
    m = generate_cartesian(8, 8)
    res = run(m, random_state(m, 0), TimeControl(cfl=0.3, t_end=0.1234567, observe_every=0))
    assert abs(res.time - 0.1234567) < 1e-14
    assert res.steps == math.ceil(0.1234567 / 0.0375)


def test_observers_and_snapshots():
    m = generate_cartesian(8, 8)
    calls = []
    res = run(m, random_state(m, 0), TimeControl(cfl=0.3, t_end=0.3, observe_every=2, observe_times=(0.1,)),
              observers={"max": lambda mesh, q: float(np.abs(q).max())},
              callback=lambda step, t, q: calls.append((step, t)))
    assert res.series["t"][0] == 0.0 and res.series["t"][-1] == pytest.approx(0.3)
    assert 0.1 in res.snapshots
    assert len(res.series["max"]) == len(res.series["t"]) == len(calls)
    assert np.all(np.diff(res.series["t"]) > 0)


def test_select_rhs():
    with pytest.raises(UnsupportedCombination):
        select_rhs("nodal_velocity", 2)
    with pytest.raises(ValueError):
        select_rhs("upwind", 1)


def test_control_validation():
    with pytest.raises(ValueError):
        TimeControl(cfl=0.0)
    with pytest.raises(ValueError):
        TimeControl(order=3)


@pytest.mark.parametrize("scheme,order", [("nodal_pressure", 1), ("nodal_velocity", 1), ("nodal_pressure", 2)])
@pytest.mark.parametrize("kind", FAMILIES)
def test_conservation_in_time(kind, scheme, order):
    m = generate(kind, 8, seed=5)
    q0 = random_state(m, 1)
    res = run(m, q0, TimeControl(cfl=0.3, t_end=0.4, order=order, observe_every=0), scheme=scheme)
    tot0 = q0 @ m.cell_area
    assert np.abs(res.state @ m.cell_area - tot0).max() <= 1e-11 * np.abs(q0 @ m.cell_area).max() + 1e-13


@pytest.mark.parametrize("order", [1, 2])
def test_cartesian_vorticity_constant_in_time(order):
    n = 16
    m = generate_cartesian(n, n)
    q0 = random_state(m, 3)

    def vort(mesh, q):
        return cartesian.vorticity(q[0].reshape(n, n), q[1].reshape(n, n), 1 / n, 1 / n)

    om0 = vort(m, q0)
    res = run(m, q0, TimeControl(cfl=0.3, t_end=0.5, order=order, observe_every=1),
              observers={"d": lambda mesh, q: float(np.abs(vort(mesh, q) - om0).max())})
    drift = res.series["d"]
    assert drift.max() <= 1e-12 * np.abs(om0).max()


@given(st.floats(0.01, 0.5), st.integers(0, 1000))
def test_final_time_property(t_end, seed):
    m = generate_cartesian(6, 6)
    res = run(m, random_state(m, seed), TimeControl(cfl=0.4, t_end=t_end, observe_every=0))
    assert abs(res.time - t_end) <= 1e-14
