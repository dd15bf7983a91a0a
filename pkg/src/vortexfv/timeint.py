"""Explicit time stepping with a CFL-limited step."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from .mesh import Mesh
from .scheme1 import rhs_nodal_pressure, rhs_nodal_velocity
from .scheme2 import StencilKind, rhs_second_order


class NonFiniteState(FloatingPointError):
    def __init__(self, message="state became non-finite", step=None, time=None):
        self.step = step
        self.time = time
        if step is not None:
            message = f"{message} (step {step}, t = {time:.6g})"
        super().__init__(message)


class UnsupportedCombination(ValueError):
    pass


@dataclass
class TimeControl:
    """CFL number, final time and scheme order; ``observe_every`` is the observer cadence in steps."""

    cfl: float = 0.3
    t_end: float = 1.0
    order: int = 1
    observe_every: int = 1
    observe_times: Sequence[float] = field(default_factory=tuple)

    def __post_init__(self):
        if not 0 < self.cfl <= 1:
            raise ValueError("cfl must lie in (0, 1]")
        if self.t_end < 0:
            raise ValueError("t_end must be non-negative")
        if self.order not in (1, 2):
            raise ValueError("order must be 1 or 2")


def time_step(mesh: Mesh, cfl: float) -> float:
    """``cfl * min_c 4|c|/|dc|`` (the grid spacing on uniform squares)."""
    return float(cfl * mesh.length_scale.min())


def select_rhs(scheme: str = "nodal_pressure", order: int = 1, stencil=StencilKind.NODE_NEIGHBORS) -> Callable:
    scheme = scheme.lower()
    if scheme == "nodal_velocity":
        if order != 1:
            raise UnsupportedCombination("the nodal-velocity scheme exists only at first order")
        return rhs_nodal_velocity
    if scheme != "nodal_pressure":
        raise ValueError(f"unknown scheme {scheme!r}")
    if order == 1:
        return rhs_nodal_pressure
    if order == 2:
        return lambda mesh, q: rhs_second_order(mesh, q, stencil=stencil)
    raise ValueError("order must be 1 or 2")


def _finite(q, step=None, t=None):
    if not np.all(np.isfinite(q)):
        raise NonFiniteState(step=step, time=t)
    return q


def step_euler(mesh: Mesh, state, dt: float, rhs: Callable) -> np.ndarray:
    q = np.asarray(state, dtype=float)
    with np.errstate(over="ignore", invalid="ignore"):
        return _finite(q + dt * rhs(mesh, q))


def step_rk2(mesh: Mesh, state, dt: float, rhs: Callable) -> np.ndarray:
    """Heun's method."""
    q = np.asarray(state, dtype=float)
    with np.errstate(over="ignore", invalid="ignore"):
        k1 = rhs(mesh, q)
        k2 = rhs(mesh, q + dt * k1)
        return _finite(q + 0.5 * dt * (k1 + k2))


@dataclass
class RunResult:
    state: np.ndarray
    time: float
    steps: int
    series: dict = field(default_factory=dict)
    snapshots: dict = field(default_factory=dict)


def run(mesh: Mesh, initial, control: TimeControl, rhs: Callable | None = None,
        observers: dict[str, Callable] | None = None, scheme: str = "nodal_pressure",
        callback: Callable | None = None) -> RunResult:
    """Integrate from t = 0 to ``control.t_end``.

    Observers are callables ``f(mesh, state) -> float`` sampled at t = 0,
    every ``observe_every`` steps, at each time in ``observe_times`` (the
    step is clipped to hit them, and the state there is kept in
    ``snapshots``) and at the end.  The last step is clipped
    so the final time equals ``t_end``.  ``callback(step, t, state)`` is
    invoked at the same sample points.
    """
    if rhs is None:
        rhs = select_rhs(scheme, control.order)
    stepper = step_euler if control.order == 1 else step_rk2
    observers = observers or {}
    q = np.array(initial, dtype=float)
    dt = time_step(mesh, control.cfl)
    stops = sorted(t for t in control.observe_times if 0 < t < control.t_end) + [control.t_end]
    series: dict[str, list] = {"t": []}
    for name in observers:
        series[name] = []

    def sample(t):
        series["t"].append(t)
        for name, f in observers.items():
            series[name].append(f(mesh, q))
        if callback is not None:
            callback(steps, t, q)

    t = 0.0
    steps = 0
    snapshots = {}
    sample(t)
    for stop in stops:
        while t < stop:
            remaining = stop - t
            last = remaining <= dt * (1 + 1e-12)
            h = remaining if last else dt
            try:
                q = stepper(mesh, q, h, rhs)
            except NonFiniteState:
                raise NonFiniteState(step=steps + 1, time=t + h) from None
            t = stop if last else t + h
            steps += 1
            if last and stop < control.t_end:
                snapshots[stop] = q.copy()
            if last or (control.observe_every and steps % control.observe_every == 0):
                sample(t)
    if not series["t"] or series["t"][-1] != t:
        sample(t)
    return RunResult(q, t, steps, {k: np.asarray(v) for k, v in series.items()}, snapshots)
