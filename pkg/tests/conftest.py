import numpy as np
import pytest
from hypothesis import HealthCheck, settings

from vortexfv.meshgen import generate

settings.register_profile("default", deadline=None, max_examples=30,
                          suppress_health_check=[HealthCheck.too_slow, HealthCheck.function_scoped_fixture])
settings.load_profile("default")

FAMILIES = ("cartesian", "quad", "triquad")


@pytest.fixture(scope="session")
def periodic_meshes():
    return {kind: generate(kind, 8, seed=3) for kind in FAMILIES + ("polygonal",)}


@pytest.fixture(scope="session")
def wall_meshes():
    return {kind: generate(kind, 8, seed=3, boundary="zerogradient") for kind in FAMILIES + ("polygonal",)}


@pytest.fixture
def rng():
    return np.random.default_rng(1234)


def random_state(mesh, seed=0):
    return np.random.default_rng(seed).standard_normal((3, mesh.n_cells))


def pytest_terminal_summary(terminalreporter):
    import sys

    mod = sys.modules.get("test_acceptance")
    if mod is None or not mod.RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for crit in sorted(mod.RESULTS):
        checks = mod.RESULTS[crit]
        for _, _, line in checks:
            terminalreporter.write_line("  " + line)
        failed = sum(not ok for _, ok, _ in checks)
        status = "PASS" if not failed else f"FAIL ({failed} of {len(checks)} checks)"
        terminalreporter.write_line(f"criterion {crit}: {status}")
