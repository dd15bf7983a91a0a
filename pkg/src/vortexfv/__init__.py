"""Node-conservative, vorticity-preserving finite volumes for linear acoustics on polygonal meshes."""

__version__ = "0.1.0"

from .mesh import Boundary, Mesh, MeshError, build_mesh, check_mesh, read_mesh, write_mesh
from .meshgen import generate, generate_cartesian, generate_mixed_triquad, generate_perturbed_quad, generate_polygonal
from .operators import curl_C, divergence_D, gradient_G
from .scheme1 import nodal_pressure, nodal_velocity, rhs_nodal_pressure, rhs_nodal_velocity
from .scheme2 import StencilKind, reconstruct, rhs_second_order
from .timeint import NonFiniteState, RunResult, TimeControl, UnsupportedCombination, run
from .cases import make_case, initialize, diagnostics

__all__ = [
    "Boundary", "Mesh", "MeshError", "build_mesh", "check_mesh", "read_mesh", "write_mesh",
    "generate", "generate_cartesian", "generate_mixed_triquad", "generate_perturbed_quad", "generate_polygonal",
    "curl_C", "divergence_D", "gradient_G",
    "nodal_pressure", "nodal_velocity", "rhs_nodal_pressure", "rhs_nodal_velocity",
    "StencilKind", "reconstruct", "rhs_second_order",
    "NonFiniteState", "RunResult", "TimeControl", "UnsupportedCombination", "run",
    "make_case", "initialize", "diagnostics",
]
