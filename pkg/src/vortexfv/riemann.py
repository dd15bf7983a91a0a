"""One-dimensional acoustic Riemann solvers with unit wave speed.

States are ``(u, v, p)`` with ``u`` normal and ``v`` tangential to the
interface.  All functions broadcast over numpy arrays.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import NamedTuple

import numpy as np


class AcousticState(NamedTuple):
    u: float | np.ndarray
    v: float | np.ndarray
    p: float | np.ndarray


@dataclass(frozen=True)
class SplitFlux:
    """One-sided interface values.

    ``flux_u_*`` is the pressure entering the normal-momentum flux and
    ``flux_p_*`` the normal velocity entering the pressure flux, seen from
    the left and the right cell.
    """

    flux_u_L: float | np.ndarray
    flux_u_R: float | np.ndarray
    flux_p_L: float | np.ndarray
    flux_p_R: float | np.ndarray

    @property
    def flux_v(self):
        """Flux of the tangential velocity, zero for every solver here."""
        return 0.0 * np.asarray(self.flux_u_L)


def solve_classical(qL: AcousticState, qR: AcousticState):
    """Exact solution at the interface: returns ``(u*, p*)``."""
    u_star = 0.5 * (qR.u + qL.u) - 0.5 * (qR.p - qL.p)
    p_star = 0.5 * (qR.p + qL.p) - 0.5 * (qR.u - qL.u)
    return u_star, p_star


def flux_classical(qL: AcousticState, qR: AcousticState) -> SplitFlux:
    u_star, p_star = solve_classical(qL, qR)
    return SplitFlux(p_star, p_star, u_star, u_star)


def flux_free_pressure(qL: AcousticState, qR: AcousticState, p_star) -> SplitFlux:
    """Solver with a prescribed interface pressure.

    The pressure flux is shared, the normal velocities seen by the two
    sides differ unless ``p_star`` is the classical value.
    """
    uL = qL.u + qL.p - p_star
    uR = qR.u - qR.p + p_star
    return SplitFlux(p_star + 0 * uL, p_star + 0 * uR, uL, uR)


def flux_free_velocity(qL: AcousticState, qR: AcousticState, u_star) -> SplitFlux:
    """Solver with a prescribed interface normal velocity."""
    pL = qL.p + qL.u - u_star
    pR = qR.p - qR.u + u_star
    return SplitFlux(pL, pR, u_star + 0 * pL, u_star + 0 * pR)


def intermediate_states(qL: AcousticState, qR: AcousticState, flux: SplitFlux):
    """Left and right star states of the three-wave fan implied by ``flux``.

    With wave speeds -1, 0, 1, the jump conditions across the outer waves
    fix ``(u*_L, p*_L)`` and ``(u*_R, p*_R)`` from the one-sided fluxes;
    tangential velocity jumps only across the middle wave.
    """
    # flux of (u, v, p) is (p, 0, u); the star values are the fluxed ones
    sL = AcousticState(flux.flux_p_L, qL.v, flux.flux_u_L)
    sR = AcousticState(flux.flux_p_R, qR.v, flux.flux_u_R)
    return sL, sR


def jump_residual(qL: AcousticState, qR: AcousticState, flux: SplitFlux):
    """Residuals of the jump conditions across the left (speed -1) and right (speed +1) waves.

    Across a wave of speed ``lam``, ``F(q_b) - F(q_a) = lam (q_b - q_a)``
    with ``F(u, v, p) = (p, 0, u)``.
    """
    sL, sR = intermediate_states(qL, qR, flux)
    res = []
    for a, b, lam in ((qL, sL, -1.0), (sR, qR, 1.0)):
        fa = np.array([a.p, 0 * a.v, a.u], dtype=float)
        fb = np.array([b.p, 0 * b.v, b.u], dtype=float)
        qa = np.array([a.u, a.v, a.p], dtype=float)
        qb = np.array([b.u, b.v, b.p], dtype=float)
        res.append(fb - fa - lam * (qb - qa))
    return np.max(np.abs(res))


def rotate_in(vec, n):
    """Return (normal, tangential) components of ``vec`` in the frame of unit normal ``n``."""
    vec = np.asarray(vec, dtype=float)
    n = np.asarray(n, dtype=float)
    vn = n[..., 0] * vec[..., 0] + n[..., 1] * vec[..., 1]
    vt = -n[..., 1] * vec[..., 0] + n[..., 0] * vec[..., 1]
    return vn, vt


def rotate_out(vn, vt, n):
    """Inverse of :func:`rotate_in`."""
    n = np.asarray(n, dtype=float)
    return np.stack([n[..., 0] * vn - n[..., 1] * vt, n[..., 1] * vn + n[..., 0] * vt], axis=-1)


def interface_flux(vL, pL, vR, pR, n, solver="classical", free=None):
    """Physical flux of ``(v, p)`` through an interface with normal ``n``, from the left cell.

    Rotates into the interface frame, solves, and rotates back.  Returns
    ``(momentum_flux_L, momentum_flux_R, pressure_flux_L, pressure_flux_R)``
    with the momentum fluxes as 2-vectors.
    """
    uL, tL = rotate_in(vL, n)
    uR, tR = rotate_in(vR, n)
    qL, qR = AcousticState(uL, tL, pL), AcousticState(uR, tR, pR)
    if solver == "classical":
        f = flux_classical(qL, qR)
    elif solver == "free_pressure":
        f = flux_free_pressure(qL, qR, free)
    elif solver == "free_velocity":
        f = flux_free_velocity(qL, qR, free)
    else:
        raise ValueError(f"unknown solver {solver!r}")
    zero = 0 * np.asarray(f.flux_u_L)
    return rotate_out(f.flux_u_L, zero, n), rotate_out(f.flux_u_R, zero, n), f.flux_p_L, f.flux_p_R
