"""Interface numerical fluxes and the hydrostatic reconstruction.

Two flux families: local Lax-Friedrichs (used for the isothermal pressure)
and a kinetic flux-vector splitting built on a compactly supported semicircle
equilibrium (used for m > 1, where vacuum regions appear).  The kinetic
half-fluxes have closed-form moments; F-(rho, u) mirrors F+(rho, -u), which
makes the splitting exactly consistent at rest and in vacuum.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum

import numpy as np

from .freeenergy import DRY_THRESHOLD, PressureLaw

_TWO_PI = 2.0 * np.pi


class FluxKind(Enum):
    LLF = "llf"
    KINETIC = "kinetic"

    @staticmethod
    def auto_for(law: PressureLaw) -> "FluxKind":
        return FluxKind.LLF if law.is_isothermal else FluxKind.KINETIC


def physical_flux(rho, mom, law: PressureLaw):
    """F(U) = (rho*u, rho*u^2 + P)."""
    rho = np.asarray(rho, dtype=float)
    mom = np.asarray(mom, dtype=float)
    wet = rho > DRY_THRESHOLD
    u = np.where(wet, mom / np.where(wet, rho, 1.0), 0.0)
    return mom, mom * u + law.pressure(rho)


def max_wave_speed(rho, u, law: PressureLaw):
    return np.abs(u) + np.sqrt(law.dpressure(np.maximum(rho, 0.0)))


def llf_faces(rho_l, u_l, p_l, rho_r, u_r, p_r, law: PressureLaw):
    """Local Lax-Friedrichs flux for arrays of left/right states.

    Pressures are passed in so the caller can reuse them in the well-balanced
    corrections without re-rounding.
    """
    mom_l = rho_l * u_l
    mom_r = rho_r * u_r
    lam = np.maximum(np.abs(u_l) + np.sqrt(law.dpressure(np.maximum(rho_l, 0.0))),
                     np.abs(u_r) + np.sqrt(law.dpressure(np.maximum(rho_r, 0.0))))
    g1 = 0.5 * (mom_l + mom_r - lam * (rho_r - rho_l))
    g2 = 0.5 * ((mom_l * u_l + p_l) + (mom_r * u_r + p_r) - lam * (mom_r - mom_l))
    return g1, g2


def _semicircle_partial_moments(t):
    """Integrals of (1, w, w^2) times the unit semicircle density over [t, 2]."""
    t = np.asarray(t, dtype=float)
    root = np.sqrt(np.maximum(4.0 - t * t, 0.0))
    asn = np.arcsin(0.5 * t)
    n0 = (np.pi - 0.5 * t * root - 2.0 * asn) / _TWO_PI
    n1 = root**3 / (6.0 * np.pi)
    n2 = (np.pi - 2.0 * asn + 0.125 * t * (4.0 - 2.0 * t * t) * root) / _TWO_PI
    return n0, n1, n2


def kinetic_half_flux(rho, u, p, dry=DRY_THRESHOLD):
    """Upwind half-flux F+ of the semicircle kinetic splitting.

    The equilibrium occupies velocities [u - 2c, u + 2c] with c^2 = P/rho, so
    both halves vanish identically in vacuum.
    """
    rho = np.asarray(rho, dtype=float)
    u = np.asarray(u, dtype=float)
    p = np.asarray(p, dtype=float)
    wet = rho > dry
    c = np.sqrt(np.where(wet, p / np.where(wet, rho, 1.0), 0.0))
    t = np.clip(np.where(wet, -u / np.where(wet, c, 1.0), 0.0), -2.0, 2.0)
    n0, n1, n2 = _semicircle_partial_moments(t)
    f1 = np.where(wet, rho * (u * n0 + c * n1), 0.0)
    f2 = np.where(wet, rho * u * u * n0 + 2.0 * rho * u * c * n1 + p * n2, 0.0)
    return f1, f2


def kinetic_faces(rho_l, u_l, p_l, rho_r, u_r, p_r, dry=DRY_THRESHOLD):
    """Kinetic numerical flux F+(UL) + F-(UR); F- mirrors F+ under u -> -u."""
    fl1, fl2 = kinetic_half_flux(rho_l, u_l, p_l, dry)
    fr1, fr2 = kinetic_half_flux(rho_r, -np.asarray(u_r, dtype=float), p_r, dry)
    return fl1 - fr1, fl2 + fr2


@dataclass
class InterfaceStates:
    """Traces and hydrostatic-reconstructed states at one interface."""

    rho_minus: float
    u_minus: float
    h_minus: float
    rho_plus: float
    u_plus: float
    h_plus: float
    h_mid: float
    rho_hr_minus: float
    rho_hr_plus: float
    mom_hr_minus: float
    mom_hr_plus: float


def hydrostatic_states(left, right, law: PressureLaw) -> InterfaceStates:
    """Hydrostatic reconstruction of the interface states.

    left/right are (rho, u, H) traces; the reconstructed densities are
    xi(Pi'(rho) + H - max(H-, H+)), clamped to zero by xi for m > 1.
    """
    rho_m, u_m, h_m = left
    rho_p, u_p, h_p = right
    h_mid = max(h_m, h_p)
    rho_hr_m = float(law.xi(law.pi_prime(max(rho_m, 0.0)) + h_m - h_mid))
    rho_hr_p = float(law.xi(law.pi_prime(max(rho_p, 0.0)) + h_p - h_mid))
    return InterfaceStates(
        rho_minus=rho_m, u_minus=u_m, h_minus=h_m,
        rho_plus=rho_p, u_plus=u_p, h_plus=h_p,
        h_mid=h_mid,
        rho_hr_minus=rho_hr_m, rho_hr_plus=rho_hr_p,
        mom_hr_minus=rho_hr_m * u_m, mom_hr_plus=rho_hr_p * u_p,
    )


def llf_flux(u_left, u_right, law: PressureLaw) -> np.ndarray:
    """Scalar-state local Lax-Friedrichs flux; states are (rho, rho*u)."""
    rho_l, mom_l = float(u_left[0]), float(u_left[1])
    rho_r, mom_r = float(u_right[0]), float(u_right[1])
    ul = mom_l / rho_l if rho_l > DRY_THRESHOLD else 0.0
    ur = mom_r / rho_r if rho_r > DRY_THRESHOLD else 0.0
    g1, g2 = llf_faces(np.array(rho_l), np.array(ul), law.pressure(np.array(rho_l)),
                       np.array(rho_r), np.array(ur), law.pressure(np.array(rho_r)), law)
    return np.array([float(g1), float(g2)])


def kinetic_flux(u_left, u_right, law: PressureLaw) -> np.ndarray:
    """Scalar-state kinetic flux; states are (rho, rho*u)."""
    rho_l, mom_l = float(u_left[0]), float(u_left[1])
    rho_r, mom_r = float(u_right[0]), float(u_right[1])
    ul = mom_l / rho_l if rho_l > DRY_THRESHOLD else 0.0
    ur = mom_r / rho_r if rho_r > DRY_THRESHOLD else 0.0
    g1, g2 = kinetic_faces(np.array(rho_l), np.array(ul), law.pressure(np.array(rho_l)),
                           np.array(rho_r), np.array(ur), law.pressure(np.array(rho_r)))
    return np.array([float(g1), float(g2)])


def wb_interface_flux(states: InterfaceStates, kind: FluxKind, law: PressureLaw):
    """Well-balanced interface flux pair (F-, F+).

    F+- = F_num(U_HR-, U_HR+) +- S_HR+- with the momentum-only corrections
    S_HR+ = (0, P(rho+) - P(rho_HR+)) and S_HR- = (0, P(rho_HR-) - P(rho-)).
    """
    p_hr_m = float(law.pressure(states.rho_hr_minus))
    p_hr_p = float(law.pressure(states.rho_hr_plus))
    args = (np.array(states.rho_hr_minus), np.array(states.u_minus), np.array(p_hr_m),
            np.array(states.rho_hr_plus), np.array(states.u_plus), np.array(p_hr_p))
    if kind is FluxKind.LLF:
        g1, g2 = llf_faces(*args, law)
    else:
        g1, g2 = kinetic_faces(*args)
    p_m = float(law.pressure(max(states.rho_minus, 0.0)))
    p_p = float(law.pressure(max(states.rho_plus, 0.0)))
    s_minus = p_hr_m - p_m
    s_plus = p_p - p_hr_p
    f_minus = np.array([float(g1), float(g2) - s_minus])
    f_plus = np.array([float(g1), float(g2) + s_plus])
    return f_minus, f_plus
