"""SSP(TVD) third-order Runge-Kutta stepping under the positivity CFL."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .core import FieldState
from .scheme import SolverContext

# Smallest quadrature weight over the limiter point set (endpoint weight of
# the 4-point Gauss-Lobatto rule); enters the positivity CFL bound.
W_MIN = 1.0 / 12.0

_SPEED_FLOOR = 1e-14
_NEG_TOL = 1e-13


class PositivityError(RuntimeError):
    """A stage produced a density below -1e-13: CFL/limiter contract broken."""


@dataclass
class StepControl:
    cfl: float = 0.7
    dt_min: float = 1e-10
    t_end: float = 1.0

    def __post_init__(self):
        if not 0.0 < self.cfl <= 1.0:
            raise ValueError("cfl must lie in (0, 1]")


def compute_dt(ctx: SolverContext, state: FieldState, cfl: float = 0.7, rec=None,
               speed: float | None = None) -> float:
    """Positivity time step: cfl * dx * w_min / (max trace signal speed).

    All-vacuum motionless states fall back to the free-fall cap cfl * dx.
    """
    if speed is None:
        if rec is None:
            rec = ctx.reconstruct(state)
        faces = ctx.interface_states(rec, state)
        speed = ctx.max_signal_speed(faces)
    dx = ctx.grid.dx
    if not np.isfinite(speed) or speed < _SPEED_FLOOR:
        return cfl * dx
    return cfl * dx * W_MIN / speed


def _clamped(rho: np.ndarray) -> np.ndarray:
    low = float(rho.min())
    if low < -_NEG_TOL:
        raise PositivityError(f"density dropped to {low:.3e}")
    if low < 0.0:
        return np.where(rho < 0.0, 0.0, rho)
    return rho


def ssp_rk3_step(state: FieldState, dt: float, rhs_fn, k_update_fn,
                 stage_fix=None) -> FieldState:
    """One step of the three-stage third-order SSP Runge-Kutta method.

    Every stage is a forward-Euler substep (rhs for the conserved averages
    followed by the K update) blended with the step's initial state using the
    coefficients 1, 1/4, 2/3.  The blend is applied in incremental form
    u0 + c*(euler - u0), so a stationary state passes through unchanged.

    ``stage_fix(rho, mom) -> mom`` is applied after every stage; the solver
    uses it for the vacuum momentum guard.
    """

    def fix(rho: np.ndarray, mom: np.ndarray) -> np.ndarray:
        return mom if stage_fix is None else stage_fix(rho, mom)

    def euler(s: FieldState) -> FieldState:
        d = rhs_fn(s)
        rho_new = _clamped(s.rho + dt * d.drho)
        mom_new = fix(rho_new, s.mom + dt * d.dmom)
        k_new = k_update_fn(s, rho_new)
        return FieldState(rho_new, mom_new, k_new, s.t + dt)

    def blend(c: float, e: FieldState, t: float) -> FieldState:
        rho = _clamped(state.rho + c * (e.rho - state.rho))
        return FieldState(
            rho,
            fix(rho, state.mom + c * (e.mom - state.mom)),
            state.K + c * (e.K - state.K),
            t,
        )

    s1 = euler(state)
    s2 = blend(0.25, euler(s1), state.t + 0.5 * dt)
    return blend(2.0 / 3.0, euler(s2), state.t + dt)
