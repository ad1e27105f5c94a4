"""Assembly of the semi-discrete right-hand side.

Per evaluation: reconstruct (rho, rho*u, K), limit the density, form interface
traces and hydrostatic states, apply the numerical flux with the
well-balanced corrections, add the Richardson source correction and damping.

Two algebraic rearrangements keep discrete steady states fixed to the last
bit: the hydrostatic argument Pi'(rho-+) + H-+ - H_mid is evaluated as
K-+ - H_mid (identical by construction of the H traces), and the flux
corrections are folded as (F_num - P(rho_HR)) so a balanced interface
contributes exactly zero.  The source correction likewise reduces to
differences of R_K, since R_H - H* = R_K - K_i cell by cell.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import kernels
from .core import Boundary, DampingKind, FieldState, Grid, ModelSpec
from .flux import FluxKind, kinetic_faces, llf_faces
from .freeenergy import InteractionKernel, NodeConvolution
from .quadrature import GAUSS3, combine_richardson
from .reconstruct import EvalPoints, eval_points

_EMPTY = np.zeros(0)

KINETIC_SPEED_EXPONENT = 0.25  # kinetic CFL bound uses |u| + 3**((m-1)/4)

# Trace velocities are clamped to this multiple of the adjacent cells' signal
# envelope |u| + sqrt(P'); reconstruction ratios m/rho are otherwise unbounded
# in the drying skirt of a wet/dry front.  Inactive on smooth wet data.
TRACE_SPEED_HEADROOM = 2.0
# Velocities are only derived from densities above this fraction of the
# current density peak; below it the momentum is roundoff-dominated and the
# velocity convention is u = 0.  Never relaxed below the absolute threshold.
RELATIVE_DRY = 1e-6
# Only cells above this fraction of the peak contribute their velocity to the
# trace-speed envelope; the drying skirt of a front must not set the pace.
SKIRT_FRACTION = 1e-2


def dynamic_dry_threshold(rho: np.ndarray, dry_threshold: float) -> float:
    return max(dry_threshold, RELATIVE_DRY * float(np.max(rho, initial=0.0)))


@dataclass
class Reconstruction:
    """Limited reconstructions of one state, evaluated on the point union."""

    coeffs_rho: np.ndarray
    coeffs_mom: np.ndarray
    coeffs_k: np.ndarray
    vals_rho: np.ndarray
    vals_mom: np.ndarray
    vals_k: np.ndarray
    theta: np.ndarray


@dataclass
class Rhs:
    drho: np.ndarray
    dmom: np.ndarray


class SolverContext:
    """Precomputed machinery for one (grid, model, order, flux) combination."""

    def __init__(self, grid: Grid, model: ModelSpec, order: int = 3,
                 flux: FluxKind | str = "auto", conv_method: str = "auto"):
        if order not in (1, 3, 5):
            raise ValueError("order must be 1, 3 or 5")
        self.grid = grid
        self.model = model
        self.order = order
        if isinstance(flux, str):
            flux = FluxKind.auto_for(model.law) if flux == "auto" else FluxKind(flux)
        self.flux_kind = flux
        self.points: EvalPoints = eval_points(order if order in (3, 5) else 3)
        self._phys_offsets = np.ascontiguousarray(self.points.offsets * grid.dx)
        self.v_gauss = model.potential(grid.gauss_nodes())

        use_fft = {"auto": None, "direct": False, "fft": True}[conv_method]
        self.conv_w = (NodeConvolution(model.kernel, grid.n_cells, grid.dx, use_fft=use_fft)
                       if model.has_kernel else None)
        self.conv_psi = None
        if model.damping.kind in (DampingKind.CUCKER_SMALE, DampingKind.MOTSCH_TADMOR):
            psi_kernel = InteractionKernel("psi", model.damping.psi)
            self.conv_psi = NodeConvolution(psi_kernel, grid.n_cells, grid.dx, use_fft=use_fft)

        # packed Richardson rules for the fused face sweep
        rules = self.points.richardson if order in (3, 5) else ()
        n_rules = len(rules)
        max_pts = max((len(r) for r in rules), default=0)
        self._rich_pts = np.zeros((n_rules, max(max_pts, 1)), dtype=np.int64)
        self._rich_len = np.array([len(r) for r in rules], dtype=np.int64)
        for i, r in enumerate(rules):
            self._rich_pts[i, :len(r)] = r
        if order == 3:
            self._rich_coef = np.array([-1.0 / 3.0, 4.0 / 3.0])
        elif order == 5:
            self._rich_coef = np.array([1.0 / 24.0, -16.0 / 15.0, 81.0 / 40.0])
        else:
            self._rich_coef = np.zeros(0)
        self._fast = (kernels.backend_name() == "numba"
                      and grid.boundary is Boundary.PERIODIC)
        if self._fast:
            from . import _rhs_nb
            self._rhs_core = _rhs_nb.rhs_core

    # ------------------------------------------------------------------ #

    def _field_unit(self, values: np.ndarray, limit: bool):
        avgs = np.maximum(values, 0.0) if limit else _EMPTY
        return kernels.reconstruct_eval(self.grid.pad(values), self.grid.dx, self.order,
                                        self._phys_offsets, limit, avgs)

    def reconstruct(self, state: FieldState) -> Reconstruction:
        coeffs_rho, vals_rho, theta = self._field_unit(state.rho, True)
        coeffs_mom, vals_mom, _ = self._field_unit(state.mom, False)
        coeffs_k, vals_k, _ = self._field_unit(state.K, False)
        return Reconstruction(coeffs_rho, coeffs_mom, coeffs_k,
                              vals_rho, vals_mom, vals_k, theta)

    def density_nodes(self, rho: np.ndarray) -> np.ndarray:
        """Limited density reconstruction at the Gauss nodes only."""
        _, vals, _ = self._field_unit(rho, True)
        return vals[:, self.points.gauss]

    def _face_traces(self, vals: np.ndarray):
        """Left/right traces at every interface from per-cell point values."""
        pts = self.points
        right_of_cell = vals[:, pts.right_face]
        left_of_cell = vals[:, pts.left_face]
        if self.grid.boundary is Boundary.PERIODIC:
            trace_l = right_of_cell
            trace_r = np.roll(left_of_cell, -1)
        else:
            trace_l = np.concatenate([[left_of_cell[0]], right_of_cell])
            trace_r = np.concatenate([left_of_cell, [right_of_cell[-1]]])
        return trace_l, trace_r

    def _face_difference(self, g: np.ndarray) -> np.ndarray:
        """Per-cell difference (right face) - (left face) of a face array."""
        if self.grid.boundary is Boundary.PERIODIC:
            return g - np.roll(g, 1)
        return g[1:] - g[:-1]

    def _face_speed_bound(self, state: FieldState, dry: float) -> np.ndarray:
        """Per-face clamp on trace velocities: a headroom multiple of the
        adjacent bulk cells' signal speed |u| + sqrt(P')."""
        law = self.model.law
        rho = np.maximum(state.rho, 0.0)
        wet = rho > max(dry, SKIRT_FRACTION * float(np.max(rho, initial=0.0)))
        u_cell = np.abs(np.where(wet, state.mom / np.where(wet, rho, 1.0), 0.0))
        env = TRACE_SPEED_HEADROOM * (u_cell + np.sqrt(law.dpressure(rho)))
        if self.grid.boundary is Boundary.PERIODIC:
            return np.maximum(env, np.roll(env, -1))
        return np.maximum(np.concatenate([env[:1], env]), np.concatenate([env, env[-1:]]))

    def interface_states(self, rec: Reconstruction, state: FieldState):
        """Traces, hydrostatic densities and their pressures at all interfaces."""
        law = self.model.law
        dry = dynamic_dry_threshold(state.rho, self.model.dry_threshold)
        rho_l, rho_r = self._face_traces(rec.vals_rho)
        mom_l, mom_r = self._face_traces(rec.vals_mom)
        k_l, k_r = self._face_traces(rec.vals_k)
        wet_l = rho_l > dry
        wet_r = rho_r > dry
        bound = self._face_speed_bound(state, dry)
        u_l = np.clip(np.where(wet_l, mom_l / np.where(wet_l, rho_l, 1.0), 0.0), -bound, bound)
        u_r = np.clip(np.where(wet_r, mom_r / np.where(wet_r, rho_r, 1.0), 0.0), -bound, bound)
        h_l = k_l - law.pi_prime(np.maximum(rho_l, 0.0))
        h_r = k_r - law.pi_prime(np.maximum(rho_r, 0.0))
        h_mid = np.maximum(h_l, h_r)
        rho_hr_l = law.xi(k_l - h_mid)
        rho_hr_r = law.xi(k_r - h_mid)
        return {
            "rho_l": rho_l, "rho_r": rho_r, "u_l": u_l, "u_r": u_r,
            "rho_hr_l": rho_hr_l, "rho_hr_r": rho_hr_r,
            "p_hr_l": law.pressure(rho_hr_l), "p_hr_r": law.pressure(rho_hr_r),
        }

    def max_signal_speed(self, faces) -> float:
        """Largest trace signal speed, per the flux-specific CFL bound."""
        law = self.model.law
        u_max = max(float(np.max(np.abs(faces["u_l"]))), float(np.max(np.abs(faces["u_r"]))))
        if self.flux_kind is FluxKind.LLF:
            a_l = np.abs(faces["u_l"]) + np.sqrt(law.dpressure(np.maximum(faces["rho_l"], 0.0)))
            a_r = np.abs(faces["u_r"]) + np.sqrt(law.dpressure(np.maximum(faces["rho_r"], 0.0)))
            return max(float(np.max(a_l)), float(np.max(a_r)))
        return u_max + 3.0 ** ((law.exponent - 1.0) * KINETIC_SPEED_EXPONENT)

    # ------------------------------------------------------------------ #

    def _source_correction(self, rec: Reconstruction) -> np.ndarray:
        """Richardson integral of rho * d/dx(R_H - H*), which equals the
        trapezoid sums of rho against differences of R_K."""
        if self.order == 1:
            return np.zeros(self.grid.n_cells)
        sums = []
        for idx in self.points.richardson:
            rho = rec.vals_rho[:, idx]
            k = rec.vals_k[:, idx]
            avg = 0.5 * (rho[:, :-1] + rho[:, 1:])
            sums.append(np.sum(avg * np.diff(k, axis=1), axis=1))
        return combine_richardson(4 if self.order == 3 else 6, sums)

    def damping_rhs(self, state: FieldState, rec: Reconstruction | None = None) -> np.ndarray:
        """Momentum contribution of the damping terms."""
        damp = self.model.damping
        if damp.kind is DampingKind.NONE:
            return np.zeros_like(state.mom)
        if damp.kind is DampingKind.LINEAR:
            return -damp.gamma * state.mom
        if rec is None:
            rec = self.reconstruct(state)
        dry = self.model.dry_threshold
        gauss = self.points.gauss
        rho_n = rec.vals_rho[:, gauss]
        mom_n = rec.vals_mom[:, gauss]
        wet = rho_n > dry
        u_n = np.where(wet, mom_n / np.where(wet, rho_n, 1.0), 0.0)
        psi_rho = self.conv_psi.apply(rho_n)
        psi_mom = self.conv_psi.apply(mom_n)
        align = u_n * psi_rho - psi_mom
        if damp.kind is DampingKind.MOTSCH_TADMOR:
            norm_ok = psi_rho > dry
            align = np.where(norm_ok, align / np.where(norm_ok, psi_rho, 1.0), 0.0)
        return -(rho_n * align) @ GAUSS3.weights

    def rhs_with_speed(self, state: FieldState, rec: Reconstruction | None = None):
        """Semi-discrete d/dt of the cell averages plus the largest trace
        signal speed (for the CFL)."""
        if rec is None:
            rec = self.reconstruct(state)
        law = self.model.law
        dx = self.grid.dx

        if self._fast:
            dry_dyn = dynamic_dry_threshold(state.rho, self.model.dry_threshold)
            peak = float(np.max(state.rho, initial=0.0))
            drho, dmom, speed = self._rhs_core(
                state.rho, state.mom, state.K,
                rec.vals_rho, rec.vals_mom, rec.vals_k,
                self.points.left_face, self.points.right_face,
                self._rich_pts, self._rich_len, self._rich_coef,
                law.exponent, law.scale, dry_dyn,
                max(dry_dyn, SKIRT_FRACTION * peak), TRACE_SPEED_HEADROOM,
                self.flux_kind is FluxKind.KINETIC, self.model.dry_threshold, dx)
            dmom = dmom + self.damping_rhs(state, rec)
            return Rhs(drho, dmom), speed

        faces = self.interface_states(rec, state)
        args = (faces["rho_hr_l"], faces["u_l"], faces["p_hr_l"],
                faces["rho_hr_r"], faces["u_r"], faces["p_hr_r"])
        if self.flux_kind is FluxKind.LLF:
            g1, g2 = llf_faces(*args, law)
        else:
            g1, g2 = kinetic_faces(*args, dry=self.model.dry_threshold)

        drho = -self._face_difference(g1) / dx
        # momentum flux with the hydrostatic correction and the local-steady
        # flux folded together: per face, minus side G2 - P(rho_HR-) and plus
        # side G2 - P(rho_HR+).
        a_minus = g2 - faces["p_hr_l"]
        a_plus = g2 - faces["p_hr_r"]
        if self.grid.boundary is Boundary.PERIODIC:
            dmom = -(a_minus - np.roll(a_plus, 1)) / dx
        else:
            dmom = -(a_minus[1:] - a_plus[:-1]) / dx
        dmom = dmom - self._source_correction(rec) / dx
        dmom = dmom + self.damping_rhs(state, rec)
        return Rhs(drho, dmom), self.max_signal_speed(faces)

    def rhs(self, state: FieldState, rec: Reconstruction | None = None) -> Rhs:
        return self.rhs_with_speed(state, rec)[0]

    # ------------------------------------------------------------------ #

    def stage_momentum_fix(self, rho: np.ndarray, mom: np.ndarray) -> np.ndarray:
        """Vacuum guard applied after every stage: dry cells carry no
        momentum, and no cell's velocity may exceed the bulk signal envelope.

        Bounded velocities keep the drying skirt of wet/dry fronts from
        accumulating spurious momentum; wet smooth states pass through
        bit-identical.
        """
        law = self.model.law
        rho_pos = np.maximum(rho, 0.0)
        peak = float(np.max(rho_pos, initial=0.0))
        dry = max(self.model.dry_threshold, RELATIVE_DRY * peak)
        mom = np.where(rho_pos <= dry, 0.0, mom)
        bulk = rho_pos > max(dry, SKIRT_FRACTION * peak)
        if np.any(bulk):
            u_bulk = np.abs(mom[bulk]) / rho_pos[bulk]
            c_bulk = np.sqrt(law.dpressure(rho_pos[bulk]))
            cap = TRACE_SPEED_HEADROOM * float(np.max(u_bulk + c_bulk))
        else:
            cap = 0.0
        bound = rho_pos * cap
        return np.clip(mom, -bound, bound)

    def k_increment(self, rho_nodes_old: np.ndarray, rho_nodes_new: np.ndarray) -> np.ndarray:
        """Free-energy-variation update between two density reconstructions."""
        law = self.model.law
        floor = self.model.dry_threshold if law.is_isothermal else 0.0
        d_pi = (law.pi_prime(np.maximum(rho_nodes_new, floor))
                - law.pi_prime(np.maximum(rho_nodes_old, floor)))
        dk = d_pi @ GAUSS3.weights
        if self.conv_w is not None:
            dk = dk + self.conv_w.apply(rho_nodes_new - rho_nodes_old) @ GAUSS3.weights
        return dk

    def h_cell_averages(self, state: FieldState) -> np.ndarray:
        """Cell averages of V + W * rho from the current (limited) density."""
        h = self.v_gauss.copy()
        if self.conv_w is not None:
            h = h + self.conv_w.apply(self.density_nodes(state.rho))
        return h @ GAUSS3.weights


def semidiscrete_rhs(ctx: SolverContext, state: FieldState) -> Rhs:
    return ctx.rhs(state)


def update_K(ctx: SolverContext, k_old: np.ndarray, rho_old: np.ndarray,
             rho_new: np.ndarray) -> np.ndarray:
    """K update across one Euler substep, from old/new density averages."""
    return k_old + ctx.k_increment(ctx.density_nodes(rho_old), ctx.density_nodes(rho_new))


def local_steady_pair(ctx: SolverContext, rec: Reconstruction, state: FieldState, i: int):
    """Cell-local stationary pair (rho*, H*) as callables, for verification."""
    law = ctx.model.law
    center = ctx.grid.centers()[i]
    coeffs = rec.coeffs_rho[i]
    k_i = state.K[i]

    def rho_star(x):
        s = np.asarray(x, dtype=float) - center
        out = np.zeros_like(s)
        for c in coeffs[::-1]:
            out = out * s + c
        return out

    def h_star(x):
        return k_i - law.pi_prime(np.maximum(rho_star(x), 0.0))

    return rho_star, h_star
