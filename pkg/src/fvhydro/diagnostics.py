"""Discrete energies, L1 errors, convergence orders and blowup detection."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .core import FieldState, Grid, ModelSpec, velocities
from .freeenergy import NodeConvolution


class EnergyMeter:
    """Discrete total/free energy per the cell-centered sums.

    F = sum dx*(Pi(rho_i) + V_i rho_i) + 1/2 sum_ij dx^2 W(x_i - x_j) rho_i rho_j,
    E = sum (dx/2) rho_i u_i^2 + F.  The kernel diagonal uses the same
    regularization as the node convolution (cell-local average for singular
    kernels).
    """

    def __init__(self, grid: Grid, model: ModelSpec):
        self.grid = grid
        self.model = model
        self.v_centers = model.potential(grid.centers())
        self._conv = None
        if model.has_kernel:
            self._conv = NodeConvolution(model.kernel, grid.n_cells, grid.dx,
                                         offsets=np.array([0.0]), weights=np.array([1.0]))

    def energies(self, state: FieldState) -> tuple[float, float]:
        """(total energy, free energy) of one state."""
        grid, model = self.grid, self.model
        dx = grid.dx
        u = velocities(state.rho, state.mom, model.dry_threshold)
        kinetic = 0.5 * dx * float(np.sum(state.rho * u * u))
        free = dx * float(np.sum(model.law.pi(state.rho) + self.v_centers * state.rho))
        if self._conv is not None:
            w_rho = self._conv.apply(state.rho[:, None])[:, 0]
            free += 0.5 * dx * float(np.sum(state.rho * w_rho))
        return kinetic + free, free


def discrete_energies(state: FieldState, model: ModelSpec, grid: Grid) -> tuple[float, float]:
    return EnergyMeter(grid, model).energies(state)


def restrict_average(fine: np.ndarray, ratio: int) -> np.ndarray:
    """Exact aggregation of fine cell averages onto a ratio-times-coarser grid."""
    if len(fine) % ratio:
        raise ValueError("fine grid size not divisible by ratio")
    return fine.reshape(-1, ratio).mean(axis=1)


def l1_error(rho_a: np.ndarray, grid_a: Grid, rho_b: np.ndarray,
             grid_b: Grid | None = None) -> float:
    """L1 distance between density fields, restricting the finer one if needed."""
    grid_b = grid_a if grid_b is None else grid_b
    if (grid_a.x_left, grid_a.x_right) != (grid_b.x_left, grid_b.x_right):
        raise ValueError("domains differ")
    na, nb = len(rho_a), len(rho_b)
    if na == nb:
        return float(np.sum(np.abs(rho_a - rho_b))) * grid_a.dx
    if nb % na == 0:
        return float(np.sum(np.abs(rho_a - restrict_average(rho_b, nb // na)))) * grid_a.dx
    if na % nb == 0:
        return float(np.sum(np.abs(restrict_average(rho_a, na // nb) - rho_b))) * grid_b.dx
    raise ValueError("grids are not integer refinements of each other")


def wellbalance_residual(state0: FieldState, state_t: FieldState, grid: Grid) -> float:
    """L1 density distance between the initial and evolved states."""
    return l1_error(state0.rho, grid, state_t.rho)


def observed_orders(errors) -> list[float]:
    """Observed order log2(err_coarse / err_fine) for successive halvings."""
    errors = list(errors)
    return [float(np.log2(errors[i - 1] / errors[i])) for i in range(1, len(errors))]


@dataclass
class ConvergenceTable:
    cells: list[int] = field(default_factory=list)
    errors: list[float] = field(default_factory=list)

    def add(self, n_cells: int, err: float):
        self.cells.append(int(n_cells))
        self.errors.append(float(err))

    @property
    def orders(self) -> list[float]:
        return [float("nan")] + observed_orders(self.errors)

    def rows(self):
        return list(zip(self.cells, self.errors, self.orders))


@dataclass
class BlowupConfig:
    rho_factor: float = 1e3   # flag when max rho exceeds factor * initial max
    dt_min: float = 1e-10

    def threshold(self, initial_max_rho: float) -> float:
        return self.rho_factor * initial_max_rho


def blowup_monitor(state: FieldState, dt: float, rho_threshold: float,
                   dt_min: float = 1e-10) -> bool:
    """True when the density peak or the time step signals finite-time blowup."""
    return bool(np.max(state.rho) > rho_threshold or dt < dt_min)
