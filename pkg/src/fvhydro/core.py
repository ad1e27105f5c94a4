"""Grid, field state and model configuration shared by the whole solver."""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum

import numpy as np

from .freeenergy import (
    DRY_THRESHOLD,
    DiscretePotentialField,
    ExternalPotential,
    InteractionKernel,
    NodeConvolution,
    PressureLaw,
    compute_K,
    default_psi,
    discrete_convolution,
    make_kernel,
    make_potential,
)
from .quadrature import GAUSS3


class Boundary(Enum):
    PERIODIC = "periodic"
    OUTFLOW = "outflow"


@dataclass(frozen=True)
class Grid:
    """Uniform 1D mesh of n_cells cells spanning [x_left, x_right]."""

    n_cells: int
    x_left: float
    x_right: float
    boundary: Boundary = Boundary.PERIODIC

    def __post_init__(self):
        if self.n_cells < 5:
            raise ValueError("need at least 5 cells for the reconstruction stencil")
        if self.x_right <= self.x_left:
            raise ValueError("empty domain")

    @property
    def dx(self) -> float:
        return (self.x_right - self.x_left) / self.n_cells

    @property
    def length(self) -> float:
        return self.x_right - self.x_left

    def centers(self) -> np.ndarray:
        return self.x_left + (np.arange(self.n_cells) + 0.5) * self.dx

    def interfaces(self) -> np.ndarray:
        return self.x_left + np.arange(self.n_cells + 1) * self.dx

    def gauss_nodes(self) -> np.ndarray:
        """All Gauss nodes, shape (n_cells, 3)."""
        return self.centers()[:, None] + (GAUSS3.offsets * self.dx)[None, :]

    def pad(self, arr: np.ndarray, width: int = 2) -> np.ndarray:
        """Append ghost values on both sides per the boundary condition."""
        if self.boundary is Boundary.PERIODIC:
            return np.concatenate([arr[-width:], arr, arr[:width]])
        return np.concatenate([np.repeat(arr[0], width), arr, np.repeat(arr[-1], width)])


class DampingKind(Enum):
    NONE = "none"
    LINEAR = "linear"
    CUCKER_SMALE = "cucker_smale"
    MOTSCH_TADMOR = "motsch_tadmor"


@dataclass(frozen=True)
class DampingSpec:
    kind: DampingKind = DampingKind.NONE
    gamma: float = 0.0
    psi: object = field(default=None, compare=False)

    def __post_init__(self):
        if self.gamma < 0.0:
            raise ValueError("gamma must be nonnegative")
        if self.kind in (DampingKind.CUCKER_SMALE, DampingKind.MOTSCH_TADMOR) and self.psi is None:
            object.__setattr__(self, "psi", default_psi)


@dataclass(frozen=True)
class ModelSpec:
    """Pressure law, potential, interaction kernel and damping of one model."""

    law: PressureLaw = PressureLaw(1.0, 1.0)
    potential: ExternalPotential = field(default_factory=lambda: make_potential("none"))
    kernel: InteractionKernel = field(default_factory=lambda: make_kernel("none"))
    damping: DampingSpec = DampingSpec()
    dry_threshold: float = DRY_THRESHOLD

    @property
    def has_kernel(self) -> bool:
        return self.kernel.name != "none"

    @property
    def has_potential(self) -> bool:
        return self.potential.name != "none"


@dataclass
class FieldState:
    """Per-cell averages of density, momentum and free-energy variation."""

    rho: np.ndarray
    mom: np.ndarray
    K: np.ndarray
    t: float = 0.0

    def copy(self) -> "FieldState":
        return FieldState(self.rho.copy(), self.mom.copy(), self.K.copy(), self.t)

    def mass(self, grid: Grid) -> float:
        return float(np.sum(self.rho)) * grid.dx

    def momentum(self, grid: Grid) -> float:
        return float(np.sum(self.mom)) * grid.dx

    def is_finite(self) -> bool:
        return bool(np.all(np.isfinite(self.rho)) and np.all(np.isfinite(self.mom))
                    and np.all(np.isfinite(self.K)))


def velocity_of(rho_avg: float, mom_avg: float, dry_threshold: float = DRY_THRESHOLD) -> float:
    """Vacuum-safe velocity mom/rho; zero below the dry threshold."""
    if rho_avg > dry_threshold:
        return mom_avg / rho_avg
    return 0.0


def velocities(rho: np.ndarray, mom: np.ndarray, dry_threshold: float = DRY_THRESHOLD) -> np.ndarray:
    wet = rho > dry_threshold
    return np.where(wet, mom / np.where(wet, rho, 1.0), 0.0)


def initialize_state(grid: Grid, model: ModelSpec, rho0, mom0,
                     conv: NodeConvolution | None = None) -> FieldState:
    """Cell averages of the initial profiles plus the initial K field.

    Density and momentum averages use the 3-point Gauss rule; K gets the
    pointwise free-energy variation of the initial density, with the kernel
    part evaluated through the discrete node convolution.
    """
    nodes = grid.gauss_nodes()
    rho_nodes = np.asarray(rho0(nodes), dtype=float)
    mom_nodes = np.asarray(mom0(nodes), dtype=float)
    if rho_nodes.shape != nodes.shape or mom_nodes.shape != nodes.shape:
        raise ValueError("initial profiles must evaluate elementwise")
    if np.any(rho_nodes < 0.0):
        raise ValueError("negative initial density at a quadrature node")
    if model.law.is_isothermal and np.any(rho_nodes <= 0.0):
        raise ValueError("isothermal pressure needs strictly positive initial density")

    v_nodes = model.potential(nodes)
    if model.has_kernel:
        if conv is None:
            conv = NodeConvolution(model.kernel, grid.n_cells, grid.dx)
        h_field = discrete_convolution(rho_nodes, conv, v_nodes)
    else:
        h_field = DiscretePotentialField(v_nodes, v_nodes @ GAUSS3.weights)
    k0 = compute_K(rho_nodes, h_field, model.law)

    rho = rho_nodes @ GAUSS3.weights
    mom = mom_nodes @ GAUSS3.weights
    return FieldState(rho, mom, k0, 0.0)


def connected_components(rho: np.ndarray, dry_threshold: float = DRY_THRESHOLD,
                         periodic: bool = True) -> list[np.ndarray]:
    """Maximal runs of wet cells (rho > dry threshold), as index arrays.

    With periodic boundaries a run crossing the domain edge is one component.
    """
    wet = rho > dry_threshold
    n = len(rho)
    if not np.any(wet):
        return []
    if np.all(wet):
        return [np.arange(n)]
    comps = []
    start = None
    for i in range(n):
        if wet[i] and start is None:
            start = i
        elif not wet[i] and start is not None:
            comps.append(np.arange(start, i))
            start = None
    if start is not None:
        comps.append(np.arange(start, n))
    if periodic and len(comps) > 1 and wet[0] and wet[-1]:
        last = comps.pop()
        comps[0] = np.concatenate([last, comps[0]])
    return comps
