"""Well-balanced high-order finite-volume schemes for 1D hydrodynamic
equations with nonlocal free energies (interaction kernels, external
potentials, linear and alignment damping)."""

__version__ = "0.1.0"

from .core import (
    Boundary,
    DampingKind,
    DampingSpec,
    FieldState,
    Grid,
    ModelSpec,
    connected_components,
    initialize_state,
    velocity_of,
)
from .flux import FluxKind
from .freeenergy import PressureLaw, make_kernel, make_potential
from .scheme import SolverContext, semidiscrete_rhs, update_K
from .timeint import StepControl, compute_dt, ssp_rk3_step

__all__ = [
    "Boundary",
    "DampingKind",
    "DampingSpec",
    "FieldState",
    "FluxKind",
    "Grid",
    "ModelSpec",
    "PressureLaw",
    "SolverContext",
    "StepControl",
    "__version__",
    "compute_dt",
    "connected_components",
    "initialize_state",
    "make_kernel",
    "make_potential",
    "semidiscrete_rhs",
    "ssp_rk3_step",
    "update_K",
    "velocity_of",
]
