"""Shared builders for the test suite."""

import math

import numpy as np
import pytest

from fvhydro.core import DampingKind, DampingSpec, FieldState, Grid, ModelSpec, initialize_state
from fvhydro.freeenergy import PressureLaw, make_potential


def gaussian_steady_model(n_cells=50, domain=(-5.0, 5.0), gamma=1.0):
    """Isothermal gas in the quadratic potential, with its exact steady state."""
    grid = Grid(n_cells, *domain)
    model = ModelSpec(
        law=PressureLaw(1.0, 1.0),
        potential=make_potential("quadratic"),
        damping=DampingSpec(DampingKind.LINEAR, gamma=gamma),
    )

    def rho0(x):
        return np.exp(-0.5 * x * x) / math.sqrt(2.0 * math.pi)

    def mom0(x):
        return np.zeros_like(x)

    state = initialize_state(grid, model, rho0, mom0)
    return grid, model, state


def constant_k_state(grid, rho, k_value=0.0):
    """State with bitwise-constant K and zero momentum: discretely stationary
    for any density field by construction."""
    rho = np.asarray(rho, dtype=float)
    return FieldState(rho, np.zeros_like(rho), np.full_like(rho, k_value), 0.0)


def cell_averages(f, grid):
    """3-point Gauss cell averages of a callable."""
    from fvhydro.quadrature import GAUSS3

    return np.asarray(f(grid.gauss_nodes())) @ GAUSS3.weights


@pytest.fixture
def rng():
    return np.random.default_rng(20240817)
