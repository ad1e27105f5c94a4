"""Cell quadratures: 3-point Gauss rule and Richardson-extrapolated source integrals.

The 3-point Gauss rule (exact through degree 5) is used for every cell average
in the solver.  The source-term corrections are integrated with trapezoid
sums on m subintervals combined by Richardson extrapolation to fourth or
sixth order.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

# 3-point Gauss-Legendre rule mapped to a cell of width dx, in the form
# (1/dx) * integral = sum_j alpha_j f(x_i + off_j * dx).
GAUSS_WEIGHTS = np.array([5.0 / 18.0, 4.0 / 9.0, 5.0 / 18.0])
GAUSS_OFFSETS = np.array([-0.5 * math.sqrt(3.0 / 5.0), 0.0, 0.5 * math.sqrt(3.0 / 5.0)])
N_GAUSS = 3

# Trapezoid point counts per Richardson rule.
RICHARDSON_SUBDIVISIONS = {4: (1, 2), 6: (1, 2, 3)}


@dataclass(frozen=True)
class GaussRule:
    """3-point Gauss rule on one cell; offsets are fractions of the cell width."""

    weights: np.ndarray
    offsets: np.ndarray

    @property
    def n_nodes(self) -> int:
        return len(self.weights)

    def nodes(self, center: float, dx: float) -> np.ndarray:
        return center + self.offsets * dx

    def average(self, values: np.ndarray) -> float:
        """Cell average from values at the nodes (last axis)."""
        return values @ self.weights


GAUSS3 = GaussRule(GAUSS_WEIGHTS, GAUSS_OFFSETS)


def gauss_cell_average(f, center: float, dx: float) -> float:
    """Gauss average of ``f`` over the cell ``[center - dx/2, center + dx/2]``.

    Equals (1/dx) * integral(f) exactly for polynomials of degree <= 5.
    """
    x = GAUSS3.nodes(center, dx)
    return float(GAUSS_WEIGHTS @ np.asarray([f(xi) for xi in x], dtype=float))


def trapezoid_points(m: int, x_left: float, dx: float) -> np.ndarray:
    """m+1 equispaced points spanning the cell, used by the trapezoid sums."""
    return x_left + np.arange(m + 1) * (dx / m)


def trapezoid_source(m: int, r_rho, r_h, h_star, x_left: float, dx: float) -> float:
    """Trapezoid approximation on m subintervals of the source correction

        integral rho * d/dx (R_H - H*) dx

    evaluated as sum_j avg(rho)_j * [(R_H(x_{j+1}) - R_H(x_j)) - (H*(x_{j+1}) - H*(x_j))].
    """
    x = trapezoid_points(m, x_left, dx)
    rho = np.asarray([r_rho(xi) for xi in x], dtype=float)
    rh = np.asarray([r_h(xi) for xi in x], dtype=float)
    hs = np.asarray([h_star(xi) for xi in x], dtype=float)
    avg = 0.5 * (rho[:-1] + rho[1:])
    return float(np.sum(avg * (np.diff(rh) - np.diff(hs))))


def richardson_source(order: int, r_rho, r_h, h_star, x_left: float, dx: float) -> float:
    """Richardson-extrapolated source correction integral.

    order=4 combines the 1- and 2-subinterval trapezoid sums as (4*I2 - I1)/3;
    order=6 combines three sums as 81/40*I3 - 16/15*I2 + 1/24*I1.
    """
    i_m = [trapezoid_source(m, r_rho, r_h, h_star, x_left, dx)
           for m in RICHARDSON_SUBDIVISIONS[order]]
    return combine_richardson(order, i_m)


def combine_richardson(order: int, i_m) -> float:
    if order == 4:
        i1, i2 = i_m
        return (4.0 * i2 - i1) / 3.0
    if order == 6:
        i1, i2, i3 = i_m
        return 81.0 / 40.0 * i3 - 16.0 / 15.0 * i2 + 1.0 / 24.0 * i1
    raise ValueError(f"unsupported Richardson order {order}")


def richardson_offsets(order: int) -> list[np.ndarray]:
    """Per-trapezoid-rule point offsets from the cell center, as fractions of dx."""
    return [np.arange(m + 1) / m - 0.5 for m in RICHARDSON_SUBDIVISIONS[order]]
