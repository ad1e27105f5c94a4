"""Cell-polynomial reconstruction (third/fifth-order central WENO), the
nonnegativity limiter, and the potential reconstruction R_H = R_K - Pi'(R_rho).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import kernels
from .freeenergy import PressureLaw
from .quadrature import GAUSS3, richardson_offsets

SUPPORTED_ORDERS = (1, 3, 5)


@dataclass
class CellPolynomial:
    """Reconstruction polynomial sum_k coeffs[k] * (x - center)**k."""

    center: float
    coeffs: np.ndarray
    dx: float

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1

    def __call__(self, x):
        s = np.asarray(x, dtype=float) - self.center
        out = np.zeros_like(s)
        for c in self.coeffs[::-1]:
            out = out * s + c
        return out

    def cell_average(self) -> float:
        """Exact average over [center - dx/2, center + dx/2]."""
        half = 0.5 * self.dx
        total = 0.0
        for k, c in enumerate(self.coeffs):
            if k % 2 == 0:
                total += c * half**k / (k + 1)
        return total


def reconstruct_batch(gpad: np.ndarray, dx: float, order: int) -> np.ndarray:
    """Polynomial coefficients (n, 5) for all cells; input carries 2 ghosts/side."""
    if order == 1:
        n = len(gpad) - 4
        coeffs = np.zeros((n, 5))
        coeffs[:, 0] = gpad[2:-2]
        return coeffs
    if order == 3:
        return kernels.cweno3_coeffs(np.ascontiguousarray(gpad, dtype=float), dx)
    if order == 5:
        return kernels.cweno5_coeffs(np.ascontiguousarray(gpad, dtype=float), dx)
    raise ValueError(f"unsupported order {order}")


def cweno3(stencil, dx: float, center: float = 0.0) -> CellPolynomial:
    """Third-order reconstruction from the 5-cell average stencil g_{i-2..i+2}."""
    gpad = np.asarray(stencil, dtype=float)
    if gpad.shape != (5,):
        raise ValueError("cweno3 needs a 5-wide stencil")
    coeffs = kernels.cweno3_coeffs(gpad, dx)[0]
    return CellPolynomial(center, coeffs[:3].copy(), dx)


def cweno5(stencil, dx: float, center: float = 0.0) -> CellPolynomial:
    """Fifth-order reconstruction from the 5-cell average stencil g_{i-2..i+2}."""
    gpad = np.asarray(stencil, dtype=float)
    if gpad.shape != (5,):
        raise ValueError("cweno5 needs a 5-wide stencil")
    coeffs = kernels.cweno5_coeffs(gpad, dx)[0]
    return CellPolynomial(center, coeffs.copy(), dx)


@dataclass(frozen=True)
class EvalPoints:
    """Per-cell evaluation offsets (fractions of dx from the cell center).

    The union set drives the nonnegativity limiter: both endpoints, the three
    Gauss nodes and the Richardson trapezoid points.  Index arrays map the
    union columns back to each consumer.
    """

    offsets: np.ndarray      # (P,) sorted union, in units of dx
    left_face: int
    right_face: int
    gauss: np.ndarray        # indices of the 3 Gauss nodes
    richardson: tuple        # per trapezoid rule, indices of its points

    @property
    def count(self) -> int:
        return len(self.offsets)


def eval_points(order: int) -> EvalPoints:
    gauss = GAUSS3.offsets
    faces = np.array([-0.5, 0.5])
    rich = richardson_offsets(4 if order == 3 else 6) if order in (3, 5) else []
    pool = [faces, gauss] + list(rich)
    union = np.unique(np.concatenate(pool))
    def find(vals):
        return np.array([int(np.argmin(np.abs(union - v))) for v in np.atleast_1d(vals)])
    return EvalPoints(
        offsets=union,
        left_face=int(find(-0.5)[0]),
        right_face=int(find(0.5)[0]),
        gauss=find(gauss),
        richardson=tuple(find(r) for r in rich),
    )


def eval_at_offsets(coeffs: np.ndarray, offsets: np.ndarray, dx: float) -> np.ndarray:
    """Evaluate coefficient rows at offsets (fractions of dx): (n, P) values."""
    s = np.asarray(offsets, dtype=float) * dx
    vander = np.vander(s, N=coeffs.shape[1], increasing=True)  # (P, 5)
    return coeffs @ vander.T


def positivity_limit(coeffs: np.ndarray, vals: np.ndarray, avgs: np.ndarray):
    """Scale reconstructions toward the cell average so every evaluation-point
    value is nonnegative: R <- theta*(R - avg) + avg, theta = min(avg/(avg-min), 1).

    Cells whose minimum is already nonnegative are left untouched (bitwise).
    Returns (coeffs, vals, theta); inputs are modified in place where limited.
    """
    if np.any(avgs < 0.0):
        raise ValueError("positivity limiter needs nonnegative cell averages")
    mins = vals.min(axis=1)
    theta = np.ones_like(avgs)
    bad = mins < 0.0
    if np.any(bad):
        span = avgs[bad] - mins[bad]
        theta[bad] = np.where(span > 0.0, avgs[bad] / span, 0.0)
        coeffs[bad, 1:] *= theta[bad, None]
        coeffs[bad, 0] = theta[bad] * (coeffs[bad, 0] - avgs[bad]) + avgs[bad]
        vals[bad] = theta[bad, None] * (vals[bad] - avgs[bad, None]) + avgs[bad, None]
    return coeffs, vals, theta


def limit_polynomial(poly: CellPolynomial, g_avg: float, offsets: np.ndarray) -> CellPolynomial:
    """Single-cell wrapper around the limiter, for the scalar API."""
    if g_avg < 0.0:
        raise ValueError("cell average must be nonnegative")
    coeffs = np.zeros((1, 5))
    coeffs[0, : len(poly.coeffs)] = poly.coeffs
    vals = eval_at_offsets(coeffs, np.asarray(offsets, float), poly.dx)
    coeffs, _, _ = positivity_limit(coeffs, vals, np.array([g_avg]))
    return CellPolynomial(poly.center, coeffs[0, : len(poly.coeffs)].copy(), poly.dx)


def reconstruct_H(r_k: CellPolynomial, r_rho: CellPolynomial, law: PressureLaw):
    """Potential reconstruction R_H(x) = R_K(x) - Pi'(R_rho(x)) as a callable.

    Not a polynomial; for the isothermal law it is defined only where the
    density reconstruction stays positive.
    """

    def r_h(x):
        return r_k(x) - law.pi_prime(r_rho(x))

    return r_h
