"""Pressure/internal-energy algebra, potentials, interaction kernels and the
discrete convolution that defines the potential field H and the free-energy
variation K.

The pressure law is P(rho) = c_p * rho**m with m >= 1.  Pi is the internal
energy density (rho * Pi''(rho) = P'(rho)), xi the inverse of Pi' extended by
zero for m > 1 so hydrostatic reconstructions stay nonnegative.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .quadrature import GAUSS3

# Densities below this are treated as vacuum throughout the solver.
DRY_THRESHOLD = 1e-10

# Separations below dx * SELF_SEPARATION_TOL count as the self-node of a
# singular kernel and get the regularized cell-local average instead.
SELF_SEPARATION_TOL = 1e-8

_LOG_FLOOR = 1e-300  # keeps log() finite on exact-zero densities
_EXP_CAP = 700.0     # keeps exp() finite on pathological arguments


@dataclass(frozen=True)
class PressureLaw:
    """P(rho) = scale * rho**exponent, exponent >= 1."""

    exponent: float = 1.0
    scale: float = 1.0

    def __post_init__(self):
        if self.exponent < 1.0:
            raise ValueError("pressure exponent must be >= 1")
        if self.scale <= 0.0:
            raise ValueError("pressure scale must be positive")

    @property
    def is_isothermal(self) -> bool:
        return self.exponent == 1.0

    def pressure(self, rho):
        if self.is_isothermal:
            return self.scale * rho
        return self.scale * np.power(rho, self.exponent)

    def dpressure(self, rho):
        """P'(rho), the squared sound speed times rho**0."""
        m = self.exponent
        if self.is_isothermal:
            return self.scale * np.ones_like(np.asarray(rho, dtype=float))
        return self.scale * m * np.power(rho, m - 1.0)

    def pi(self, rho):
        """Internal energy density Pi(rho); Pi(0) = 0."""
        m = self.exponent
        rho = np.asarray(rho, dtype=float)
        if self.is_isothermal:
            safe = np.maximum(rho, _LOG_FLOOR)
            return np.where(rho > 0.0, self.scale * (rho * np.log(safe) - rho), 0.0)
        return self.scale * np.power(rho, m) / (m - 1.0)

    def pi_prime(self, rho):
        """Pi'(rho): c_p*log(rho) for m=1, c_p*m/(m-1)*rho**(m-1) for m>1."""
        m = self.exponent
        if self.is_isothermal:
            return self.scale * np.log(np.maximum(rho, _LOG_FLOOR))
        return self.scale * (m / (m - 1.0)) * np.power(rho, m - 1.0)

    def xi(self, s):
        """Inverse of Pi', clamped to zero for s <= 0 when m > 1."""
        if self.is_isothermal:
            return np.exp(np.minimum(np.asarray(s, dtype=float) / self.scale, _EXP_CAP))
        m = self.exponent
        arg = np.maximum(np.asarray(s, dtype=float), 0.0) * ((m - 1.0) / (m * self.scale))
        return np.power(arg, 1.0 / (m - 1.0))


def pi_prime(rho: float, law: PressureLaw) -> float:
    """Scalar Pi'(rho); raises on nonpositive density for the log law."""
    if law.is_isothermal and rho <= 0.0:
        raise ValueError("Pi' undefined at rho <= 0 for the isothermal law")
    return float(law.pi_prime(rho))


def xi(s: float, law: PressureLaw) -> float:
    return float(law.xi(s))


@dataclass(frozen=True)
class ExternalPotential:
    """External potential V(x) evaluated pointwise."""

    name: str
    fn: object = field(compare=False)

    def __call__(self, x):
        return self.fn(np.asarray(x, dtype=float))


@dataclass(frozen=True)
class InteractionKernel:
    """Interaction kernel W(x).

    ``singular`` marks kernels that blow up at zero separation; for those the
    self-node contribution is replaced by the exact cell-local average over a
    window of width h (``self_average``).
    """

    name: str
    fn: object = field(compare=False)
    singular: bool = False
    self_average_fn: object = field(default=None, compare=False)

    def __call__(self, x):
        return self.fn(np.asarray(x, dtype=float))

    def self_average(self, h: float) -> float:
        if not self.singular:
            return float(self.fn(np.asarray(0.0)))
        return float(self.self_average_fn(h))


def _cubic_table(xs, ys):
    from scipy.interpolate import CubicSpline

    return CubicSpline(np.asarray(xs, float), np.asarray(ys, float))


def make_potential(name: str, table=None) -> ExternalPotential:
    """Built-in external potentials plus tabulated custom ones."""
    if name == "none":
        return ExternalPotential("none", lambda x: np.zeros_like(x))
    if name == "quadratic":
        return ExternalPotential("quadratic", lambda x: 0.5 * x * x)
    if name == "double_well":
        return ExternalPotential("double_well", lambda x: 0.25 * x**4 - 1.5 * x * x)
    if name == "custom":
        if table is None:
            raise ValueError("custom potential needs a (x, V) table")
        return ExternalPotential("custom", _cubic_table(*table))
    raise ValueError(f"unknown potential {name!r}")


def make_kernel(name: str, alpha: float | None = None, table=None) -> InteractionKernel:
    """Built-in interaction kernels plus tabulated custom ones.

    ``power`` uses W(x) = |x|**alpha / alpha with alpha > -1; alpha = 0 falls
    back to the logarithmic kernel by convention.
    """
    if name == "none":
        return InteractionKernel("none", lambda x: np.zeros_like(x))
    if name == "quadratic":
        return InteractionKernel("quadratic", lambda x: 0.5 * x * x)
    if name == "log":
        return InteractionKernel(
            "log",
            lambda x: np.log(np.maximum(np.abs(x), _LOG_FLOOR)),
            singular=True,
            self_average_fn=lambda h: math.log(0.5 * h) - 1.0,
        )
    if name == "power":
        if alpha is None or alpha <= -1.0:
            raise ValueError("power kernel needs alpha > -1")
        if alpha == 0.0:
            return make_kernel("log")
        if alpha < 1.0:
            return InteractionKernel(
                "power",
                lambda x: np.power(np.abs(x), alpha) / alpha,
                singular=True,
                self_average_fn=lambda h: (0.5 * h) ** alpha / (alpha * (alpha + 1.0)),
            )
        return InteractionKernel("power", lambda x: np.power(np.abs(x), alpha) / alpha)
    if name == "morse":
        return InteractionKernel(
            "morse", lambda x: -np.exp(-0.5 * x * x) / math.sqrt(2.0 * math.pi)
        )
    if name == "custom":
        if table is None:
            raise ValueError("custom kernel needs a (x, W) table")
        return InteractionKernel("custom", _cubic_table(*table))
    raise ValueError(f"unknown kernel {name!r}")


def default_psi(x):
    """Default communication function (1 + x^2)**(-1/4)."""
    return np.power(1.0 + np.asarray(x, dtype=float) ** 2, -0.25)


class NodeConvolution:
    """Discrete convolution q -> dx * sum_{l,m} alpha_m W(x - x_l^m) q(x_l^m)
    evaluated at every quadrature node of a uniform grid.

    The kernel matrix is block-Toeplitz, so besides the direct dense product
    there is an FFT path (exact up to roundoff on uniform grids).  The kernel
    is evaluated once at construction; applying the operator touches no
    kernel functions.
    """

    def __init__(self, kernel: InteractionKernel, n_cells: int, dx: float,
                 offsets=None, weights=None, use_fft: bool | None = None):
        offsets = GAUSS3.offsets if offsets is None else np.asarray(offsets, float)
        weights = GAUSS3.weights if weights is None else np.asarray(weights, float)
        self.n_cells = int(n_cells)
        self.dx = float(dx)
        self.offsets = offsets * self.dx
        self.weights = weights
        self.n_nodes = len(offsets)
        self.kernel = kernel
        if use_fft is None:
            use_fft = self.n_cells > 512
        self.use_fft = bool(use_fft)

        n, ns, dx_ = self.n_cells, self.n_nodes, self.dx
        r = np.arange(-(n - 1), n) * dx_  # cell-to-cell separations
        # kern[j, m, :] = W(r + off_j - off_m), self-node regularized.
        self._kern = np.empty((ns, ns, 2 * n - 1))
        for j in range(ns):
            for m in range(ns):
                sep = r + (self.offsets[j] - self.offsets[m])
                vals = np.asarray(kernel(sep), dtype=float)
                mask = np.abs(sep) < dx_ * SELF_SEPARATION_TOL
                if np.any(mask):
                    vals[mask] = kernel.self_average(dx_ * self.weights[m])
                self._kern[j, m] = vals
        if self.use_fft:
            self._plan_fft()
        else:
            self._dense = self._build_dense()

    def _build_dense(self) -> np.ndarray:
        n, ns = self.n_cells, self.n_nodes
        a = np.empty((n * ns, n * ns))
        i = np.arange(n)
        for j in range(ns):
            for m in range(ns):
                block = self._kern[j, m][(i[:, None] - i[None, :]) + (n - 1)]
                a[j::ns, m::ns] = (self.dx * self.weights[m]) * block
        return a

    def _plan_fft(self):
        n, ns = self.n_cells, self.n_nodes
        size = 1 << int(np.ceil(np.log2(max(3 * n - 2, 2))))
        self._fft_size = size
        self._kern_hat = np.empty((ns, ns, size // 2 + 1), dtype=complex)
        for j in range(ns):
            for m in range(ns):
                padded = np.zeros(size)
                padded[: 2 * n - 1] = self._kern[j, m]
                self._kern_hat[j, m] = np.fft.rfft(padded)

    def apply(self, q_nodes: np.ndarray) -> np.ndarray:
        """q_nodes has shape (n_cells, n_nodes); returns the same shape."""
        q = np.asarray(q_nodes, dtype=float)
        if q.shape != (self.n_cells, self.n_nodes):
            raise ValueError("node array shape mismatch")
        if self.use_fft:
            return self._apply_fft(q)
        flat = self._dense @ q.reshape(-1)
        return flat.reshape(self.n_cells, self.n_nodes)

    def _apply_fft(self, q: np.ndarray) -> np.ndarray:
        n, ns, size = self.n_cells, self.n_nodes, self._fft_size
        padded = np.zeros((ns, size))
        padded[:, :n] = (self.dx * self.weights[:, None]) * q.T
        q_hat = np.fft.rfft(padded, axis=1)
        out = np.empty((n, ns))
        for j in range(ns):
            spec = np.einsum("mk,mk->k", self._kern_hat[j], q_hat)
            full = np.fft.irfft(spec, n=size)
            out[:, j] = full[n - 1: 2 * n - 1]
        return out


@dataclass
class DiscretePotentialField:
    """H evaluated at every quadrature node, plus its per-cell Gauss averages."""

    node_values: np.ndarray  # (n_cells, n_nodes)
    cell_averages: np.ndarray  # (n_cells,)


def discrete_convolution(rho_nodes: np.ndarray, conv: NodeConvolution,
                         v_nodes: np.ndarray | None = None) -> DiscretePotentialField:
    """Potential field H = V + W * rho at all quadrature nodes.

    ``rho_nodes`` are density values at the nodes, ``v_nodes`` the external
    potential at the same nodes (zero if omitted).
    """
    h = conv.apply(rho_nodes)
    if v_nodes is not None:
        h = h + v_nodes
    return DiscretePotentialField(h, h @ conv.weights)


def compute_K(rho_nodes: np.ndarray, h_field: DiscretePotentialField,
              law: PressureLaw) -> np.ndarray:
    """Cell averages of the free-energy variation Pi'(rho) + H."""
    return (law.pi_prime(rho_nodes) + h_field.node_values) @ GAUSS3.weights
