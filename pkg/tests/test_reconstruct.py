"""CWENO reconstructions, the nonnegativity limiter and R_H."""

import math

import numpy as np
import pytest

from fvhydro.freeenergy import PressureLaw
from fvhydro.quadrature import GAUSS3
from fvhydro.reconstruct import (
    CellPolynomial,
    cweno3,
    cweno5,
    eval_at_offsets,
    eval_points,
    limit_polynomial,
    positivity_limit,
    reconstruct_H,
    reconstruct_batch,
)


def sin_cell_averages(n, x_left=0.0, x_right=2.0 * math.pi):
    edges = np.linspace(x_left, x_right, n + 1)
    dx = edges[1] - edges[0]
    avg = (np.cos(edges[:-1]) - np.cos(edges[1:])) / dx
    return avg, dx, 0.5 * (edges[:-1] + edges[1:])


def reconstruction_error(order, n):
    avg, dx, centers = sin_cell_averages(n)
    gpad = np.concatenate([avg[-2:], avg, avg[:2]])
    coeffs = reconstruct_batch(gpad, dx, order)
    vals = eval_at_offsets(coeffs, GAUSS3.offsets, dx)
    exact = np.sin(centers[:, None] + GAUSS3.offsets[None, :] * dx)
    return np.abs(vals - exact).max()


class TestCweno3:
    def test_constant_data_reproduced(self):
        for c in (0.0, 1.0, -3.7, 1e6):
            poly = cweno3(np.full(5, c), dx=0.3)
            xs = np.linspace(-0.15, 0.15, 7)
            assert poly(xs) == pytest.approx(c, rel=1e-14, abs=1e-14)

    def test_linear_data_reproduced(self):
        a, b, dx = 0.8, -1.4, 0.25
        centers = np.arange(-2, 3) * dx
        poly = cweno3(a + b * centers, dx=dx)
        xs = np.linspace(-dx / 2, dx / 2, 9)
        assert poly(xs) == pytest.approx(a + b * xs, abs=1e-12)

    def test_smooth_convergence_order(self):
        errs = [reconstruction_error(3, n) for n in (20, 40, 80, 160, 320)]
        mean_slope = math.log2(errs[0] / errs[-1]) / 4
        assert mean_slope >= 2.7

    def test_conservation(self, rng):
        for _ in range(50):
            stencil = rng.uniform(-2, 2, size=5)
            poly = cweno3(stencil, dx=0.4)
            assert poly.cell_average() == pytest.approx(stencil[2], rel=1e-12, abs=1e-12)


class TestCweno5:
    def test_constant_data_reproduced(self):
        for c in (0.0, 2.5, -1e3):
            poly = cweno5(np.full(5, c), dx=0.2)
            xs = np.linspace(-0.1, 0.1, 7)
            assert poly(xs) == pytest.approx(c, rel=1e-14, abs=1e-14)

    def test_quartic_data_reproduced(self):
        # gentle quartic on a fine cell: weights sit at their ideal values and
        # the optimal polynomial is exact on quartics
        dx = 1e-3
        q = np.polynomial.Polynomial([0.3, 0.5, -0.2, 0.1, 0.05])
        qint = q.integ()
        centers = np.arange(-2, 3) * dx
        avgs = np.array([(qint(c + dx / 2) - qint(c - dx / 2)) / dx for c in centers])
        poly = cweno5(avgs, dx=dx)
        xs = np.linspace(-dx / 2, dx / 2, 11)
        assert poly(xs) == pytest.approx(q(xs), abs=1e-10)

    def test_smooth_convergence_order(self):
        errs = [reconstruction_error(5, n) for n in (20, 40, 80, 160, 320)]
        mean_slope = math.log2(errs[0] / errs[-1]) / 4
        assert mean_slope >= 4.5

    def test_conservation(self, rng):
        for _ in range(50):
            stencil = rng.uniform(-2, 2, size=5)
            poly = cweno5(stencil, dx=0.15)
            assert poly.cell_average() == pytest.approx(stencil[2], rel=1e-12, abs=1e-12)


class TestWeights:
    def test_cweno3_weights_normalized_and_nonnegative(self, rng):
        from fvhydro._cweno_np import C3, EPS_WENO, P3

        for _ in range(100):
            g = rng.uniform(-1, 1, size=5)
            smooth = (
                13 / 12 * (g[0] - 2 * g[1] + g[2]) ** 2 + 0.25 * (g[0] - 4 * g[1] + 3 * g[2]) ** 2,
                13 / 12 * (g[1] - 2 * g[2] + g[3]) ** 2 + 0.25 * (g[1] - g[3]) ** 2,
                13 / 12 * (g[2] - 2 * g[3] + g[4]) ** 2 + 0.25 * (3 * g[2] - 4 * g[3] + g[4]) ** 2,
            )
            alpha = [c / (EPS_WENO + isk) ** P3 for c, isk in zip(C3, smooth)]
            w = np.array(alpha) / sum(alpha)
            assert w.sum() == pytest.approx(1.0, abs=1e-14)
            assert np.all(w >= 0.0)

    def test_ideal_weights_sum_to_one(self):
        from fvhydro._cweno_np import C3, C5

        assert sum(C3) == pytest.approx(1.0, abs=0)
        assert sum(C5) == pytest.approx(1.0, abs=0)


class TestPositivityLimiter:
    def test_untouched_when_min_nonnegative(self):
        coeffs = np.array([[1.0, 0.2, 0.1, 0.0, 0.0]])
        vals = eval_at_offsets(coeffs, np.linspace(-0.5, 0.5, 5), 1.0)
        before = coeffs.copy()
        out, _, theta = positivity_limit(coeffs, vals, np.array([1.0]))
        assert theta[0] == 1.0
        assert np.array_equal(out, before)

    def test_scaling_hits_zero_at_former_minimum(self):
        # average 1, minimum -1 somewhere: theta = 1/2 and the limited value
        # at the former minimum is exactly zero
        poly = CellPolynomial(0.0, np.array([1.0, 0.0, 0.0]), 1.0)
        offsets = np.array([-0.5, 0.0, 0.5])
        coeffs = np.array([[1.0, 0.0, -8.0, 0.0, 0.0]])  # value at +-1/2: 1-2 = -1
        vals = eval_at_offsets(coeffs, offsets, 1.0)
        assert vals.min() == -1.0
        out, new_vals, theta = positivity_limit(coeffs, vals, np.array([1.0]))
        assert theta[0] == pytest.approx(0.5, abs=0)
        assert new_vals.min() == pytest.approx(0.0, abs=1e-16)

    def test_vacuum_average_collapses_to_zero(self):
        coeffs = np.array([[0.0, 1.0, 0.0, 0.0, 0.0]])
        vals = eval_at_offsets(coeffs, np.array([-0.5, 0.5]), 1.0)
        out, new_vals, theta = positivity_limit(coeffs, vals, np.array([0.0]))
        assert theta[0] == 0.0
        assert new_vals == pytest.approx(0.0, abs=0)

    def test_average_preserved_and_deviation_shrinks(self, rng):
        for _ in range(50):
            stencil = rng.uniform(0.0, 1.0, size=5)
            stencil[2] = rng.uniform(0.0, 0.2)
            poly = cweno5(stencil, dx=0.3)
            pts = np.linspace(-0.5, 0.5, 9)
            limited = limit_polynomial(poly, stencil[2], pts)
            assert limited.cell_average() == pytest.approx(poly.cell_average(), abs=1e-13)
            x = pts * 0.3
            assert np.all(np.abs(limited(x) - stencil[2]) <= np.abs(poly(x) - stencil[2]) + 1e-15)

    def test_negative_average_rejected(self):
        coeffs = np.zeros((1, 5))
        vals = np.zeros((1, 2))
        with pytest.raises(ValueError):
            positivity_limit(coeffs, vals, np.array([-0.1]))


class TestReconstructH:
    def test_steady_identity_constant_k(self, rng):
        # discrete steady data: K constant; Pi'(R_rho) + R_H == C pointwise
        law = PressureLaw(1.0, 1.0)
        c = 0.7
        for _ in range(20):
            stencil = rng.uniform(0.5, 2.0, size=5)
            r_rho = cweno3(stencil, dx=0.2)
            r_k = cweno3(np.full(5, c), dx=0.2)
            r_h = reconstruct_H(r_k, r_rho, law)
            xs = np.linspace(-0.1, 0.1, 9)
            recombined = law.pi_prime(r_rho(xs)) + r_h(xs)
            assert np.abs(recombined - c).max() <= 5e-13

    def test_approximates_potential(self):
        # rho from a known steady profile: R_H should reproduce V to
        # reconstruction accuracy
        law = PressureLaw(1.0, 1.0)
        dx = 0.05
        centers = np.arange(-2, 3) * dx + 0.3
        v = lambda x: 0.5 * x * x

        def avg(fn):
            return np.array([GAUSS3.weights @ fn(c + GAUSS3.offsets * dx) for c in centers])

        rho_avg = avg(lambda x: np.exp(-v(x)))
        k_avg = avg(lambda x: np.log(np.exp(-v(x))) + v(x))
        r_rho = cweno3(rho_avg, dx=dx, center=0.3)
        r_k = cweno3(k_avg, dx=dx, center=0.3)
        r_h = reconstruct_H(r_k, r_rho, law)
        xs = 0.3 + np.linspace(-dx / 2, dx / 2, 5)
        assert r_h(xs) == pytest.approx(v(xs), abs=5e-6)

    def test_zero_potential_constant_density(self):
        law = PressureLaw(1.0, 1.0)
        r_rho = cweno3(np.full(5, 2.0), dx=0.1)
        r_k = cweno3(np.full(5, float(law.pi_prime(2.0))), dx=0.1)
        r_h = reconstruct_H(r_k, r_rho, law)
        assert abs(float(r_h(0.02))) < 1e-13


class TestEvalPoints:
    @pytest.mark.parametrize("order,count", [(3, 5), (5, 7)])
    def test_counts_and_bounds(self, order, count):
        pts = eval_points(order)
        assert pts.count == count
        assert pts.offsets[0] == -0.5 and pts.offsets[-1] == 0.5
        assert np.all(np.diff(pts.offsets) > 0)
        assert len(pts.gauss) == 3

    def test_richardson_indices_reference_union(self):
        pts = eval_points(5)
        for idx in pts.richardson:
            assert idx[0] == pts.left_face and idx[-1] == pts.right_face
