"""Numba-compiled CWENO kernels, loop-for-loop equivalents of _cweno_np."""

import numpy as np
from numba import njit

from ._cweno_np import C3, C5, EPS_WENO, _DENOM_FLOOR

_C3M1, _C30, _C3P1 = C3
_C51, _C52, _C53, _C5C = C5


@njit(cache=True)
def cweno3_coeffs(gpad, dx):
    n = len(gpad) - 4
    h = dx
    coeffs = np.zeros((n, 5))
    for i in range(n):
        gm2, gm1, g0, gp1, gp2 = gpad[i], gpad[i + 1], gpad[i + 2], gpad[i + 3], gpad[i + 4]
        is_m = 13.0 / 12.0 * (gm2 - 2.0 * gm1 + g0) ** 2 + 0.25 * (gm2 - 4.0 * gm1 + 3.0 * g0) ** 2
        is_0 = 13.0 / 12.0 * (gm1 - 2.0 * g0 + gp1) ** 2 + 0.25 * (gm1 - gp1) ** 2
        is_p = 13.0 / 12.0 * (g0 - 2.0 * gp1 + gp2) ** 2 + 0.25 * (3.0 * g0 - 4.0 * gp1 + gp2) ** 2

        num0 = 0.0
        num1 = 0.0
        num2 = 0.0
        wsum = 0.0
        for k in range(-1, 2):
            if k == -1:
                a, mid, b = gm2, gm1, g0
                alpha = _C3M1 / (EPS_WENO + is_m) ** 3
            elif k == 0:
                a, mid, b = gm1, g0, gp1
                alpha = _C30 / (EPS_WENO + is_0) ** 3
            else:
                a, mid, b = g0, gp1, gp2
                alpha = _C3P1 / (EPS_WENO + is_p) ** 3
            t = mid - (a - 2.0 * mid + b) / 24.0
            tp = (b - a) / (2.0 * h)
            tpp = (b - 2.0 * mid + a) / (h * h)
            kh = k * h
            num0 += alpha * (t - kh * tp + 0.5 * kh * kh * tpp)
            num1 += alpha * (tp - kh * tpp)
            num2 += alpha * (0.5 * tpp)
            wsum += alpha
        coeffs[i, 0] = num0 / wsum
        coeffs[i, 1] = num1 / wsum
        coeffs[i, 2] = num2 / wsum
    return coeffs


@njit(cache=True)
def reconstruct_eval(gpad, dx, order, offsets, limit, avgs):
    n = len(gpad) - 4
    if order == 1:
        coeffs = np.zeros((n, 5))
        for i in range(n):
            coeffs[i, 0] = gpad[i + 2]
    elif order == 3:
        coeffs = cweno3_coeffs(gpad, dx)
    else:
        coeffs = cweno5_coeffs(gpad, dx)
    p = len(offsets)
    vals = np.empty((n, p))
    theta = np.ones(n)
    for i in range(n):
        c0, c1, c2, c3, c4 = coeffs[i, 0], coeffs[i, 1], coeffs[i, 2], coeffs[i, 3], coeffs[i, 4]
        for j in range(p):
            s = offsets[j]
            vals[i, j] = c0 + s * (c1 + s * (c2 + s * (c3 + s * c4)))
    if limit:
        for i in range(n):
            mn = vals[i, 0]
            for j in range(1, p):
                if vals[i, j] < mn:
                    mn = vals[i, j]
            if mn < 0.0:
                span = avgs[i] - mn
                th = avgs[i] / span if span > 0.0 else 0.0
                theta[i] = th
                for k in range(1, 5):
                    coeffs[i, k] *= th
                coeffs[i, 0] = th * (coeffs[i, 0] - avgs[i]) + avgs[i]
                for j in range(p):
                    vals[i, j] = th * (vals[i, j] - avgs[i]) + avgs[i]
    return coeffs, vals, theta


@njit(cache=True)
def cweno5_coeffs(gpad, dx):
    n = len(gpad) - 4
    h = dx
    h2 = h * h
    h3 = h2 * h
    h4 = h2 * h2
    coeffs = np.zeros((n, 5))
    for i in range(n):
        gm2, gm1, g0, gp1, gp2 = gpad[i], gpad[i + 1], gpad[i + 2], gpad[i + 3], gpad[i + 4]

        a1 = 1067.0 / 960.0 * g0 - 29.0 / 480.0 * (gp1 + gm1) + 3.0 / 640.0 * (gp2 + gm2)
        a2 = (34.0 * (gp1 - gm1) + 5.0 * (gm2 - gp2)) / (48.0 * h)
        a3 = (gm2 + 22.0 * g0 + gp2 - 12.0 * (gp1 + gm1)) / (-16.0 * h2)
        a4 = (2.0 * (gp1 - gm1) + (gm2 - gp2)) / (-12.0 * h3)
        a5 = (gm2 + 6.0 * g0 + gp2 - 4.0 * (gp1 + gm1)) / (24.0 * h4)

        b1 = 23.0 / 24.0 * g0 + (gm1 - 0.5 * gm2) / 12.0
        b2 = (3.0 * g0 - 4.0 * gm1 + gm2) / (2.0 * h)
        b3 = (g0 - 2.0 * gm1 + gm2) / (2.0 * h2)

        c1 = 13.0 / 12.0 * g0 - (gm1 + gp1) / 24.0
        c2 = (gp1 - gm1) / (2.0 * h)
        c3 = (gp1 - 2.0 * g0 + gm1) / (2.0 * h2)

        d1 = 23.0 / 24.0 * g0 + (gp1 - 0.5 * gp2) / 12.0
        d2 = (3.0 * g0 - 4.0 * gp1 + gp2) / (-2.0 * h)
        d3 = (g0 - 2.0 * gp1 + gp2) / (2.0 * h2)

        is1 = b2 * b2 * h2 + 13.0 / 3.0 * b3 * b3 * h4
        is2 = c2 * c2 * h2 + 13.0 / 3.0 * c3 * c3 * h4
        is3 = d2 * d2 * h2 + 13.0 / 3.0 * d3 * d3 * h4
        is4 = a2 * a2 * h2 + (13.0 / 3.0 * a3 * a3 + 0.5 * a2 * a4) * h4

        den1 = max((EPS_WENO + is1) ** 2, _DENOM_FLOOR)
        den2 = max((EPS_WENO + is2) ** 2, _DENOM_FLOOR)
        den3 = max((EPS_WENO + is3) ** 2, _DENOM_FLOOR)
        den4 = max((EPS_WENO + is4) ** 2, _DENOM_FLOOR)
        al1 = _C51 / den1
        al2 = _C52 / den2
        al3 = _C53 / den3
        alc = _C5C / den4
        asum = al1 + al2 + al3 + alc
        w1 = al1 / asum
        w2 = al2 / asum
        w3 = al3 / asum
        wc = alc / asum

        rc = wc / _C5C
        e1 = a1 - _C51 * b1 - _C52 * c1 - _C53 * d1
        e2 = a2 - _C51 * b2 - _C52 * c2 - _C53 * d2
        e3 = a3 - _C51 * b3 - _C52 * c3 - _C53 * d3

        coeffs[i, 0] = w1 * b1 + w2 * c1 + w3 * d1 + rc * e1
        coeffs[i, 1] = w1 * b2 + w2 * c2 + w3 * d2 + rc * e2
        coeffs[i, 2] = w1 * b3 + w2 * c3 + w3 * d3 + rc * e3
        coeffs[i, 3] = rc * a4
        coeffs[i, 4] = rc * a5
    return coeffs
