"""Vectorized numpy implementation of the CWENO reconstruction kernels.

Both backends return, for every interior cell, the coefficients of the
reconstruction polynomial in powers of (x - x_i), padded to 5 slots.
Input arrays carry two ghost cells per side.
"""

import numpy as np

EPS_WENO = 1e-6
C3 = (3.0 / 16.0, 5.0 / 8.0, 3.0 / 16.0)      # ideal weights, third order
P3 = 3
C5 = (1.0 / 8.0, 1.0 / 4.0, 1.0 / 8.0, 1.0 / 2.0)  # ideal weights, fifth order
P5 = 2
_DENOM_FLOOR = 1e-300


def cweno3_coeffs(gpad: np.ndarray, dx: float) -> np.ndarray:
    """Third-order central WENO coefficients for all interior cells.

    Blends the three neighbouring cell-centred parabolas (each built from a
    3-cell average stencil) with nonlinear weights driven by the classic
    smoothness indicators.
    """
    n = len(gpad) - 4
    gm2, gm1, g0, gp1, gp2 = (gpad[k:k + n] for k in range(5))
    h = dx

    coeffs = np.zeros((n, 5))
    num0 = np.zeros(n)
    num1 = np.zeros(n)
    num2 = np.zeros(n)
    wsum = np.zeros(n)

    triples = ((-1.0, gm2, gm1, g0), (0.0, gm1, g0, gp1), (1.0, g0, gp1, gp2))
    smooth = (
        13.0 / 12.0 * (gm2 - 2.0 * gm1 + g0) ** 2 + 0.25 * (gm2 - 4.0 * gm1 + 3.0 * g0) ** 2,
        13.0 / 12.0 * (gm1 - 2.0 * g0 + gp1) ** 2 + 0.25 * (gm1 - gp1) ** 2,
        13.0 / 12.0 * (g0 - 2.0 * gp1 + gp2) ** 2 + 0.25 * (3.0 * g0 - 4.0 * gp1 + gp2) ** 2,
    )
    for (k, a, mid, b), isk, ck in zip(triples, smooth, C3):
        t = mid - (a - 2.0 * mid + b) / 24.0
        tp = (b - a) / (2.0 * h)
        tpp = (b - 2.0 * mid + a) / (h * h)
        alpha = ck / (EPS_WENO + isk) ** P3
        num0 += alpha * (t - k * h * tp + 0.5 * (k * h) ** 2 * tpp)
        num1 += alpha * (tp - k * h * tpp)
        num2 += alpha * (0.5 * tpp)
        wsum += alpha
    coeffs[:, 0] = num0 / wsum
    coeffs[:, 1] = num1 / wsum
    coeffs[:, 2] = num2 / wsum
    return coeffs


def reconstruct_eval(gpad: np.ndarray, dx: float, order: int, offsets: np.ndarray,
                     limit: bool, avgs: np.ndarray):
    """Fused per-field unit: coefficients, point values at physical offsets,
    and (optionally) the nonnegativity rescaling toward the cell averages.

    Returns (coeffs (n,5), vals (n,P), theta (n,)).
    """
    n = len(gpad) - 4
    if order == 1:
        coeffs = np.zeros((n, 5))
        coeffs[:, 0] = gpad[2:-2]
    elif order == 3:
        coeffs = cweno3_coeffs(gpad, dx)
    else:
        coeffs = cweno5_coeffs(gpad, dx)
    vander = np.vander(offsets, N=5, increasing=True)
    vals = coeffs @ vander.T
    theta = np.ones(n)
    if limit:
        mins = vals.min(axis=1)
        bad = mins < 0.0
        if np.any(bad):
            span = avgs[bad] - mins[bad]
            theta[bad] = np.where(span > 0.0, avgs[bad] / span, 0.0)
            coeffs[bad, 1:] *= theta[bad, None]
            coeffs[bad, 0] = theta[bad] * (coeffs[bad, 0] - avgs[bad]) + avgs[bad]
            vals[bad] = theta[bad, None] * (vals[bad] - avgs[bad, None]) + avgs[bad, None]
    return coeffs, vals, theta


def cweno5_coeffs(gpad: np.ndarray, dx: float) -> np.ndarray:
    """Fifth-order central WENO coefficients for all interior cells.

    Combines the optimal 5-cell quartic with three parabolas and the residual
    central polynomial g_c = (g_opt - sum C_k g_k) / C_c; equivalent to the
    weighted sum with weights w_k in place of the ideal C_k.
    """
    n = len(gpad) - 4
    gm2, gm1, g0, gp1, gp2 = (gpad[k:k + n] for k in range(5))
    h = dx
    h2, h3, h4 = h * h, h ** 3, h ** 4

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

    den1 = np.maximum((EPS_WENO + is1) ** P5, _DENOM_FLOOR)
    den2 = np.maximum((EPS_WENO + is2) ** P5, _DENOM_FLOOR)
    den3 = np.maximum((EPS_WENO + is3) ** P5, _DENOM_FLOOR)
    den4 = np.maximum((EPS_WENO + is4) ** P5, _DENOM_FLOOR)
    al1, al2, al3, alc = C5[0] / den1, C5[1] / den2, C5[2] / den3, C5[3] / den4
    asum = al1 + al2 + al3 + alc
    w1, w2, w3, wc = al1 / asum, al2 / asum, al3 / asum, alc / asum

    # residual polynomial coefficients, degree 4
    rc = wc / C5[3]
    e1 = a1 - C5[0] * b1 - C5[1] * c1 - C5[2] * d1
    e2 = a2 - C5[0] * b2 - C5[1] * c2 - C5[2] * d2
    e3 = a3 - C5[0] * b3 - C5[1] * c3 - C5[2] * d3

    coeffs = np.zeros((n, 5))
    coeffs[:, 0] = w1 * b1 + w2 * c1 + w3 * d1 + rc * e1
    coeffs[:, 1] = w1 * b2 + w2 * c2 + w3 * d2 + rc * e2
    coeffs[:, 2] = w1 * b3 + w2 * c3 + w3 * d3 + rc * e3
    coeffs[:, 3] = rc * a4
    coeffs[:, 4] = rc * a5
    return coeffs
