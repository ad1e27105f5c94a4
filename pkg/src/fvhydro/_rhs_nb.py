"""Numba fast path for the periodic right-hand-side face sweep.

Mirrors the numpy composition in scheme.SolverContext (traces, velocity
guards, hydrostatic states, numerical flux with folded corrections, source
correction) in one pass.  Kept in lockstep with the numpy path by a parity
test.
"""

import math

import numpy as np
from numba import njit

_TWO_PI = 2.0 * math.pi
_LOG_FLOOR = 1e-300
_EXP_CAP = 700.0


@njit(cache=True)
def _pi_prime(x, m, c_p):
    if m == 1.0:
        return c_p * math.log(max(x, _LOG_FLOOR))
    return c_p * (m / (m - 1.0)) * x ** (m - 1.0)


@njit(cache=True)
def _xi(s, m, c_p):
    if m == 1.0:
        return math.exp(min(s / c_p, _EXP_CAP))
    arg = max(s, 0.0) * ((m - 1.0) / (m * c_p))
    return arg ** (1.0 / (m - 1.0))


@njit(cache=True)
def _kinetic_half(rho, u, p, dry):
    if rho <= dry:
        return 0.0, 0.0
    c = math.sqrt(p / rho)
    t = -u / c
    if t < -2.0:
        t = -2.0
    elif t > 2.0:
        t = 2.0
    root = math.sqrt(max(4.0 - t * t, 0.0))
    asn = math.asin(0.5 * t)
    n0 = (math.pi - 0.5 * t * root - 2.0 * asn) / _TWO_PI
    n1 = root * root * root / (6.0 * math.pi)
    n2 = (math.pi - 2.0 * asn + 0.125 * t * (4.0 - 2.0 * t * t) * root) / _TWO_PI
    f1 = rho * (u * n0 + c * n1)
    f2 = rho * u * u * n0 + 2.0 * rho * u * c * n1 + p * n2
    return f1, f2


@njit(cache=True)
def rhs_core(rho, mom, kk, vals_rho, vals_mom, vals_k, lf, rf,
             rich_pts, rich_len, rich_coef, m, c_p, dry_dyn, skirt_dry,
             headroom, kinetic, flux_dry, dx):
    """Periodic face sweep; returns (drho, dmom, max trace signal speed)."""
    n = rho.shape[0]

    # cell signal envelope from bulk cells only
    env = np.empty(n)
    for i in range(n):
        r = rho[i] if rho[i] > 0.0 else 0.0
        u_abs = abs(mom[i]) / r if r > skirt_dry else 0.0
        if m == 1.0:
            cspd = math.sqrt(c_p)
        else:
            cspd = math.sqrt(c_p * m * r ** (m - 1.0))
        env[i] = headroom * (u_abs + cspd)

    g1 = np.empty(n)
    a_minus = np.empty(n)
    a_plus = np.empty(n)
    speed = 0.0
    for f in range(n):
        il = f
        ir = f + 1 if f + 1 < n else 0
        rho_l = vals_rho[il, rf]
        rho_r = vals_rho[ir, lf]
        mom_l = vals_mom[il, rf]
        mom_r = vals_mom[ir, lf]
        k_l = vals_k[il, rf]
        k_r = vals_k[ir, lf]

        bound = env[il] if env[il] > env[ir] else env[ir]
        u_l = mom_l / rho_l if rho_l > dry_dyn else 0.0
        if u_l > bound:
            u_l = bound
        elif u_l < -bound:
            u_l = -bound
        u_r = mom_r / rho_r if rho_r > dry_dyn else 0.0
        if u_r > bound:
            u_r = bound
        elif u_r < -bound:
            u_r = -bound

        h_l = k_l - _pi_prime(max(rho_l, 0.0), m, c_p)
        h_r = k_r - _pi_prime(max(rho_r, 0.0), m, c_p)
        h_mid = h_l if h_l > h_r else h_r
        rho_hr_l = _xi(k_l - h_mid, m, c_p)
        rho_hr_r = _xi(k_r - h_mid, m, c_p)
        p_hr_l = c_p * rho_hr_l if m == 1.0 else c_p * rho_hr_l**m
        p_hr_r = c_p * rho_hr_r if m == 1.0 else c_p * rho_hr_r**m

        if kinetic:
            fp1, fp2 = _kinetic_half(rho_hr_l, u_l, p_hr_l, flux_dry)
            fm1, fm2 = _kinetic_half(rho_hr_r, -u_r, p_hr_r, flux_dry)
            flux1 = fp1 - fm1
            flux2 = fp2 + fm2
            s_l = abs(u_l)
            s_r = abs(u_r)
            s = (s_l if s_l > s_r else s_r) + 3.0 ** ((m - 1.0) * 0.25)
        else:
            mom_hr_l = rho_hr_l * u_l
            mom_hr_r = rho_hr_r * u_r
            rl = rho_hr_l if rho_hr_l > 0.0 else 0.0
            rr = rho_hr_r if rho_hr_r > 0.0 else 0.0
            if m == 1.0:
                cl = math.sqrt(c_p)
                cr = cl
            else:
                cl = math.sqrt(c_p * m * rl ** (m - 1.0))
                cr = math.sqrt(c_p * m * rr ** (m - 1.0))
            lam_l = abs(u_l) + cl
            lam_r = abs(u_r) + cr
            lam = lam_l if lam_l > lam_r else lam_r
            flux1 = 0.5 * (mom_hr_l + mom_hr_r - lam * (rho_hr_r - rho_hr_l))
            flux2 = 0.5 * ((mom_hr_l * u_l + p_hr_l) + (mom_hr_r * u_r + p_hr_r)
                           - lam * (mom_hr_r - mom_hr_l))
            # dt bound uses the raw trace densities, not the hydrostatic ones
            if m == 1.0:
                tl = abs(u_l) + math.sqrt(c_p)
                tr = abs(u_r) + math.sqrt(c_p)
            else:
                tl = abs(u_l) + math.sqrt(c_p * m * max(rho_l, 0.0) ** (m - 1.0))
                tr = abs(u_r) + math.sqrt(c_p * m * max(rho_r, 0.0) ** (m - 1.0))
            s = tl if tl > tr else tr
        if s > speed:
            speed = s

        g1[f] = flux1
        a_minus[f] = flux2 - p_hr_l
        a_plus[f] = flux2 - p_hr_r

    drho = np.empty(n)
    dmom = np.empty(n)
    n_rules = rich_len.shape[0]
    for i in range(n):
        fl = i - 1 if i > 0 else n - 1
        drho[i] = -(g1[i] - g1[fl]) / dx
        dm = -(a_minus[i] - a_plus[fl]) / dx
        if n_rules > 0:
            src = 0.0
            for r in range(n_rules):
                acc = 0.0
                for j in range(rich_len[r] - 1):
                    ja = rich_pts[r, j]
                    jb = rich_pts[r, j + 1]
                    acc += 0.5 * (vals_rho[i, ja] + vals_rho[i, jb]) * (vals_k[i, jb] - vals_k[i, ja])
                src += rich_coef[r] * acc
            dm -= src / dx
        dmom[i] = dm
    return drho, dmom, speed
