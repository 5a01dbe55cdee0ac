"""Compiled kernels: coupled-mode right-hand side and a Dormand-Prince 5(4)
stepper that lands exactly on a prescribed sample grid."""

import math

import numpy as np
from numba import njit

# coefficient vector layout
WP, WS, WI, KP, KS, KI, CLUB_P, CLUB_S, CLUB_I, D_DK, D_SELF, DK_L = range(12)
N_COEFF = 12

STATUS_OK = 0
STATUS_STIFF = 1
STATUS_NONFINITE = 2
STATUS_NONPOSITIVE = 3
STATUS_MAX_STEPS = 4


@njit(cache=True, nogil=True)
def rhs_kernel(y, c, out):
    xp, xs, xi, th = y[0], y[1], y[2], y[3]
    wp, ws, wi = c[WP], c[WS], c[WI]
    kp, ks, ki = c[KP], c[KS], c[KI]
    cp, cs, ci = c[CLUB_P], c[CLUB_S], c[CLUB_I]
    d_dk, d_self = c[D_DK], c[D_SELF]
    prod = kp * kp * ks * ki
    k_sum = ks + ki - kp
    sin_t = math.sin(th)
    cos_t = math.cos(th)
    xp2, xs2, xi2 = xp * xp, xs * xs, xi * xi

    out[0] = d_dk / (8.0 * wp * wp * cp) * prod * k_sum * xs * xi * xp * sin_t
    out[1] = d_dk / (16.0 * ws * ws * cs) * prod * (ki - 2.0 * kp) * xp2 * xi * sin_t
    out[2] = d_dk / (16.0 * wi * wi * ci) * prod * (ks - 2.0 * kp) * xp2 * xs * sin_t

    cross = d_dk * prod * xp2 * xs * xi / 16.0 * (
        4.0 * k_sum / (xp2 * wp * wp * cp)
        - (2.0 * kp - ki) / (xs2 * ws * ws * cs)
        - (2.0 * kp - ks) / (xi2 * wi * wi * ci)
    )
    kp2, ks2, ki2 = kp * kp, ks * ks, ki * ki
    spm_p = kp2 * kp * d_self / (8.0 * wp * wp * cp) * (kp2 * xp2 + 2.0 * ks2 * xs2 + 2.0 * ki2 * xi2)
    spm_s = ks2 * ks * d_self / (16.0 * ws * ws * cs) * (ks2 * xs2 + 2.0 * kp2 * xp2 + 2.0 * ki2 * xi2)
    spm_i = ki2 * ki * d_self / (16.0 * wi * wi * ci) * (ki2 * xi2 + 2.0 * kp2 * xp2 + 2.0 * ks2 * xs2)
    out[3] = c[DK_L] + cross * cos_t + spm_p - spm_s - spm_i


# Dormand-Prince 5(4) tableau
_C2, _C3, _C4, _C5 = 1.0 / 5.0, 3.0 / 10.0, 4.0 / 5.0, 8.0 / 9.0
_A21 = 1.0 / 5.0
_A31, _A32 = 3.0 / 40.0, 9.0 / 40.0
_A41, _A42, _A43 = 44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0
_A51, _A52, _A53, _A54 = 19372.0 / 6561.0, -25360.0 / 2187.0, 64448.0 / 6561.0, -212.0 / 729.0
_A61, _A62, _A63, _A64, _A65 = 9017.0 / 3168.0, -355.0 / 33.0, 46732.0 / 5247.0, 49.0 / 176.0, -5103.0 / 18656.0
_B1, _B3, _B4, _B5, _B6 = 35.0 / 384.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0
# 5th minus embedded 4th order weights
_E1 = 71.0 / 57600.0
_E3 = -71.0 / 16695.0
_E4 = 71.0 / 1920.0
_E5 = -17253.0 / 339200.0
_E6 = 22.0 / 525.0
_E7 = -1.0 / 40.0


@njit(cache=True, nogil=True)
def _err_norm(e, y, ynew, rtol, atol):
    acc = 0.0
    for j in range(4):
        sc = atol + rtol * max(abs(y[j]), abs(ynew[j]))
        acc += (e[j] / sc) ** 2
    return math.sqrt(acc / 4.0)


@njit(cache=True, nogil=True)
def _initial_step(y0, f0, c, rtol, atol, max_step):
    d0 = 0.0
    d1 = 0.0
    for j in range(4):
        sc = atol + rtol * abs(y0[j])
        d0 += (y0[j] / sc) ** 2
        d1 += (f0[j] / sc) ** 2
    d0 = math.sqrt(d0 / 4.0)
    d1 = math.sqrt(d1 / 4.0)
    if d0 < 1e-5 or d1 < 1e-5:
        h0 = 1e-6
    else:
        h0 = 0.01 * d0 / d1
    y1 = np.empty(4)
    f1 = np.empty(4)
    for j in range(4):
        y1[j] = y0[j] + h0 * f0[j]
    rhs_kernel(y1, c, f1)
    d2 = 0.0
    for j in range(4):
        sc = atol + rtol * abs(y0[j])
        d2 += ((f1[j] - f0[j]) / sc) ** 2
    d2 = math.sqrt(d2 / 4.0) / h0
    if max(d1, d2) <= 1e-15:
        h1 = max(1e-6, h0 * 1e-3)
    else:
        h1 = (0.01 / max(d1, d2)) ** 0.2
    return min(100.0 * h0, h1, max_step)


@njit(cache=True, nogil=True)
def integrate_kernel(c, y0, xs_out, rtol, atol, max_step, max_steps):
    """Integrate from xs_out[0] through every point of xs_out.

    Returns (samples, status, x_last_good, n_steps).
    """
    n = xs_out.shape[0]
    samples = np.zeros((n, 4))
    y = y0.copy()
    for j in range(4):
        samples[0, j] = y[j]
    k1 = np.empty(4)
    k2 = np.empty(4)
    k3 = np.empty(4)
    k4 = np.empty(4)
    k5 = np.empty(4)
    k6 = np.empty(4)
    k7 = np.empty(4)
    yt = np.empty(4)
    ynew = np.empty(4)
    err = np.empty(4)
    x = xs_out[0]
    rhs_kernel(y, c, k1)
    if n < 2:
        return samples, STATUS_OK, x, 0
    h = _initial_step(y, k1, c, rtol, atol, max_step)
    steps = 0
    idx = 1
    while idx < n:
        target = xs_out[idx]
        if steps >= max_steps:
            return samples, STATUS_MAX_STEPS, x, steps
        h_min = 1e-12 * max(1.0, abs(x))
        if h < h_min:
            return samples, STATUS_STIFF, x, steps
        hit = False
        h_free = h
        if x + h >= target - 1e-12 * max(1.0, abs(target)):
            h = target - x
            hit = True
        for j in range(4):
            yt[j] = y[j] + h * _A21 * k1[j]
        rhs_kernel(yt, c, k2)
        for j in range(4):
            yt[j] = y[j] + h * (_A31 * k1[j] + _A32 * k2[j])
        rhs_kernel(yt, c, k3)
        for j in range(4):
            yt[j] = y[j] + h * (_A41 * k1[j] + _A42 * k2[j] + _A43 * k3[j])
        rhs_kernel(yt, c, k4)
        for j in range(4):
            yt[j] = y[j] + h * (_A51 * k1[j] + _A52 * k2[j] + _A53 * k3[j] + _A54 * k4[j])
        rhs_kernel(yt, c, k5)
        for j in range(4):
            yt[j] = y[j] + h * (_A61 * k1[j] + _A62 * k2[j] + _A63 * k3[j] + _A64 * k4[j] + _A65 * k5[j])
        rhs_kernel(yt, c, k6)
        for j in range(4):
            ynew[j] = y[j] + h * (_B1 * k1[j] + _B3 * k3[j] + _B4 * k4[j] + _B5 * k5[j] + _B6 * k6[j])
        rhs_kernel(ynew, c, k7)
        for j in range(4):
            err[j] = h * (_E1 * k1[j] + _E3 * k3[j] + _E4 * k4[j] + _E5 * k5[j] + _E6 * k6[j] + _E7 * k7[j])
        en = _err_norm(err, y, ynew, rtol, atol)
        steps += 1
        if not math.isfinite(en):
            # retry smaller before declaring failure
            h *= 0.2
            continue
        if en <= 1.0:
            x = target if hit else x + h
            bad = False
            for j in range(4):
                if not math.isfinite(ynew[j]) or not math.isfinite(k7[j]):
                    bad = True
            if bad:
                return samples, STATUS_NONFINITE, x, steps
            for j in range(3):
                if ynew[j] <= 0.0:
                    return samples, STATUS_NONPOSITIVE, x, steps
            for j in range(4):
                y[j] = ynew[j]
                k1[j] = k7[j]
            if hit:
                for j in range(4):
                    samples[idx, j] = y[j]
                idx += 1
            fac = 10.0 if en == 0.0 else min(10.0, max(0.2, 0.9 * en ** -0.2))
            h = h * fac
            if hit:
                # clipping to the sample point is not an error signal
                h = max(h, h_free)
            h = min(h, max_step)
        else:
            h *= max(0.2, 0.9 * en ** -0.2)
    return samples, STATUS_OK, x, steps
