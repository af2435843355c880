"""Compiled twin of the numpy simulation path in :mod:`triwave.mc_engine`.

Importing this module requires numba; :func:`triwave.mc_engine.resolve_engine`
treats an ImportError here as "fall back to numpy".  Every arithmetic
expression mirrors the vectorized implementation token for token -- the two
engines must produce bit-identical streams, so any edit here needs the same
edit there (and vice versa).
"""

from __future__ import annotations

import math

import numpy as np
from numba import njit

from .mc_engine import (ACKLAM_A, ACKLAM_B, ACKLAM_C, ACKLAM_D, DIM_FLOOR_M,
                        DRAW_STRIDE, P_LOW, REGION_STRIDE, TRIAL_STRIDE,
                        _STIR, StripSpec)

_M1 = np.uint64(TRIAL_STRIDE)
_M2 = np.uint64(REGION_STRIDE)
_M3 = np.uint64(DRAW_STRIDE)
_F1 = np.uint64(0xBF58476D1CE4E5B9)
_F2 = np.uint64(0x94D049BB133111EB)
_STIR_U = np.uint64(_STIR)
_S30 = np.uint64(30)
_S27 = np.uint64(27)
_S31 = np.uint64(31)
_S11 = np.uint64(11)
_U0 = np.uint64(0)
_TWO_NEG53 = 2.0 ** -53

_A0, _A1, _A2, _A3, _A4, _A5 = ACKLAM_A
_B0, _B1, _B2, _B3, _B4 = ACKLAM_B
_C0, _C1, _C2, _C3, _C4, _C5 = ACKLAM_C
_D0, _D1, _D2, _D3 = ACKLAM_D
_P_HIGH = 1.0 - P_LOW


@njit(cache=True)
def _u01(seed, t, r, i):
    z = seed ^ (t * _M1) ^ (r * _M2) ^ (i * _M3)
    z = (z ^ (z >> _S30)) * _F1
    z = (z ^ (z >> _S27)) * _F2
    z = z ^ (z >> _S31)
    z = z ^ _STIR_U
    z = (z ^ (z >> _S30)) * _F1
    z = (z ^ (z >> _S27)) * _F2
    z = z ^ (z >> _S31)
    return (np.float64(z >> _S11) + 0.5) * _TWO_NEG53


@njit(cache=True)
def _ninv(p):
    if p < P_LOW:
        q = math.sqrt(-2.0 * math.log(p))
        num = ((((_C0 * q + _C1) * q + _C2) * q + _C3) * q + _C4) * q + _C5
        den = (((_D0 * q + _D1) * q + _D2) * q + _D3) * q + 1.0
        return num / den
    if p > _P_HIGH:
        q = math.sqrt(-2.0 * math.log(1.0 - p))
        num = ((((_C0 * q + _C1) * q + _C2) * q + _C3) * q + _C4) * q + _C5
        den = (((_D0 * q + _D1) * q + _D2) * q + _D3) * q + 1.0
        return -(num / den)
    q = p - 0.5
    r = q * q
    num = (((((_A0 * r + _A1) * r + _A2) * r + _A3) * r + _A4) * r + _A5) * q
    den = ((((_B0 * r + _B1) * r + _B2) * r + _B3) * r + _B4) * r + 1.0
    return num / den


@njit(cache=True, nogil=True)
def _count_range(seed, t0, t1, n_regions, cdf, xmax, band_h, inv_band_h,
                 inv_tan, tan_t, tan_tg, dist_d, h_lo, h_hi,
                 mu_w, sd_w, mu_l, sd_l, mu_h, sd_h):
    last = cdf.shape[0] - 1
    hits = 0
    for t in range(t0, t1):
        tu = np.uint64(t)
        trial_hit = False
        for r in range(n_regions):
            ru = np.uint64(r)
            u0 = _u01(seed, tu, ru, _U0)
            k = 0
            while k < last and u0 > cdf[k]:
                k += 1
            for i in range(k):
                base = 1 + 5 * i
                x = _u01(seed, tu, ru, np.uint64(base)) * xmax
                y = _u01(seed, tu, ru, np.uint64(base + 1)) * band_h
                w = mu_w + sd_w * _ninv(_u01(seed, tu, ru, np.uint64(base + 2)))
                if w < DIM_FLOOR_M:
                    w = DIM_FLOOR_M
                l = mu_l + sd_l * _ninv(_u01(seed, tu, ru, np.uint64(base + 3)))
                if l < DIM_FLOOR_M:
                    l = DIM_FLOOR_M
                h = mu_h + sd_h * _ninv(_u01(seed, tu, ru, np.uint64(base + 4)))
                if not (h_lo < h and h <= h_hi):
                    continue
                xi = x - y * inv_tan
                s2 = tan_tg * (tan_t * w - 0.25 * (w * w))
                member = False
                if s2 < 0.0:
                    member = ((-s2) * inv_band_h <= xi) and (xi <= l)
                else:
                    if (0.0 <= xi) and (xi <= l):
                        member = True
                    else:
                        a = 4.0 * s2 * inv_band_h
                        cx0 = l + dist_d + 1.0
                        if ((a > 0.0) and (cx0 <= x) and (x <= cx0 + a)
                                and (y <= 0.5 * band_h
                                     * (1.0 - (x - cx0) / a))):
                            member = True
                if member:
                    trial_hit = True
                    break
            if trial_hit:
                break
        if trial_hit:
            hits += 1
    return hits


def make_runner(spec: StripSpec, seed: int):
    """Bind a spec to the compiled kernel; returns runner(t0, t1) -> hits."""
    seed_u = np.uint64(seed)
    cdf = np.ascontiguousarray(spec.poisson_cdf, dtype=np.float64)

    def runner(t0: int, t1: int) -> int:
        return int(_count_range(
            seed_u, t0, t1, spec.n_regions, cdf, spec.xmax,
            spec.band_height, spec.inv_band_height, spec.inv_tan_theta,
            spec.tan_theta, spec.tan_theta_gamma, spec.spacing_d,
            spec.height_lo, spec.height_hi,
            spec.width_mean, spec.width_std,
            spec.length_mean, spec.length_std,
            spec.height_mean, spec.height_std))

    return runner
