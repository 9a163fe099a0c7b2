"""Numba synthesis kernel: scalar per-trial loops, no allocations in the hot
path. Arithmetic mirrors _rng/_mc_numpy exactly (same counter scheme, same
inverse-normal rational fits) so the two backends are interchangeable."""

from __future__ import annotations

import math

import numpy as np

from ._rng import _PA, _PB, _PC, _PD, _PE, _PF

try:
    from numba import njit

    NUMBA_OK = True
except ImportError:  # pragma: no cover - exercised only without numba
    NUMBA_OK = False

    def njit(*args, **kwargs):  # minimal stand-in so the module imports
        def wrap(fn):
            return fn

        return wrap


@njit(cache=True)
def _philox4(c0, c1, c2, c3, k0, k1):
    for _ in range(10):
        p0 = np.uint64(0xD2511F53) * np.uint64(c0)
        p1 = np.uint64(0xCD9E8D57) * np.uint64(c2)
        hi0 = np.uint32(p0 >> np.uint64(32))
        lo0 = np.uint32(p0 & np.uint64(0xFFFFFFFF))
        hi1 = np.uint32(p1 >> np.uint64(32))
        lo1 = np.uint32(p1 & np.uint64(0xFFFFFFFF))
        c0 = hi1 ^ c1 ^ k0
        c1 = lo1
        c2 = hi0 ^ c3 ^ k1
        c3 = lo0
        k0 = np.uint32(k0 + np.uint32(0x9E3779B9))
        k1 = np.uint32(k1 + np.uint32(0xBB67AE85))
    return c0, c1, c2, c3


@njit(cache=True)
def _ppnd16(p):
    q = p - 0.5
    if abs(q) <= 0.425:
        r = 0.180625 - q * q
        num = _PA[7]
        for i in range(6, -1, -1):
            num = num * r + _PA[i]
        den = _PB[7]
        for i in range(6, -1, -1):
            den = den * r + _PB[i]
        return q * num / den
    r = p if q < 0.0 else 1.0 - p
    r = math.sqrt(-math.log(r))
    if r <= 5.0:
        r -= 1.6
        num = _PC[7]
        for i in range(6, -1, -1):
            num = num * r + _PC[i]
        den = _PD[7]
        for i in range(6, -1, -1):
            den = den * r + _PD[i]
    else:
        r -= 5.0
        num = _PE[7]
        for i in range(6, -1, -1):
            num = num * r + _PE[i]
        den = _PF[7]
        for i in range(6, -1, -1):
            den = den * r + _PF[i]
    val = num / den
    return -val if q < 0.0 else val


@njit(cache=True)
def _kernel(seed, start_trial, ntrials, bit, S, w, sig, sigma0, out):
    ngrid, ncoef = S.shape
    k0 = np.uint32(seed & np.int64(0xFFFFFFFF))
    k1 = np.uint32((seed >> np.int64(32)) & np.int64(0xFFFFFFFF))
    cbit = np.uint32(bit)
    zp = np.empty(ncoef)
    zq = np.empty(ncoef)
    for t in range(ntrials):
        tr = start_trial + t
        tlo = np.uint32(tr & np.int64(0xFFFFFFFF))
        thi = np.uint32((tr >> np.int64(32)) & np.int64(0xFFFFFFFF))
        if sigma0 > 0.0:
            for g in range(ncoef):
                r0, r1, r2, r3 = _philox4(np.uint32(g), cbit, tlo, thi, k0, k1)
                ua = (np.uint64(r0) << np.uint64(32)) | np.uint64(r1)
                ub = (np.uint64(r2) << np.uint64(32)) | np.uint64(r3)
                u1 = (np.float64(ua >> np.uint64(12)) + 0.5) * 2.0**-52
                u2 = (np.float64(ub >> np.uint64(12)) + 0.5) * 2.0**-52
                zp[g] = sigma0 * _ppnd16(u1)
                zq[g] = sigma0 * _ppnd16(u2)
        s1 = 0.0
        s2 = 0.0
        s3 = 0.0
        for j in range(ngrid):
            ap = sig[j]
            aq = 0.0
            if sigma0 > 0.0:
                for g in range(ncoef):
                    ap += S[j, g] * zp[g]
                    aq += S[j, g] * zq[g]
            m2 = ap * ap + aq * aq
            m4 = m2 * m2
            s1 += w[j] * m2
            s2 += w[j] * m4
            s3 += w[j] * m4 * m2
        out[t, 0] = s1
        out[t, 1] = s2
        out[t, 2] = s3


def decision_sums(seed, start_trial, ntrials, bit, S, w, sig, sigma0):
    """(ntrials, 3) trapezoid sums of |r|^2, |r|^4, |r|^6 on the grid."""
    out = np.empty((int(ntrials), 3), np.float64)
    _kernel(np.int64(seed), np.int64(start_trial), int(ntrials), int(bit),
            np.ascontiguousarray(S), np.ascontiguousarray(w),
            np.ascontiguousarray(sig), float(sigma0), out)
    return out
