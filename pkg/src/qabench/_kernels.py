"""Numba kernels for in-place statevector updates.

Bit convention everywhere: qubit j is bit j of the amplitude index
(little-endian, qubit 0 = least-significant bit). Loop counters enumerate the
amplitudes with the target bits cleared; the bits are re-inserted by shifting,
so every iteration touches a disjoint index set and prange is safe.
"""
from __future__ import annotations

import numpy as np
from numba import njit, prange


@njit(cache=True, parallel=True)
def xx_kernel(state, j, k, c, s):
    """exp(i*theta*X_j X_k) with c=cos(theta), s=sin(theta)."""
    quarter = state.shape[0] >> 2
    bj = np.int64(1) << j
    bk = np.int64(1) << k
    ml = (np.int64(1) << min(j, k)) - 1
    mh = (np.int64(1) << max(j, k)) - 1
    js = 1j * s
    for t in prange(quarter):
        i = (t & ml) | ((t & ~ml) << 1)
        i = (i & mh) | ((i & ~mh) << 1)
        i01 = i | bk
        i10 = i | bj
        i11 = i | bj | bk
        a00 = state[i]
        a11 = state[i11]
        state[i] = c * a00 + js * a11
        state[i11] = c * a11 + js * a00
        a01 = state[i01]
        a10 = state[i10]
        state[i01] = c * a01 + js * a10
        state[i10] = c * a10 + js * a01


@njit(cache=True, parallel=True)
def u1_kernel(state, j, u00, u01, u10, u11):
    """Arbitrary single-qubit unitary on qubit j."""
    half = state.shape[0] >> 1
    bj = np.int64(1) << j
    mj = bj - 1
    for t in prange(half):
        i0 = (t & mj) | ((t & ~mj) << 1)
        i1 = i0 | bj
        a0 = state[i0]
        a1 = state[i1]
        state[i0] = u00 * a0 + u01 * a1
        state[i1] = u10 * a0 + u11 * a1
