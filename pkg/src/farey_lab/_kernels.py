"""numba kernels for the high-volume Farey scans.

Everything here works on int64 and assumes Q <= MAX_FAST_Q so that every
product below (at most about 2*Q**2) stays inside the signed 64-bit range.
"""
from __future__ import annotations

import numba
import numpy as np

MAX_FAST_Q = 2**31


@numba.njit(cache=True)
def _gcd(a, b):
    while b:
        a, b = b, a % b
    return a


@numba.njit(cache=True)
def totient_table(n):
    phi = np.arange(n + 1, dtype=np.int64)
    for p in range(2, n + 1):
        if phi[p] == p:
            for m in range(p, n + 1, p):
                phi[m] -= phi[m] // p
    return phi


@numba.njit(cache=True)
def farey_arrays(Q, size):
    """Numerators and denominators of gamma_1 .. gamma_N of F_Q (size = N)."""
    a = np.empty(size, dtype=np.int64)
    q = np.empty(size, dtype=np.int64)
    a0, q0, a1, q1 = 0, 1, 1, Q
    i = 0
    while True:
        a[i] = a1
        q[i] = q1
        i += 1
        if q1 == 1:
            break
        t = (Q + q0) // q1
        a0, q0, a1, q1 = a1, q1, t * a1 - a0, t * q1 - q0
    return a, q


@numba.njit(cache=True)
def gap_histogram(Q, d, cap):
    """Gap numerators of F_{Q,d}, gaps read circularly.

    Returns (counts, overflow): counts[k] for k < cap, and the raw list of
    numerators >= cap (rare) in `overflow`.
    """
    counts = np.zeros(cap, dtype=np.int64)
    overflow = np.empty(16, dtype=np.int64)
    n_over = 0
    # 0/1 is the periodic image of 1/1 and has denominator 1.
    pa, pq = 0, 1
    a0, q0, a1, q1 = 0, 1, 1, Q
    while True:
        if _gcd(q1, d) == 1:
            k = pq * a1 - pa * q1
            if k < cap:
                counts[k] += 1
            else:
                if n_over == overflow.shape[0]:
                    grown = np.empty(2 * n_over, dtype=np.int64)
                    grown[:n_over] = overflow
                    overflow = grown
                overflow[n_over] = k
                n_over += 1
            pa, pq = a1, q1
        if q1 == 1:
            break
        t = (Q + q0) // q1
        a0, q0, a1, q1 = a1, q1, t * a1 - a0, t * q1 - q0
    return counts, overflow[:n_over]


@numba.njit(cache=True)
def _max_runs_masked(Q, mask, nbits):
    best = np.zeros(nbits, dtype=np.int64)
    run = np.zeros(nbits, dtype=np.int64)
    a0, q0, a1, q1 = 0, 1, 1, Q
    while True:
        m = mask[q1]
        for j in range(nbits):
            if (m >> j) & 1:
                run[j] += 1
                if run[j] > best[j]:
                    best[j] = run[j]
            else:
                run[j] = 0
        if q1 == 1:
            break
        t = (Q + q0) // q1
        a0, q0, a1, q1 = a1, q1, t * a1 - a0, t * q1 - q0
    return best


def _radical(n):
    r, p = 1, 2
    while p * p <= n:
        if n % p == 0:
            r *= p
            while n % p == 0:
                n //= p
        p += 1
    return r * n if n > 1 else r


def max_runs(Q, ds):
    """Longest run of consecutive F_Q terms with gcd(q, d) > 1, for each d.

    Only the radical of d matters, so each distinct radical gets one bit of
    a per-denominator mask and the scan touches every term once.
    """
    ds = [int(d) for d in ds]
    rads = sorted({_radical(d) for d in ds})
    if len(rads) > 63:
        raise ValueError("at most 63 distinct radicals per pass")
    qs = np.arange(Q + 1, dtype=np.int64)
    mask = np.zeros(Q + 1, dtype=np.int64)
    for j, r in enumerate(rads):
        mask |= (np.gcd(qs, r) > 1).astype(np.int64) << j
    best = _max_runs_masked(Q, mask, len(rads))
    return np.array([best[rads.index(_radical(d))] for d in ds], dtype=np.int64)
