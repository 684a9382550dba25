# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled inner loops; ``matraj._kernels_py`` holds the reference versions."""

import numpy as np
cimport numpy as cnp
from libc.math cimport cos, sin

cnp.import_array()

cdef enum:
    BLOCK = 256
cdef long long NEG = -(1LL << 62)


def scan_1d(const double complex[::1] weights, const double[::1] phase,
            double u0, double du, Py_ssize_t count):
    """|sum_n w_n exp(j phase_n (u0 + k du))|^2 for k = 0..count-1."""
    cdef Py_ssize_t n, j, j0, j1, N = weights.shape[0]
    cdef double wr, wi, pr, pi, rr, ri, t, ph
    cdef cnp.ndarray[double, ndim=1] acc_re = np.zeros(count)
    cdef cnp.ndarray[double, ndim=1] acc_im = np.zeros(count)
    cdef double[::1] are = acc_re
    cdef double[::1] aim = acc_im
    if phase.shape[0] != N:
        raise ValueError("weights and phase lengths differ")
    with nogil:
        for n in range(N):
            wr = weights[n].real
            wi = weights[n].imag
            ph = phase[n]
            rr = cos(ph * du)
            ri = sin(ph * du)
            j0 = 0
            while j0 < count:
                j1 = j0 + BLOCK
                if j1 > count:
                    j1 = count
                # re-anchor the rotating phasor every block to bound drift
                t = ph * (u0 + j0 * du)
                pr = cos(t)
                pi = sin(t)
                for j in range(j0, j1):
                    are[j] += wr * pr - wi * pi
                    aim[j] += wr * pi + wi * pr
                    t = pr * rr - pi * ri
                    pi = pr * ri + pi * rr
                    pr = t
                j0 = j1
    return acc_re * acc_re + acc_im * acc_im


def dp_tables(Py_ssize_t M, Py_ssize_t N, Py_ssize_t max_step, bint monotone):
    """Backward value tables for max N*sum(p^2) - (sum p)^2 over grid paths.

    ``V[n, p, S]`` is the best suffix value after choosing ``p`` at index ``n``
    with running sum ``S``; unreachable entries hold a large negative number.
    """
    cdef Py_ssize_t smax = N * (M - 1)
    cdef cnp.ndarray[long long, ndim=3] V = np.full((N, M, smax + 1), NEG, dtype=np.int64)
    cdef long long[:, :, ::1] Vv = V
    cdef Py_ssize_t n, p, q, S, lo, hi
    cdef long long best, cand, nxt
    with nogil:
        for p in range(M):
            for S in range(smax + 1):
                Vv[N - 1, p, S] = -(<long long>S) * S
        n = N - 2
        while n >= 0:
            for p in range(M):
                lo = p if monotone else (p - max_step if p >= max_step else 0)
                hi = p + max_step
                if hi > M - 1:
                    hi = M - 1
                for S in range(smax + 1):
                    best = NEG
                    for q in range(lo, hi + 1):
                        if S + q > smax:
                            break
                        nxt = Vv[n + 1, q, S + q]
                        if nxt == NEG:
                            continue
                        cand = (<long long>N) * q * q + nxt
                        if cand > best:
                            best = cand
                    Vv[n, p, S] = best
            n -= 1
    return V
