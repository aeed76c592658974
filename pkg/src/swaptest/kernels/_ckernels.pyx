# cython: boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled comparison kernels. Semantics mirror ``_pykernels`` exactly."""

import numpy as np
cimport numpy as cnp
from libc.stdint cimport int64_t, uint64_t
from libc.math cimport fabs

cnp.import_array()

cdef uint64_t GOLDEN = 0x9E3779B97F4A7C15ULL


cdef inline uint64_t _finalize(uint64_t z) noexcept nogil:
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL
    return z ^ (z >> 31)


cdef inline int _coin(uint64_t key, Py_ssize_t m) noexcept nogil:
    return <int>(_finalize(key + <uint64_t>(m + 1) * GOLDEN) >> 63)


def count_wins_batch(const double[:, ::1] a, const double[:, ::1] b,
                     const uint64_t[::1] keys):
    cdef Py_ssize_t k = a.shape[0], h = a.shape[1], r, m
    if b.shape[0] != k or b.shape[1] != h or keys.shape[0] != k:
        raise ValueError("shape mismatch between score arrays and keys")
    wins_arr = np.zeros(k, dtype=np.int64)
    ties_arr = np.zeros(k, dtype=np.int64)
    cdef int64_t[::1] wins = wins_arr
    cdef int64_t[::1] ties = ties_arr
    cdef int64_t w, t
    cdef const double* pa
    cdef const double* pb
    if h == 0:
        return wins_arr, ties_arr
    with nogil:
        for r in range(k):
            w = 0
            t = 0
            pa = &a[r, 0]
            pb = &b[r, 0]
            # straight-line counting pass the compiler can vectorise
            for m in range(h):
                w += pa[m] > pb[m]
                t += pa[m] == pb[m]
            if t:
                for m in range(h):
                    if pa[m] == pb[m]:
                        w += _coin(keys[r], m)
            wins[r] = w
            ties[r] = t
    return wins_arr, ties_arr


def linear_family_counts(const double[:, ::1] X2, const double[::1] base2,
                         const double[::1] y2, const double[::1] orig,
                         const double[::1] theta, const int64_t[:, ::1] pairs,
                         const uint64_t[::1] keys, int kind):
    cdef Py_ssize_t h = X2.shape[0], d = X2.shape[1], k = pairs.shape[0]
    cdef Py_ssize_t r, m, i, j
    if base2.shape[0] != h or y2.shape[0] != h or orig.shape[0] != h:
        raise ValueError("length mismatch between halves")
    if theta.shape[0] != d or keys.shape[0] != k:
        raise ValueError("theta or keys has the wrong length")
    if kind < 0 or kind > 2:
        raise ValueError("unknown score kind")
    for r in range(k):
        if not (0 <= pairs[r, 0] < d and 0 <= pairs[r, 1] < d):
            raise IndexError("pair index out of range")
    wins_arr = np.zeros(k, dtype=np.int64)
    ties_arr = np.zeros(k, dtype=np.int64)
    shift_arr = np.empty(k, dtype=np.float64)
    cdef int64_t[::1] wins = wins_arr
    cdef int64_t[::1] ties = ties_arr
    cdef double[::1] shift = shift_arr
    cdef double pred, res, s1, s2
    cdef const double* row
    for r in range(k):
        shift[r] = theta[pairs[r, 0]] - theta[pairs[r, 1]]
    # rows outer, pairs inner: each feature row is read once for all pairs
    with nogil:
        for m in range(h):
            row = &X2[m, 0]
            s1 = orig[m]
            for r in range(k):
                i = pairs[r, 0]
                j = pairs[r, 1]
                pred = base2[m] + (row[j] - row[i]) * shift[r]
                if kind == 2:
                    s2 = y2[m] * pred
                else:
                    res = y2[m] - pred
                    if kind == 0:
                        s2 = fabs(res)
                    else:
                        s2 = res * res
                wins[r] += s1 > s2
                if s1 == s2:
                    ties[r] += 1
                    wins[r] += _coin(keys[r], m)
    return wins_arr, ties_arr
