# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled evaluation kernels.

Same function set and semantics as ``_kernels_np`` (the reference
implementation); see that module for the shape conventions.  The loops
here fuse the bracket / Mobius / kernel arithmetic into a single pass
per node, which avoids the chain of large array temporaries the NumPy
path allocates.
"""

import numpy as np

cimport numpy as cnp
from libc.math cimport pow, sqrt

cnp.import_array()


def bracket_sq_pairs(const double[:, ::1] A, const double[:, ::1] X):
    cdef Py_ssize_t N = A.shape[0], n = A.shape[1], i, k
    cdef cnp.ndarray[cnp.float64_t, ndim=1] out_arr = np.empty(N)
    cdef double[::1] out = out_arr
    cdef double a2, x2, dot
    for i in range(N):
        a2 = 0.0
        x2 = 0.0
        dot = 0.0
        for k in range(n):
            a2 += A[i, k] * A[i, k]
            x2 += X[i, k] * X[i, k]
            dot += A[i, k] * X[i, k]
        out[i] = 1.0 + a2 * x2 - 2.0 * dot
    return out_arr


def bracket_sq_many(const double[:, ::1] A, const double[:, ::1] X):
    cdef Py_ssize_t B = A.shape[0], S = X.shape[0], n = A.shape[1], b, s, k
    cdef cnp.ndarray[cnp.float64_t, ndim=2] out_arr = np.empty((B, S))
    cdef double[:, ::1] out = out_arr
    cdef double a2, x2, dot
    for b in range(B):
        a2 = 0.0
        for k in range(n):
            a2 += A[b, k] * A[b, k]
        for s in range(S):
            x2 = 0.0
            dot = 0.0
            for k in range(n):
                x2 += X[s, k] * X[s, k]
                dot += A[b, k] * X[s, k]
            out[b, s] = 1.0 + a2 * x2 - 2.0 * dot
    return out_arr


def mobius_apply_pairs(const double[:, ::1] A, const double[:, ::1] X):
    cdef Py_ssize_t N = A.shape[0], n = A.shape[1], i, k
    cdef cnp.ndarray[cnp.float64_t, ndim=2] out_arr = np.empty((N, n))
    cdef double[:, ::1] out = out_arr
    cdef double a2, x2, dot, d2, br2, oma, diff
    for i in range(N):
        a2 = 0.0
        x2 = 0.0
        dot = 0.0
        d2 = 0.0
        for k in range(n):
            a2 += A[i, k] * A[i, k]
            x2 += X[i, k] * X[i, k]
            dot += A[i, k] * X[i, k]
            diff = X[i, k] - A[i, k]
            d2 += diff * diff
        if d2 == 0.0:
            for k in range(n):
                out[i, k] = 0.0
            continue
        br2 = 1.0 + a2 * x2 - 2.0 * dot
        oma = 1.0 - a2
        for k in range(n):
            out[i, k] = (d2 * A[i, k] - oma * (X[i, k] - A[i, k])) / br2
    return out_arr


def mobius_apply_many(const double[:, ::1] A, const double[:, ::1] X):
    cdef Py_ssize_t B = A.shape[0], S = X.shape[0], n = A.shape[1], b, s, k
    cdef cnp.ndarray[cnp.float64_t, ndim=3] out_arr = np.empty((B, S, n))
    cdef double[:, :, ::1] out = out_arr
    cdef double a2, x2, dot, d2, br2, oma, diff
    for b in range(B):
        a2 = 0.0
        for k in range(n):
            a2 += A[b, k] * A[b, k]
        oma = 1.0 - a2
        for s in range(S):
            x2 = 0.0
            dot = 0.0
            d2 = 0.0
            for k in range(n):
                x2 += X[s, k] * X[s, k]
                dot += A[b, k] * X[s, k]
                diff = X[s, k] - A[b, k]
                d2 += diff * diff
            if d2 == 0.0:
                for k in range(n):
                    out[b, s, k] = 0.0
                continue
            br2 = 1.0 + a2 * x2 - 2.0 * dot
            for k in range(n):
                out[b, s, k] = (d2 * A[b, k] - oma * (X[s, k] - A[b, k])) / br2
    return out_arr


def abs_mobius_pairs(const double[:, ::1] A, const double[:, ::1] X):
    cdef Py_ssize_t N = A.shape[0], n = A.shape[1], i, k
    cdef cnp.ndarray[cnp.float64_t, ndim=1] out_arr = np.empty(N)
    cdef double[::1] out = out_arr
    cdef double a2, x2, dot, d2, diff
    for i in range(N):
        a2 = 0.0
        x2 = 0.0
        dot = 0.0
        d2 = 0.0
        for k in range(n):
            a2 += A[i, k] * A[i, k]
            x2 += X[i, k] * X[i, k]
            dot += A[i, k] * X[i, k]
            diff = X[i, k] - A[i, k]
            d2 += diff * diff
        out[i] = sqrt(d2 / (1.0 + a2 * x2 - 2.0 * dot))
    return out_arr


def abs_mobius_many(const double[:, ::1] A, const double[:, ::1] X):
    cdef Py_ssize_t B = A.shape[0], S = X.shape[0], n = A.shape[1], b, s, k
    cdef cnp.ndarray[cnp.float64_t, ndim=2] out_arr = np.empty((B, S))
    cdef double[:, ::1] out = out_arr
    cdef double a2, x2, dot, d2, diff
    for b in range(B):
        a2 = 0.0
        for k in range(n):
            a2 += A[b, k] * A[b, k]
        for s in range(S):
            x2 = 0.0
            dot = 0.0
            d2 = 0.0
            for k in range(n):
                x2 += X[s, k] * X[s, k]
                dot += A[b, k] * X[s, k]
                diff = X[s, k] - A[b, k]
                d2 += diff * diff
            out[b, s] = sqrt(d2 / (1.0 + a2 * x2 - 2.0 * dot))
    return out_arr


def poisson_row_many(const double[:, ::1] X, const double[:, ::1] T, int n_dim):
    cdef Py_ssize_t B = X.shape[0], S = T.shape[0], n = X.shape[1], b, s, k
    cdef cnp.ndarray[cnp.float64_t, ndim=2] out_arr = np.empty((B, S))
    cdef double[:, ::1] out = out_arr
    cdef double x2, dot
    cdef double e = n_dim - 1.0
    for b in range(B):
        x2 = 0.0
        for k in range(n):
            x2 += X[b, k] * X[b, k]
        for s in range(S):
            dot = 0.0
            for k in range(n):
                dot += X[b, k] * T[s, k]
            out[b, s] = pow((1.0 - x2) / (1.0 + x2 - 2.0 * dot), e)
    return out_arr
