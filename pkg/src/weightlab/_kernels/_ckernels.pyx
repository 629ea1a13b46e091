# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled twins of ``_pykernels``; same signatures, same tie-breaking."""
import numpy as np
cimport numpy as cnp
from libc.math cimport INFINITY

cnp.import_array()


def conv_max(a, b):
    cdef const double[::1] av = np.ascontiguousarray(a, dtype=np.float64)
    cdef const double[::1] bv = np.ascontiguousarray(b, dtype=np.float64)
    cdef Py_ssize_t na = av.shape[0], nb = bv.shape[0]
    cdef Py_ssize_t n = na + nb - 1
    out_arr = np.full(n, -np.inf)
    arg_arr = np.full(n, -1, dtype=np.int64)
    cdef double[::1] out = out_arr
    cdef long long[::1] argj = arg_arr
    cdef Py_ssize_t p, j, jlo, jhi
    cdef double v, best
    for p in range(n):
        jlo = p - nb + 1 if p - nb + 1 > 0 else 0
        jhi = p if p < na - 1 else na - 1
        best = -INFINITY
        for j in range(jlo, jhi + 1):
            v = av[j] + bv[p - j]
            if v > best:
                best = v
                argj[p] = j
        out[p] = best
    return out_arr, arg_arr


def conv_min(a, b):
    out, argj = conv_max(-np.asarray(a, dtype=np.float64), -np.asarray(b, dtype=np.float64))
    return -out, argj


def compose_layers(logm, bint maximize, Py_ssize_t kmax):
    cdef const double[::1] m = np.ascontiguousarray(logm, dtype=np.float64)
    cdef double bad = -INFINITY if maximize else INFINITY
    G_arr = np.full((kmax + 1, kmax + 1), bad)
    arg_arr = np.zeros((kmax + 1, kmax + 1), dtype=np.int64)
    cdef double[:, ::1] G = G_arr
    cdef long long[:, ::1] arg = arg_arr
    cdef Py_ssize_t j, k, a, best_a
    cdef double v, best
    G[0, 0] = 0.0
    for j in range(1, kmax + 1):
        for k in range(j, kmax + 1):
            best = bad
            best_a = 1
            for a in range(1, k - j + 2):
                v = G[j - 1, k - a] + m[a]
                if (maximize and v > best) or (not maximize and v < best):
                    best = v
                    best_a = a
            G[j, k] = best
            arg[j, k] = best_a
    return G_arr, arg_arr


def pair_excess(top, left, right):
    conv, argj = conv_min(left, right)
    n = min(len(top), len(conv))
    return np.asarray(top, dtype=np.float64)[:n] - conv[:n], argj[:n]


def subadditive_violation(logr):
    cdef const double[::1] r = np.ascontiguousarray(logr, dtype=np.float64)
    cdef Py_ssize_t n = r.shape[0], j, k
    cdef double v, best = -INFINITY
    cdef Py_ssize_t bj = -1, bk = -1
    for j in range(1, n):
        for k in range(j, n - j):
            v = r[j + k] - r[j] - r[k]
            if v > best:
                best = v
                bj = j
                bk = k
    return best, bj, bk
