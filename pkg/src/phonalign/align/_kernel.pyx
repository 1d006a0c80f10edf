# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled dynamic-programming kernels for global phoneme alignment.

Both entry points operate on label codes (small non-negative ints) and a
four-way cost model: copy/replace consume one element of each sequence,
delete consumes only `a`, insert consumes only `b`.
"""

import numpy as np

cimport numpy as cnp

cnp.import_array()


def last_row(const short[::1] a, const short[::1] b,
             double c_copy, double c_replace, double c_delete, double c_insert):
    """Final row of the alignment cost matrix between a and b.

    Returns a float64 array of length len(b) + 1 where entry j is the
    minimum cost of aligning all of `a` against the first j elements of `b`.
    Memory is O(len(b)).
    """
    cdef Py_ssize_t m = a.shape[0]
    cdef Py_ssize_t n = b.shape[0]
    cdef cnp.ndarray[cnp.float64_t, ndim=1] prev_arr = np.empty(n + 1, dtype=np.float64)
    cdef cnp.ndarray[cnp.float64_t, ndim=1] cur_arr = np.empty(n + 1, dtype=np.float64)
    cdef double[::1] prev = prev_arr
    cdef double[::1] cur = cur_arr
    cdef Py_ssize_t i, j
    cdef double diag, best
    cdef short ai

    for j in range(n + 1):
        prev[j] = c_insert * j
    for i in range(1, m + 1):
        ai = a[i - 1]
        cur[0] = c_delete * i
        for j in range(1, n + 1):
            diag = prev[j - 1] + (c_copy if b[j - 1] == ai else c_replace)
            best = prev[j] + c_delete
            if diag < best:
                best = diag
            if cur[j - 1] + c_insert < best:
                best = cur[j - 1] + c_insert
            cur[j] = best
        prev, cur = cur, prev
    return np.asarray(prev).copy()


def full_matrix(const short[::1] a, const short[::1] b,
                double c_copy, double c_replace, double c_delete, double c_insert):
    """Full (len(a)+1) x (len(b)+1) alignment cost matrix."""
    cdef Py_ssize_t m = a.shape[0]
    cdef Py_ssize_t n = b.shape[0]
    cdef cnp.ndarray[cnp.float64_t, ndim=2] d_arr = np.empty((m + 1, n + 1), dtype=np.float64)
    cdef double[:, ::1] d = d_arr
    cdef Py_ssize_t i, j
    cdef double diag, best
    cdef short ai

    for j in range(n + 1):
        d[0, j] = c_insert * j
    for i in range(1, m + 1):
        ai = a[i - 1]
        d[i, 0] = c_delete * i
        for j in range(1, n + 1):
            diag = d[i - 1, j - 1] + (c_copy if b[j - 1] == ai else c_replace)
            best = d[i - 1, j] + c_delete
            if diag < best:
                best = diag
            if d[i, j - 1] + c_insert < best:
                best = d[i, j - 1] + c_insert
            d[i, j] = best
    return d_arr
