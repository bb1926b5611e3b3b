# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Cython implementation of the regression-tree split search.

Mirrors ``_split_py.best_split`` exactly: stable sort order, sequential
prefix sums, first-best tie-breaking, identical score arithmetic. The two
backends must grow bit-identical trees (tests/test_kernels.py asserts it).
"""

import numpy as np

cimport numpy as cnp

cnp.import_array()


cdef void _merge(double* vals, cnp.int64_t* idx, cnp.int64_t* tmp,
                 Py_ssize_t lo, Py_ssize_t mid, Py_ssize_t hi) noexcept nogil:
    cdef Py_ssize_t a = lo, b = mid, k = lo
    while a < mid and b < hi:
        # <= keeps the sort stable (left element wins ties).
        if vals[idx[a]] <= vals[idx[b]]:
            tmp[k] = idx[a]; a += 1
        else:
            tmp[k] = idx[b]; b += 1
        k += 1
    while a < mid:
        tmp[k] = idx[a]; a += 1; k += 1
    while b < hi:
        tmp[k] = idx[b]; b += 1; k += 1
    for k in range(lo, hi):
        idx[k] = tmp[k]


cdef void _stable_argsort(double* vals, cnp.int64_t* idx, cnp.int64_t* tmp,
                          Py_ssize_t n) noexcept nogil:
    cdef Py_ssize_t width = 1, lo, mid, hi
    cdef Py_ssize_t i
    for i in range(n):
        idx[i] = i
    while width < n:
        lo = 0
        while lo < n:
            mid = lo + width
            hi = lo + 2 * width
            if hi > n:
                hi = n
            if mid < hi:
                _merge(vals, idx, tmp, lo, mid, hi)
            lo += 2 * width
        width *= 2


def best_split(double[:, ::1] X, double[::1] y,
               cnp.int64_t[::1] rows, cnp.int64_t[::1] features,
               Py_ssize_t min_leaf):
    """See ``_split_py.best_split`` for the contract."""
    cdef Py_ssize_t n = rows.shape[0]
    if n < 2 * min_leaf:
        return (-1, 0.0, 0.0)

    cdef cnp.ndarray[double, ndim=1] vals_arr = np.empty(n, dtype=np.float64)
    cdef cnp.ndarray[double, ndim=1] ys_arr = np.empty(n, dtype=np.float64)
    cdef cnp.ndarray[double, ndim=1] ysort_arr = np.empty(n, dtype=np.float64)
    cdef cnp.ndarray[cnp.int64_t, ndim=1] idx_arr = np.empty(n, dtype=np.int64)
    cdef cnp.ndarray[cnp.int64_t, ndim=1] tmp_arr = np.empty(n, dtype=np.int64)
    cdef double* vals = <double*> vals_arr.data
    cdef double* ys = <double*> ys_arr.data
    cdef double* ysort = <double*> ysort_arr.data
    cdef cnp.int64_t* idx = <cnp.int64_t*> idx_arr.data
    cdef cnp.int64_t* tmp = <cnp.int64_t*> tmp_arr.data

    cdef Py_ssize_t i, j, fi, f
    cdef double total = 0.0
    for i in range(n):
        ys[i] = y[rows[i]]
        total += ys[i]
    cdef double parent_score = total * total / n

    cdef int best_feat = -1
    cdef double best_thresh = 0.0
    cdef double best_score = -np.inf
    cdef double cum, ls, rs, score, prev_x
    cdef Py_ssize_t n_feat = features.shape[0]

    with nogil:
        for fi in range(n_feat):
            f = features[fi]
            for i in range(n):
                vals[i] = X[rows[i], f]
            _stable_argsort(vals, idx, tmp, n)
            if vals[idx[0]] == vals[idx[n - 1]]:
                continue
            for i in range(n):
                ysort[i] = ys[idx[i]]
            cum = 0.0
            for i in range(n - 1):
                cum += ysort[i]
                # left count = i + 1
                if i + 1 < min_leaf or i + 1 > n - min_leaf:
                    continue
                if not vals[idx[i]] < vals[idx[i + 1]]:
                    continue
                ls = cum
                rs = total - ls
                score = ls * ls / (i + 1) + rs * rs / (n - i - 1)
                if score > best_score:
                    best_score = score
                    best_feat = <int> f
                    best_thresh = vals[idx[i]]

    if best_feat < 0:
        return (-1, 0.0, 0.0)
    return (int(best_feat), float(best_thresh), float(best_score - parent_score))
