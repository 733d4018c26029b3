# cython: language_level=3, cdivision=True
"""Compiled convolution cores for dense two-variable Laurent grids.

Both entry points work on rectangular int64 grids: axis 0 is the q-step,
axis 1 the r-step.  Row ``k`` of the output is the sum over ``i + j = k`` of
the one-dimensional convolutions of ``a[i]`` and ``b[j]``; rows at or past
``nrows`` are discarded.
"""

import numpy as np
cimport numpy as cnp

ctypedef long long i64
ctypedef unsigned long long u64

cnp.import_array()

cdef u64 _FLUSH = 1ULL << 63


def conv2d_i64(const i64[:, ::1] a, const i64[:, ::1] b, Py_ssize_t nrows):
    """Exact signed convolution; the caller guarantees no int64 overflow."""
    cdef Py_ssize_t na = a.shape[0], la = a.shape[1]
    cdef Py_ssize_t nb = b.shape[0], lb = b.shape[1]
    out_arr = np.zeros((nrows, la + lb - 1), dtype=np.int64)
    cdef i64[:, ::1] out = out_arr
    cdef Py_ssize_t i, j, u, v, k
    cdef i64 x
    for i in range(na):
        if i >= nrows:
            break
        for u in range(la):
            x = a[i, u]
            if x == 0:
                continue
            for j in range(nb):
                k = i + j
                if k >= nrows:
                    break
                for v in range(lb):
                    out[k, u + v] += x * b[j, v]
    return out_arr


def conv2d_mod(const i64[:, ::1] a, const i64[:, ::1] b, i64 p, Py_ssize_t nrows):
    """Convolution modulo ``p`` (``p < 2**31``, inputs reduced to ``[0, p)``)."""
    cdef Py_ssize_t na = a.shape[0], la = a.shape[1]
    cdef Py_ssize_t nb = b.shape[0], lb = b.shape[1]
    acc_arr = np.zeros((nrows, la + lb - 1), dtype=np.uint64)
    cdef u64[:, ::1] acc = acc_arr
    cdef Py_ssize_t i, j, u, v, k
    cdef u64 x, y, up = <u64> p
    for i in range(na):
        if i >= nrows:
            break
        for u in range(la):
            x = <u64> a[i, u]
            if x == 0:
                continue
            for j in range(nb):
                k = i + j
                if k >= nrows:
                    break
                for v in range(lb):
                    y = <u64> b[j, v]
                    if y == 0:
                        continue
                    acc[k, u + v] += x * y
                    if acc[k, u + v] >= _FLUSH:
                        acc[k, u + v] = acc[k, u + v] % up
    for k in range(acc.shape[0]):
        for v in range(acc.shape[1]):
            acc[k, v] = acc[k, v] % up
    return acc_arr.astype(np.int64)
