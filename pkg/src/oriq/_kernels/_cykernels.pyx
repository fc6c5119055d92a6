# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled hot kernels: SSE accumulation, bicubic point sampling, separable
resampling passes.

The float kernels accumulate in the same per-element order as the numpy
fallback (and the extension is compiled with -ffp-contract=off), so both
backends produce bit-identical arrays.
"""

import numpy as np

cimport numpy as cnp

cnp.import_array()

NAME = "cython"


def sse_u8(const unsigned char[:, :] a, const unsigned char[:, :] b):
    """Exact integer sum of squared differences of two equal-size planes."""
    cdef Py_ssize_t h = a.shape[0], w = a.shape[1]
    cdef Py_ssize_t i, j
    cdef long long acc = 0, d
    if b.shape[0] != h or b.shape[1] != w:
        raise ValueError("plane dimensions differ")
    with nogil:
        for i in range(h):
            for j in range(w):
                d = <long long> a[i, j] - <long long> b[i, j]
                acc += d * d
    return acc


def row_sse_u8(const unsigned char[:, :] a, const unsigned char[:, :] b):
    """Per-row exact integer SSE; feeds the latitude-weighted PSNR combine."""
    cdef Py_ssize_t h = a.shape[0], w = a.shape[1]
    cdef Py_ssize_t i, j
    cdef long long acc, d
    if b.shape[0] != h or b.shape[1] != w:
        raise ValueError("plane dimensions differ")
    out = np.empty(h, dtype=np.int64)
    cdef long long[::1] ov = out
    with nogil:
        for i in range(h):
            acc = 0
            for j in range(w):
                d = <long long> a[i, j] - <long long> b[i, j]
                acc += d * d
            ov[i] = acc
    return out


def sqdiff_sum_u8(const unsigned char[::1] a, const unsigned char[::1] b):
    """Exact integer SSE of two equal-length 1-D sample vectors."""
    cdef Py_ssize_t n = a.shape[0]
    cdef Py_ssize_t i
    cdef long long acc = 0, d
    if b.shape[0] != n:
        raise ValueError("vector lengths differ")
    with nogil:
        for i in range(n):
            d = <long long> a[i] - <long long> b[i]
            acc += d * d
    return acc


def bicubic_points(const unsigned char[::1] flat,
                   const int[:, :, ::1] idx,
                   const double[:, ::1] wy,
                   const double[:, ::1] wx):
    """Sample a flattened plane at n points with precomputed 4x4 tap tables.

    idx[p, m, t] is the flat index of row-tap m / column-tap t for point p;
    wy/wx are the cubic weights. Values are clamped to [0, 255].
    """
    cdef Py_ssize_t n = idx.shape[0]
    cdef Py_ssize_t p, m, t
    cdef double rowacc, val
    out = np.empty(n, dtype=np.float64)
    cdef double[::1] ov = out
    with nogil:
        for p in range(n):
            val = 0.0
            for m in range(4):
                rowacc = 0.0
                for t in range(4):
                    rowacc += <double> flat[idx[p, m, t]] * wx[p, t]
                val += rowacc * wy[p, m]
            if val < 0.0:
                val = 0.0
            elif val > 255.0:
                val = 255.0
            ov[p] = val
    return out


def resample_h(const double[:, ::1] src,
               const int[:, ::1] idx,
               const double[:, ::1] w):
    """Horizontal resampling pass: out[i, o] = sum_t src[i, idx[o, t]] * w[o, t]."""
    cdef Py_ssize_t h = src.shape[0]
    cdef Py_ssize_t wout = idx.shape[0], k = idx.shape[1]
    cdef Py_ssize_t i, o, t
    cdef double acc
    out = np.empty((h, wout), dtype=np.float64)
    cdef double[:, ::1] ov = out
    with nogil:
        for i in range(h):
            for o in range(wout):
                acc = 0.0
                for t in range(k):
                    acc += src[i, idx[o, t]] * w[o, t]
                ov[i, o] = acc
    return out


def resample_v(const double[:, ::1] src,
               const int[:, ::1] idx,
               const double[:, ::1] w):
    """Vertical resampling pass: out[o, j] = sum_t src[idx[o, t], j] * w[o, t]."""
    cdef Py_ssize_t wid = src.shape[1]
    cdef Py_ssize_t hout = idx.shape[0], k = idx.shape[1]
    cdef Py_ssize_t o, j, t
    cdef double acc
    out = np.empty((hout, wid), dtype=np.float64)
    cdef double[:, ::1] ov = out
    with nogil:
        for o in range(hout):
            for j in range(wid):
                acc = 0.0
                for t in range(k):
                    acc += src[idx[o, t], j] * w[o, t]
                ov[o, j] = acc
    return out
