# cython: boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled hot kernels. Same contracts as ``_pykernels``."""

import numpy as np
cimport numpy as cnp
from libc.math cimport sin, cos

cnp.import_array()


def direct_fourier_sum(nodes, values, freqs, int sign):
    cdef const double[::1] u = np.ascontiguousarray(nodes, dtype=np.float64)
    cdef const double complex[::1] g = np.ascontiguousarray(values, dtype=np.complex128)
    cdef const double[::1] f = np.ascontiguousarray(freqs, dtype=np.float64)
    cdef Py_ssize_t n = u.shape[0], m = f.shape[0], j, k
    out = np.empty(m, dtype=np.complex128)
    cdef double complex[::1] o = out
    cdef double s = 1.0 if sign > 0 else -1.0
    cdef double ph, c, sn, re, im, gr, gi
    for k in range(m):
        re = 0.0
        im = 0.0
        for j in range(n):
            ph = s * f[k] * u[j]
            c = cos(ph)
            sn = sin(ph)
            gr = g[j].real
            gi = g[j].imag
            re += gr * c - gi * sn
            im += gr * sn + gi * c
        o[k] = re + 1j * im
    return out


cdef void _fornberg(double z, const double* x, Py_ssize_t n, int m, double* c) noexcept nogil:
    # c is row-major (n, m + 1), zero-initialised by the caller
    cdef double c1 = 1.0, c2, c3, c4 = x[0] - z, c5
    cdef Py_ssize_t i, j
    cdef int k, mn
    cdef int stride = m + 1
    c[0] = 1.0
    for i in range(1, n):
        mn = <int>i if i < m else m
        c2 = 1.0
        c5 = c4
        c4 = x[i] - z
        for j in range(i):
            c3 = x[i] - x[j]
            c2 *= c3
            if j == i - 1:
                for k in range(mn, 0, -1):
                    c[i * stride + k] = c1 * (k * c[(i - 1) * stride + k - 1]
                                              - c5 * c[(i - 1) * stride + k]) / c2
                c[i * stride] = -c1 * c5 * c[(i - 1) * stride] / c2
            for k in range(mn, 0, -1):
                c[j * stride + k] = (c4 * c[j * stride + k] - k * c[j * stride + k - 1]) / c3
            c[j * stride] = c4 * c[j * stride] / c3
        c1 = c2


def fd_weights(double z, x, int m):
    cdef const double[::1] xv = np.ascontiguousarray(x, dtype=np.float64)
    cdef Py_ssize_t n = xv.shape[0]
    out = np.zeros((n, m + 1), dtype=np.float64)
    cdef double[:, ::1] ov = out
    _fornberg(z, &xv[0], n, m, &ov[0, 0])
    return out


def derivative_matrix(coords, int order):
    cdef const double[::1] x = np.ascontiguousarray(coords, dtype=np.float64)
    cdef Py_ssize_t n = x.shape[0], width = order + 1, i, j, start
    D = np.zeros((n, n), dtype=np.float64)
    cdef double[:, ::1] Dv = D
    work = np.zeros((width, 2), dtype=np.float64)
    cdef double[:, ::1] w = work
    for i in range(n):
        start = i - width // 2
        if start < 0:
            start = 0
        if start > n - width:
            start = n - width
        w[:, :] = 0.0
        _fornberg(x[i], &x[start], width, 1, &w[0, 0])
        for j in range(width):
            Dv[i, start + j] = w[j, 1]
    return D
