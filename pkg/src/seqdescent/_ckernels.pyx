# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled objective kernels. Mirrors ``_pykernels`` function for function."""

import numpy as np
cimport numpy as cnp
from libc.math cimport sin, cos

cnp.import_array()

BACKEND = "cython"


cdef inline double _ex1(double x1, double x2) noexcept nogil:
    return x2 * sin(x1) - x1 * cos(x2)


cdef inline void _shubert_terms(double t, double* s, double* ds) noexcept nogil:
    cdef int i
    cdef double arg
    s[0] = 0.0
    ds[0] = 0.0
    for i in range(1, 6):
        arg = (i + 1) * t + i
        s[0] += i * cos(arg)
        ds[0] -= i * (i + 1) * sin(arg)


def example1_value(x):
    cdef double x1 = x[0], x2 = x[1]
    return _ex1(x1, x2)


def example1_gradient(x):
    cdef double x1 = x[0], x2 = x[1]
    cdef cnp.ndarray[cnp.float64_t, ndim=1] out = np.empty(2)
    out[0] = x2 * cos(x1) - cos(x2)
    out[1] = sin(x1) + x1 * sin(x2)
    return out


def example1_values(X):
    cdef const double[:, :] xs = np.ascontiguousarray(X, dtype=np.float64)
    cdef Py_ssize_t n = xs.shape[0], k
    out = np.empty(n)
    cdef double[:] o = out
    with nogil:
        for k in range(n):
            o[k] = _ex1(xs[k, 0], xs[k, 1])
    return out


def example1_gradients(X):
    cdef const double[:, :] xs = np.ascontiguousarray(X, dtype=np.float64)
    cdef Py_ssize_t n = xs.shape[0], k
    cdef double x1, x2
    out = np.empty((n, 2))
    cdef double[:, :] o = out
    with nogil:
        for k in range(n):
            x1 = xs[k, 0]
            x2 = xs[k, 1]
            o[k, 0] = x2 * cos(x1) - cos(x2)
            o[k, 1] = sin(x1) + x1 * sin(x2)
    return out


def shubert_value(x, double c1, double c2, double weight):
    cdef double x1 = x[0], x2 = x[1]
    cdef double s1, d1, s2, d2
    _shubert_terms(x1, &s1, &d1)
    _shubert_terms(x2, &s2, &d2)
    return s1 * s2 + weight * ((x1 - c1) ** 2 + (x2 - c2) ** 2)


def shubert_gradient(x, double c1, double c2, double weight):
    cdef double x1 = x[0], x2 = x[1]
    cdef double s1, d1, s2, d2
    _shubert_terms(x1, &s1, &d1)
    _shubert_terms(x2, &s2, &d2)
    cdef cnp.ndarray[cnp.float64_t, ndim=1] out = np.empty(2)
    out[0] = d1 * s2 + 2.0 * weight * (x1 - c1)
    out[1] = s1 * d2 + 2.0 * weight * (x2 - c2)
    return out


def shubert_values(X, double c1, double c2, double weight):
    cdef const double[:, :] xs = np.ascontiguousarray(X, dtype=np.float64)
    cdef Py_ssize_t n = xs.shape[0], k
    cdef double x1, x2, s1, d1, s2, d2
    out = np.empty(n)
    cdef double[:] o = out
    with nogil:
        for k in range(n):
            x1 = xs[k, 0]
            x2 = xs[k, 1]
            _shubert_terms(x1, &s1, &d1)
            _shubert_terms(x2, &s2, &d2)
            o[k] = s1 * s2 + weight * ((x1 - c1) ** 2 + (x2 - c2) ** 2)
    return out


def shubert_gradients(X, double c1, double c2, double weight):
    cdef const double[:, :] xs = np.ascontiguousarray(X, dtype=np.float64)
    cdef Py_ssize_t n = xs.shape[0], k
    cdef double x1, x2, s1, d1, s2, d2
    out = np.empty((n, 2))
    cdef double[:, :] o = out
    with nogil:
        for k in range(n):
            x1 = xs[k, 0]
            x2 = xs[k, 1]
            _shubert_terms(x1, &s1, &d1)
            _shubert_terms(x2, &s2, &d2)
            o[k, 0] = d1 * s2 + 2.0 * weight * (x1 - c1)
            o[k, 1] = s1 * d2 + 2.0 * weight * (x2 - c2)
    return out
