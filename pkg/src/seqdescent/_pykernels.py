"""Pure-Python objective kernels (fallback for the compiled ``_ckernels``).

Scalar routines use :mod:`math` on Python floats; batch routines take an
``(n, 2)`` array and are vectorized with numpy.
"""

import math

import numpy as np

BACKEND = "python"


def example1_value(x):
    x1 = float(x[0])
    x2 = float(x[1])
    return x2 * math.sin(x1) - x1 * math.cos(x2)


def example1_gradient(x):
    x1 = float(x[0])
    x2 = float(x[1])
    return np.array([x2 * math.cos(x1) - math.cos(x2),
                     math.sin(x1) + x1 * math.sin(x2)])


def example1_values(X):
    X = np.asarray(X, dtype=float)
    x1 = X[:, 0]
    x2 = X[:, 1]
    return x2 * np.sin(x1) - x1 * np.cos(x2)


def example1_gradients(X):
    X = np.asarray(X, dtype=float)
    x1 = X[:, 0]
    x2 = X[:, 1]
    out = np.empty_like(X)
    out[:, 0] = x2 * np.cos(x1) - np.cos(x2)
    out[:, 1] = np.sin(x1) + x1 * np.sin(x2)
    return out


def _shubert_terms(t):
    s = 0.0
    ds = 0.0
    for i in range(1, 6):
        arg = (i + 1) * t + i
        s += i * math.cos(arg)
        ds -= i * (i + 1) * math.sin(arg)
    return s, ds


def _shubert_terms_batch(t):
    s = np.zeros_like(t)
    ds = np.zeros_like(t)
    for i in range(1, 6):
        arg = (i + 1) * t + i
        s += i * np.cos(arg)
        ds -= i * (i + 1) * np.sin(arg)
    return s, ds


def shubert_value(x, c1, c2, weight):
    x1 = float(x[0])
    x2 = float(x[1])
    s1, _ = _shubert_terms(x1)
    s2, _ = _shubert_terms(x2)
    return s1 * s2 + weight * ((x1 - c1) ** 2 + (x2 - c2) ** 2)


def shubert_gradient(x, c1, c2, weight):
    x1 = float(x[0])
    x2 = float(x[1])
    s1, d1 = _shubert_terms(x1)
    s2, d2 = _shubert_terms(x2)
    return np.array([d1 * s2 + 2.0 * weight * (x1 - c1),
                     s1 * d2 + 2.0 * weight * (x2 - c2)])


def shubert_values(X, c1, c2, weight):
    X = np.asarray(X, dtype=float)
    s1, _ = _shubert_terms_batch(X[:, 0])
    s2, _ = _shubert_terms_batch(X[:, 1])
    return s1 * s2 + weight * ((X[:, 0] - c1) ** 2 + (X[:, 1] - c2) ** 2)


def shubert_gradients(X, c1, c2, weight):
    X = np.asarray(X, dtype=float)
    s1, d1 = _shubert_terms_batch(X[:, 0])
    s2, d2 = _shubert_terms_batch(X[:, 1])
    out = np.empty_like(X)
    out[:, 0] = d1 * s2 + 2.0 * weight * (X[:, 0] - c1)
    out[:, 1] = s1 * d2 + 2.0 * weight * (X[:, 1] - c2)
    return out
