"""Compiled and pure-Python kernels must agree."""

import os
import subprocess
import sys

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from seqdescent import _kernels
from seqdescent.core import SHUBERT_CENTER

BACKENDS = _kernels.available_backends()
needs_both = pytest.mark.skipif(len(BACKENDS) < 2, reason="compiled kernels not built")

points = arrays(np.float64, (2,), elements=st.floats(-100, 100, allow_nan=False))
batches = arrays(np.float64, st.tuples(st.integers(0, 30), st.just(2)),
                 elements=st.floats(-100, 100, allow_nan=False))


def test_python_backend_always_available():
    assert "python" in BACKENDS
    assert _kernels.load_backend("python").BACKEND == "python"


def test_unknown_backend():
    with pytest.raises(ValueError):
        _kernels.load_backend("fortran")


def test_env_var_forces_fallback():
    env = dict(os.environ, SEQDESCENT_PURE_PYTHON="1")
    out = subprocess.run([sys.executable, "-c", "import seqdescent; print(seqdescent.BACKEND)"],
                         env=env, capture_output=True, text=True, check=True)
    assert out.stdout.strip() == "python"


@needs_both
class TestParity:
    c = _kernels.load_backend("cython")
    p = _kernels.load_backend("python")

    @settings(max_examples=200)
    @given(points)
    def test_example1_scalar(self, x):
        assert self.c.example1_value(x) == pytest.approx(self.p.example1_value(x), rel=1e-13, abs=1e-13)
        np.testing.assert_allclose(self.c.example1_gradient(x), self.p.example1_gradient(x), rtol=1e-13, atol=1e-13)

    @settings(max_examples=200)
    @given(points, st.sampled_from([0.0, 0.5]))
    def test_shubert_scalar(self, x, w):
        a = self.c.shubert_value(x, *SHUBERT_CENTER, w)
        b = self.p.shubert_value(x, *SHUBERT_CENTER, w)
        assert a == pytest.approx(b, rel=1e-12, abs=1e-11)
        np.testing.assert_allclose(self.c.shubert_gradient(x, *SHUBERT_CENTER, w),
                                   self.p.shubert_gradient(x, *SHUBERT_CENTER, w), rtol=1e-12, atol=1e-10)

    @settings(max_examples=50)
    @given(batches, st.sampled_from([0.0, 0.5]))
    def test_batches(self, X, w):
        np.testing.assert_allclose(self.c.example1_values(X), self.p.example1_values(X), rtol=1e-13, atol=1e-13)
        np.testing.assert_allclose(self.c.example1_gradients(X), self.p.example1_gradients(X), rtol=1e-13, atol=1e-13)
        np.testing.assert_allclose(self.c.shubert_values(X, *SHUBERT_CENTER, w),
                                   self.p.shubert_values(X, *SHUBERT_CENTER, w), rtol=1e-12, atol=1e-10)
        np.testing.assert_allclose(self.c.shubert_gradients(X, *SHUBERT_CENTER, w),
                                   self.p.shubert_gradients(X, *SHUBERT_CENTER, w), rtol=1e-12, atol=1e-10)

    def test_batch_agrees_with_scalar(self):
        X = np.random.default_rng(0).uniform(-10, 10, (100, 2))
        np.testing.assert_allclose(self.c.shubert_values(X, *SHUBERT_CENTER, 0.5),
                                   [self.c.shubert_value(x, *SHUBERT_CENTER, 0.5) for x in X], rtol=0, atol=1e-12)


def test_solver_agrees_across_backends(backend):
    from seqdescent.core import get_objective
    from seqdescent.solver import solve
    rep = solve(get_objective("example1-wide", backend), x0=(-1.0, 3.0))
    np.testing.assert_allclose(rep.values, [-5.1299506351, -17.4022467], atol=1e-6)
