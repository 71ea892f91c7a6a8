"""Domain types, built-in objectives, gradients and box utilities."""

from __future__ import annotations

import dataclasses
import math
from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np

from . import _kernels

FD_EPS = math.sqrt(np.finfo(float).eps)

SHUBERT_CENTER = (-1.42513, -0.80032)


class UsageError(ValueError):
    """Raised for calls that violate an operation's preconditions."""


class ObjectiveNotFound(UsageError, LookupError):
    pass


class NumericDomainError(ArithmeticError):
    """A non-finite objective value or gradient was produced."""

    def __init__(self, message, point=None, outer_iteration=None):
        super().__init__(message)
        self.point = None if point is None else np.array(point, dtype=float)
        self.outer_iteration = outer_iteration

    def __str__(self):
        msg = super().__str__()
        if self.point is not None:
            msg += f" at x={self.point.tolist()}"
        if self.outer_iteration is not None:
            msg += f" (outer iteration {self.outer_iteration})"
        return msg


def as_vector(x, dimension=None):
    """Return ``x`` as a finite 1-D float array, checking its length."""
    v = np.array(x, dtype=float).reshape(-1)
    if v.size == 0:
        raise UsageError("vector must have at least one coordinate")
    if dimension is not None and v.size != dimension:
        raise UsageError(f"expected a vector of length {dimension}, got {v.size}")
    if not np.all(np.isfinite(v)):
        raise UsageError(f"vector has non-finite coordinates: {v.tolist()}")
    return v


def _frozen(a):
    a = np.array(a, dtype=float)
    a.setflags(write=False)
    return a


@dataclass(frozen=True, eq=False)
class BoxDomain:
    lower: np.ndarray
    upper: np.ndarray

    def __post_init__(self):
        lo = as_vector(self.lower)
        hi = as_vector(self.upper)
        if lo.shape != hi.shape:
            raise UsageError("box bounds have different lengths")
        if not np.all(lo < hi):
            raise UsageError(f"box requires lower < upper componentwise: {lo.tolist()} vs {hi.tolist()}")
        object.__setattr__(self, "lower", _frozen(lo))
        object.__setattr__(self, "upper", _frozen(hi))

    @classmethod
    def cube(cls, lo, hi, dimension=2):
        return cls(np.full(dimension, float(lo)), np.full(dimension, float(hi)))

    @property
    def dimension(self):
        return self.lower.size

    def contains(self, x):
        x = np.asarray(x, dtype=float)
        return bool(np.all(x >= self.lower) and np.all(x <= self.upper))

    def __eq__(self, other):
        if not isinstance(other, BoxDomain):
            return NotImplemented
        return np.array_equal(self.lower, other.lower) and np.array_equal(self.upper, other.upper)

    def __hash__(self):
        return hash((self.lower.tobytes(), self.upper.tobytes()))

    def __repr__(self):
        pairs = ", ".join(f"[{lo:g}, {hi:g}]" for lo, hi in zip(self.lower, self.upper))
        return f"BoxDomain({pairs})"


def clamp_to_box(x, box: BoxDomain):
    x = np.asarray(x, dtype=float)
    if x.shape != box.lower.shape:
        raise UsageError(f"dimension mismatch: point has {x.size} coordinates, box has {box.dimension}")
    return np.minimum(np.maximum(x, box.lower), box.upper)


@dataclass(frozen=True)
class ObjectiveSpec:
    """A scalar field on a box.

    ``evaluate`` and ``gradient`` take a 1-D array. The optional batch
    callables take an ``(n, dimension)`` array and are used for grid work;
    when absent the scalar callables are looped over.
    """

    name: str
    dimension: int
    evaluate: Callable[[np.ndarray], float]
    domain: BoxDomain
    gradient: Optional[Callable[[np.ndarray], np.ndarray]] = None
    evaluate_batch: Optional[Callable[[np.ndarray], np.ndarray]] = None
    gradient_batch: Optional[Callable[[np.ndarray], np.ndarray]] = None
    description: str = ""

    def __post_init__(self):
        if self.dimension < 1:
            raise UsageError("dimension must be positive")
        if self.domain.dimension != self.dimension:
            raise UsageError("domain dimension does not match objective dimension")

    def with_domain(self, box: BoxDomain) -> "ObjectiveSpec":
        return dataclasses.replace(self, domain=box)


@dataclass
class EvalCounter:
    """Caller-owned tally of objective and gradient evaluations."""

    f_calls: int = 0
    grad_calls: int = 0

    def as_tuple(self):
        return self.f_calls, self.grad_calls


@dataclass(frozen=True)
class GradientMethod:
    mode: str = "analytic"
    fd_step_scale: float = 1.0

    def __post_init__(self):
        if self.mode not in ("analytic", "central-difference"):
            raise UsageError(f"unknown gradient mode {self.mode!r}")
        if not self.fd_step_scale > 0:
            raise UsageError("fd_step_scale must be positive")


def evaluate(obj: ObjectiveSpec, x, counter: EvalCounter | None = None) -> float:
    x = np.asarray(x, dtype=float)
    if x.shape != (obj.dimension,):
        raise UsageError(f"{obj.name} expects {obj.dimension} coordinates, got shape {x.shape}")
    value = float(obj.evaluate(x))
    if counter is not None:
        counter.f_calls += 1
    if not math.isfinite(value):
        raise NumericDomainError(f"{obj.name} returned {value}", point=x)
    return value


def evaluate_many(obj: ObjectiveSpec, X, counter: EvalCounter | None = None) -> np.ndarray:
    """Evaluate at every row of ``X``; counts one f-call per row."""
    X = np.asarray(X, dtype=float)
    if X.ndim != 2 or X.shape[1] != obj.dimension:
        raise UsageError(f"{obj.name} expects rows of {obj.dimension} coordinates, got shape {X.shape}")
    if obj.evaluate_batch is not None:
        values = np.asarray(obj.evaluate_batch(X), dtype=float)
    else:
        values = np.array([obj.evaluate(row) for row in X], dtype=float)
    if counter is not None:
        counter.f_calls += X.shape[0]
    bad = ~np.isfinite(values)
    if bad.any():
        i = int(np.argmax(bad))
        raise NumericDomainError(f"{obj.name} returned {values[i]}", point=X[i])
    return values


def fd_steps(x, scale=1.0):
    return scale * FD_EPS * (1.0 + np.abs(x))


def central_difference(obj: ObjectiveSpec, x, scale=1.0, counter=None):
    x = np.asarray(x, dtype=float)
    h = fd_steps(x, scale)
    g = np.empty_like(x)
    for i in range(x.size):
        xp = x.copy()
        xm = x.copy()
        xp[i] += h[i]
        xm[i] -= h[i]
        # divide by the representable step, not h
        g[i] = (evaluate(obj, xp, counter) - evaluate(obj, xm, counter)) / (xp[i] - xm[i])
    return g


def gradient(obj: ObjectiveSpec, x, method: GradientMethod | None = None,
             counter: EvalCounter | None = None) -> np.ndarray:
    method = method or GradientMethod()
    x = np.asarray(x, dtype=float)
    if x.shape != (obj.dimension,):
        raise UsageError(f"{obj.name} expects {obj.dimension} coordinates, got shape {x.shape}")
    if method.mode == "analytic":
        if obj.gradient is None:
            raise UsageError(f"{obj.name} has no analytic gradient; use central-difference mode")
        g = np.array(obj.gradient(x), dtype=float)
        if counter is not None:
            counter.grad_calls += 1
    else:
        g = central_difference(obj, x, method.fd_step_scale, counter)
        if counter is not None:
            counter.grad_calls += 1
    if not np.all(np.isfinite(g)):
        raise NumericDomainError(f"{obj.name} gradient is not finite", point=x)
    return g


def gradient_many(obj: ObjectiveSpec, X, method: GradientMethod | None = None, counter=None):
    method = method or GradientMethod()
    X = np.asarray(X, dtype=float)
    if method.mode == "analytic" and obj.gradient_batch is not None:
        G = np.asarray(obj.gradient_batch(X), dtype=float).reshape(X.shape)
        if counter is not None:
            counter.grad_calls += X.shape[0]
        if not np.all(np.isfinite(G)):
            i = int(np.argmax(~np.all(np.isfinite(G), axis=1)))
            raise NumericDomainError(f"{obj.name} gradient is not finite", point=X[i])
        return G
    G = np.empty_like(X)
    for k, row in enumerate(X):
        G[k] = gradient(obj, row, method, counter)
    return G


@dataclass
class CheckReport:
    points: np.ndarray
    errors: np.ndarray
    rel_tol: float

    @property
    def max_error(self):
        return float(self.errors.max()) if self.errors.size else 0.0

    @property
    def passed(self):
        return bool(np.all(self.errors <= self.rel_tol))


def gradient_check(obj: ObjectiveSpec, points, rel_tol=1e-5, fd_step_scale=1.0) -> CheckReport:
    """Compare the analytic gradient with central differences.

    The per-point error is ``max|g_a - g_fd| / max(1, max|g_a|)``.
    """
    if obj.gradient is None:
        raise UsageError(f"{obj.name} has no analytic gradient to check")
    pts = np.atleast_2d(np.asarray(points, dtype=float))
    errors = np.empty(len(pts))
    for k, x in enumerate(pts):
        ga = gradient(obj, x)
        gf = central_difference(obj, x, fd_step_scale)
        errors[k] = np.max(np.abs(ga - gf)) / max(1.0, float(np.max(np.abs(ga))))
    return CheckReport(points=pts, errors=errors, rel_tol=rel_tol)


def interior_samples(box: BoxDomain, n, seed=0, margin=1e-6):
    """Uniform points strictly inside ``box`` (shrunk by ``margin`` of its width)."""
    rng = np.random.default_rng(seed)
    width = box.upper - box.lower
    lo = box.lower + margin * width
    hi = box.upper - margin * width
    return rng.uniform(lo, hi, size=(n, box.dimension))


# Built-in objectives

def _example1(name, box, k):
    return ObjectiveSpec(
        name=name,
        dimension=2,
        evaluate=k.example1_value,
        gradient=k.example1_gradient,
        evaluate_batch=k.example1_values,
        gradient_batch=k.example1_gradients,
        domain=box,
        description="x2*sin(x1) - x1*cos(x2)",
    )


def _shubert(name, box, weight, k):
    c1, c2 = SHUBERT_CENTER
    desc = "prod_j sum_{i=1..5} i*cos((i+1)*x_j + i)"
    if weight:
        desc += " + 0.5*((x1+1.42513)^2 + (x2+0.80032)^2)"
    return ObjectiveSpec(
        name=name,
        dimension=2,
        evaluate=lambda x: k.shubert_value(x, c1, c2, weight),
        gradient=lambda x: k.shubert_gradient(x, c1, c2, weight),
        evaluate_batch=lambda X: k.shubert_values(X, c1, c2, weight),
        gradient_batch=lambda X: k.shubert_gradients(X, c1, c2, weight),
        domain=box,
        description=desc,
    )


def _sphere(x):
    return float(np.dot(x, x))


def _constant(x):
    return 0.0


def builtin_objectives(backend: str | None = None) -> list[ObjectiveSpec]:
    """Registered objectives, bound to the given (default: selected) kernel backend."""
    k = _kernels.kernels if backend is None else _kernels.load_backend(backend)
    return [
        _example1("example1", BoxDomain.cube(-5, 5), k),
        _example1("example1-wide", BoxDomain([-5.0, -5.0], [12.0, 8.0]), k),
        _shubert("shubert-penalized", BoxDomain.cube(-100, 100), 0.5, k),
        _shubert("shubert-plain", BoxDomain.cube(-10, 10), 0.0, k),
        ObjectiveSpec(
            name="sphere",
            dimension=2,
            evaluate=_sphere,
            gradient=lambda x: 2.0 * np.asarray(x, dtype=float),
            evaluate_batch=lambda X: np.einsum("ij,ij->i", X, X),
            gradient_batch=lambda X: 2.0 * np.asarray(X, dtype=float),
            domain=BoxDomain.cube(-5, 5),
            description="x1^2 + x2^2",
        ),
        ObjectiveSpec(
            name="constant",
            dimension=2,
            evaluate=_constant,
            gradient=lambda x: np.zeros(2),
            evaluate_batch=lambda X: np.zeros(len(X)),
            gradient_batch=lambda X: np.zeros((len(X), 2)),
            domain=BoxDomain.cube(-1, 1),
            description="0",
        ),
    ]


def objective_names():
    return [o.name for o in builtin_objectives()]


def get_objective(name: str, backend: str | None = None) -> ObjectiveSpec:
    for obj in builtin_objectives(backend):
        if obj.name == name:
            return obj
    raise ObjectiveNotFound(f"unknown objective {name!r}; choose from {', '.join(objective_names())}")
