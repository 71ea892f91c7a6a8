"""Steepest descent with Armijo backtracking or golden-section line search.

Iterates are projected onto the objective's box after every trial step, so
the descent never leaves the domain.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .core import (
    EvalCounter,
    GradientMethod,
    ObjectiveSpec,
    UsageError,
    as_vector,
    clamp_to_box,
    evaluate,
    gradient,
)

INV_PHI = (math.sqrt(5.0) - 1.0) / 2.0

TERMINATIONS = ("gradient-small", "f-change-small", "max-iters", "backtrack-exhausted")


class BacktrackExhausted(RuntimeError):
    """No step length in the backtracking sequence satisfied the Armijo rule."""


@dataclass(frozen=True)
class LineSearchParams:
    c1: float = 1e-4
    shrink: float = 0.5
    lambda0: float = 1.0
    max_backtracks: int = 60
    mode: str = "armijo"
    section_tol: float = 1e-10

    def __post_init__(self):
        if not 0.0 < self.c1 < 1.0:
            raise UsageError("c1 must lie in (0, 1)")
        if not 0.0 < self.shrink < 1.0:
            raise UsageError("shrink must lie in (0, 1)")
        if not self.lambda0 > 0.0:
            raise UsageError("lambda0 must be positive")
        if self.max_backtracks < 1:
            raise UsageError("max_backtracks must be positive")
        if self.mode not in ("armijo", "exact-sectioned"):
            raise UsageError(f"unknown line search mode {self.mode!r}")


@dataclass(frozen=True)
class DescentParams:
    grad_tol: float = 1e-6
    f_tol: float = 1e-10
    max_iters: int = 10000
    line_search: LineSearchParams = field(default_factory=LineSearchParams)
    gradient: GradientMethod = field(default_factory=GradientMethod)

    def __post_init__(self):
        if not (self.grad_tol > 0 and self.f_tol > 0):
            raise UsageError("descent tolerances must be positive")
        if self.max_iters < 1:
            raise UsageError("max_iters must be positive")


@dataclass(frozen=True)
class Iterate:
    x: np.ndarray
    f: float
    grad_norm: float
    lam: float  # step that produced this iterate; 0 for the start point


@dataclass
class DescentTrace:
    iterates: list[Iterate]
    termination: str

    @property
    def steps(self):
        return len(self.iterates) - 1


@dataclass
class LocalMinimum:
    x: np.ndarray
    f: float
    grad_norm: float
    trace: DescentTrace
    f_calls: int = 0
    grad_calls: int = 0

    @property
    def start(self):
        return self.trace.iterates[0].x

    @property
    def start_gap(self):
        """``|f(x*) - f(x0)|``, the start-to-minimum change of the run."""
        return abs(self.f - self.trace.iterates[0].f)


def steepest_direction(g):
    return -np.asarray(g, dtype=float)


def armijo_backtrack(obj: ObjectiveSpec, x, d, fx, gx, params: LineSearchParams | None = None,
                     counter: EvalCounter | None = None):
    """Backtrack from ``lambda0`` until the projected step gives sufficient decrease.

    Returns ``(lam, x_new, f_new)`` for the first ``lam = lambda0 * shrink**n``
    with ``f(clamp(x + lam*d)) <= fx + c1*lam*gx.d``.
    """
    params = params or LineSearchParams()
    slope = float(np.dot(gx, d))
    if not slope < 0.0:
        raise UsageError(f"not a descent direction: g.d = {slope}")
    lam = params.lambda0
    for _ in range(params.max_backtracks + 1):
        x_new = clamp_to_box(x + lam * d, obj.domain)
        f_new = evaluate(obj, x_new, counter)
        if f_new <= fx + params.c1 * lam * slope:
            return lam, x_new, f_new
        lam *= params.shrink
    raise BacktrackExhausted(f"Armijo rule not met after {params.max_backtracks} backtracks")


def ray_box_limit(x, d, box):
    """Largest ``lam >= 0`` with ``x + lam*d`` inside ``box``."""
    x = np.asarray(x, dtype=float)
    d = np.asarray(d, dtype=float)
    limits = [math.inf]
    pos = d > 0
    neg = d < 0
    if pos.any():
        limits.append(float(np.min((box.upper[pos] - x[pos]) / d[pos])))
    if neg.any():
        limits.append(float(np.min((box.lower[neg] - x[neg]) / d[neg])))
    return max(0.0, min(limits))


def feasible_direction(x, d, box):
    """Zero the components of ``d`` that push out through an active bound."""
    d = np.array(d, dtype=float)
    d[(x >= box.upper) & (d > 0)] = 0.0
    d[(x <= box.lower) & (d < 0)] = 0.0
    return d


def golden_section(phi, a, b, tol):
    """Golden-section minimizer of ``phi`` on ``[a, b]`` to bracket width ``tol``."""
    h = b - a
    if h <= tol:
        return 0.5 * (a + b)
    c = b - INV_PHI * h
    e = a + INV_PHI * h
    fc = phi(c)
    fe = phi(e)
    while b - a > tol:
        if fc < fe:
            b, e, fe = e, c, fc
            c = b - INV_PHI * (b - a)
            fc = phi(c)
        else:
            a, c, fc = c, e, fe
            e = a + INV_PHI * (b - a)
            fe = phi(e)
    return c if fc < fe else e


def exact_sectioned_search(obj: ObjectiveSpec, x, d, lambda_max, tol, counter=None):
    """Golden-section step along ``d`` on ``[0, lambda_max]``; 0 if that does not lower f."""
    x = np.asarray(x, dtype=float)
    d = np.asarray(d, dtype=float)
    if lambda_max <= 0.0:
        return 0.0

    def phi(lam):
        return evaluate(obj, clamp_to_box(x + lam * d, obj.domain), counter)

    lam = golden_section(phi, 0.0, float(lambda_max), tol)
    if phi(lam) < phi(0.0):
        return lam
    return 0.0


def descend(obj: ObjectiveSpec, x0, params: DescentParams | None = None,
            counter: EvalCounter | None = None) -> LocalMinimum:
    """Run steepest descent from ``x0`` (clamped into the domain) to a local minimum."""
    params = params or DescentParams()
    ls = params.line_search
    local = EvalCounter()
    x = clamp_to_box(as_vector(x0, obj.dimension), obj.domain)
    fx = evaluate(obj, x, local)
    xs, fs, gns, lams = [x], [fx], [], [0.0]
    termination = "max-iters"
    try:
        for it in range(params.max_iters + 1):
            g = gradient(obj, x, params.gradient, local)
            gn = float(np.linalg.norm(g))
            gns.append(gn)
            if gn <= params.grad_tol:
                termination = "gradient-small"
                break
            if it == params.max_iters:
                break
            d = steepest_direction(g)
            try:
                if ls.mode == "armijo":
                    lam, x_new, f_new = armijo_backtrack(obj, x, d, fx, g, ls, local)
                else:
                    d = feasible_direction(x, d, obj.domain)
                    if not np.any(d):
                        raise BacktrackExhausted("gradient points out of the box")
                    lam_max = ray_box_limit(x, d, obj.domain)
                    lam = exact_sectioned_search(obj, x, d, lam_max, ls.section_tol * lam_max, local)
                    if lam == 0.0:
                        raise BacktrackExhausted("no decrease along the search ray")
                    x_new = clamp_to_box(x + lam * d, obj.domain)
                    f_new = evaluate(obj, x_new, local)
            except BacktrackExhausted:
                termination = "backtrack-exhausted"
                break
            if not f_new < fx:
                termination = "backtrack-exhausted"
                break
            change = fx - f_new
            x, fx = x_new, f_new
            xs.append(x)
            fs.append(fx)
            lams.append(lam)
            if change <= params.f_tol:
                gns.append(float(np.linalg.norm(gradient(obj, x, params.gradient, local))))
                termination = "f-change-small"
                break
    finally:
        if counter is not None:
            counter.f_calls += local.f_calls
            counter.grad_calls += local.grad_calls
    iterates = [Iterate(xv, fv, gv, lv) for xv, fv, gv, lv in zip(xs, fs, gns, lams)]
    trace = DescentTrace(iterates=iterates, termination=termination)
    last = iterates[-1]
    return LocalMinimum(x=last.x, f=last.f, grad_norm=last.grad_norm, trace=trace,
                        f_calls=local.f_calls, grad_calls=local.grad_calls)


def replay_armijo(obj: ObjectiveSpec, trace: DescentTrace, c1=1e-4, params: DescentParams | None = None):
    """Recheck every accepted step of an Armijo trace.

    Yields ``(lhs, rhs)`` with ``lhs = f(clamp(x + lam*d))`` and
    ``rhs = f(x) + c1*lam*g.d`` recomputed from scratch.
    """
    method = params.gradient if params is not None else GradientMethod()
    its = trace.iterates
    for prev, nxt in zip(its[:-1], its[1:]):
        g = gradient(obj, prev.x, method)
        d = steepest_direction(g)
        x_new = clamp_to_box(prev.x + nxt.lam * d, obj.domain)
        lhs = evaluate(obj, x_new)
        rhs = evaluate(obj, prev.x) + c1 * nxt.lam * float(np.dot(g, d))
        yield lhs, rhs
