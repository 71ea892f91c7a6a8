"""Sequential descent outer loop.

Each round descends to a local minimum, intersects the objective with the
horizontal plane at that minimum's value, and restarts from the level-set
point with the largest gradient norm. The loop ends when every level-set
point is stationary, when no usable restart point remains, or after
``max_outer`` local minima.
"""

from __future__ import annotations

import dataclasses
import json
import logging
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .core import BoxDomain, EvalCounter, NumericDomainError, ObjectiveSpec, UsageError, as_vector
from .descent import DescentParams, LocalMinimum, descend
from .levelset import (
    CandidateSet,
    LevelSetConfig,
    all_stationary,
    filter_candidates,
    level_candidates,
    rank_order,
)

log = logging.getLogger(__name__)

TERMINATIONS = ("all-stationary", "empty-candidate-set", "max-outer")


@dataclass(frozen=True)
class SgdConfig:
    descent: DescentParams = field(default_factory=DescentParams)
    levelset: LevelSetConfig = field(default_factory=LevelSetConfig)
    max_outer: int = 50
    seed: int = 0
    # grid doublings tried when a level set comes back with no crossings at all
    empty_refinements: int = 2
    max_restart_attempts: Optional[int] = None

    def __post_init__(self):
        if self.max_outer < 1:
            raise UsageError("max_outer must be at least 1")
        if self.seed < 0:
            raise UsageError("seed must be unsigned")
        if self.empty_refinements < 0:
            raise UsageError("empty_refinements must be non-negative")


@dataclass
class LevelRecord:
    """What happened at one horizontal plane."""

    k: int
    level: float
    resolution: int
    n_candidates: int
    n_filtered: int
    attempts: int = 0
    restart: Optional[np.ndarray] = None
    candidates: Optional[CandidateSet] = None


@dataclass
class SolveReport:
    objective: str
    minima: list[LocalMinimum]
    restarts: list[np.ndarray]
    termination: str
    f_calls: int
    grad_calls: int
    seed_used: int
    levels: list[LevelRecord]
    descent_calls: int

    @property
    def best(self) -> LocalMinimum:
        return self.minima[-1]

    @property
    def local_search_count(self):
        return len(self.minima)

    @property
    def eval_counts(self):
        return self.f_calls, self.grad_calls

    @property
    def values(self):
        return [m.f for m in self.minima]

    def to_dict(self):
        return {
            "objective": self.objective,
            "termination": self.termination,
            "local_search_count": self.local_search_count,
            "descent_calls": self.descent_calls,
            "seed_used": self.seed_used,
            "eval_counts": {"f_calls": self.f_calls, "grad_calls": self.grad_calls},
            "best": _minimum_dict(self.best),
            "minima": [_minimum_dict(m) for m in self.minima],
            "restarts": [r.tolist() for r in self.restarts],
            "levels": [
                {
                    "k": r.k,
                    "level": r.level,
                    "resolution": r.resolution,
                    "n_candidates": r.n_candidates,
                    "n_filtered": r.n_filtered,
                    "attempts": r.attempts,
                    "restart": None if r.restart is None else r.restart.tolist(),
                }
                for r in self.levels
            ],
        }

    def to_json(self, **kwargs):
        return json.dumps(self.to_dict(), **kwargs)


def _minimum_dict(m: LocalMinimum):
    return {
        "x": m.x.tolist(),
        "f": m.f,
        "grad_norm": m.grad_norm,
        "start": m.start.tolist(),
        "start_gap": m.start_gap,
        "steps": m.trace.steps,
        "termination": m.trace.termination,
        "f_calls": m.f_calls,
        "grad_calls": m.grad_calls,
    }


def random_init(box: BoxDomain, seed=0):
    rng = np.random.default_rng(seed)
    return rng.uniform(box.lower, box.upper)


def solve(obj: ObjectiveSpec, cfg: SgdConfig | None = None, x0=None, keep_candidates=False) -> SolveReport:
    cfg = cfg or SgdConfig()
    counter = EvalCounter()
    start = random_init(obj.domain, cfg.seed) if x0 is None else as_vector(x0, obj.dimension)
    k = 0
    try:
        minima = [descend(obj, start, cfg.descent, counter)]
        restarts = []
        levels = []
        descent_calls = 1
        termination = "max-outer"
        while len(minima) < cfg.max_outer:
            k = len(minima) - 1
            level = minima[-1].f
            lcfg = cfg.levelset
            for attempt in range(cfg.empty_refinements + 1):
                if attempt:
                    lcfg = dataclasses.replace(lcfg, grid_resolution=2 * lcfg.grid_resolution - 1)
                cands = level_candidates(obj, level, obj.domain, lcfg, cfg.descent.gradient, counter)
                if len(cands):
                    break
            usable = filter_candidates(cands, lcfg)
            record = LevelRecord(k=k, level=level, resolution=lcfg.grid_resolution,
                                 n_candidates=len(cands), n_filtered=len(usable),
                                 candidates=cands if keep_candidates else None)
            levels.append(record)
            log.debug("k=%d level=%.12g candidates=%d usable=%d", k, level, len(cands), len(usable))
            if len(cands) and all_stationary(cands, lcfg):
                termination = "all-stationary"
                break
            improved = None
            order = rank_order(usable)
            if cfg.max_restart_attempts is not None:
                order = order[: cfg.max_restart_attempts]
            for i in order:
                cand = usable[int(i)]
                record.attempts += 1
                descent_calls += 1
                m = descend(obj, cand.x, cfg.descent, counter)
                if m.f < level - cfg.descent.f_tol:
                    improved = m
                    record.restart = cand.x
                    break
                log.debug("restart from %s stalled at %.12g", cand.x, m.f)
            if improved is None:
                termination = "empty-candidate-set"
                break
            restarts.append(record.restart)
            minima.append(improved)
    except NumericDomainError as err:
        err.outer_iteration = k
        raise
    return SolveReport(
        objective=obj.name,
        minima=minima,
        restarts=restarts,
        termination=termination,
        f_calls=counter.f_calls,
        grad_calls=counter.grad_calls,
        seed_used=cfg.seed,
        levels=levels,
        descent_calls=descent_calls,
    )
