"""Level-set intersection, candidate filtering and restart selection.

The set ``{x in box : f(x) = L - offset}`` is found by scanning a uniform
grid for axis-aligned edges whose endpoints straddle the level, then
bisecting each edge. Candidate sets are kept as arrays (``CandidateSet``);
single points come out as ``LevelCandidate``.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.spatial import cKDTree

from .core import (
    BoxDomain,
    EvalCounter,
    GradientMethod,
    ObjectiveSpec,
    UsageError,
    evaluate_many,
    gradient_many,
)

FILTER_MODES = ("descent", "literal-negative")


@dataclass(frozen=True)
class LevelSetConfig:
    grid_resolution: int = 200
    refine_tol: float = 1e-10
    max_bisections: int = 200
    level_offset: float = 0.0
    filter_mode: str = "descent"
    stationary_tol: float = 1e-4
    merge_factor: float = 1e-3

    def __post_init__(self):
        if self.grid_resolution < 2:
            raise UsageError("grid_resolution must be at least 2")
        if not (self.refine_tol > 0 and self.stationary_tol > 0 and self.merge_factor >= 0):
            raise UsageError("level-set tolerances must be positive")
        if self.max_bisections < 1:
            raise UsageError("max_bisections must be positive")
        if self.level_offset < 0:
            raise UsageError("level_offset must be non-negative")
        if self.filter_mode not in FILTER_MODES:
            raise UsageError(f"unknown filter mode {self.filter_mode!r}")

    def residual_tol(self, level):
        return self.refine_tol * (1.0 + abs(level))


@dataclass(frozen=True)
class LevelCandidate:
    x: np.ndarray
    f: float
    grad: np.ndarray
    grad_norm: float


@dataclass
class BracketSet:
    """Grid edges ``(a[i], b[i])`` across which ``f - target`` changes sign."""

    a: np.ndarray
    b: np.ndarray

    def __len__(self):
        return len(self.a)

    def __iter__(self):
        return zip(self.a, self.b)


@dataclass
class CandidateSet:
    x: np.ndarray
    f: np.ndarray
    grad: np.ndarray
    grad_norm: np.ndarray

    @classmethod
    def empty(cls, dimension):
        return cls(np.empty((0, dimension)), np.empty(0), np.empty((0, dimension)), np.empty(0))

    @classmethod
    def from_candidates(cls, cands, dimension):
        cands = list(cands)
        if not cands:
            return cls.empty(dimension)
        return cls(
            np.array([c.x for c in cands], dtype=float),
            np.array([c.f for c in cands], dtype=float),
            np.array([c.grad for c in cands], dtype=float),
            np.array([c.grad_norm for c in cands], dtype=float),
        )

    def __len__(self):
        return len(self.f)

    def __getitem__(self, i):
        return LevelCandidate(self.x[i].copy(), float(self.f[i]), self.grad[i].copy(), float(self.grad_norm[i]))

    def __iter__(self):
        return (self[i] for i in range(len(self)))

    def take(self, idx):
        return CandidateSet(self.x[idx], self.f[idx], self.grad[idx], self.grad_norm[idx])


def grid_axes(box: BoxDomain, resolution):
    return [np.linspace(lo, hi, resolution) for lo, hi in zip(box.lower, box.upper)]


def grid_points(box: BoxDomain, resolution):
    """All grid nodes as an array of shape ``(resolution,)*p + (p,)``."""
    mesh = np.meshgrid(*grid_axes(box, resolution), indexing="ij")
    return np.stack(mesh, axis=-1)


def grid_values(obj: ObjectiveSpec, box: BoxDomain, resolution, counter=None):
    G = grid_points(box, resolution)
    p = box.dimension
    values = evaluate_many(obj, G.reshape(-1, p), counter).reshape(G.shape[:-1])
    return G, values


def bracket_level_crossings(obj: ObjectiveSpec, level, box: BoxDomain | None = None,
                            cfg: LevelSetConfig | None = None, counter: EvalCounter | None = None) -> BracketSet:
    """Grid edges straddling ``level - level_offset``, in lexicographic grid order."""
    cfg = cfg or LevelSetConfig()
    box = box or obj.domain
    if not np.isfinite(level):
        raise UsageError("level must be finite")
    G, values = grid_values(obj, box, cfg.grid_resolution, counter)
    # a node exactly on the level counts as "above", so it closes a bracket
    # with its lower neighbours while a tangent contact opens none
    below = values < (level - cfg.level_offset)
    p = box.dimension
    shape = below.shape
    keys, a_idx, b_idx = [], [], []
    for axis in range(p):
        lo = [slice(None)] * p
        hi = [slice(None)] * p
        lo[axis] = slice(0, -1)
        hi[axis] = slice(1, None)
        straddle = below[tuple(lo)] != below[tuple(hi)]
        ia = np.argwhere(straddle)
        ib = ia.copy()
        ib[:, axis] += 1
        flat_a = np.ravel_multi_index(ia.T, shape) if len(ia) else np.empty(0, dtype=np.intp)
        flat_b = np.ravel_multi_index(ib.T, shape) if len(ib) else np.empty(0, dtype=np.intp)
        keys.append(flat_a * p + axis)
        a_idx.append(flat_a)
        b_idx.append(flat_b)
    keys = np.concatenate(keys)
    order = np.argsort(keys, kind="stable")
    flat_pts = G.reshape(-1, p)
    a = flat_pts[np.concatenate(a_idx)[order]]
    b = flat_pts[np.concatenate(b_idx)[order]]
    return BracketSet(a=a, b=b)


def _bisect(obj, target, A, B, cfg, tol, counter):
    A = np.array(A, dtype=float)
    B = np.array(B, dtype=float)
    ha = evaluate_many(obj, A, counter) - target
    hb = evaluate_many(obj, B, counter) - target
    if np.any((ha < 0) == (hb < 0)):
        raise UsageError("bracket endpoints do not straddle the level")
    X = np.where((np.abs(ha) <= np.abs(hb))[:, None], A, B)
    active = np.flatnonzero(np.minimum(np.abs(ha), np.abs(hb)) > tol)
    for _ in range(cfg.max_bisections):
        if active.size == 0:
            break
        a = A[active]
        b = B[active]
        m = 0.5 * (a + b)
        hm = evaluate_many(obj, m, counter) - target
        stalled = np.all((m == a) | (m == b), axis=1)
        done = (np.abs(hm) <= tol) | (hm == 0.0)
        X[active[done]] = m[done]
        left = (hm < 0) == (ha[active] < 0)
        upd_a = left & ~done
        upd_b = ~left & ~done
        A[active[upd_a]] = m[upd_a]
        ha[active[upd_a]] = hm[upd_a]
        B[active[upd_b]] = m[upd_b]
        hb[active[upd_b]] = hm[upd_b]
        closer = np.abs(ha[active]) <= np.abs(hb[active])
        X[active[~done]] = np.where(closer[~done, None], A[active[~done]], B[active[~done]])
        active = active[~done & ~stalled]
    return X


def refine_crossings(obj: ObjectiveSpec, level, brackets: BracketSet, cfg: LevelSetConfig | None = None,
                     method: GradientMethod | None = None, counter: EvalCounter | None = None) -> CandidateSet:
    """Bisect every bracket; drop points that miss the residual tolerance."""
    cfg = cfg or LevelSetConfig()
    p = obj.dimension
    if len(brackets) == 0:
        return CandidateSet.empty(p)
    target = level - cfg.level_offset
    tol = cfg.residual_tol(level)
    X = _bisect(obj, target, brackets.a, brackets.b, cfg, tol, counter)
    F = evaluate_many(obj, X, counter)
    ok = np.abs(F - target) <= tol
    X, F = X[ok], F[ok]
    G = gradient_many(obj, X, method, counter)
    return CandidateSet(X, F, G, np.linalg.norm(G, axis=1))


def refine_crossing(obj: ObjectiveSpec, level, a, b, cfg: LevelSetConfig | None = None,
                    method: GradientMethod | None = None, counter: EvalCounter | None = None) -> LevelCandidate:
    cfg = cfg or LevelSetConfig()
    a = np.asarray(a, dtype=float).reshape(1, -1)
    b = np.asarray(b, dtype=float).reshape(1, -1)
    target = level - cfg.level_offset
    X = _bisect(obj, target, a, b, cfg, cfg.residual_tol(level), counter)
    F = evaluate_many(obj, X, counter)
    G = gradient_many(obj, X, method, counter)
    return LevelCandidate(X[0], float(F[0]), G[0], float(np.linalg.norm(G[0])))


def rank_order(cands: CandidateSet):
    """Indices by decreasing grad_norm, ties by lexicographically smallest x."""
    p = cands.x.shape[1]
    keys = [cands.x[:, j] for j in reversed(range(p))] + [-cands.grad_norm]
    return np.lexsort(keys)


def merge_duplicates(cands: CandidateSet, radius) -> CandidateSet:
    """Merge candidates closer than ``radius``, keeping the larger grad_norm."""
    if len(cands) < 2 or radius <= 0:
        return cands
    tree = cKDTree(cands.x)
    pairs = tree.query_pairs(radius, output_type="ndarray")
    if len(pairs) == 0:
        return cands
    involved = np.zeros(len(cands), dtype=bool)
    involved[pairs.ravel()] = True
    neighbours = {}
    for i, j in pairs:
        neighbours.setdefault(int(i), []).append(int(j))
        neighbours.setdefault(int(j), []).append(int(i))
    removed = np.zeros(len(cands), dtype=bool)
    for i in rank_order(cands):
        if removed[i] or not involved[i]:
            continue
        for j in neighbours[int(i)]:
            removed[j] = True
    return cands.take(np.flatnonzero(~removed))


def level_candidates(obj: ObjectiveSpec, level, box: BoxDomain | None = None, cfg: LevelSetConfig | None = None,
                     method: GradientMethod | None = None, counter: EvalCounter | None = None) -> CandidateSet:
    """Refined, de-duplicated points of the level set in grid order."""
    cfg = cfg or LevelSetConfig()
    box = box or obj.domain
    brackets = bracket_level_crossings(obj, level, box, cfg, counter)
    cands = refine_crossings(obj, level, brackets, cfg, method, counter)
    cell = (box.upper - box.lower) / (cfg.grid_resolution - 1)
    return merge_duplicates(cands, float(np.linalg.norm(cell)) * cfg.merge_factor)


def filter_candidates(cands: CandidateSet, cfg: LevelSetConfig | None = None) -> CandidateSet:
    cfg = cfg or LevelSetConfig()
    if isinstance(cands, list):
        cands = CandidateSet.from_candidates(cands, len(cands[0].x) if cands else 1)
    keep = cands.grad_norm > cfg.stationary_tol
    if cfg.filter_mode == "literal-negative":
        keep &= np.all(cands.grad < 0, axis=1)
    return cands.take(np.flatnonzero(keep))


def select_next_start(cands: CandidateSet) -> LevelCandidate:
    if isinstance(cands, list):
        cands = CandidateSet.from_candidates(cands, len(cands[0].x) if cands else 1)
    if len(cands) == 0:
        raise UsageError("cannot select a restart point from an empty candidate set")
    return cands[int(rank_order(cands)[0])]


def all_stationary(cands: CandidateSet, cfg: LevelSetConfig | None = None) -> bool:
    cfg = cfg or LevelSetConfig()
    if isinstance(cands, list):
        return all(c.grad_norm <= cfg.stationary_tol for c in cands)
    return bool(np.all(cands.grad_norm <= cfg.stationary_tol))
