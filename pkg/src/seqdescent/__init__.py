"""Sequential steepest descent with level-set restarts for global minimization."""

from ._kernels import BACKEND
from .core import (
    BoxDomain,
    EvalCounter,
    GradientMethod,
    NumericDomainError,
    ObjectiveNotFound,
    ObjectiveSpec,
    UsageError,
    builtin_objectives,
    clamp_to_box,
    evaluate,
    get_objective,
    gradient,
    gradient_check,
)
from .descent import DescentParams, LineSearchParams, LocalMinimum, descend
from .levelset import LevelSetConfig, level_candidates
from .solver import SgdConfig, SolveReport, solve

__version__ = "0.1.0"
