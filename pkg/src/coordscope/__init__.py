"""Coordination analysis for differentiable two-agent decision problems.

Finds stationary points of a common objective, classifies them by the
time-sets on which the agents are jointly optimal, and solves the team's
coordination-scheduling problem.
"""

__version__ = "0.1.0"

from coordscope.problems import (
    IndexMap,
    ProblemDims,
    TwoAgentProblem,
    make_dynamic_separation,
    make_quadratic_coupling,
    make_static_separation,
)
from coordscope.calculus import FdSettings, fd_gradient, fd_hessian
from coordscope.search import SearchSettings, StationaryPoint, newton_solve, search
from coordscope.classifier import (
    SolutionAtlas,
    SolutionRecord,
    TimeSet,
    classify,
    enumerate_sets,
    is_pd,
    maximal_sets,
    subblock,
)
from coordscope.planner import (
    CoordinationInstance,
    CoordinationResult,
    build_instance,
    solve,
    solve_oracle,
)

__all__ = [
    "__version__",
    "IndexMap",
    "ProblemDims",
    "TwoAgentProblem",
    "make_dynamic_separation",
    "make_quadratic_coupling",
    "make_static_separation",
    "FdSettings",
    "fd_gradient",
    "fd_hessian",
    "SearchSettings",
    "StationaryPoint",
    "newton_solve",
    "search",
    "SolutionAtlas",
    "SolutionRecord",
    "TimeSet",
    "classify",
    "enumerate_sets",
    "is_pd",
    "maximal_sets",
    "subblock",
    "CoordinationInstance",
    "CoordinationResult",
    "build_instance",
    "solve",
    "solve_oracle",
]
