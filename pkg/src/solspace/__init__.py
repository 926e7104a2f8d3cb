"""Solution-space toolkit: box-shaped design domains from system requirements."""

__version__ = "0.1.0"

from .adg import (
    Adg,
    Classification,
    DesignVariable,
    MappingDomainError,
    Requirement,
    classify,
    evaluate,
    validate_adg,
)
from .baseline import (
    BaselineResult,
    NoFeasibleBaselineError,
    baseline_from_point,
    derive_requirements,
    optimize_baseline,
    scalarize,
)
from .boxes import Box, check_box, full_design_space_box, grow, mu, sample_uniform, trim
from .errors import SolspaceError
from .problem import Problem, ProblemLoadError, builtin_problem, builtin_problem_names, load_problem
from .solver import (
    SeedInfeasibleError,
    SolverParams,
    SolverTrace,
    restrict_and_resolve,
    solve_box,
    validate_box,
)

__all__ = [
    "Adg",
    "BaselineResult",
    "Box",
    "Classification",
    "DesignVariable",
    "MappingDomainError",
    "NoFeasibleBaselineError",
    "Problem",
    "ProblemLoadError",
    "Requirement",
    "SeedInfeasibleError",
    "SolspaceError",
    "SolverParams",
    "SolverTrace",
    "baseline_from_point",
    "builtin_problem",
    "builtin_problem_names",
    "check_box",
    "classify",
    "derive_requirements",
    "evaluate",
    "full_design_space_box",
    "grow",
    "load_problem",
    "mu",
    "optimize_baseline",
    "restrict_and_resolve",
    "sample_uniform",
    "scalarize",
    "solve_box",
    "trim",
    "validate_adg",
    "validate_box",
    "__version__",
]
