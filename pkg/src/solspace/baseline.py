"""Point-based co-design baseline and requirement derivation.

The baseline design is the anchor of the whole workflow: a conventional
single-point optimum whose QoI values become the requirement thresholds
(cycle_time <= cycle_time(x_baseline), energy <= energy(x_baseline)). The
optimizer is a deliberately plain elitist evolution strategy: sample a
population of Gaussian mutants around the incumbent, keep the best, shrink
the step when progress stalls. Derivative-free, deterministic given the
seed, and indifferent to the simulator's non-smoothness.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Mapping, Optional, Sequence

import numpy as np

from .adg import Requirement
from .errors import SolspaceError
from .problem import Problem

POPULATION = 16
STEP_SHRINK = 0.7
SHRINK_AFTER_STAGNANT = 5
PENALTY = 1e9
INITIAL_STEP_FRACTION = 0.2  # of the design-space width, per DV

# Rough magnitude normalization so seconds and joules are commensurable.
DEFAULT_WEIGHT_SCALES = {"cycle_time": 1.0, "energy": 1e-3}


class NoFeasibleBaselineError(SolspaceError):
    """No feasible design found within the evaluation budget."""

    def __init__(self, budget: int, best_x: tuple[float, ...], best_objective: float):
        super().__init__(
            f"no feasible design within {budget} evaluations; "
            f"best infeasible candidate has objective {best_objective:.6g}"
        )
        self.best_x = best_x
        self.best_objective = best_objective


@dataclass(frozen=True)
class BaselineResult:
    x_baseline: tuple[float, ...]
    qois: dict[str, float]
    objective: float
    evaluations_used: int
    history: tuple[float, ...]  # best objective after each generation


def default_weights(problem: Problem) -> dict[str, float]:
    return {q: DEFAULT_WEIGHT_SCALES.get(q, 1.0) for q in problem.qoi_names}


def scalarize(
    qois: Mapping[str, Optional[float]],
    weights: Mapping[str, float],
    timed_out: bool = False,
) -> float:
    """Weighted QoI sum plus one penalty per violated feasibility condition.

    Undefined QoIs (unreachable workspace, failed simulation) and timeouts
    each add a large finite penalty, keeping candidates totally ordered
    without NaN special cases.
    """
    total = 0.0
    undefined = False
    for name, w in weights.items():
        if w < 0:
            raise ValueError(f"weight for {name!r} must be non-negative")
        value = qois[name]
        if value is None:
            undefined = True
        else:
            total += w * value
    if undefined:
        total += PENALTY
    if timed_out:
        total += PENALTY
    return total


def _evaluate_candidate(
    problem: Problem, x: np.ndarray, weights: Mapping[str, float]
) -> tuple[float, bool, dict]:
    res = problem.evaluate_design(x)
    objective = scalarize(res.qois, weights, timed_out=res.timed_out)
    feasible = res.infeasible_reason is None and not res.timed_out
    return objective, feasible, res.qois


def optimize_baseline(
    problem: Problem,
    weights: Optional[Mapping[str, float]] = None,
    budget: int = 2000,
    seed: int = 0,
) -> BaselineResult:
    """Best feasible design found by a (1+15)-style ES within the budget.

    Generation 0 evaluates a uniform random start point plus 15 mutants;
    later generations evaluate 16 mutants of the incumbent each. The incumbent
    survives on its cached objective, so the best objective is non-increasing
    across generations. Raises :class:`NoFeasibleBaselineError` when every
    evaluated candidate was infeasible.
    """
    if budget < POPULATION:
        raise ValueError(f"budget must be >= population size ({POPULATION})")
    if weights is None:
        weights = default_weights(problem)
    for name in weights:
        if name not in problem.qoi_names:
            raise ValueError(f"weight references unknown QoI {name!r}")

    rng = np.random.default_rng(seed)
    lower, upper = problem.ds_lower, problem.ds_upper
    step = INITIAL_STEP_FRACTION * problem.ds_width

    incumbent = lower + rng.random(problem.dimension) * (upper - lower)
    incumbent_obj = None
    best_feasible: Optional[tuple[float, np.ndarray, dict]] = None
    best_any: Optional[tuple[float, np.ndarray]] = None
    history: list[float] = []
    evaluations = 0
    stagnant = 0

    generations = 1 + (budget - POPULATION) // POPULATION
    for gen in range(generations):
        candidates = []
        if gen == 0:
            candidates.append(incumbent.copy())
        n_mutants = POPULATION - len(candidates)
        mutants = incumbent + rng.standard_normal((n_mutants, problem.dimension)) * step
        candidates.extend(np.clip(m, lower, upper) for m in mutants)

        gen_best_obj = None
        gen_best_x = None
        for x in candidates:
            obj, feasible, qois = _evaluate_candidate(problem, x, weights)
            evaluations += 1
            if feasible and (best_feasible is None or obj < best_feasible[0]):
                best_feasible = (obj, x.copy(), dict(qois))
            if best_any is None or obj < best_any[0]:
                best_any = (obj, x.copy())
            if gen_best_obj is None or obj < gen_best_obj:
                gen_best_obj = obj
                gen_best_x = x

        if incumbent_obj is None or gen_best_obj < incumbent_obj:
            incumbent = gen_best_x.copy()
            incumbent_obj = gen_best_obj
            stagnant = 0
        else:
            stagnant += 1
            if stagnant >= SHRINK_AFTER_STAGNANT:
                step = step * STEP_SHRINK
                stagnant = 0
        history.append(incumbent_obj)

    if best_feasible is None:
        obj, x = best_any
        raise NoFeasibleBaselineError(budget, tuple(float(v) for v in x), obj)

    obj, x, qois = best_feasible
    ordered_qois = {q: float(qois[q]) for q in problem.qoi_names}
    return BaselineResult(
        x_baseline=tuple(float(v) for v in x),
        qois=ordered_qois,
        objective=float(obj),
        evaluations_used=evaluations,
        history=tuple(history),
    )


def derive_requirements(baseline: BaselineResult) -> tuple[Requirement, ...]:
    """One less_equal requirement per QoI, threshold exactly the baseline value."""
    for name, value in baseline.qois.items():
        if value is None:
            raise ValueError(f"baseline QoI {name!r} is undefined; baseline must be feasible")
    return tuple(
        Requirement(id=f"max_{name}", qoi=name, comparator="less_equal", threshold=value)
        for name, value in baseline.qois.items()
    )


def baseline_from_point(problem: Problem, x: Sequence[float]) -> BaselineResult:
    """Wrap a literal reference design (e.g. the problem file's x_baseline)."""
    arr = problem.check_point(x, what="x_baseline")
    res = problem.evaluate_design(arr)
    if res.infeasible_reason is not None or res.timed_out:
        raise NoFeasibleBaselineError(0, tuple(float(v) for v in arr), PENALTY)
    qois = {q: float(res.qois[q]) for q in problem.qoi_names}
    return BaselineResult(
        x_baseline=tuple(float(v) for v in arr),
        qois=qois,
        objective=scalarize(qois, default_weights(problem)),
        evaluations_used=1,
        history=(),
    )
