"""Stochastic sample-trim-grow solver for the box maximization problem.

Phase I explores: repeatedly sample the current box, classify, trim away bad
samples, then grow by the current growth factor; the factor decays toward 1
whenever the normalized volume stops improving, and the phase ends once the
volume has been stagnant for three consecutive iterations. Phase II
consolidates with growth off, resampling and trimming until one full batch
contains no bad sample. Everything downstream of the seed is driven by one
PCG64 generator, so (problem, seed point, params) determine the result
bit-exactly.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field
from typing import Iterable, Optional, Sequence

import numpy as np

from .adg import Classification
from .boxes import Box, check_box, grow, mu, sample_uniform, trim
from .errors import SolspaceError
from .problem import Problem

STAGNANT_ITERS_TO_STOP = 3
SEED_BOX_FRACTION = 0.01  # initial box width as a fraction of DS width


class SeedInfeasibleError(SolspaceError):
    def __init__(self, violated: tuple[str, ...], reason: Optional[str] = None):
        detail = f" (infeasible: {reason})" if reason else ""
        super().__init__(
            "seed point classifies bad; violated requirements: "
            + ", ".join(violated) + detail
        )
        self.violated = violated


class NestingError(SolspaceError):
    """Trade-off interval is not nested inside the current interval."""


class RestrictionInfeasibleError(SolspaceError):
    """No good sample found inside the restricted box."""


@dataclass(frozen=True)
class SolverParams:
    n_samples: int = 100
    growth: float = 1.3
    growth_decay: float = 0.8
    phase1_max_iters: int = 50
    phase2_max_iters: int = 20
    stagnation_tol: float = 1e-3
    seed: int = 0

    def __post_init__(self):
        if self.n_samples < 10:
            raise ValueError("n_samples must be >= 10")
        if not self.growth > 1.0:
            raise ValueError("growth must be > 1")
        if not 0.0 < self.growth_decay < 1.0:
            raise ValueError("growth_decay must lie in (0, 1)")
        if self.phase1_max_iters < 1 or self.phase2_max_iters < 1:
            raise ValueError("phase iteration limits must be >= 1")
        if not self.stagnation_tol > 0.0:
            raise ValueError("stagnation_tol must be > 0")

    def to_jsonable(self) -> dict:
        return {
            "n_samples": self.n_samples,
            "growth": self.growth,
            "growth_decay": self.growth_decay,
            "phase1_max_iters": self.phase1_max_iters,
            "phase2_max_iters": self.phase2_max_iters,
            "stagnation_tol": self.stagnation_tol,
            "seed": self.seed,
        }


@dataclass(frozen=True)
class IterationRecord:
    phase: int
    mu: float
    bad_fraction: float
    box: Box

    def to_jsonable(self) -> dict:
        return {
            "phase": self.phase,
            "mu": self.mu,
            "bad_fraction": self.bad_fraction,
            "box": self.box.to_jsonable(),
        }


@dataclass(frozen=True)
class SolverTrace:
    records: tuple[IterationRecord, ...] = ()

    @property
    def final_box(self) -> Box:
        return self.records[-1].box

    def to_jsonable(self) -> list[dict]:
        return [r.to_jsonable() for r in self.records]


def _classify_batch(
    problem: Problem, points: np.ndarray
) -> list[tuple[np.ndarray, Classification]]:
    # Results are consumed in sample order so runs stay seed-reproducible.
    return [(p, problem.classify_design(p)) for p in points]


def _run_phases(
    problem: Problem,
    box: Box,
    params: SolverParams,
    rng: np.random.Generator,
    frozen_dims: Iterable[int] = (),
    require_good_in_first_batch: bool = False,
) -> tuple[Box, SolverTrace]:
    frozen = tuple(sorted(set(frozen_dims)))
    records: list[IterationRecord] = []
    mu_prev: Optional[float] = None
    mu_best = 0.0
    no_gain = 0
    stagnant = 0

    for it in range(params.phase1_max_iters):
        points = sample_uniform(box, params.n_samples, rng)
        samples = _classify_batch(problem, points)
        n_bad = sum(1 for _, c in samples if not c.is_good)
        if require_good_in_first_batch and it == 0 and n_bad == params.n_samples:
            raise RestrictionInfeasibleError(
                "restricted box contains no good sample in the first batch"
            )
        box = trim(box, samples, frozen_dims=frozen)
        m = mu(box, problem)
        records.append(IterationRecord(1, m, n_bad / params.n_samples, box))

        # Stagnation drives the growth factor: each iteration that fails to
        # set a new record volume decays the factor one step further toward 1,
        # and a record recovers it. A box migrating off a boundary seed keeps
        # its momentum this way, while a converged box settles into trim-only.
        if m > mu_best * (1.0 + params.stagnation_tol):
            mu_best = m
            no_gain = 0
        else:
            no_gain += 1
        factor = 1.0 + (params.growth - 1.0) * params.growth_decay**no_gain
        if mu_prev is not None:
            # Relative stagnation; the floor only guards mu_prev == 0 and must
            # stay far below any representable box volume, or high-dimensional
            # boxes (mu ~ width^d) would read as stagnant while still growing.
            if abs(m - mu_prev) <= params.stagnation_tol * max(mu_prev, 1e-300):
                stagnant += 1
            else:
                stagnant = 0
        mu_prev = m
        if stagnant >= STAGNANT_ITERS_TO_STOP:
            break
        box = grow(box, factor, problem, frozen_dims=frozen)

    for _ in range(params.phase2_max_iters):
        points = sample_uniform(box, params.n_samples, rng)
        samples = _classify_batch(problem, points)
        n_bad = sum(1 for _, c in samples if not c.is_good)
        box = trim(box, samples, frozen_dims=frozen)
        records.append(IterationRecord(2, mu(box, problem), n_bad / params.n_samples, box))
        if n_bad == 0:
            break

    return box, SolverTrace(tuple(records))


def seed_box(problem: Problem, seed_point: Sequence[float]) -> Box:
    """Initial box: 1% of the design-space width per DV around the seed."""
    x = problem.check_point(seed_point, what="seed point")
    half = 0.5 * SEED_BOX_FRACTION * problem.ds_width
    lo = np.maximum(x - half, problem.ds_lower)
    hi = np.minimum(x + half, problem.ds_upper)
    return Box(tuple(zip(lo.tolist(), hi.tolist())))


def solve_box(
    problem: Problem,
    seed_point: Sequence[float],
    params: SolverParams = SolverParams(),
) -> tuple[Box, SolverTrace]:
    """Maximize the solution box from a good seed design.

    Raises :class:`SeedInfeasibleError` when the seed itself violates a
    requirement. The returned box need not contain the seed point; trimming
    may cut it away while chasing volume.
    """
    cls = problem.classify_design(seed_point)
    if not cls.is_good:
        raise SeedInfeasibleError(cls.violated, cls.infeasible_reason)
    rng = np.random.default_rng(params.seed)
    return _run_phases(problem, seed_box(problem, seed_point), params, rng)


def validate_box(problem: Problem, box: Box, n: int, seed: int) -> float:
    """Purity: fraction of n fresh uniform in-box samples classifying good."""
    check_box(problem, box)
    if n == 0:
        warnings.warn(
            "validate_box called with n=0; purity defined as 1.0",
            RuntimeWarning, stacklevel=2,
        )
        return 1.0
    rng = np.random.default_rng(seed)
    points = sample_uniform(box, n, rng)
    n_good = sum(1 for p in points if problem.classify_design(p).is_good)
    return n_good / n


def restrict_and_resolve(
    problem: Problem,
    box: Box,
    dv: str,
    new_interval: tuple[float, float],
    params: SolverParams = SolverParams(),
) -> tuple[Box, SolverTrace]:
    """Trade-off: pin one DV to a nested interval and re-solve the rest.

    The pinned dimension is excluded from growth and trimming, so the
    returned box carries exactly ``new_interval`` there; the remaining
    intervals are re-expanded from the restricted box.
    """
    check_box(problem, box)
    idx = problem.variable_index(dv)
    lo, hi = float(new_interval[0]), float(new_interval[1])
    cur_lo, cur_hi = box.intervals[idx]
    if not lo <= hi:
        raise NestingError(f"interval for {dv!r} is inverted: [{lo:.6g}, {hi:.6g}]")
    if lo < cur_lo or hi > cur_hi:
        raise NestingError(
            f"interval [{lo:.6g}, {hi:.6g}] for {dv!r} is not nested in the "
            f"current interval [{cur_lo:.6g}, {cur_hi:.6g}]"
        )
    restricted = box.with_interval(idx, lo, hi)
    rng = np.random.default_rng(params.seed)
    return _run_phases(
        problem, restricted, params, rng,
        frozen_dims=(idx,), require_good_in_first_batch=True,
    )
