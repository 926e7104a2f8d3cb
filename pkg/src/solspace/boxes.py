"""Axis-aligned boxes over the design space and the trim/grow primitives.

The solution space is a Cartesian product of per-DV intervals. ``trim``
removes bad samples by cutting intervals at their coordinates, keeping as
much good volume as possible; ``grow`` scales intervals about their midpoints
and clips to the design-space bounds. Both are deterministic and exact, so
they carry the solver's reproducibility guarantees.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from .adg import Classification
from .problem import Problem


@dataclass(frozen=True)
class Box:
    """Closed per-DV intervals, ordered like the problem's variables."""

    intervals: tuple[tuple[float, float], ...]

    def __post_init__(self):
        ivs = tuple((float(lo), float(hi)) for lo, hi in self.intervals)
        object.__setattr__(self, "intervals", ivs)
        for i, (lo, hi) in enumerate(ivs):
            if not (math.isfinite(lo) and math.isfinite(hi)):
                raise ValueError(f"interval {i} has non-finite bounds [{lo}, {hi}]")
            if lo > hi:
                raise ValueError(f"interval {i} inverted: [{lo}, {hi}]")

    @property
    def dimension(self) -> int:
        return len(self.intervals)

    @property
    def lower(self) -> np.ndarray:
        return np.array([lo for lo, _ in self.intervals])

    @property
    def upper(self) -> np.ndarray:
        return np.array([hi for _, hi in self.intervals])

    @property
    def widths(self) -> np.ndarray:
        return self.upper - self.lower

    def contains(self, x: Sequence[float]) -> bool:
        return all(lo <= v <= hi for v, (lo, hi) in zip(x, self.intervals))

    def interior_contains(self, x: Sequence[float]) -> bool:
        """Strict containment on every axis; boundary points are outside."""
        return all(lo < v < hi for v, (lo, hi) in zip(x, self.intervals))

    def with_interval(self, dim: int, lower: float, upper: float) -> "Box":
        ivs = list(self.intervals)
        ivs[dim] = (float(lower), float(upper))
        return Box(tuple(ivs))

    def to_jsonable(self) -> list[list[float]]:
        return [[lo, hi] for lo, hi in self.intervals]


def box_from_jsonable(data: Iterable[Sequence[float]]) -> Box:
    return Box(tuple((float(lo), float(hi)) for lo, hi in data))


def full_design_space_box(problem: Problem) -> Box:
    return Box(tuple((v.ds_lower, v.ds_upper) for v in problem.variables))


def check_box(problem: Problem, box: Box) -> None:
    """Box invariants against the problem: dimension and containment in DS."""
    if box.dimension != problem.dimension:
        raise ValueError(
            f"box has {box.dimension} intervals, problem has {problem.dimension} DVs"
        )
    for v, (lo, hi) in zip(problem.variables, box.intervals):
        if lo < v.ds_lower or hi > v.ds_upper:
            raise ValueError(
                f"box interval [{lo:.6g}, {hi:.6g}] for {v.name!r} exceeds "
                f"design space [{v.ds_lower:.6g}, {v.ds_upper:.6g}]"
            )


def mu(box: Box, problem: Problem) -> float:
    """Normalized volume: product of interval widths over design-space widths."""
    check_box(problem, box)
    return float(np.prod(box.widths / problem.ds_width))


def sample_uniform(box: Box, n: int, rng: np.random.Generator) -> np.ndarray:
    """n points uniform in the box, one row per point; deterministic in rng."""
    if n < 0:
        raise ValueError("n must be non-negative")
    lower = box.lower
    widths = box.widths
    return lower + rng.random((n, box.dimension)) * widths


def trim(
    box: Box,
    samples: Sequence[tuple[Sequence[float], Classification]],
    frozen_dims: Iterable[int] = (),
) -> Box:
    """Cut bad samples out of the box, greedily keeping good samples.

    Bad samples are processed in list order. A bad point still strictly
    inside the current box forces a cut: each non-frozen dimension offers two
    candidates (upper -> coordinate keeping the lower part, or lower ->
    coordinate keeping the upper part); the winner retains the most good
    samples, ties broken by larger remaining volume, then lower dimension
    index, then lower part. Cut coordinates become (closed) boundary, so the
    bad point itself no longer lies in the interior.
    """
    frozen = set(frozen_dims)
    for x, _ in samples:
        if not box.contains(x):
            raise ValueError(f"sample {np.asarray(x)} outside box")

    good = np.array([x for x, c in samples if c.is_good], dtype=float)
    if good.size == 0:
        good = np.empty((0, box.dimension))
    bads = [np.asarray(x, dtype=float) for x, c in samples if not c.is_good]

    lower = box.lower.astype(float)
    upper = box.upper.astype(float)
    cuttable = [i for i in range(box.dimension) if i not in frozen]

    for bad in bads:
        inside = np.all((lower < bad) & (bad < upper))
        if not inside:
            continue
        if not cuttable:
            raise ValueError("bad sample strictly inside box but all dimensions frozen")
        best = None  # (count, volume) of the best cut so far
        best_cut = None  # (dim, part)
        for dim in cuttable:
            for part in ("lower", "upper"):  # part kept after the cut
                if part == "lower":
                    n_good = int(np.sum(good[:, dim] <= bad[dim])) if len(good) else 0
                    width = bad[dim] - lower[dim]
                else:
                    n_good = int(np.sum(good[:, dim] >= bad[dim])) if len(good) else 0
                    width = upper[dim] - bad[dim]
                volume = width * float(
                    np.prod(np.delete(upper - lower, dim))
                )
                key = (n_good, volume)
                if best is None or key > best:
                    best = key
                    best_cut = (dim, part)
        dim, part = best_cut
        if part == "lower":
            upper[dim] = bad[dim]
            if len(good):
                good = good[good[:, dim] <= bad[dim]]
        else:
            lower[dim] = bad[dim]
            if len(good):
                good = good[good[:, dim] >= bad[dim]]

    return Box(tuple((float(lo), float(hi)) for lo, hi in zip(lower, upper)))


def grow(
    box: Box,
    factor: float,
    problem: Problem,
    frozen_dims: Iterable[int] = (),
) -> Box:
    """Scale intervals about their midpoints by factor, clipped to the DS."""
    if factor < 1.0:
        raise ValueError(f"growth factor must be >= 1, got {factor}")
    check_box(problem, box)
    frozen = set(frozen_dims)
    ivs = []
    for i, (lo, hi) in enumerate(box.intervals):
        if i in frozen:
            ivs.append((lo, hi))
            continue
        mid = 0.5 * (lo + hi)
        half = 0.5 * (hi - lo) * factor
        ivs.append((
            max(mid - half, problem.variables[i].ds_lower),
            min(mid + half, problem.variables[i].ds_upper),
        ))
    return Box(tuple(ivs))
