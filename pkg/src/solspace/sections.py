"""Design sections: 2D scatter projections of a solution box.

A section fixes two design variables as plot axes, draws the remaining
coordinates uniformly inside the box, and classifies every point. Exported
images show the local good/bad boundary around the box rectangle.
"""

from __future__ import annotations

import csv
import io
import json
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .adg import Classification
from .boxes import Box, sample_uniform
from .jsonutil import canonical_dumps
from .problem import Problem

SPANS = ("box", "design_space")

COLOR_GOOD = "#2ca02c"
COLOR_FIRST = "#d62728"
COLOR_SECOND = "#1f77b4"

DEFAULT_SECTION_SAMPLES = 1000

_SVG_WIDTH = 640
_SVG_HEIGHT = 480
_MARGIN_LEFT = 70
_MARGIN_RIGHT = 20
_MARGIN_TOP = 20
_MARGIN_BOTTOM = 50
_N_TICKS = 5


@dataclass(frozen=True)
class SectionPoint:
    """One classified sample; `x` is the complete design vector."""

    x: tuple[float, ...]
    classification: Classification

    def to_jsonable(self) -> dict:
        return {
            "x": list(self.x),
            "violated": list(self.classification.violated),
            "infeasible_reason": self.classification.infeasible_reason,
        }


@dataclass(frozen=True)
class SectionData:
    dims: tuple[int, int]
    dv_names: tuple[str, str]
    dv_units: tuple[str, str]
    ds_bounds: tuple[tuple[float, float], tuple[float, float]]
    box_rect: tuple[tuple[float, float], tuple[float, float]]
    requirement_ids: tuple[str, ...]
    span: str
    seed: int
    points: tuple[SectionPoint, ...]

    def __post_init__(self):
        if self.span not in SPANS:
            raise ValueError(f"span must be one of {SPANS}, got {self.span!r}")
        i, j = self.dims
        if i == j:
            raise ValueError("section dims must differ")

    def on_axis(self, point: SectionPoint) -> tuple[float, float]:
        return point.x[self.dims[0]], point.x[self.dims[1]]

    def label(self, point: SectionPoint) -> str:
        c = point.classification
        if c.is_good:
            return "good"
        if c.infeasible_reason is not None:
            return c.infeasible_reason
        return "+".join(c.violated)

    def color(self, point: SectionPoint) -> str:
        """Good is green; anything touching the first requirement (or an
        infeasible design) is red; a pure second-requirement violation is blue."""
        c = point.classification
        if c.is_good:
            return COLOR_GOOD
        if c.infeasible_reason is not None:
            return COLOR_FIRST
        if self.requirement_ids and self.requirement_ids[0] in c.violated:
            return COLOR_FIRST
        return COLOR_SECOND

    def to_jsonable(self) -> dict:
        return {
            "dims": list(self.dims),
            "dv_names": list(self.dv_names),
            "dv_units": list(self.dv_units),
            "ds_bounds": [list(b) for b in self.ds_bounds],
            "box_rect": [list(b) for b in self.box_rect],
            "requirement_ids": list(self.requirement_ids),
            "span": self.span,
            "seed": self.seed,
            "points": [p.to_jsonable() for p in self.points],
        }


def make_section(
    problem: Problem,
    box: Box,
    dims: tuple[int, int],
    n: int = DEFAULT_SECTION_SAMPLES,
    seed: int = 0,
    span: str = "design_space",
) -> SectionData:
    """Sample and classify a 2D section through the box.

    On-axis coordinates are uniform over the chosen span (the full
    design-space range by default, so points beyond the box show where the
    good region ends); off-axis coordinates are always uniform inside the box.
    """
    i, j = dims
    d = problem.dimension
    if i == j or not (0 <= i < d) or not (0 <= j < d):
        raise ValueError(f"dims must be two distinct indices below {d}, got {dims}")
    if span not in SPANS:
        raise ValueError(f"span must be one of {SPANS}, got {span!r}")
    if n < 0:
        raise ValueError(f"n must be nonnegative, got {n}")
    check = box.dimension == d
    if not check:
        raise ValueError(f"box dimension {box.dimension} != problem dimension {d}")

    if span == "design_space":
        ranges = ((problem.ds_lower[i], problem.ds_upper[i]),
                  (problem.ds_lower[j], problem.ds_upper[j]))
    else:
        ranges = (box.intervals[i], box.intervals[j])

    rng = np.random.default_rng(seed)
    pts = sample_uniform(box, n, rng)
    for axis, (lo, hi) in zip((i, j), ranges):
        pts[:, axis] = lo + rng.random(n) * (hi - lo)

    points = tuple(
        SectionPoint(tuple(float(v) for v in row), problem.classify_design(row))
        for row in pts
    )
    return SectionData(
        dims=(i, j),
        dv_names=(problem.variables[i].name, problem.variables[j].name),
        dv_units=(problem.variables[i].unit, problem.variables[j].unit),
        ds_bounds=(
            (float(problem.ds_lower[i]), float(problem.ds_upper[i])),
            (float(problem.ds_lower[j]), float(problem.ds_upper[j])),
        ),
        box_rect=(box.intervals[i], box.intervals[j]),
        requirement_ids=tuple(r.id for r in problem.requirements),
        span=span,
        seed=seed,
        points=points,
    )


def export_section(section: SectionData, format: str) -> bytes:
    if format == "json":
        return canonical_dumps(section.to_jsonable()).encode("utf-8")
    if format == "csv":
        return _to_csv(section)
    if format == "svg":
        return _to_svg(section)
    raise ValueError(f"format must be json, csv, or svg, got {format!r}")


def section_from_json(data: bytes | str) -> SectionData:
    obj = json.loads(data)
    points = tuple(
        SectionPoint(
            tuple(float(v) for v in p["x"]),
            Classification(tuple(p["violated"]), p["infeasible_reason"]),
        )
        for p in obj["points"]
    )
    return SectionData(
        dims=(obj["dims"][0], obj["dims"][1]),
        dv_names=tuple(obj["dv_names"]),
        dv_units=tuple(obj["dv_units"]),
        ds_bounds=tuple((float(a), float(b)) for a, b in obj["ds_bounds"]),
        box_rect=tuple((float(a), float(b)) for a, b in obj["box_rect"]),
        requirement_ids=tuple(obj["requirement_ids"]),
        span=obj["span"],
        seed=obj["seed"],
        points=points,
    )


def _to_csv(section: SectionData) -> bytes:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["xi", "xj", "label"])
    for p in section.points:
        xi, xj = section.on_axis(p)
        writer.writerow([repr(xi), repr(xj), section.label(p)])
    return buf.getvalue().encode("utf-8")


def _fmt_tick(v: float) -> str:
    return f"{v:.4g}"


def _to_svg(section: SectionData) -> bytes:
    (xlo, xhi), (ylo, yhi) = _plot_ranges(section)
    pw = _SVG_WIDTH - _MARGIN_LEFT - _MARGIN_RIGHT
    ph = _SVG_HEIGHT - _MARGIN_TOP - _MARGIN_BOTTOM

    def px(x: float) -> float:
        return _MARGIN_LEFT + (x - xlo) / (xhi - xlo) * pw

    def py(y: float) -> float:
        return _MARGIN_TOP + (yhi - y) / (yhi - ylo) * ph

    out = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{_SVG_WIDTH}" '
        f'height="{_SVG_HEIGHT}" viewBox="0 0 {_SVG_WIDTH} {_SVG_HEIGHT}">',
        f'<rect x="0" y="0" width="{_SVG_WIDTH}" height="{_SVG_HEIGHT}" fill="white"/>',
        f'<rect x="{_MARGIN_LEFT}" y="{_MARGIN_TOP}" width="{pw}" height="{ph}" '
        'fill="none" stroke="#888" stroke-width="1"/>',
    ]

    for k in range(_N_TICKS):
        f = k / (_N_TICKS - 1)
        xv = xlo + f * (xhi - xlo)
        yv = ylo + f * (yhi - ylo)
        xp, yp = px(xv), py(yv)
        out.append(
            f'<line x1="{xp:.2f}" y1="{_MARGIN_TOP + ph}" x2="{xp:.2f}" '
            f'y2="{_MARGIN_TOP + ph + 5}" stroke="#444" stroke-width="1"/>'
        )
        out.append(
            f'<text x="{xp:.2f}" y="{_MARGIN_TOP + ph + 18}" font-size="11" '
            f'font-family="sans-serif" text-anchor="middle">{_fmt_tick(xv)}</text>'
        )
        out.append(
            f'<line x1="{_MARGIN_LEFT - 5}" y1="{yp:.2f}" x2="{_MARGIN_LEFT}" '
            f'y2="{yp:.2f}" stroke="#444" stroke-width="1"/>'
        )
        out.append(
            f'<text x="{_MARGIN_LEFT - 8}" y="{yp + 4:.2f}" font-size="11" '
            f'font-family="sans-serif" text-anchor="end">{_fmt_tick(yv)}</text>'
        )

    for p in section.points:
        xi, xj = section.on_axis(p)
        out.append(
            f'<circle cx="{px(xi):.2f}" cy="{py(xj):.2f}" r="2" '
            f'fill="{section.color(p)}" fill-opacity="0.7"/>'
        )

    (blo, bhi), (clo, chi) = section.box_rect
    out.append(
        f'<rect x="{px(blo):.2f}" y="{py(chi):.2f}" width="{px(bhi) - px(blo):.2f}" '
        f'height="{py(clo) - py(chi):.2f}" fill="none" stroke="black" stroke-width="1.5"/>'
    )

    xname = f"{section.dv_names[0]} [{section.dv_units[0]}]"
    yname = f"{section.dv_names[1]} [{section.dv_units[1]}]"
    out.append(
        f'<text x="{_MARGIN_LEFT + pw / 2:.2f}" y="{_SVG_HEIGHT - 10}" font-size="13" '
        f'font-family="sans-serif" text-anchor="middle">{xname}</text>'
    )
    out.append(
        f'<text x="16" y="{_MARGIN_TOP + ph / 2:.2f}" font-size="13" '
        f'font-family="sans-serif" text-anchor="middle" '
        f'transform="rotate(-90 16 {_MARGIN_TOP + ph / 2:.2f})">{yname}</text>'
    )
    out.append("</svg>")
    return ("\n".join(out) + "\n").encode("utf-8")


def _plot_ranges(section: SectionData) -> tuple[tuple[float, float], tuple[float, float]]:
    if section.span == "design_space":
        return section.ds_bounds
    return section.box_rect


def default_section_dims(problem: Problem) -> tuple[tuple[int, int], ...]:
    """Adjacent DV pairs (0,1), (2,3), ... used by the CLI when --dims is omitted."""
    idx = list(range(problem.dimension))
    return tuple((idx[k], idx[k + 1]) for k in range(0, len(idx) - 1, 2))
