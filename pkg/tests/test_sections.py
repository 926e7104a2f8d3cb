"""Design sections: sampling spans, labels/colors, exporters."""

import csv
import io

import pytest

from solspace.adg import Classification
from solspace.boxes import Box
from solspace.sections import (
    COLOR_FIRST,
    COLOR_GOOD,
    COLOR_SECOND,
    SectionData,
    SectionPoint,
    default_section_dims,
    export_section,
    make_section,
    section_from_json,
)

TOY_BOX = Box(((0.0, 0.5), (0.0, 0.5)))


def test_points_reclassify_identically(toy2d):
    s = make_section(toy2d, TOY_BOX, dims=(0, 1), n=500)
    assert len(s.points) == 500
    for p in s.points:
        expect = "good" if p.x[0] + p.x[1] <= 1.0 else "cap"
        assert s.label(p) == expect
        fresh = toy2d.classify_design(p.x)
        assert fresh.violated == p.classification.violated
        assert fresh.infeasible_reason == p.classification.infeasible_reason


def test_design_space_span_covers_full_range(toy2d):
    s = make_section(toy2d, TOY_BOX, dims=(0, 1), n=800, span="design_space")
    xs = [s.on_axis(p)[0] for p in s.points]
    ys = [s.on_axis(p)[1] for p in s.points]
    assert max(xs) > 0.9 and max(ys) > 0.9  # escapes the box
    assert s.box_rect == ((0.0, 0.5), (0.0, 0.5))


def test_box_span_stays_inside(toy2d):
    s = make_section(toy2d, TOY_BOX, dims=(0, 1), n=300, span="box")
    for p in s.points:
        xi, xj = s.on_axis(p)
        assert 0.0 <= xi <= 0.5 and 0.0 <= xj <= 0.5


def test_off_axis_coordinates_stay_in_box(arm_problem, arm_solution):
    box = arm_solution.box
    s = make_section(arm_problem, box, dims=(0, 1), n=100)
    for p in s.points:
        for k in range(2, arm_problem.dimension):
            lo, hi = box.intervals[k]
            assert lo <= p.x[k] <= hi


def test_deterministic_given_seed(toy2d):
    a = make_section(toy2d, TOY_BOX, dims=(0, 1), n=100, seed=4)
    b = make_section(toy2d, TOY_BOX, dims=(0, 1), n=100, seed=4)
    assert a == b
    assert export_section(a, "svg") == export_section(b, "svg")
    assert export_section(a, "json") == export_section(b, "json")


def test_make_section_validation(toy2d):
    with pytest.raises(ValueError, match="distinct"):
        make_section(toy2d, TOY_BOX, dims=(1, 1))
    with pytest.raises(ValueError, match="distinct"):
        make_section(toy2d, TOY_BOX, dims=(0, 5))
    with pytest.raises(ValueError, match="span"):
        make_section(toy2d, TOY_BOX, dims=(0, 1), span="galaxy")
    with pytest.raises(ValueError, match="nonnegative"):
        make_section(toy2d, TOY_BOX, dims=(0, 1), n=-1)
    with pytest.raises(ValueError, match="dimension"):
        make_section(toy2d, Box(((0.0, 1.0),)), dims=(0, 1))


def test_json_round_trip(toy2d):
    s = make_section(toy2d, TOY_BOX, dims=(0, 1), n=64, seed=2)
    again = section_from_json(export_section(s, "json"))
    assert again == s


def test_csv_export(toy2d):
    s = make_section(toy2d, TOY_BOX, dims=(0, 1), n=32)
    rows = list(csv.reader(io.StringIO(export_section(s, "csv").decode("utf-8"))))
    assert rows[0] == ["xi", "xj", "label"]
    assert len(rows) == 33
    for row, p in zip(rows[1:], s.points):
        assert (float(row[0]), float(row[1])) == s.on_axis(p)
        assert row[2] == s.label(p)


def test_svg_export(toy2d):
    s = make_section(toy2d, TOY_BOX, dims=(0, 1), n=50)
    svg = export_section(s, "svg").decode("utf-8")
    assert svg.startswith("<svg")
    assert svg.rstrip().endswith("</svg>")
    assert "x1" in svg and "x2" in svg  # axis labels
    assert COLOR_GOOD in svg
    # the box rectangle outline is drawn
    assert "<rect" in svg


def test_export_unknown_format(toy2d):
    s = make_section(toy2d, TOY_BOX, dims=(0, 1), n=4)
    with pytest.raises(ValueError, match="format"):
        export_section(s, "png")


def _synthetic_section(points):
    return SectionData(
        dims=(0, 1),
        dv_names=("a1", "a2"),
        dv_units=("1", "1"),
        ds_bounds=((0.0, 1.0), (0.0, 1.0)),
        box_rect=((0.2, 0.8), (0.2, 0.8)),
        requirement_ids=("first", "second"),
        span="design_space",
        seed=0,
        points=tuple(points),
    )


def test_color_policy():
    mk = lambda c: SectionPoint((0.5, 0.5), c)
    s = _synthetic_section([])
    assert s.color(mk(Classification())) == COLOR_GOOD
    assert s.color(mk(Classification(violated=("first",)))) == COLOR_FIRST
    assert s.color(mk(Classification(violated=("second",)))) == COLOR_SECOND
    assert s.color(mk(Classification(violated=("first", "second")))) == COLOR_FIRST
    assert (
        s.color(mk(Classification(violated=("second",), infeasible_reason="simulation_failed")))
        == COLOR_FIRST
    )


def test_color_policy_on_separable(separable):
    s = make_section(separable, TOY_BOX, dims=(0, 1), n=400)
    for p in s.points:
        x1, x2 = p.x
        if x1 <= 0.5 and x2 <= 0.5:
            assert s.color(p) == COLOR_GOOD
        elif x1 > 0.5:
            assert s.color(p) == COLOR_FIRST  # cap_x1 is the first requirement
        else:
            assert s.color(p) == COLOR_SECOND


def test_section_data_validation():
    with pytest.raises(ValueError, match="differ"):
        _synthetic_section([]).__class__(
            dims=(1, 1), dv_names=("a", "a"), dv_units=("1", "1"),
            ds_bounds=((0.0, 1.0), (0.0, 1.0)), box_rect=((0.0, 1.0), (0.0, 1.0)),
            requirement_ids=(), span="design_space", seed=0, points=(),
        )


def test_default_dims(toy2d, arm_problem):
    assert default_section_dims(toy2d) == ((0, 1),)
    assert default_section_dims(arm_problem) == ((0, 1), (2, 3), (4, 5), (6, 7), (8, 9))
