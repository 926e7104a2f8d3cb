"""ADG core: validation defects, topological evaluation, classification."""

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from solspace.adg import (
    Adg,
    AdgNode,
    Classification,
    MappingDomainError,
    Requirement,
    classify,
    evaluate,
    validate_adg,
)


def _chain_adg():
    # x -> mid -> y with mid = x + 1, y = mid^2
    return Adg(
        nodes=(
            AdgNode("x", "dv"),
            AdgNode("mid", "intermediate"),
            AdgNode("y", "qoi"),
        ),
        edges=(("x", "mid"), ("mid", "y")),
        mappings={"mid": "add_one", "y": "square"},
        functions={"mid": lambda x: x + 1.0, "y": lambda m: m * m},
        arities={"mid": 1, "y": 1},
    )


def test_validate_ok_topo_order():
    report = validate_adg(_chain_adg())
    assert report.ok
    assert report.defects == ()
    order = list(report.topo_order)
    assert order.index("x") < order.index("mid") < order.index("y")


def test_node_kind_checked():
    with pytest.raises(ValueError, match="kind"):
        AdgNode("x", "output")


@pytest.mark.parametrize(
    "mutate, fragment",
    [
        (lambda a: setattr(a, "nodes", a.nodes + (AdgNode("x", "dv"),)), "duplicate"),
        (lambda a: setattr(a, "edges", a.edges + (("ghost", "y"),)), "dangling"),
        (lambda a: setattr(a, "edges", a.edges + (("y", "x"),)), "cycle"),
        (lambda a: setattr(a, "edges", a.edges + (("mid", "x"),)), "incoming"),
        (lambda a: setattr(a, "edges", a.edges + (("y", "mid"),)), "outgoing"),
        (lambda a: a.mappings.pop("mid"), "no registered mapping"),
        (lambda a: a.mappings.update(x="identity"), "must not carry"),
        (lambda a: a.arities.update(y=2), "arity mismatch"),
    ],
)
def test_validate_defects(mutate, fragment):
    adg = _chain_adg()
    mutate(adg)
    report = validate_adg(adg)
    assert not report.ok
    assert any(fragment in d for d in report.defects), report.defects


def test_evaluate_chain():
    res = evaluate(_chain_adg(), [2.0])
    assert res.qois == {"y": 9.0}
    assert res.infeasible_reason is None
    assert not res.timed_out


def test_evaluate_rejects_wrong_arity_input():
    with pytest.raises(ValueError, match="ADG has 1 DV"):
        evaluate(_chain_adg(), [2.0, 3.0])


def test_evaluate_rejects_invalid_graph():
    adg = _chain_adg()
    adg.edges = adg.edges + (("y", "x"),)
    with pytest.raises(ValueError, match="invalid ADG"):
        evaluate(adg, [2.0])


def test_domain_error_propagates_to_descendants():
    adg = _chain_adg()

    def boom(x):
        raise MappingDomainError("unreachable_workspace", "test")

    adg.functions["mid"] = boom
    res = evaluate(adg, [2.0])
    assert res.qois == {"y": None}
    assert res.infeasible_reason == "unreachable_workspace"


def test_domain_error_reason_vocabulary_enforced():
    with pytest.raises(ValueError, match="reason"):
        MappingDomainError("bad_vibes")


def test_evaluate_pure(toy2d):
    @given(st.lists(st.floats(0.0, 1.0), min_size=2, max_size=2))
    def inner(x):
        a = evaluate(toy2d.adg, x)
        b = evaluate(toy2d.adg, x)
        assert a == b
        assert a.qois["y"] == pytest.approx(x[0] + x[1], abs=0)

    inner()


# requirements and classification


def test_requirement_validation():
    with pytest.raises(ValueError):
        Requirement("r", "y", "less_than", 1.0)
    with pytest.raises(ValueError):
        Requirement("r", "y", "less_equal", float("nan"))


def test_requirement_satisfied_by():
    le = Requirement("r", "y", "less_equal", 1.0)
    ge = Requirement("r", "y", "greater_equal", 1.0)
    assert le.satisfied_by(1.0) and ge.satisfied_by(1.0)
    assert le.satisfied_by(0.5) and not ge.satisfied_by(0.5)
    assert not le.satisfied_by(1.5) and ge.satisfied_by(1.5)


def test_classification_invariants():
    assert Classification().is_good
    assert not Classification(violated=("r",)).is_good
    with pytest.raises(ValueError):
        Classification(infeasible_reason="unreachable_workspace")
    with pytest.raises(ValueError):
        Classification(violated=("r",), infeasible_reason="bad_vibes")


def test_classify_thresholds():
    reqs = (Requirement("cap", "y", "less_equal", 1.0),)
    assert classify({"y": 0.9}, reqs).is_good
    assert classify({"y": 1.0}, reqs).is_good  # boundary counts as good
    assert classify({"y": 1.1}, reqs).violated == ("cap",)


def test_classify_missing_qoi_is_a_bug():
    with pytest.raises(KeyError):
        classify({}, (Requirement("cap", "y", "less_equal", 1.0),))


def test_classify_undefined_qoi():
    reqs = (Requirement("cap", "y", "less_equal", 1.0),)
    c = classify({"y": None}, reqs, infeasible_reason="simulation_failed")
    assert not c.is_good
    assert c.violated == ("cap",)
    assert c.infeasible_reason == "simulation_failed"


def test_classify_drops_reason_when_all_qois_defined():
    # a reason without an undefined QoI behind it would mislabel the point
    reqs = (Requirement("cap", "y", "less_equal", 1.0),)
    c = classify({"y": 2.0}, reqs, infeasible_reason="simulation_failed")
    assert c.violated == ("cap",)
    assert c.infeasible_reason is None


def test_classify_no_requirements_always_good():
    assert classify({"y": 123.0}, ()).is_good
