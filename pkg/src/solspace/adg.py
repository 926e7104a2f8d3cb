"""Attribute dependency graphs: design variables, requirements, evaluation.

An ADG is a directed acyclic graph whose source nodes are design variables
(DVs), whose sinks are quantities of interest (QoIs), and whose non-source
nodes each carry a pure mapping from parent values to a node value.
Evaluating a design point pushes the DV values through the graph in
topological order; classification compares the resulting QoI values against
requirement thresholds.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Any, Callable, Iterable, Mapping, Optional, Sequence

DV_KINDS = ("control", "actuation", "geometry")
NODE_KINDS = ("dv", "intermediate", "qoi")
COMPARATORS = ("less_equal", "greater_equal")

INFEASIBLE_REASONS = ("unreachable_workspace", "simulation_failed")


class MappingDomainError(Exception):
    """Raised by a node mapping whose inputs fall outside its domain.

    The evaluator converts this into undefined QoI values downstream of the
    failing node rather than propagating the exception.
    """

    def __init__(self, reason: str, detail: str = ""):
        if reason not in INFEASIBLE_REASONS:
            raise ValueError(f"unknown infeasibility reason {reason!r}")
        super().__init__(detail or reason)
        self.reason = reason
        self.detail = detail


@dataclass(frozen=True)
class DesignVariable:
    """A tunable quantity with design-space bounds and a subsystem kind."""

    name: str
    unit: str
    kind: str
    ds_lower: float
    ds_upper: float

    def __post_init__(self):
        if self.kind not in DV_KINDS:
            raise ValueError(f"DV {self.name!r}: kind must be one of {DV_KINDS}, got {self.kind!r}")
        if not (math.isfinite(self.ds_lower) and math.isfinite(self.ds_upper)):
            raise ValueError(f"DV {self.name!r}: bounds must be finite")
        if not self.ds_lower < self.ds_upper:
            raise ValueError(
                f"DV {self.name!r}: degenerate design-space bounds "
                f"[{self.ds_lower}, {self.ds_upper}]"
            )


@dataclass(frozen=True)
class Requirement:
    """A threshold inequality on one QoI."""

    id: str
    qoi: str
    comparator: str
    threshold: float

    def __post_init__(self):
        if self.comparator not in COMPARATORS:
            raise ValueError(
                f"requirement {self.id!r}: comparator must be one of {COMPARATORS}"
            )
        if not math.isfinite(self.threshold):
            raise ValueError(f"requirement {self.id!r}: threshold must be finite")

    def satisfied_by(self, value: float) -> bool:
        if self.comparator == "less_equal":
            return value <= self.threshold
        return value >= self.threshold


@dataclass(frozen=True)
class Classification:
    """Good/violating label for one evaluated design point.

    ``violated`` holds requirement ids in problem requirement order; an empty
    tuple means the design is good. ``infeasible_reason`` is set only when at
    least one violation stems from an undefined QoI.
    """

    violated: tuple[str, ...] = ()
    infeasible_reason: Optional[str] = None

    def __post_init__(self):
        if self.infeasible_reason is not None:
            if self.infeasible_reason not in INFEASIBLE_REASONS:
                raise ValueError(f"unknown infeasibility reason {self.infeasible_reason!r}")
            if not self.violated:
                raise ValueError("infeasible_reason set on a classification with no violations")

    @property
    def is_good(self) -> bool:
        return not self.violated


@dataclass(frozen=True)
class AdgNode:
    name: str
    kind: str

    def __post_init__(self):
        if self.kind not in NODE_KINDS:
            raise ValueError(f"node {self.name!r}: kind must be one of {NODE_KINDS}")


@dataclass(frozen=True)
class ValidationReport:
    ok: bool
    topo_order: tuple[str, ...] = ()
    defects: tuple[str, ...] = ()


@dataclass
class Adg:
    """Attribute dependency graph with bound node mappings.

    ``mappings`` names the registered mapping for each non-DV node;
    ``functions`` holds the resolved callables and ``arities`` their declared
    argument counts (None = variadic). Parents of a node are ordered by edge
    declaration order, which fixes the argument order of its mapping.
    """

    nodes: tuple[AdgNode, ...]
    edges: tuple[tuple[str, str], ...]
    mappings: dict[str, str]
    functions: dict[str, Callable[..., Any]] = field(default_factory=dict)
    arities: dict[str, Optional[int]] = field(default_factory=dict)

    def __post_init__(self):
        self.nodes = tuple(self.nodes)
        self.edges = tuple((a, b) for a, b in self.edges)

    @property
    def node_names(self) -> tuple[str, ...]:
        return tuple(n.name for n in self.nodes)

    def nodes_of_kind(self, kind: str) -> tuple[str, ...]:
        return tuple(n.name for n in self.nodes if n.kind == kind)

    @property
    def dv_names(self) -> tuple[str, ...]:
        return self.nodes_of_kind("dv")

    @property
    def qoi_names(self) -> tuple[str, ...]:
        return self.nodes_of_kind("qoi")

    def parents(self, name: str) -> tuple[str, ...]:
        return tuple(a for a, b in self.edges if b == name)


def validate_adg(adg: Adg) -> ValidationReport:
    """Check graph structure; defects are reported as data, not raised.

    Defects detected: duplicate node names, dangling edges, DV nodes with
    parents, QoI nodes with children, missing or arity-mismatched mappings,
    and cycles. On success the report carries a topological order.
    """
    defects: list[str] = []
    names = [n.name for n in adg.nodes]
    seen: set[str] = set()
    for name in names:
        if name in seen:
            defects.append(f"duplicate node {name!r}")
        seen.add(name)

    known = set(names)
    indeg: dict[str, int] = {n: 0 for n in names}
    children: dict[str, list[str]] = {n: [] for n in names}
    for a, b in adg.edges:
        if a not in known or b not in known:
            defects.append(f"dangling edge {a!r} -> {b!r}")
            continue
        indeg[b] += 1
        children[a].append(b)

    for node in adg.nodes:
        if node.kind == "dv":
            if indeg[node.name] > 0:
                defects.append(f"dv node {node.name!r} has incoming edges")
            if node.name in adg.mappings:
                defects.append(f"dv node {node.name!r} must not carry a mapping")
        else:
            if node.kind == "qoi" and children[node.name]:
                defects.append(f"qoi node {node.name!r} has outgoing edges")
            if node.name not in adg.mappings:
                defects.append(f"node {node.name!r} has no registered mapping")
            else:
                arity = adg.arities.get(node.name)
                if arity is not None and arity != indeg[node.name]:
                    defects.append(
                        f"arity mismatch at {node.name!r}: mapping "
                        f"{adg.mappings[node.name]!r} takes {arity} inputs, "
                        f"in-degree is {indeg[node.name]}"
                    )

    # Kahn's algorithm; leftover nodes lie on (or downstream of) a cycle.
    remaining = dict(indeg)
    queue = [n for n in names if remaining[n] == 0]
    order: list[str] = []
    while queue:
        n = queue.pop(0)
        order.append(n)
        for c in children[n]:
            remaining[c] -= 1
            if remaining[c] == 0:
                queue.append(c)
    if len(order) != len(names):
        cyclic = sorted(n for n in names if n not in set(order))
        defects.append("cycle {" + ", ".join(cyclic) + "}")

    if defects:
        return ValidationReport(ok=False, defects=tuple(defects))
    return ValidationReport(ok=True, topo_order=tuple(order))


@dataclass(frozen=True)
class _Undefined:
    reason: str


def evaluate(adg: Adg, x: Sequence[float]) -> "EvalResult":
    """Push DV values through the graph; returns QoI values by name.

    A mapping raising :class:`MappingDomainError` marks its node and every
    transitive descendant undefined; affected QoIs come back as None with the
    first encountered reason recorded. Evaluation is pure: identical inputs
    give bit-identical outputs.
    """
    report = validate_adg(adg)
    if not report.ok:
        raise ValueError("invalid ADG: " + "; ".join(report.defects))
    dv_names = adg.dv_names
    if len(x) != len(dv_names):
        raise ValueError(f"design point has {len(x)} components, ADG has {len(dv_names)} DVs")

    values: dict[str, Any] = {name: float(v) for name, v in zip(dv_names, x)}
    reason: Optional[str] = None
    for name in report.topo_order:
        if name in values:
            continue
        args = [values[p] for p in adg.parents(name)]
        undef = next((a for a in args if isinstance(a, _Undefined)), None)
        if undef is not None:
            values[name] = undef
            continue
        try:
            values[name] = adg.functions[name](*args)
        except MappingDomainError as err:
            values[name] = _Undefined(err.reason)
            if reason is None:
                reason = err.reason

    qois: dict[str, Optional[float]] = {}
    for q in adg.qoi_names:
        v = values[q]
        qois[q] = None if isinstance(v, _Undefined) else float(v)
    timed_out = any(getattr(v, "timed_out", False) for v in values.values())
    return EvalResult(qois=qois, infeasible_reason=reason, timed_out=timed_out)


@dataclass(frozen=True)
class EvalResult:
    """QoI values (None = undefined) plus feasibility annotations."""

    qois: dict[str, Optional[float]]
    infeasible_reason: Optional[str] = None
    timed_out: bool = False


def classify(
    qois: Mapping[str, Optional[float]],
    requirements: Iterable[Requirement],
    infeasible_reason: Optional[str] = None,
) -> Classification:
    """Label a QoI map against requirements.

    A requirement is violated when its comparator fails or its QoI is
    undefined (None). The infeasibility reason is retained only when an
    undefined QoI actually caused a violation.
    """
    violated: list[str] = []
    undefined_hit = False
    for req in requirements:
        if req.qoi not in qois:
            raise KeyError(f"requirement {req.id!r}: QoI {req.qoi!r} not in evaluation result")
        value = qois[req.qoi]
        if value is None:
            violated.append(req.id)
            undefined_hit = True
        elif not req.satisfied_by(value):
            violated.append(req.id)
    reason = infeasible_reason if (undefined_hit and infeasible_reason) else None
    return Classification(violated=tuple(violated), infeasible_reason=reason)
