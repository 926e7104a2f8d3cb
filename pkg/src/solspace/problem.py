"""Problem container and the strict JSON problem-file loader.

A problem bundles the design variables (whose declaration order defines the
design-point component order), the ADG with mappings already resolved against
the registry, the requirement list, and optionally a task, constants, and a
literal baseline design. Problem files are strict: unknown fields anywhere
are rejected, as are graphs that fail validation.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field, replace
from importlib import resources
from pathlib import Path
from typing import Optional, Sequence

import numpy as np

from .adg import (
    Adg,
    AdgNode,
    Classification,
    DesignVariable,
    EvalResult,
    Requirement,
    classify,
    evaluate,
    validate_adg,
)
from .errors import SolspaceError
from .arm import Task
from .mappings import REGISTRY, MappingContext, MappingRegistry, UnknownMappingError


class ProblemLoadError(SolspaceError):
    """Problem file rejected; the message names the offending field."""


_TOP_KEYS = {"name", "variables", "adg", "requirements", "task", "constants", "x_baseline"}
_VARIABLE_KEYS = {"name", "unit", "kind", "lower", "upper"}
_ADG_KEYS = {"nodes", "edges", "mappings"}
_NODE_KEYS = {"name", "kind"}
_REQUIREMENT_KEYS = {"id", "qoi", "comparator", "threshold"}
_TASK_KEYS = {"pick", "place", "eps_pos", "omega_tol", "t_hold", "t_max"}


@dataclass(frozen=True)
class Problem:
    """Immutable problem definition; evaluation entry point for solvers."""

    name: str
    variables: tuple[DesignVariable, ...]
    adg: Adg
    requirements: tuple[Requirement, ...]
    task: Optional[Task] = None
    constants: dict[str, float] = field(default_factory=dict)
    x_baseline: Optional[tuple[float, ...]] = None

    def __post_init__(self):
        object.__setattr__(self, "variables", tuple(self.variables))
        object.__setattr__(self, "requirements", tuple(self.requirements))
        names = [v.name for v in self.variables]
        if len(set(names)) != len(names):
            raise ProblemLoadError(f"duplicate variable names in problem {self.name!r}")
        if tuple(names) != self.adg.dv_names:
            raise ProblemLoadError(
                f"problem {self.name!r}: variables {tuple(names)} must match "
                f"ADG dv nodes {self.adg.dv_names} in order"
            )
        report = validate_adg(self.adg)
        if not report.ok:
            raise ProblemLoadError(
                f"problem {self.name!r}: invalid ADG: " + "; ".join(report.defects)
            )
        for req in self.requirements:
            if req.qoi not in self.adg.qoi_names:
                raise ProblemLoadError(
                    f"requirement {req.id!r} references unknown QoI {req.qoi!r}"
                )
        ids = [r.id for r in self.requirements]
        if len(set(ids)) != len(ids):
            raise ProblemLoadError(f"duplicate requirement ids in problem {self.name!r}")
        object.__setattr__(self, "_lower", np.array([v.ds_lower for v in self.variables]))
        object.__setattr__(self, "_upper", np.array([v.ds_upper for v in self.variables]))
        if self.x_baseline is not None:
            xb = tuple(float(v) for v in self.x_baseline)
            object.__setattr__(self, "x_baseline", xb)
            self.check_point(xb, what="x_baseline")

    @property
    def dimension(self) -> int:
        return len(self.variables)

    @property
    def dv_names(self) -> tuple[str, ...]:
        return tuple(v.name for v in self.variables)

    @property
    def qoi_names(self) -> tuple[str, ...]:
        return self.adg.qoi_names

    @property
    def ds_lower(self) -> np.ndarray:
        return self._lower

    @property
    def ds_upper(self) -> np.ndarray:
        return self._upper

    @property
    def ds_width(self) -> np.ndarray:
        return self._upper - self._lower

    def variable_index(self, name: str) -> int:
        try:
            return self.dv_names.index(name)
        except ValueError:
            raise KeyError(f"unknown design variable {name!r}") from None

    def dv_indices_of_kind(self, kind: str) -> tuple[int, ...]:
        return tuple(i for i, v in enumerate(self.variables) if v.kind == kind)

    def check_point(self, x: Sequence[float], what: str = "design point") -> np.ndarray:
        """Reject points of wrong dimension or outside design-space bounds."""
        arr = np.asarray(x, dtype=float)
        if arr.shape != (self.dimension,):
            raise ValueError(
                f"{what} has shape {arr.shape}, expected ({self.dimension},)"
            )
        low = np.asarray(self._lower)
        high = np.asarray(self._upper)
        if np.any(arr < low) or np.any(arr > high):
            bad = [
                f"{self.variables[i].name}={arr[i]:.6g} outside [{low[i]:.6g}, {high[i]:.6g}]"
                for i in range(self.dimension)
                if arr[i] < low[i] or arr[i] > high[i]
            ]
            raise ValueError(f"{what} outside design space: " + "; ".join(bad))
        return arr

    def evaluate_design(self, x: Sequence[float]) -> EvalResult:
        self.check_point(x)
        return evaluate(self.adg, [float(v) for v in x])

    def classify_design(
        self, x: Sequence[float], requirements: Optional[Sequence[Requirement]] = None
    ) -> Classification:
        reqs = self.requirements if requirements is None else requirements
        res = self.evaluate_design(x)
        return classify(res.qois, reqs, infeasible_reason=res.infeasible_reason)

    def with_requirements(self, requirements: Sequence[Requirement]) -> "Problem":
        return replace(self, requirements=tuple(requirements))


def _require_keys(obj: dict, allowed: set, required: set, where: str):
    unknown = set(obj) - allowed
    if unknown:
        raise ProblemLoadError(f"unknown field(s) {sorted(unknown)} in {where}")
    missing = required - set(obj)
    if missing:
        raise ProblemLoadError(f"missing field(s) {sorted(missing)} in {where}")


def _as_number(value, where: str) -> float:
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ProblemLoadError(f"{where} must be a number, got {value!r}")
    return float(value)


def _load_task(obj: dict) -> Task:
    _require_keys(obj, _TASK_KEYS, _TASK_KEYS, "task")
    for key in ("pick", "place"):
        pt = obj[key]
        if not (isinstance(pt, list) and len(pt) == 2):
            raise ProblemLoadError(f"task.{key} must be a 2-element [x, y] list")
    try:
        return Task(
            pick=(_as_number(obj["pick"][0], "task.pick"), _as_number(obj["pick"][1], "task.pick")),
            place=(_as_number(obj["place"][0], "task.place"), _as_number(obj["place"][1], "task.place")),
            eps_pos=_as_number(obj["eps_pos"], "task.eps_pos"),
            omega_tol=_as_number(obj["omega_tol"], "task.omega_tol"),
            t_hold=_as_number(obj["t_hold"], "task.t_hold"),
            t_max=_as_number(obj["t_max"], "task.t_max"),
        )
    except ValueError as exc:
        raise ProblemLoadError(f"invalid task: {exc}") from exc


def problem_from_dict(
    data: dict, name: str = "problem", registry: MappingRegistry = REGISTRY
) -> Problem:
    if not isinstance(data, dict):
        raise ProblemLoadError("problem file must hold a JSON object")
    _require_keys(data, _TOP_KEYS, {"variables", "adg", "requirements"}, "problem")
    name = data.get("name", name)

    variables = []
    for i, row in enumerate(data["variables"]):
        where = f"variables[{i}]"
        if not isinstance(row, dict):
            raise ProblemLoadError(f"{where} must be an object")
        _require_keys(row, _VARIABLE_KEYS, _VARIABLE_KEYS, where)
        try:
            variables.append(
                DesignVariable(
                    name=str(row["name"]),
                    unit=str(row["unit"]),
                    kind=str(row["kind"]),
                    ds_lower=_as_number(row["lower"], f"{where}.lower"),
                    ds_upper=_as_number(row["upper"], f"{where}.upper"),
                )
            )
        except ValueError as exc:
            raise ProblemLoadError(str(exc)) from exc

    adg_obj = data["adg"]
    if not isinstance(adg_obj, dict):
        raise ProblemLoadError("adg must be an object")
    _require_keys(adg_obj, _ADG_KEYS, _ADG_KEYS, "adg")
    nodes = []
    for i, row in enumerate(adg_obj["nodes"]):
        where = f"adg.nodes[{i}]"
        if not isinstance(row, dict):
            raise ProblemLoadError(f"{where} must be an object")
        _require_keys(row, _NODE_KEYS, _NODE_KEYS, where)
        try:
            nodes.append(AdgNode(name=str(row["name"]), kind=str(row["kind"])))
        except ValueError as exc:
            raise ProblemLoadError(str(exc)) from exc
    edges = []
    for i, pair in enumerate(adg_obj["edges"]):
        if not (isinstance(pair, list) and len(pair) == 2):
            raise ProblemLoadError(f"adg.edges[{i}] must be a [from, to] pair")
        edges.append((str(pair[0]), str(pair[1])))
    mappings = adg_obj["mappings"]
    if not isinstance(mappings, dict):
        raise ProblemLoadError("adg.mappings must be an object")
    mappings = {str(k): str(v) for k, v in mappings.items()}

    task = _load_task(data["task"]) if "task" in data else None
    constants_obj = data.get("constants", {})
    if not isinstance(constants_obj, dict):
        raise ProblemLoadError("constants must be an object")
    constants = {str(k): _as_number(v, f"constants.{k}") for k, v in constants_obj.items()}

    context = MappingContext(task=task, constants=constants)
    functions = {}
    arities = {}
    for node_name, mapping_name in mappings.items():
        try:
            fn, arity = registry.build(mapping_name, context)
        except UnknownMappingError as exc:
            raise ProblemLoadError(str(exc)) from exc
        except ValueError as exc:
            raise ProblemLoadError(f"mapping {mapping_name!r}: {exc}") from exc
        functions[node_name] = fn
        arities[node_name] = arity

    requirements = []
    for i, row in enumerate(data["requirements"]):
        where = f"requirements[{i}]"
        if not isinstance(row, dict):
            raise ProblemLoadError(f"{where} must be an object")
        _require_keys(row, _REQUIREMENT_KEYS, _REQUIREMENT_KEYS, where)
        try:
            requirements.append(
                Requirement(
                    id=str(row["id"]),
                    qoi=str(row["qoi"]),
                    comparator=str(row["comparator"]),
                    threshold=_as_number(row["threshold"], f"{where}.threshold"),
                )
            )
        except ValueError as exc:
            raise ProblemLoadError(str(exc)) from exc

    x_baseline = None
    if "x_baseline" in data:
        raw = data["x_baseline"]
        if not isinstance(raw, list):
            raise ProblemLoadError("x_baseline must be a list of numbers")
        x_baseline = tuple(_as_number(v, "x_baseline") for v in raw)

    adg = Adg(
        nodes=tuple(nodes), edges=tuple(edges), mappings=mappings,
        functions=functions, arities=arities,
    )
    try:
        return Problem(
            name=str(name), variables=tuple(variables), adg=adg,
            requirements=tuple(requirements), task=task,
            constants=constants, x_baseline=x_baseline,
        )
    except ValueError as exc:
        raise ProblemLoadError(str(exc)) from exc


def problem_to_dict(problem: Problem) -> dict:
    """Serializable form; inverse of problem_from_dict up to key order."""
    out = {
        "name": problem.name,
        "variables": [
            {"name": v.name, "unit": v.unit, "kind": v.kind,
             "lower": v.ds_lower, "upper": v.ds_upper}
            for v in problem.variables
        ],
        "adg": {
            "nodes": [{"name": n.name, "kind": n.kind} for n in problem.adg.nodes],
            "edges": [[a, b] for a, b in problem.adg.edges],
            "mappings": dict(problem.adg.mappings),
        },
        "requirements": [
            {"id": r.id, "qoi": r.qoi, "comparator": r.comparator, "threshold": r.threshold}
            for r in problem.requirements
        ],
    }
    if problem.task is not None:
        t = problem.task
        out["task"] = {
            "pick": list(t.pick), "place": list(t.place),
            "eps_pos": t.eps_pos, "omega_tol": t.omega_tol,
            "t_hold": t.t_hold, "t_max": t.t_max,
        }
    if problem.constants:
        out["constants"] = dict(problem.constants)
    if problem.x_baseline is not None:
        out["x_baseline"] = list(problem.x_baseline)
    return out


def load_problem(path: str | Path, registry: MappingRegistry = REGISTRY) -> Problem:
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise ProblemLoadError(f"cannot read problem file {path}: {exc}") from exc
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ProblemLoadError(f"problem file {path} is not valid JSON: {exc}") from exc
    return problem_from_dict(data, name=path.stem, registry=registry)


def builtin_problem_names() -> tuple[str, ...]:
    root = resources.files("solspace").joinpath("problems")
    return tuple(sorted(p.name[:-5] for p in root.iterdir() if p.name.endswith(".json")))


def builtin_problem(name: str, registry: MappingRegistry = REGISTRY) -> Problem:
    root = resources.files("solspace").joinpath("problems")
    res = root.joinpath(name + ".json")
    if not res.is_file():
        raise ProblemLoadError(
            f"no builtin problem {name!r}; available: {', '.join(builtin_problem_names())}"
        )
    data = json.loads(res.read_text(encoding="utf-8"))
    return problem_from_dict(data, name=name, registry=registry)
