"""Command-line front end.

Exit codes: 0 success, 1 usage error, 2 domain failure (SolspaceError).
"""

from __future__ import annotations

import argparse
import sys
import time
from dataclasses import replace
from pathlib import Path

from .baseline import baseline_from_point, derive_requirements, optimize_baseline
from .boxes import mu
from .errors import SolspaceError
from .problem import Problem, builtin_problem, builtin_problem_names, load_problem
from .runio import (
    BaselineRecord,
    BoxRecord,
    RunLoadError,
    load_baseline_record,
    persist_run,
    trace_from_jsonable,
)
from .sections import default_section_dims, make_section
from .solver import SolverParams, restrict_and_resolve, seed_box, solve_box, validate_box

BASELINE_BUDGET = 2000
PURITY_SAMPLES = 2000


class _Parser(argparse.ArgumentParser):
    """argparse exits 2 on usage errors; the spec reserves 2 for domain failures."""

    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(1, f"{self.prog}: error: {message}\n")


_SCHEMA_HELP = """\
problem-file schema (version 1): a JSON object with keys
  name          optional string
  variables     [{name, unit, kind: control|actuation|geometry, lower, upper}]
  adg           {nodes: [{name, kind: dv|intermediate|qoi}],
                 edges: [[from, to]], mappings: {node: mapping-name}}
  requirements  [{id, qoi, comparator: less_equal|greater_equal, threshold}]
  task          optional {pick, place, eps_pos, omega_tol, t_hold, t_max}
  constants     optional {name: number}
  x_baseline    optional [number per variable]
Unknown keys are rejected.
"""


def _build_parser() -> _Parser:
    parser = _Parser(
        prog="solspace",
        description=__doc__,
        epilog=_SCHEMA_HELP,
        formatter_class=argparse.RawDescriptionHelpFormatter,
    )
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def common(p):
        p.add_argument("--problem", required=True,
                       help="problem file path or builtin name "
                            f"({', '.join(builtin_problem_names())})")
        p.add_argument("--out", default=None,
                       help="run directory (default: ./runs/<timestamp>)")
        p.add_argument("--seed", type=int, default=0)

    common(sub.add_parser("baseline", help="optimize a baseline design"))
    common(sub.add_parser("solve", help="compute the solution box"))

    p = sub.add_parser("sections", help="export 2D sections of the box")
    common(p)
    p.add_argument("--dims", help="flat index pairs, e.g. 0,1,2,3 for (0,1) and (2,3)")

    p = sub.add_parser("validate", help="re-estimate box purity")
    common(p)
    p.add_argument("--n", type=int, default=PURITY_SAMPLES, help="sample count")

    p = sub.add_parser("tradeoff", help="restrict one DV and re-solve the rest")
    common(p)
    p.add_argument("--dv", required=True, help="design variable name")
    p.add_argument("--interval", required=True, help="new interval a,b")

    p = sub.add_parser("serve", help="serve a run over HTTP")
    common(p)
    p.add_argument("--addr", default="127.0.0.1:8080", help="HOST:PORT")
    return parser


def _load_problem_arg(value: str) -> Problem:
    if value in builtin_problem_names():
        return builtin_problem(value)
    return load_problem(value)


def _resolve_requirements(problem: Problem, out_dir: Path) -> Problem:
    """Explicit requirements win; else a baseline.json in the run directory;
    else the problem's literal x_baseline, simulated once."""
    if problem.requirements:
        return problem
    baseline_path = out_dir / "baseline.json"
    if baseline_path.is_file():
        record = load_baseline_record(baseline_path)
        return problem.with_requirements(derive_requirements(record))
    if problem.x_baseline is not None:
        base = baseline_from_point(problem, problem.x_baseline)
        return problem.with_requirements(derive_requirements(base))
    raise SolspaceError(
        "problem has no requirements, the run directory has no baseline.json, "
        "and the problem file has no x_baseline"
    )


def _seed_point(problem: Problem, out_dir: Path) -> tuple[float, ...]:
    baseline_path = out_dir / "baseline.json"
    if baseline_path.is_file():
        return load_baseline_record(baseline_path).x_baseline
    if problem.x_baseline is not None:
        return problem.x_baseline
    raise SolspaceError("no seed design: run `solspace baseline` first or add x_baseline")


def _load_box_record(out_dir: Path) -> BoxRecord:
    import json

    path = out_dir / "box.json"
    if not path.is_file():
        raise RunLoadError("box.json absent")
    return BoxRecord.from_jsonable(json.loads(path.read_text()))


def _parse_dims(text: str, dimension: int) -> tuple[tuple[int, int], ...]:
    try:
        idx = [int(tok) for tok in text.split(",")]
    except ValueError:
        raise SolspaceError(f"--dims expects comma-separated integers, got {text!r}")
    if len(idx) < 2 or len(idx) % 2 != 0:
        raise SolspaceError("--dims expects an even number of indices (pairs i,j)")
    pairs = tuple((idx[k], idx[k + 1]) for k in range(0, len(idx), 2))
    for i, j in pairs:
        if i == j or not (0 <= i < dimension) or not (0 <= j < dimension):
            raise SolspaceError(f"invalid section pair ({i}, {j}) for dimension {dimension}")
    return pairs


def _parse_interval(text: str) -> tuple[float, float]:
    parts = text.split(",")
    if len(parts) != 2:
        raise SolspaceError(f"--interval expects a,b, got {text!r}")
    try:
        return float(parts[0]), float(parts[1])
    except ValueError:
        raise SolspaceError(f"--interval expects numbers, got {text!r}")


def _cmd_baseline(args) -> int:
    problem = _load_problem_arg(args.problem)
    result = optimize_baseline(problem, budget=BASELINE_BUDGET, seed=args.seed)
    record = BaselineRecord.from_result(result, seed=args.seed)
    persist_run(Path(args.out), problem, baseline=record)
    print(f"baseline: objective {result.objective:.6g} "
          f"after {result.evaluations_used} evaluations -> {args.out}/baseline.json")
    return 0


def _cmd_solve(args) -> int:
    out_dir = Path(args.out)
    problem = _resolve_requirements(_load_problem_arg(args.problem), out_dir)
    seed_point = _seed_point(problem, out_dir)
    params = SolverParams(seed=args.seed)
    box, trace = solve_box(problem, seed_point, params)
    purity = validate_box(problem, box, PURITY_SAMPLES, seed=args.seed + 1)
    record = BoxRecord(box=box, mu=mu(box, problem), purity=purity,
                       seed=args.seed, params=params)
    persist_run(out_dir, problem, box=record, trace=trace)
    print(f"solve: mu {record.mu:.6g}  purity {purity:.4f} -> {args.out}/box.json")
    if record.mu <= mu(seed_box(problem, seed_point), problem):
        print(
            "solspace: warning: the box never grew beyond its seed. Requirement "
            "thresholds that sit exactly at an optimized design leave no interior "
            "to grow into; derive them from a reference design with slack instead.",
            file=sys.stderr,
        )
    return 0


def _cmd_sections(args) -> int:
    out_dir = Path(args.out)
    problem = _resolve_requirements(_load_problem_arg(args.problem), out_dir)
    record = _load_box_record(out_dir)
    dims = (_parse_dims(args.dims, problem.dimension) if args.dims
            else default_section_dims(problem))
    sections = [make_section(problem, record.box, pair, seed=args.seed) for pair in dims]
    persist_run(out_dir, problem, box=record, sections=sections)
    names = ", ".join(f"section_{i}_{j}" for i, j in dims)
    print(f"sections: wrote {names} -> {args.out}/sections/")
    return 0


def _cmd_validate(args) -> int:
    out_dir = Path(args.out)
    problem = _resolve_requirements(_load_problem_arg(args.problem), out_dir)
    record = _load_box_record(out_dir)
    purity = validate_box(problem, record.box, args.n, seed=args.seed + 1)
    print(f"validate: purity {purity:.6g} over {args.n} samples")
    return 0


def _cmd_tradeoff(args) -> int:
    out_dir = Path(args.out)
    problem = _resolve_requirements(_load_problem_arg(args.problem), out_dir)
    record = _load_box_record(out_dir)
    if args.dv not in problem.dv_names:
        raise SolspaceError(
            f"unknown design variable {args.dv!r}; have {', '.join(problem.dv_names)}"
        )
    interval = _parse_interval(args.interval)
    params = replace(record.params, seed=args.seed)
    box, trace = restrict_and_resolve(problem, record.box, args.dv, interval, params)
    purity = validate_box(problem, box, PURITY_SAMPLES, seed=args.seed + 1)
    new_record = BoxRecord(box=box, mu=mu(box, problem), purity=purity,
                           seed=args.seed, params=params)
    persist_run(out_dir, problem, box=new_record, trace=trace)
    print(f"tradeoff: {args.dv} fixed to [{interval[0]:.6g}, {interval[1]:.6g}]  "
          f"mu {new_record.mu:.6g}  purity {purity:.4f}")
    return 0


def _cmd_serve(args) -> int:
    from .server import serve_run

    host, _, port_text = args.addr.rpartition(":")
    if not host or not port_text.isdigit():
        raise SolspaceError(f"--addr expects HOST:PORT, got {args.addr!r}")
    out_dir = Path(args.out)
    problem = _resolve_requirements(_load_problem_arg(args.problem), out_dir)
    if not (out_dir / "box.json").is_file():
        seed_point = _seed_point(problem, out_dir)
        params = SolverParams(seed=args.seed)
        box, trace = solve_box(problem, seed_point, params)
        purity = validate_box(problem, box, PURITY_SAMPLES, seed=args.seed + 1)
        record = BoxRecord(box=box, mu=mu(box, problem), purity=purity,
                           seed=args.seed, params=params)
        persist_run(out_dir, problem, box=record, trace=trace)
    serve_run(host, int(port_text), problem, out_dir)
    return 0


_COMMANDS = {
    "baseline": _cmd_baseline,
    "solve": _cmd_solve,
    "sections": _cmd_sections,
    "validate": _cmd_validate,
    "tradeoff": _cmd_tradeoff,
    "serve": _cmd_serve,
}


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    if args.out is None:
        # The timestamp names the directory only; file contents stay time-free.
        args.out = time.strftime("runs/%Y%m%d-%H%M%S")
    try:
        return _COMMANDS[args.command](args)
    except SolspaceError as exc:
        print(f"solspace: error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
