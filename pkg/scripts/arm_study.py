#!/usr/bin/env python3
"""End-to-end arm study: baseline, solution box, sections, diagnostics.

Runs the whole workflow on the builtin 10-DV arm problem and prints a small
report: baseline QoIs, box intervals with per-DV normalized widths, purity,
and the control/plant decoupling frequency. Artifacts land in --out with the
same layout the CLI produces, so `solspace serve --out <dir>` picks them up.

By default the requirements come from the shipped reference design, which
leaves room for a box with usable per-DV ranges. With --es they come from a
fresh evolution-strategy optimum instead; thresholds bind exactly at the
baseline QoIs, so requirements taken at an aggressively optimized point
admit almost no degradation and the box collapses to a sliver around it.
"""

import argparse
import time
from pathlib import Path

import numpy as np

from solspace import (
    SolverParams,
    baseline_from_point,
    builtin_problem,
    derive_requirements,
    mu,
    optimize_baseline,
    sample_uniform,
    solve_box,
    validate_box,
)
from solspace.runio import BaselineRecord, BoxRecord, persist_run
from solspace.sections import default_section_dims, make_section


def main() -> int:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--out", default="runs/arm_study", help="run directory")
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--budget", type=int, default=2000, help="baseline evaluations")
    ap.add_argument("--n-samples", type=int, default=400,
                    help="solver samples per iteration")
    ap.add_argument("--es", action="store_true",
                    help="derive requirements from a fresh ES optimum "
                         "instead of the shipped reference design")
    args = ap.parse_args()

    problem = builtin_problem("arm")
    out = Path(args.out)

    t0 = time.perf_counter()
    if args.es:
        baseline = optimize_baseline(problem, budget=args.budget, seed=args.seed)
        print(f"baseline: ES found objective {baseline.objective:.4f} "
              f"in {baseline.evaluations_used} evaluations")
    else:
        baseline = baseline_from_point(problem, problem.x_baseline)
        print("baseline: shipped reference design")
    for name, value in baseline.qois.items():
        print(f"  {name} = {value:.6g}")

    problem = problem.with_requirements(derive_requirements(baseline))
    params = SolverParams(n_samples=args.n_samples, seed=args.seed)
    box, trace = solve_box(problem, baseline.x_baseline, params)
    solve_s = time.perf_counter() - t0

    m = mu(box, problem)
    purity = validate_box(problem, box, 2000, seed=args.seed + 1)
    print(f"\nsolution box after {len(trace.records)} iterations "
          f"({solve_s:.1f} s): mu {m:.3e}, purity {purity:.4f}")
    widths = box.widths / problem.ds_width
    for v, (lo, hi), w in zip(problem.variables, box.intervals, widths):
        print(f"  {v.name:<9} [{lo:9.4g}, {hi:9.4g}] {v.unit:<9} "
              f"({100 * w:5.1f}% of range)")

    # decoupling: control sub-vectors recombine freely with the rest
    control = list(problem.dv_indices_of_kind("control"))
    rng = np.random.default_rng(args.seed + 2)
    a = sample_uniform(box, 500, rng)
    b = sample_uniform(box, 500, rng)
    mixed = a.copy()
    mixed[:, control] = b[:, control]
    good = sum(1 for x in mixed if problem.classify_design(x).is_good)
    print(f"\ndecoupling: {good}/500 recombined control/plant designs stay good")

    sections = [make_section(problem, box, dims, n=2000, seed=args.seed)
                for dims in default_section_dims(problem)]
    record = BoxRecord(box=box, mu=m, purity=purity, seed=args.seed, params=params)
    persist_run(out, problem,
                baseline=BaselineRecord.from_result(baseline, seed=args.seed),
                box=record, trace=trace, sections=sections)
    print(f"\nartifacts -> {out}")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
