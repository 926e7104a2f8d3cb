#!/usr/bin/env python3
"""Simulate one pick-and-place cycle and dump the trajectory to CSV.

Uses the shipped reference design of the builtin arm problem by default;
pass --design with 10 comma-separated DV values to inspect another point.
The CSV columns are t, q1, q2, qd1, qd2, tau1, tau2.
"""

import argparse
from pathlib import Path

from solspace import builtin_problem
from solspace.arm import ArmParams, export_trajectory_csv, simulate_cycle


def main() -> int:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--out", default="trajectory.csv")
    ap.add_argument("--design", default=None,
                    help="10 comma-separated DV values (default: reference design)")
    args = ap.parse_args()

    problem = builtin_problem("arm")
    x = problem.x_baseline
    if args.design is not None:
        x = tuple(float(tok) for tok in args.design.split(","))
    problem.check_point(x)

    c = problem.constants
    params = ArmParams(**dict(zip(problem.dv_names, x)),
                       rho=c["rho"], payload=c["payload"], g=c["g"])
    result = simulate_cycle(params, problem.task, dt=c["dt"],
                            record_trajectory=True)
    if not result.reachable:
        print("design cannot reach both task points, nothing to export")
        return 1

    out = Path(args.out)
    out.write_text(export_trajectory_csv(result))
    flag = " (timed out)" if result.timed_out else ""
    sat1, sat2 = result.saturation_fraction
    print(f"cycle_time {result.cycle_time:.4f} s{flag}, "
          f"energy {result.energy:.2f} J, "
          f"saturation {100 * sat1:.1f}% / {100 * sat2:.1f}%")
    print(f"trajectory -> {out}")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
