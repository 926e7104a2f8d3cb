#!/usr/bin/env python3
"""Solver quality sweep on the analytic toy problems.

Each toy has a known largest good box, so we can report the mu ratio
(found / analytic) and sampled purity across seeds. Useful when touching
the trim or growth logic: ratios should sit near 1.0 for toy1d and
toy_separable and around 1.0 +- 0.1 for toy2d, whose optimum is a corner
of a simplex and genuinely hard to hit with finite samples.
"""

import argparse

from solspace import SolverParams, builtin_problem, mu, solve_box, validate_box

ANALYTIC_MU = {"toy1d": 0.7, "toy2d": 0.25, "toy_separable": 0.25}


def main() -> int:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--seeds", type=int, default=10)
    ap.add_argument("--n-samples", type=int, default=100)
    args = ap.parse_args()

    for name, mu_star in ANALYTIC_MU.items():
        problem = builtin_problem(name)
        print(f"{name} (analytic mu {mu_star}):")
        for seed in range(args.seeds):
            params = SolverParams(n_samples=args.n_samples, seed=seed)
            box, trace = solve_box(problem, problem.x_baseline, params)
            m = mu(box, problem)
            purity = validate_box(problem, box, 5000, seed=seed + 1000)
            print(f"  seed {seed}: mu {m:.4f} (ratio {m / mu_star:.3f}) "
                  f"purity {purity:.4f} iters {len(trace.records)}")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
