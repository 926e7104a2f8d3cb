"""Shared fixtures: toy problems, the arm problem, and one expensive arm solve."""

import time
from types import SimpleNamespace

import numpy as np
import pytest
from hypothesis import HealthCheck, settings

from solspace import (
    SolverParams,
    baseline_from_point,
    builtin_problem,
    derive_requirements,
    solve_box,
)
from solspace.arm import ArmParams, Task

# numba warmup makes the first example of a property slow; wall-clock
# deadlines would flake, the example budget still bounds total time.
settings.register_profile(
    "solspace", deadline=None, suppress_health_check=[HealthCheck.too_slow]
)
settings.load_profile("solspace")


@pytest.fixture(scope="session")
def toy2d():
    return builtin_problem("toy2d")


@pytest.fixture(scope="session")
def toy1d():
    return builtin_problem("toy1d")


@pytest.fixture(scope="session")
def separable():
    return builtin_problem("toy_separable")


@pytest.fixture(scope="session")
def arm_problem():
    """Arm problem with requirements derived from its shipped reference design."""
    p = builtin_problem("arm")
    base = baseline_from_point(p, p.x_baseline)
    return p.with_requirements(derive_requirements(base))


@pytest.fixture(scope="session")
def arm_solution(arm_problem):
    """One shared arm solve reused by the solver, section, and acceptance tests.

    400 samples per iteration instead of the default 100: a clean Phase II
    batch of 100 certifies only a loose purity bound, and the acceptance
    threshold (0.98 at n=2000) needs the sharper statistics.
    """
    params = SolverParams(n_samples=400, seed=0)
    start = time.perf_counter()
    box, trace = solve_box(arm_problem, arm_problem.x_baseline, params)
    elapsed = time.perf_counter() - start
    return SimpleNamespace(box=box, trace=trace, params=params, seconds=elapsed)


@pytest.fixture(scope="session")
def ref_arm_params():
    """The shipped x_baseline spelled out as ArmParams."""
    return ArmParams(
        l1=0.6, l2=0.5, rho=2.0, m_mot=1.5, r_mot=0.5,
        tau1_max=70.0, tau2_max=35.0,
        kp1=1200.0, kd1=80.0, kp2=600.0, kd2=40.0,
    )


@pytest.fixture(scope="session")
def ref_task():
    return Task(
        pick=(0.55, -0.25), place=(-0.4, 0.45),
        eps_pos=0.06, omega_tol=0.5, t_hold=0.1, t_max=8.0,
    )


@pytest.fixture()
def rng():
    return np.random.default_rng(0)
