"""Planar 2-link arm surrogate: kinematics, rigid-body dynamics, PD cycle sim.

The arm moves in a vertical plane (gravity along -y). Link i is a uniform rod
of line density ``rho``; a point-mass motor sits on link 1 at fraction
``r_mot`` of its length and a fixed payload hangs at the end effector. Joint
torques come from independent PD loops saturated at ``tau*_max``.

The sorting cycle starts at the place pose, settles on the pick target, then
settles back on the place target; cycle time is the instant the place settle
completes and the energy metric integrates |tau_i * qdot_i| up to that
instant. Integration is classical RK4 at a fixed step with zero-order-hold
torque, which keeps every run bit-reproducible.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

import numpy as np
from numba import njit

from .errors import SolspaceError

GRAVITY = 9.81
DEFAULT_PAYLOAD = 0.5
DEFAULT_RHO = 2.0
DEFAULT_DT = 1e-3
REACH_MARGIN_FRAC = 0.05

TRAJECTORY_COLUMNS = ("t", "q1", "q2", "qd1", "qd2", "tau1", "tau2")


class WorkspaceError(SolspaceError):
    """Target outside the reachable annulus [|l1-l2|, l1+l2]."""

    def __init__(self, target, distance: float, annulus: tuple[float, float]):
        super().__init__(
            f"target ({target[0]:.6g}, {target[1]:.6g}) at distance {distance:.6g} "
            f"outside reachable annulus [{annulus[0]:.6g}, {annulus[1]:.6g}]"
        )
        self.target = (float(target[0]), float(target[1]))
        self.distance = distance
        self.annulus = annulus


class SimulationDivergedError(SolspaceError):
    """Integration produced a non-finite state."""


@dataclass(frozen=True)
class ArmParams:
    """Physical and control parameters of the arm.

    ``l1``/``l2`` link lengths (m), ``rho`` rod density (kg/m), ``m_mot``
    elbow motor mass (kg) mounted at fraction ``r_mot`` of link 1,
    ``tau*_max`` torque limits (N*m), ``kp*``/``kd*`` PD gains. ``payload``
    and ``g`` are model constants with pinned defaults.
    """

    l1: float
    l2: float
    rho: float
    m_mot: float
    r_mot: float
    tau1_max: float
    tau2_max: float
    kp1: float
    kd1: float
    kp2: float
    kd2: float
    payload: float = DEFAULT_PAYLOAD
    g: float = GRAVITY

    def __post_init__(self):
        positive = {
            "l1": self.l1, "l2": self.l2, "rho": self.rho, "m_mot": self.m_mot,
            "tau1_max": self.tau1_max, "tau2_max": self.tau2_max,
            "kp1": self.kp1, "kd1": self.kd1, "kp2": self.kp2, "kd2": self.kd2,
        }
        for name, v in positive.items():
            if not (math.isfinite(v) and v > 0):
                raise ValueError(f"ArmParams.{name} must be strictly positive, got {v}")
        if not 0.0 <= self.r_mot <= 1.0:
            raise ValueError(f"ArmParams.r_mot must lie in [0, 1], got {self.r_mot}")
        if self.payload < 0 or self.g < 0:
            raise ValueError("payload and g must be non-negative")

    @property
    def reach_margin(self) -> float:
        return REACH_MARGIN_FRAC * (self.l1 + self.l2)


@dataclass(frozen=True)
class Task:
    """Pick/place targets and settle tolerances for one sorting cycle."""

    pick: tuple[float, float]
    place: tuple[float, float]
    eps_pos: float
    omega_tol: float
    t_hold: float
    t_max: float

    def __post_init__(self):
        if not self.eps_pos > 0:
            raise ValueError("eps_pos must be > 0")
        if not self.omega_tol > 0:
            raise ValueError("omega_tol must be > 0")
        if self.t_hold < 0:
            raise ValueError("t_hold must be >= 0")
        if not self.t_max > 0:
            raise ValueError("t_max must be > 0")


@dataclass(frozen=True)
class SimResult:
    """Outcome of one simulated cycle.

    ``cycle_time`` and ``energy`` are None when a target is unreachable; on
    timeout cycle_time equals t_max and ``timed_out`` is set, which makes the
    design violate any cycle-time requirement derived from a feasible
    baseline.
    """

    cycle_time: Optional[float]
    energy: Optional[float]
    reachable: bool
    timed_out: bool
    saturation_fraction: tuple[float, float]
    trajectory: Optional[np.ndarray] = None

    def __post_init__(self):
        if not self.reachable:
            if self.cycle_time is not None or self.energy is not None:
                raise ValueError("unreachable result must carry undefined cycle_time/energy")
        else:
            assert self.energy is not None and self.energy >= 0.0


def _lumped_bodies(params: ArmParams) -> tuple[float, float, float, float, float, float]:
    """Lump rod+motor (link 1) and rod+payload (link 2) into one body each.

    Returns (mA, cA, IA, mB, cB, IB): mass, COM offset from the link's joint,
    and inertia about the COM, per link assembly.
    """
    m1 = params.rho * params.l1
    m2 = params.rho * params.l2
    mA = m1 + params.m_mot
    cA = (m1 * 0.5 * params.l1 + params.m_mot * params.r_mot * params.l1) / mA
    IA = (
        m1 * params.l1 ** 2 / 12.0
        + m1 * (0.5 * params.l1 - cA) ** 2
        + params.m_mot * (params.r_mot * params.l1 - cA) ** 2
    )
    mB = m2 + params.payload
    cB = (m2 * 0.5 * params.l2 + params.payload * params.l2) / mB
    IB = (
        m2 * params.l2 ** 2 / 12.0
        + m2 * (0.5 * params.l2 - cB) ** 2
        + params.payload * (params.l2 - cB) ** 2
    )
    return mA, cA, IA, mB, cB, IB


@njit(cache=True)
def _accel(q1, q2, qd1, qd2, tau1, tau2, l1, g, mA, cA, IA, mB, cB, IB):
    """Joint accelerations from M(q) qdd + C(q, qd) qd + G(q) = tau."""
    c2 = math.cos(q2)
    m11 = IA + IB + mA * cA * cA + mB * (l1 * l1 + cB * cB + 2.0 * l1 * cB * c2)
    m12 = IB + mB * (cB * cB + l1 * cB * c2)
    m22 = IB + mB * cB * cB
    h = mB * l1 * cB * math.sin(q2)
    cor1 = -h * qd2 * (2.0 * qd1 + qd2)
    cor2 = h * qd1 * qd1
    c1 = math.cos(q1)
    c12 = math.cos(q1 + q2)
    g1 = (mA * cA + mB * l1) * g * c1 + mB * cB * g * c12
    g2 = mB * cB * g * c12
    r1 = tau1 - cor1 - g1
    r2 = tau2 - cor2 - g2
    det = m11 * m22 - m12 * m12
    qdd1 = (m22 * r1 - m12 * r2) / det
    qdd2 = (m11 * r2 - m12 * r1) / det
    return qdd1, qdd2


@njit(cache=True)
def _energy(q1, q2, qd1, qd2, l1, g, mA, cA, IA, mB, cB, IB):
    """Total mechanical energy (potential zero at joint-1 height)."""
    c2 = math.cos(q2)
    m11 = IA + IB + mA * cA * cA + mB * (l1 * l1 + cB * cB + 2.0 * l1 * cB * c2)
    m12 = IB + mB * (cB * cB + l1 * cB * c2)
    m22 = IB + mB * cB * cB
    kinetic = 0.5 * (m11 * qd1 * qd1 + 2.0 * m12 * qd1 * qd2 + m22 * qd2 * qd2)
    potential = mA * g * cA * math.sin(q1) + mB * g * (l1 * math.sin(q1) + cB * math.sin(q1 + q2))
    return kinetic + potential


@njit(cache=True)
def _rk4_step(q1, q2, qd1, qd2, tau1, tau2, dt, l1, g, mA, cA, IA, mB, cB, IB):
    a1, a2 = _accel(q1, q2, qd1, qd2, tau1, tau2, l1, g, mA, cA, IA, mB, cB, IB)
    k1 = (qd1, qd2, a1, a2)

    b1 = q1 + 0.5 * dt * k1[0]
    b2 = q2 + 0.5 * dt * k1[1]
    bd1 = qd1 + 0.5 * dt * k1[2]
    bd2 = qd2 + 0.5 * dt * k1[3]
    a1, a2 = _accel(b1, b2, bd1, bd2, tau1, tau2, l1, g, mA, cA, IA, mB, cB, IB)
    k2 = (bd1, bd2, a1, a2)

    b1 = q1 + 0.5 * dt * k2[0]
    b2 = q2 + 0.5 * dt * k2[1]
    bd1 = qd1 + 0.5 * dt * k2[2]
    bd2 = qd2 + 0.5 * dt * k2[3]
    a1, a2 = _accel(b1, b2, bd1, bd2, tau1, tau2, l1, g, mA, cA, IA, mB, cB, IB)
    k3 = (bd1, bd2, a1, a2)

    b1 = q1 + dt * k3[0]
    b2 = q2 + dt * k3[1]
    bd1 = qd1 + dt * k3[2]
    bd2 = qd2 + dt * k3[3]
    a1, a2 = _accel(b1, b2, bd1, bd2, tau1, tau2, l1, g, mA, cA, IA, mB, cB, IB)
    k4 = (bd1, bd2, a1, a2)

    q1n = q1 + dt / 6.0 * (k1[0] + 2.0 * k2[0] + 2.0 * k3[0] + k4[0])
    q2n = q2 + dt / 6.0 * (k1[1] + 2.0 * k2[1] + 2.0 * k3[1] + k4[1])
    qd1n = qd1 + dt / 6.0 * (k1[2] + 2.0 * k2[2] + 2.0 * k3[2] + k4[2])
    qd2n = qd2 + dt / 6.0 * (k1[3] + 2.0 * k2[3] + 2.0 * k3[3] + k4[3])
    return q1n, q2n, qd1n, qd2n


# _simulate status codes
_STATUS_SETTLED = 0
_STATUS_TIMEOUT = 1
_STATUS_DIVERGED = 2


@njit(cache=True)
def _simulate(
    l1, l2, g, mA, cA, IA, mB, cB, IB,
    tau1_max, tau2_max, kp1, kd1, kp2, kd2,
    q01, q02,
    qpick1, qpick2, qplace1, qplace2,
    pick_x, pick_y, place_x, place_y,
    eps_pos, omega_tol, t_hold, t_max, dt,
    record,
):
    n_max = int(round(t_max / dt))
    if record:
        traj = np.empty((n_max + 1, 7))
    else:
        traj = np.empty((1, 7))

    q1 = q01
    q2 = q02
    qd1 = 0.0
    qd2 = 0.0
    energy = 0.0
    phase = 0  # 0: toward pick, 1: toward place
    hold_since = -1.0
    sat1 = 0
    sat2 = 0
    steps = 0
    status = _STATUS_TIMEOUT
    t_cyc = t_max
    t = 0.0
    rows = 0

    for k in range(n_max):
        if phase == 0:
            qr1 = qpick1
            qr2 = qpick2
            tx = pick_x
            ty = pick_y
        else:
            qr1 = qplace1
            qr2 = qplace2
            tx = place_x
            ty = place_y

        u1 = kp1 * (qr1 - q1) - kd1 * qd1
        u2 = kp2 * (qr2 - q2) - kd2 * qd2
        tau1 = min(max(u1, -tau1_max), tau1_max)
        tau2 = min(max(u2, -tau2_max), tau2_max)
        if tau1 != u1:
            sat1 += 1
        if tau2 != u2:
            sat2 += 1
        steps += 1

        if record:
            traj[k, 0] = t
            traj[k, 1] = q1
            traj[k, 2] = q2
            traj[k, 3] = qd1
            traj[k, 4] = qd2
            traj[k, 5] = tau1
            traj[k, 6] = tau2
        rows = k + 1

        p_before = abs(tau1 * qd1) + abs(tau2 * qd2)
        q1, q2, qd1, qd2 = _rk4_step(
            q1, q2, qd1, qd2, tau1, tau2, dt, l1, g, mA, cA, IA, mB, cB, IB
        )
        t = (k + 1) * dt
        if not (math.isfinite(q1) and math.isfinite(q2) and math.isfinite(qd1) and math.isfinite(qd2)):
            status = _STATUS_DIVERGED
            break
        p_after = abs(tau1 * qd1) + abs(tau2 * qd2)
        energy += 0.5 * dt * (p_before + p_after)

        ee_x = l1 * math.cos(q1) + l2 * math.cos(q1 + q2)
        ee_y = l1 * math.sin(q1) + l2 * math.sin(q1 + q2)
        err = math.hypot(ee_x - tx, ee_y - ty)
        slow = max(abs(qd1), abs(qd2)) <= omega_tol
        if err <= eps_pos and slow:
            if hold_since < 0.0:
                hold_since = t
            if t - hold_since >= t_hold:
                if phase == 0:
                    phase = 1
                    hold_since = -1.0
                else:
                    t_cyc = t
                    status = _STATUS_SETTLED
                    if record:
                        traj[k + 1, 0] = t
                        traj[k + 1, 1] = q1
                        traj[k + 1, 2] = q2
                        traj[k + 1, 3] = qd1
                        traj[k + 1, 4] = qd2
                        traj[k + 1, 5] = tau1
                        traj[k + 1, 6] = tau2
                    rows = k + 2
                    break
        else:
            hold_since = -1.0

    if status == _STATUS_TIMEOUT:
        t_cyc = t_max
        if record:
            traj[n_max, 0] = t
            traj[n_max, 1] = q1
            traj[n_max, 2] = q2
            traj[n_max, 3] = qd1
            traj[n_max, 4] = qd2
            traj[n_max, 5] = traj[n_max - 1, 5] if n_max > 0 else 0.0
            traj[n_max, 6] = traj[n_max - 1, 6] if n_max > 0 else 0.0
        rows = n_max + 1

    frac1 = sat1 / steps if steps > 0 else 0.0
    frac2 = sat2 / steps if steps > 0 else 0.0
    return t_cyc, energy, status, frac1, frac2, traj, rows


def forward_kinematics(params: ArmParams, q) -> np.ndarray:
    """End-effector position for joint angles ``q = (q1, q2)``."""
    q1, q2 = float(q[0]), float(q[1])
    return np.array([
        params.l1 * math.cos(q1) + params.l2 * math.cos(q1 + q2),
        params.l1 * math.sin(q1) + params.l2 * math.sin(q1 + q2),
    ])


def inverse_kinematics(params: ArmParams, target) -> np.ndarray:
    """Joint angles reaching ``target`` on the elbow branch q2 in [0, pi].

    Raises :class:`WorkspaceError` when the target distance falls outside the
    reachable annulus (up to a 1e-9 m slack absorbing round-off at the rim).
    """
    x, y = float(target[0]), float(target[1])
    l1, l2 = params.l1, params.l2
    r = math.hypot(x, y)
    lo, hi = abs(l1 - l2), l1 + l2
    c2 = (r * r - l1 * l1 - l2 * l2) / (2.0 * l1 * l2)
    if c2 > 1.0:
        if r > hi + 1e-9:
            raise WorkspaceError((x, y), r, (lo, hi))
        c2 = 1.0
    elif c2 < -1.0:
        if r < lo - 1e-9:
            raise WorkspaceError((x, y), r, (lo, hi))
        c2 = -1.0
    q2 = math.acos(c2)
    q1 = math.atan2(y, x) - math.atan2(l2 * math.sin(q2), l1 + l2 * c2)
    return np.array([q1, q2])


def target_reachable(params: ArmParams, target, margin: Optional[float] = None) -> bool:
    """True when the target sits inside the margin-shrunk reachable annulus."""
    if margin is None:
        margin = params.reach_margin
    r = math.hypot(float(target[0]), float(target[1]))
    return abs(params.l1 - params.l2) + margin <= r <= params.l1 + params.l2 - margin


def reachability_check(params: ArmParams, task: Task, margin: Optional[float] = None) -> tuple[bool, bool]:
    """Reachability of (pick, place), each with the same margin rule."""
    return (
        target_reachable(params, task.pick, margin),
        target_reachable(params, task.place, margin),
    )


def dynamics_accel(params: ArmParams, q, qdot, tau) -> np.ndarray:
    """Joint accelerations for an already-clamped applied torque."""
    mA, cA, IA, mB, cB, IB = _lumped_bodies(params)
    qdd1, qdd2 = _accel(
        float(q[0]), float(q[1]), float(qdot[0]), float(qdot[1]),
        float(tau[0]), float(tau[1]),
        params.l1, params.g, mA, cA, IA, mB, cB, IB,
    )
    return np.array([qdd1, qdd2])


def total_energy(params: ArmParams, q, qdot) -> float:
    """Kinetic plus gravitational potential energy of the arm."""
    mA, cA, IA, mB, cB, IB = _lumped_bodies(params)
    return _energy(
        float(q[0]), float(q[1]), float(qdot[0]), float(qdot[1]),
        params.l1, params.g, mA, cA, IA, mB, cB, IB,
    )


def rollout(params: ArmParams, q0, qd0, tau, duration: float, dt: float = DEFAULT_DT) -> np.ndarray:
    """Integrate with a fixed applied torque; rows are (t, q1, q2, qd1, qd2).

    Used by the conservation and power-balance oracles; ``tau`` is applied
    as-is without PD control or clamping.
    """
    mA, cA, IA, mB, cB, IB = _lumped_bodies(params)
    n = int(round(duration / dt))
    out = np.empty((n + 1, 5))
    q1, q2 = float(q0[0]), float(q0[1])
    qd1, qd2 = float(qd0[0]), float(qd0[1])
    tau1, tau2 = float(tau[0]), float(tau[1])
    out[0] = (0.0, q1, q2, qd1, qd2)
    for k in range(n):
        q1, q2, qd1, qd2 = _rk4_step(
            q1, q2, qd1, qd2, tau1, tau2, dt,
            params.l1, params.g, mA, cA, IA, mB, cB, IB,
        )
        if not all(map(math.isfinite, (q1, q2, qd1, qd2))):
            raise SimulationDivergedError(f"state non-finite at t={(k + 1) * dt:.6g}")
        out[k + 1] = ((k + 1) * dt, q1, q2, qd1, qd2)
    return out


def simulate_cycle(
    params: ArmParams,
    task: Task,
    dt: float = DEFAULT_DT,
    record_trajectory: bool = False,
) -> SimResult:
    """Run one pick-and-place cycle under saturated PD control.

    Unreachable targets give ``reachable=False`` (not a fault). Designs that
    fail to settle by ``t_max`` come back with the t_max sentinel cycle time
    and the timeout flag. The initial state is the place pose at rest.
    """
    ok_pick, ok_place = reachability_check(params, task)
    if not (ok_pick and ok_place):
        return SimResult(
            cycle_time=None, energy=None, reachable=False, timed_out=False,
            saturation_fraction=(0.0, 0.0), trajectory=None,
        )
    q_pick = inverse_kinematics(params, task.pick)
    q_place = inverse_kinematics(params, task.place)
    mA, cA, IA, mB, cB, IB = _lumped_bodies(params)
    t_cyc, energy, status, f1, f2, traj, rows = _simulate(
        params.l1, params.l2, params.g, mA, cA, IA, mB, cB, IB,
        params.tau1_max, params.tau2_max,
        params.kp1, params.kd1, params.kp2, params.kd2,
        q_place[0], q_place[1],
        q_pick[0], q_pick[1], q_place[0], q_place[1],
        task.pick[0], task.pick[1], task.place[0], task.place[1],
        task.eps_pos, task.omega_tol, task.t_hold, task.t_max, dt,
        record_trajectory,
    )
    if status == _STATUS_DIVERGED:
        raise SimulationDivergedError(
            f"simulation diverged (l1={params.l1:.4g}, l2={params.l2:.4g}, "
            f"kp1={params.kp1:.4g}, kp2={params.kp2:.4g})"
        )
    return SimResult(
        cycle_time=float(t_cyc),
        energy=float(energy),
        reachable=True,
        timed_out=(status == _STATUS_TIMEOUT),
        saturation_fraction=(float(f1), float(f2)),
        trajectory=traj[:rows].copy() if record_trajectory else None,
    )


def export_trajectory_csv(result: SimResult) -> str:
    """Render a recorded trajectory as CSV (t,q1,q2,qd1,qd2,tau1,tau2)."""
    if result.trajectory is None:
        raise ValueError("trajectory was not recorded; rerun with record_trajectory=True")
    lines = [",".join(TRAJECTORY_COLUMNS)]
    for row in result.trajectory:
        lines.append(",".join(repr(float(v)) for v in row))
    return "\n".join(lines) + "\n"
