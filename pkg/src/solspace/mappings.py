"""Named mapping registry.

Problem files reference node mappings by name so that graphs stay
declarative and serializable. A registry entry is a builder that receives a
:class:`MappingContext` (the problem's task and constants) and returns the
pure callable evaluated at the node; context-free mappings ignore it.

The argument order of every mapping is the declaration order of the node's
incoming edges in the problem file.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Mapping, Optional

from .adg import MappingDomainError
from .arm import (
    DEFAULT_DT,
    DEFAULT_PAYLOAD,
    DEFAULT_RHO,
    GRAVITY,
    ArmParams,
    SimulationDivergedError,
    Task,
    simulate_cycle,
)


@dataclass(frozen=True)
class MappingContext:
    """Per-problem inputs available to mapping builders."""

    task: Optional[Task] = None
    constants: Mapping[str, float] = field(default_factory=dict)

    def constant(self, name: str, default: float) -> float:
        return float(self.constants.get(name, default))


class UnknownMappingError(KeyError):
    def __init__(self, name: str, known: tuple[str, ...]):
        super().__init__(f"unknown mapping {name!r}; registered: {', '.join(known)}")
        self.name = name


class MappingRegistry:
    """Name -> (builder, arity) table; ``arity=None`` means variadic."""

    def __init__(self):
        self._builders: dict[str, Callable[[MappingContext], Callable]] = {}
        self._arities: dict[str, Optional[int]] = {}

    def register(self, name: str, arity: Optional[int] = None):
        """Register a context-free mapping function."""
        def deco(fn: Callable) -> Callable:
            self._add(name, lambda ctx: fn, arity)
            return fn
        return deco

    def register_factory(self, name: str, arity: Optional[int] = None):
        """Register a builder called with the context at problem load."""
        def deco(factory: Callable[[MappingContext], Callable]) -> Callable:
            self._add(name, factory, arity)
            return factory
        return deco

    def _add(self, name, builder, arity):
        if name in self._builders:
            raise ValueError(f"mapping {name!r} already registered")
        self._builders[name] = builder
        self._arities[name] = arity

    def build(self, name: str, context: MappingContext) -> tuple[Callable, Optional[int]]:
        if name not in self._builders:
            raise UnknownMappingError(name, self.names())
        return self._builders[name](context), self._arities[name]

    def names(self) -> tuple[str, ...]:
        return tuple(sorted(self._builders))

    def __contains__(self, name: str) -> bool:
        return name in self._builders


REGISTRY = MappingRegistry()


@REGISTRY.register("identity", arity=1)
def _identity(x):
    return x


@REGISTRY.register("square", arity=1)
def _square(x):
    return x * x


@REGISTRY.register("add_one", arity=1)
def _add_one(x):
    return x + 1.0


@REGISTRY.register("sum")
def _sum(*xs):
    return float(sum(xs))


@REGISTRY.register("product")
def _product(*xs):
    out = 1.0
    for x in xs:
        out *= x
    return out


@REGISTRY.register("extract_cycle_time", arity=1)
def _extract_cycle_time(sim):
    return sim.cycle_time


@REGISTRY.register("extract_energy", arity=1)
def _extract_energy(sim):
    return sim.energy


@REGISTRY.register_factory("arm_cycle", arity=10)
def _arm_cycle_factory(ctx: MappingContext):
    """One pick-and-place cycle; parents in order
    (l1, l2, r_mot, m_mot, tau1_max, tau2_max, kp1, kd1, kp2, kd2)."""
    if ctx.task is None:
        raise ValueError("mapping 'arm_cycle' needs a task in the problem file")
    task = ctx.task
    rho = ctx.constant("rho", DEFAULT_RHO)
    payload = ctx.constant("payload", DEFAULT_PAYLOAD)
    g = ctx.constant("g", GRAVITY)
    dt = ctx.constant("dt", DEFAULT_DT)

    def arm_cycle(l1, l2, r_mot, m_mot, tau1_max, tau2_max, kp1, kd1, kp2, kd2):
        params = ArmParams(
            l1=l1, l2=l2, rho=rho, m_mot=m_mot, r_mot=r_mot,
            tau1_max=tau1_max, tau2_max=tau2_max,
            kp1=kp1, kd1=kd1, kp2=kp2, kd2=kd2,
            payload=payload, g=g,
        )
        try:
            result = simulate_cycle(params, task, dt=dt)
        except SimulationDivergedError as exc:
            raise MappingDomainError("simulation_failed", str(exc)) from exc
        if not result.reachable:
            raise MappingDomainError(
                "unreachable_workspace",
                f"pick/place outside margin-shrunk annulus for l1={l1:.4g}, l2={l2:.4g}",
            )
        return result

    return arm_cycle
