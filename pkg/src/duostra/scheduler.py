"""Choosing which ready double-qubit gate to route next."""

from __future__ import annotations

import json
import logging
from collections import deque
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .circuit import DependencyGraph, LogicalCircuit, TimingModel, gate_arrays
from .device import DistanceMatrix
from .errors import ContractViolation
from .router import PhysicalOp, Router, RoutingPlan, RoutingState, apply_plan

SCHEDULERS = ("sp", "le", "static")

_trace = logging.getLogger("duostra.trace")


@dataclass(frozen=True)
class SchedulerConfig:
    kind: str = "sp"
    depth: int = 4
    sp_constant: int = 1

    def __post_init__(self):
        if self.kind not in SCHEDULERS:
            raise ValueError(f"unknown scheduler {self.kind!r}; expected one of {SCHEDULERS}")
        if self.depth < 1:
            raise ValueError("LE depth must be at least 1")
        if self.sp_constant < 0:
            raise ValueError("SP constant must be non-negative")


class MapperContext:
    """Execution bookkeeping for one mapping run.

    ``waitlist`` holds exactly the unexecuted double-qubit gates whose
    predecessors have all executed. Ready single-qubit gates queue in
    ``ready_singles`` until :meth:`flush_singles` runs them.
    """

    def __init__(
        self,
        circuit: LogicalCircuit,
        dag: DependencyGraph,
        state: RoutingState,
        timing: TimingModel,
        record: bool = True,
    ):
        self.circuit = circuit
        self.dag = dag
        self.state = state
        self.timing = timing
        self.ops: list[PhysicalOp] | None = [] if record else None
        self.executed = [False] * len(dag)
        self.remaining = list(dag.num_predecessors)
        self.waitlist: set[int] = set()
        self.ready_singles: deque[int] = deque()
        q0, q1 = gate_arrays(circuit)
        self.is_double = (q1 >= 0).tolist()
        self.remaining_double = int(np.count_nonzero(q1 >= 0))
        for g in dag.roots():
            self._make_ready(g)

    def copy(self) -> "MapperContext":
        """Independent clone for speculative scheduling (no op log)."""
        new = object.__new__(MapperContext)
        new.circuit = self.circuit
        new.dag = self.dag
        new.timing = self.timing
        new.state = self.state.copy()
        new.ops = None
        new.executed = self.executed.copy()
        new.remaining = self.remaining.copy()
        new.waitlist = set(self.waitlist)
        new.ready_singles = deque(self.ready_singles)
        new.is_double = self.is_double
        new.remaining_double = self.remaining_double
        return new

    @property
    def done(self) -> bool:
        return not self.waitlist and not self.ready_singles

    def _make_ready(self, g: int) -> None:
        if self.is_double[g]:
            self.waitlist.add(g)
        else:
            self.ready_singles.append(g)

    def mark_executed(self, g: int) -> None:
        self.executed[g] = True
        if self.is_double[g]:
            self.waitlist.discard(g)
            self.remaining_double -= 1
        for s in self.dag.successors[g]:
            self.remaining[s] -= 1
            if self.remaining[s] == 0:
                self._make_ready(s)

    def flush_singles(self) -> int:
        """Run every ready single-qubit gate, ASAP, until none is ready."""
        count = 0
        ocp, l2p = self.state.ocp, self.state.log2phys
        tau = self.timing.tau_single
        gates = self.circuit.gates
        while self.ready_singles:
            g = self.ready_singles.popleft()
            gate = gates[g]
            p = int(l2p[gate.qubits[0]])
            start = int(ocp[p])
            ocp[p] = start + tau
            if self.ops is not None:
                self.ops.append(PhysicalOp("gate", gate.kind, (p,), start, start + tau, g, gate.params))
            self.mark_executed(g)
            count += 1
        return count

    def physical_pair(self, g: int) -> tuple[int, int]:
        a, b = self.circuit.gates[g].qubits
        l2p = self.state.log2phys
        return int(l2p[a]), int(l2p[b])

    def execute_double(self, g: int, router: Router) -> RoutingPlan:
        """Route, commit and retire gate ``g``, then flush newly ready singles."""
        if g not in self.waitlist:
            raise ContractViolation(f"gate {g} is not in the waitlist")
        s0, s1 = self.physical_pair(g)
        plan = router(self.state, s0, s1, self.timing.tau_swap)
        apply_plan(self.state, plan, self.circuit.gates[g], self.timing, self.ops)
        if self.ops is not None and _trace.isEnabledFor(logging.DEBUG):
            swaps = [list(sw.edge) for sw in plan.swaps0 + plan.swaps1]
            _trace.debug(json.dumps({"gate": g, "swaps": swaps, "objective": plan.objective}))
        self.mark_executed(g)
        self.flush_singles()
        return plan


def flush_ready_singles(ctx: MapperContext) -> int:
    return ctx.flush_singles()


def _require_waitlist(ctx: MapperContext) -> list[int]:
    if not ctx.waitlist:
        raise ContractViolation("waitlist is empty")
    return sorted(ctx.waitlist)


def static_select(ctx: MapperContext) -> int:
    return _require_waitlist(ctx)[0]


def sp_scores(ctx: MapperContext, dist: DistanceMatrix, c: int = 1) -> tuple[list[int], np.ndarray]:
    """Waitlist (ascending) and ``max(ocp) + c * hops`` for each entry."""
    wl = _require_waitlist(ctx)
    gates = ctx.circuit.gates
    l2p = ctx.state.log2phys
    a = l2p[[gates[g].qubits[0] for g in wl]]
    b = l2p[[gates[g].qubits[1] for g in wl]]
    ocp = ctx.state.ocp
    return wl, np.maximum(ocp[a], ocp[b]) + c * dist.pairs(a, b)


def sp_select(ctx: MapperContext, dist: DistanceMatrix, c: int = 1) -> int:
    """Gate with the smallest estimated start; lowest id on ties."""
    wl, scores = sp_scores(ctx, dist, c)
    return wl[int(np.argmin(scores))]


def le_search(ctx: MapperContext, depth: int, router: Router) -> tuple[int, tuple[int, ...]]:
    """Best ``(makespan, sequence)`` over all gate sequences of length ``min(depth, remaining)``.

    Each sequence is played out on cloned contexts; ties go to the
    lexicographically smallest sequence.
    """
    _require_waitlist(ctx)
    d = min(depth, ctx.remaining_double)
    best: list = [None, ()]

    def explore(node: MapperContext, seq: tuple[int, ...], left: int) -> None:
        if left == 0:
            cost = node.state.makespan
            if best[0] is None or cost < best[0]:
                best[0], best[1] = cost, seq
            return
        for g in sorted(node.waitlist):
            child = node.copy()
            child.execute_double(g, router)
            explore(child, seq + (g,), left - 1)

    explore(ctx, (), d)
    return best[0], best[1]


def le_select(ctx: MapperContext, depth: int, router: Router) -> int:
    return le_search(ctx, depth, router)[1][0]


Selector = Callable[[MapperContext], int]


def make_selector(config: SchedulerConfig, dist: DistanceMatrix, router: Router) -> Selector:
    if config.kind == "static":
        return static_select
    if config.kind == "sp":
        return lambda ctx: sp_select(ctx, dist, config.sp_constant)
    return lambda ctx: le_select(ctx, config.depth, router)
