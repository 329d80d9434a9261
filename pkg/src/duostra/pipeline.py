"""End-to-end mapping, auditing and cost metrics."""

from __future__ import annotations

import json
import time
from dataclasses import dataclass, field
from typing import NamedTuple, Optional

import numpy as np

from .circuit import LogicalCircuit, TimingModel, build_dependency_graph, ideal_circuit_cost, is_decomposed
from .device import DeviceGraph, DistanceMatrix, all_pairs_shortest_hops
from .errors import ContractViolation
from .placement import Mapping, initial_placement
from .qasm import format_gate, qasm_header
from .router import PhysicalOp, RoutingState, make_router
from .scheduler import MapperContext, SchedulerConfig, make_selector

SCHEMA_VERSION = 1


@dataclass(frozen=True)
class MappedResult:
    ops: tuple[PhysicalOp, ...]
    initial_mapping: Mapping
    final_mapping: Mapping
    mapping_cost: int
    swap_count: int
    edge_swap_counts: tuple[int, ...]
    num_physical: int
    timing: TimingModel = TimingModel()
    wall_ms: float = field(default=0.0, compare=False)

    @property
    def gate_ops(self) -> list[PhysicalOp]:
        return [op for op in self.ops if op.kind == "gate"]

    def to_dict(self) -> dict:
        """Deterministic serialisation (wall time excluded)."""
        return {
            "schema": SCHEMA_VERSION,
            "num_physical": self.num_physical,
            "mapping_cost": self.mapping_cost,
            "swap_count": self.swap_count,
            "initial": self.initial_mapping.to_dict(),
            "final": self.final_mapping.to_dict(),
            "ops": [
                [op.kind, op.name, list(op.qubits), op.start, op.finish, op.gate_id, list(op.params)]
                for op in self.ops
            ],
        }


class Violation(NamedTuple):
    kind: str
    op_index: Optional[int]
    detail: str


class EdgeUtilization(NamedTuple):
    counts: tuple[int, ...]
    stddev: float
    max: int

    def to_dict(self) -> dict:
        return {"counts": list(self.counts), "stddev": self.stddev, "max": self.max}


@dataclass(frozen=True)
class CostReport:
    ideal_cost: int
    mapping_cost: int
    swap_count: int
    wall_ms: float
    edge_utilization: EdgeUtilization

    def to_dict(self, include_wall: bool = True) -> dict:
        d = {
            "ideal_cost": self.ideal_cost,
            "mapping_cost": self.mapping_cost,
            "swap_count": self.swap_count,
            "edge_utilization": self.edge_utilization.to_dict(),
        }
        if include_wall:
            d["wall_ms"] = round(self.wall_ms, 3)
        return d


def map_circuit(
    circuit: LogicalCircuit,
    device: DeviceGraph,
    placement: str | Mapping = "dfs",
    router: str = "duostra",
    scheduler: SchedulerConfig | None = None,
    timing: TimingModel | None = None,
    seed: int = 0,
    dist: DistanceMatrix | None = None,
) -> MappedResult:
    """Map a decomposed circuit onto ``device``.

    Loop: flush ready single-qubit gates; while double-qubit gates wait, let
    the scheduler pick one, route it, commit, flush again.
    """
    scheduler = scheduler or SchedulerConfig()
    timing = timing or TimingModel()
    if not is_decomposed(circuit):
        raise ContractViolation("circuit must be decomposed to 1q/2q gates without swap")
    t0 = time.perf_counter()
    mapping = placement if isinstance(placement, Mapping) else initial_placement(circuit, device, placement, seed)
    if dist is None and (router != "duostra" or scheduler.kind == "sp"):
        dist = all_pairs_shortest_hops(device)
    route = make_router(router, dist)
    select = make_selector(scheduler, dist, route)

    ctx = MapperContext(circuit, build_dependency_graph(circuit), RoutingState.from_mapping(device, mapping), timing)
    ctx.flush_singles()
    while ctx.waitlist:
        ctx.execute_double(select(ctx), route)
    if ctx.ready_singles or not all(ctx.executed):
        raise ContractViolation("mapping ended with unexecuted gates")
    wall_ms = (time.perf_counter() - t0) * 1e3

    order = sorted(range(len(ctx.ops)), key=lambda k: (ctx.ops[k].start, k))
    ops = tuple(ctx.ops[k] for k in order)
    counts = [0] * len(device.edges)
    for op in ops:
        if op.kind == "swap":
            i, j = op.qubits
            counts[device.edge_index[(min(i, j), max(i, j))]] += 1
    return MappedResult(
        ops=ops,
        initial_mapping=mapping,
        final_mapping=ctx.state.mapping(),
        mapping_cost=max((op.finish for op in ops), default=0),
        swap_count=sum(counts),
        edge_swap_counts=tuple(counts),
        num_physical=device.num_qubits,
        timing=timing,
        wall_ms=wall_ms,
    )


def mapping_cost(result: MappedResult) -> int:
    return max((op.finish for op in result.ops), default=0)


def edge_utilization(result: MappedResult, device: DeviceGraph) -> EdgeUtilization:
    counts = [0] * len(device.edges)
    for op in result.ops:
        if op.kind == "swap":
            i, j = op.qubits
            k = device.edge_index.get((min(i, j), max(i, j)))
            if k is not None:
                counts[k] += 1
    if not counts:
        return EdgeUtilization((), 0.0, 0)
    arr = np.asarray(counts, dtype=float)
    return EdgeUtilization(tuple(counts), float(arr.std()), int(arr.max()))


def cost_report(circuit: LogicalCircuit, result: MappedResult, device: DeviceGraph) -> CostReport:
    return CostReport(
        ideal_circuit_cost(circuit, result.timing),
        result.mapping_cost,
        result.swap_count,
        result.wall_ms,
        edge_utilization(result, device),
    )


def verify(original: LogicalCircuit, result: MappedResult, device: DeviceGraph) -> list[Violation]:
    """Replay ``result`` from its initial mapping and list every inconsistency.

    Kinds: ``coupling`` (2q op off the device graph), ``swap`` (malformed
    swap), ``placement`` (gate op's qubits do not host its logical operands),
    ``order`` (per-logical-qubit gate order differs from the circuit),
    ``timing`` (start is not the max prior finish of its qubits, or wrong
    duration), ``final_mapping``, ``cost``, plus ``missing_gate``,
    ``duplicate_gate``, ``unknown_gate`` and ``qubit_range``. An empty list
    means the result is sound. Never raises on bad input.
    """
    out: list[Violation] = []
    n = device.num_qubits
    timing = result.timing
    try:
        p2l = [None] * n
        for q, p in enumerate(result.initial_mapping.log2phys):
            p2l[p] = q
    except (IndexError, TypeError) as exc:
        return [Violation("placement", None, f"initial mapping unusable: {exc}")]
    ocp = [0] * n
    gates = original.gates
    seen: set[int] = set()
    actual: list[list[tuple[int, int]]] = [[] for _ in range(original.num_qubits)]

    for idx, op in enumerate(result.ops):
        qs = tuple(op.qubits)
        if not qs or any(not (isinstance(p, (int, np.integer)) and 0 <= p < n) for p in qs):
            out.append(Violation("qubit_range", idx, f"op acts on {qs}"))
            continue
        if len(qs) == 2 and not device.are_adjacent(*qs):
            out.append(Violation("coupling", idx, f"{qs} is not a device edge"))
        expected_start = max(ocp[p] for p in qs)
        if op.kind == "swap":
            dur = timing.tau_swap
        else:
            dur = timing.tau_double if len(qs) == 2 else timing.tau_single
        if op.start != expected_start or op.finish - op.start != dur:
            out.append(
                Violation("timing", idx, f"ran {op.start}->{op.finish}, expected start {expected_start} duration {dur}")
            )
        for p in qs:
            ocp[p] = op.finish

        if op.kind == "swap":
            if len(qs) != 2 or qs[0] == qs[1]:
                out.append(Violation("swap", idx, f"swap needs two distinct qubits, got {qs}"))
                continue
            i, j = qs
            p2l[i], p2l[j] = p2l[j], p2l[i]
            continue
        if op.kind != "gate":
            out.append(Violation("swap", idx, f"unknown op kind {op.kind!r}"))
            continue

        g = op.gate_id
        if g is None or not 0 <= g < len(gates):
            out.append(Violation("unknown_gate", idx, f"gate id {g!r} not in circuit"))
            continue
        if g in seen:
            out.append(Violation("duplicate_gate", idx, f"gate {g} executed twice"))
            continue
        seen.add(g)
        gate = gates[g]
        hosted = tuple(p2l[p] for p in qs)
        if hosted != gate.qubits or op.name != gate.kind:
            out.append(
                Violation("placement", idx, f"gate {g} ({gate.kind} on {gate.qubits}) ran on {qs} hosting {hosted}")
            )
        for q in gate.qubits:
            actual[q].append((g, idx))

    for q in range(original.num_qubits):
        expected = [g.id for g in gates if q in g.qubits]
        got = [g for g, _ in actual[q]]
        if got != expected:
            k = next((k for k, (a, b) in enumerate(zip(got, expected)) if a != b), None)
            if k is not None:
                out.append(
                    Violation("order", actual[q][k][1], f"logical {q}: gate {got[k]} ran where {expected[k]} was due")
                )
    for g in range(len(gates)):
        if g not in seen:
            out.append(Violation("missing_gate", None, f"gate {g} never executed"))

    replay_final = [None] * original.num_qubits
    for p, q in enumerate(p2l):
        if q is not None and q < original.num_qubits:
            replay_final[q] = p
    if tuple(replay_final) != tuple(result.final_mapping.log2phys):
        out.append(Violation("final_mapping", None, f"replay gives {replay_final}"))
    makespan = max((op.finish for op in result.ops), default=0)
    if makespan != result.mapping_cost:
        out.append(Violation("cost", None, f"reported {result.mapping_cost}, replay {makespan}"))
    return out


def emit_mapped_qasm(result: MappedResult, expand_swaps: bool = False) -> str:
    lines = qasm_header(result.num_physical)
    for op in result.ops:
        if op.kind == "swap" and expand_swaps:
            i, j = op.qubits
            lines += [format_gate("cx", (i, j)), format_gate("cx", (j, i)), format_gate("cx", (i, j))]
        else:
            lines.append(format_gate(op.name, op.qubits, op.params))
    return "\n".join(lines) + "\n"


def layout_json(result: MappedResult, notes: dict | None = None) -> str:
    doc = {
        "schema": SCHEMA_VERSION,
        "initial": result.initial_mapping.to_dict(),
        "final": result.final_mapping.to_dict(),
    }
    if notes:
        doc.update(notes)
    return json.dumps(doc, indent=1, sort_keys=True) + "\n"
