"""Logical circuits, gate decomposition and the gate dependency graph."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

from .errors import CircuitValidationError, UnsupportedGateError
from .kernels import asap_makespan

# name -> (arity, number of angle parameters)
KNOWN_GATES: dict[str, tuple[int, int]] = {
    "id": (1, 0),
    "h": (1, 0),
    "x": (1, 0),
    "y": (1, 0),
    "z": (1, 0),
    "s": (1, 0),
    "sdg": (1, 0),
    "t": (1, 0),
    "tdg": (1, 0),
    "sx": (1, 0),
    "rx": (1, 1),
    "ry": (1, 1),
    "rz": (1, 1),
    "u1": (1, 1),
    "p": (1, 1),
    "u2": (1, 2),
    "u3": (1, 3),
    "u": (1, 3),
    "cx": (2, 0),
    "cz": (2, 0),
    "swap": (2, 0),
    "cp": (2, 1),
    "cu1": (2, 1),
    "crz": (2, 1),
    "ccx": (3, 0),
}

CONTROLLED_PHASE = frozenset({"cp", "cu1"})


@dataclass(frozen=True)
class Gate:
    id: int
    kind: str
    qubits: tuple[int, ...]
    params: tuple[float, ...] = ()

    def __post_init__(self):
        if not 1 <= len(self.qubits) <= 3:
            raise CircuitValidationError(
                f"gate {self.id} ({self.kind}) acts on {len(self.qubits)} qubits; 1 to 3 supported"
            )
        if len(set(self.qubits)) != len(self.qubits):
            raise CircuitValidationError(f"gate {self.id} ({self.kind}) repeats a qubit: {self.qubits}")

    @property
    def arity(self) -> int:
        return len(self.qubits)

    @property
    def is_double(self) -> bool:
        return len(self.qubits) == 2


@dataclass(frozen=True)
class LogicalCircuit:
    num_qubits: int
    gates: tuple[Gate, ...] = ()
    name: str = ""

    def __post_init__(self):
        if self.num_qubits < 0:
            raise CircuitValidationError("num_qubits must be non-negative")
        object.__setattr__(self, "gates", tuple(self.gates))
        for pos, g in enumerate(self.gates):
            if g.id != pos:
                raise CircuitValidationError(f"gate at position {pos} has id {g.id}")
            for q in g.qubits:
                if not 0 <= q < self.num_qubits:
                    raise CircuitValidationError(
                        f"gate {g.id} ({g.kind}) uses qubit {q} outside register of {self.num_qubits}"
                    )

    @classmethod
    def from_ops(
        cls,
        num_qubits: int,
        ops: Iterable[tuple],
        name: str = "",
    ) -> "LogicalCircuit":
        """Build from ``(kind, qubits)`` or ``(kind, qubits, params)`` tuples."""
        gates = []
        for i, op in enumerate(ops):
            kind, qubits = op[0], tuple(int(q) for q in op[1])
            params = tuple(float(p) for p in op[2]) if len(op) > 2 else ()
            gates.append(Gate(i, kind, qubits, params))
        return cls(num_qubits, tuple(gates), name)

    def __len__(self) -> int:
        return len(self.gates)

    @property
    def double_gates(self) -> list[Gate]:
        return [g for g in self.gates if g.is_double]


@dataclass(frozen=True)
class TimingModel:
    tau_single: int = 1
    tau_double: int = 2
    tau_swap: int = 6

    def __post_init__(self):
        for name in ("tau_single", "tau_double", "tau_swap"):
            value = getattr(self, name)
            if isinstance(value, bool) or not isinstance(value, (int, np.integer)) or value <= 0:
                raise ValueError(f"{name} must be a positive integer, got {value!r}")

    def duration(self, gate: Gate) -> int:
        return self.tau_double if gate.is_double else self.tau_single


def _renumber(num_qubits: int, ops: Sequence[tuple], name: str) -> LogicalCircuit:
    return LogicalCircuit(
        num_qubits,
        tuple(Gate(i, k, q, p) for i, (k, q, p) in enumerate(ops)),
        name,
    )


def _toffoli(a: int, b: int, c: int) -> list[tuple]:
    return [
        ("h", (c,), ()),
        ("cx", (b, c), ()),
        ("tdg", (c,), ()),
        ("cx", (a, c), ()),
        ("t", (c,), ()),
        ("cx", (b, c), ()),
        ("tdg", (c,), ()),
        ("cx", (a, c), ()),
        ("t", (b,), ()),
        ("t", (c,), ()),
        ("h", (c,), ()),
        ("cx", (a, b), ()),
        ("t", (a,), ()),
        ("tdg", (b,), ()),
        ("cx", (a, b), ()),
    ]


def _controlled_phase(theta: float, c: int, t: int) -> list[tuple]:
    # equals diag(1, 1, 1, e^{i theta}) up to global phase
    return [
        ("rz", (c,), (theta / 2,)),
        ("cx", (c, t), ()),
        ("rz", (t,), (-theta / 2,)),
        ("cx", (c, t), ()),
        ("rz", (t,), (theta / 2,)),
    ]


def _controlled_rz(theta: float, c: int, t: int) -> list[tuple]:
    return [
        ("rz", (t,), (theta / 2,)),
        ("cx", (c, t), ()),
        ("rz", (t,), (-theta / 2,)),
        ("cx", (c, t), ()),
    ]


def decompose(circuit: LogicalCircuit) -> LogicalCircuit:
    """Expand swap, ccx and controlled rotations into 1q gates and CX.

    Untouched gates keep their relative order; ids are renumbered densely.
    """
    ops: list[tuple] = []
    for g in circuit.gates:
        q = g.qubits
        if g.kind == "swap":
            a, b = q
            ops += [("cx", (a, b), ()), ("cx", (b, a), ()), ("cx", (a, b), ())]
        elif g.kind == "ccx":
            ops += _toffoli(*q)
        elif g.kind in CONTROLLED_PHASE:
            ops += _controlled_phase(g.params[0], *q)
        elif g.kind == "crz":
            ops += _controlled_rz(g.params[0], *q)
        elif g.arity == 3:
            raise UnsupportedGateError(f"cannot decompose 3-qubit gate {g.kind!r} (gate {g.id})")
        else:
            ops.append((g.kind, g.qubits, g.params))
    return _renumber(circuit.num_qubits, ops, circuit.name)


def is_decomposed(circuit: LogicalCircuit) -> bool:
    return all(g.arity <= 2 and g.kind != "swap" for g in circuit.gates)


@dataclass(frozen=True)
class DependencyGraph:
    """Gate-level DAG: each gate depends on the latest earlier gate on each of its qubits."""

    predecessors: tuple[tuple[int, ...], ...]
    successors: tuple[tuple[int, ...], ...]
    num_predecessors: tuple[int, ...] = field(repr=False)

    def __len__(self) -> int:
        return len(self.predecessors)

    def roots(self) -> list[int]:
        return [g for g, k in enumerate(self.num_predecessors) if k == 0]

    def topological_order(self) -> list[int]:
        """Kahn order, lowest id first among ready gates."""
        import heapq

        remaining = list(self.num_predecessors)
        ready = self.roots()
        heapq.heapify(ready)
        order = []
        while ready:
            g = heapq.heappop(ready)
            order.append(g)
            for s in self.successors[g]:
                remaining[s] -= 1
                if remaining[s] == 0:
                    heapq.heappush(ready, s)
        return order


def build_dependency_graph(circuit: LogicalCircuit) -> DependencyGraph:
    n = len(circuit.gates)
    last = [-1] * circuit.num_qubits
    preds: list[tuple[int, ...]] = []
    succs: list[list[int]] = [[] for _ in range(n)]
    for g in circuit.gates:
        ps = sorted({last[q] for q in g.qubits if last[q] >= 0})
        preds.append(tuple(ps))
        for p in ps:
            succs[p].append(g.id)
        for q in g.qubits:
            last[q] = g.id
    return DependencyGraph(
        tuple(preds),
        tuple(tuple(s) for s in succs),
        tuple(len(p) for p in preds),
    )


def gate_arrays(circuit: LogicalCircuit) -> tuple[np.ndarray, np.ndarray]:
    """Per-gate first and second qubit as int64 arrays (-1 when absent)."""
    n = len(circuit.gates)
    q0 = np.empty(n, dtype=np.int64)
    q1 = np.full(n, -1, dtype=np.int64)
    for g in circuit.gates:
        if g.arity > 2:
            raise CircuitValidationError(f"gate {g.id} ({g.kind}) must be decomposed first")
        q0[g.id] = g.qubits[0]
        if g.arity == 2:
            q1[g.id] = g.qubits[1]
    return q0, q1


def ideal_circuit_cost(circuit: LogicalCircuit, timing: TimingModel | None = None) -> int:
    """ASAP makespan on a fully connected device (no SWAPs)."""
    timing = timing or TimingModel()
    if not circuit.gates:
        return 0
    q0, q1 = gate_arrays(circuit)
    durations = np.where(q1 >= 0, timing.tau_double, timing.tau_single).astype(np.int64)
    return int(asap_makespan(q0, q1, durations, max(circuit.num_qubits, 1)))


def generate_qft(n: int) -> LogicalCircuit:
    """QFT on ``n`` qubits, controlled phases already decomposed.

    The closing bit-reversal is omitted, so output bit ``k`` ends on qubit
    ``n - 1 - k``.
    """
    if n < 0:
        raise ValueError("qubit count must be non-negative")
    ops: list[tuple] = []
    for i in range(n):
        ops.append(("h", (i,), ()))
        for k in range(1, n - i):
            ops += _controlled_phase(math.pi / 2**k, i + k, i)
    return _renumber(n, ops, f"qft{n}")


def logical_adjacency(circuit: LogicalCircuit) -> list[list[int]]:
    """Interaction partners per logical qubit, in order of first shared 2q gate."""
    adj: list[list[int]] = [[] for _ in range(circuit.num_qubits)]
    seen: list[set[int]] = [set() for _ in range(circuit.num_qubits)]
    for g in circuit.gates:
        if g.arity != 2:
            continue
        a, b = g.qubits
        if b not in seen[a]:
            seen[a].add(b)
            adj[a].append(b)
        if a not in seen[b]:
            seen[b].add(a)
            adj[b].append(a)
    return adj


_RANDOM_SINGLES = ("h", "x", "t", "tdg", "s", "rz")


def random_circuit(
    num_qubits: int,
    num_gates: int,
    seed: int = 0,
    double_fraction: float = 0.5,
) -> LogicalCircuit:
    """Uniformly random decomposed circuit (1q gates and CX)."""
    if num_qubits < 1:
        raise ValueError("need at least one qubit")
    rng = np.random.default_rng(seed)
    ops: list[tuple] = []
    for _ in range(num_gates):
        if num_qubits >= 2 and rng.random() < double_fraction:
            a, b = rng.choice(num_qubits, size=2, replace=False)
            ops.append(("cx", (int(a), int(b)), ()))
        else:
            kind = _RANDOM_SINGLES[int(rng.integers(len(_RANDOM_SINGLES)))]
            params = (float(rng.integers(1, 8)) * math.pi / 4,) if kind == "rz" else ()
            ops.append((kind, (int(rng.integers(num_qubits)),), params))
    return _renumber(num_qubits, ops, f"random_{num_qubits}_{num_gates}_{seed}")
