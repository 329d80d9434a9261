"""Initial logical-to-physical placement."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .circuit import LogicalCircuit, logical_adjacency
from .device import DeviceGraph
from .errors import CapacityError

STRATEGIES = ("dfs", "identity", "random")


@dataclass(frozen=True)
class Mapping:
    log2phys: tuple[int, ...]
    phys2log: tuple[int | None, ...]

    def __post_init__(self):
        seen = set()
        for q, p in enumerate(self.log2phys):
            if not 0 <= p < len(self.phys2log):
                raise ValueError(f"logical {q} mapped to missing physical {p}")
            if p in seen:
                raise ValueError(f"physical {p} hosts two logical qubits")
            seen.add(p)
            if self.phys2log[p] != q:
                raise ValueError(f"phys2log[{p}] is {self.phys2log[p]}, expected {q}")
        hosted = sum(1 for v in self.phys2log if v is not None)
        if hosted != len(self.log2phys):
            raise ValueError("phys2log hosts qubits missing from log2phys")

    @classmethod
    def from_log2phys(cls, log2phys: Sequence[int], num_physical: int) -> "Mapping":
        phys2log: list[int | None] = [None] * num_physical
        for q, p in enumerate(log2phys):
            if 0 <= p < num_physical:
                phys2log[p] = q
        return cls(tuple(int(p) for p in log2phys), tuple(phys2log))

    def to_dict(self) -> dict[str, int]:
        return {str(q): p for q, p in enumerate(self.log2phys)}


def _preorder(adjacency: Sequence[Sequence[int]], root: int, visited: list[bool], out: list[int]) -> None:
    # iterative pre-order; matches the recursive visit order exactly
    if visited[root]:
        return
    visited[root] = True
    out.append(root)
    stack = [iter(adjacency[root])]
    while stack:
        for nxt in stack[-1]:
            if not visited[nxt]:
                visited[nxt] = True
                out.append(nxt)
                stack.append(iter(adjacency[nxt]))
                break
        else:
            stack.pop()


def dfs_order_logical(circuit: LogicalCircuit) -> list[int]:
    """Logical qubits in DFS order over the interaction lists.

    Double-qubit gates are walked in circuit order and each operand, control
    first, seeds a pre-order DFS. Qubits outside every 2q gate follow in
    ascending order.
    """
    adj = logical_adjacency(circuit)
    visited = [False] * circuit.num_qubits
    order: list[int] = []
    for g in circuit.gates:
        if g.arity != 2:
            continue
        for q in g.qubits:
            _preorder(adj, q, visited, order)
    order += [q for q in range(circuit.num_qubits) if not visited[q]]
    return order


def dfs_order_physical(device: DeviceGraph) -> list[int]:
    visited = [False] * device.num_qubits
    order: list[int] = []
    _preorder(device.adjacency, 0, visited, order)
    return order


def initial_placement(
    circuit: LogicalCircuit,
    device: DeviceGraph,
    strategy: str = "dfs",
    seed: int = 0,
) -> Mapping:
    n_log, n_phys = circuit.num_qubits, device.num_qubits
    if n_log > n_phys:
        raise CapacityError(f"circuit needs {n_log} qubits but device {device.name or ''} has {n_phys}")
    if strategy == "dfs":
        log2phys = [0] * n_log
        for q, p in zip(dfs_order_logical(circuit), dfs_order_physical(device)):
            log2phys[q] = p
    elif strategy == "identity":
        log2phys = list(range(n_log))
    elif strategy == "random":
        rng = np.random.default_rng(seed)
        log2phys = [int(p) for p in rng.choice(n_phys, size=n_log, replace=False)]
    else:
        raise ValueError(f"unknown placement strategy {strategy!r}; expected one of {STRATEGIES}")
    return Mapping.from_log2phys(log2phys, n_phys)
