"""Per-gate routing under the occupied-time model.

A SWAP on edge ``(i, j)`` starts at ``max(ocp[i], ocp[j])`` and occupies both
qubits for ``tau_swap``. A routing path moves a logical qubit one edge at a
time, so each swap in a path waits for the previous one.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, NamedTuple, Optional, Sequence

import numpy as np

from .circuit import Gate, TimingModel
from .device import DeviceGraph, DistanceMatrix
from .errors import ContractViolation, RoutingError, StalePlanError
from .kernels import duostra_search
from .placement import Mapping

ORACLE_MAX_QUBITS = 12
ROUTERS = ("duostra", "shortest-path")


class Swap(NamedTuple):
    edge: tuple[int, int]
    start: int
    finish: int


class PhysicalOp(NamedTuple):
    kind: str  # "swap" or "gate"
    name: str
    qubits: tuple[int, ...]
    start: int
    finish: int
    gate_id: Optional[int] = None
    params: tuple[float, ...] = ()


@dataclass(frozen=True)
class RoutingPlan:
    sources: tuple[int, int]
    swaps0: tuple[Swap, ...]
    swaps1: tuple[Swap, ...]
    final_edge: tuple[int, int]
    objective: int

    @property
    def gate_start(self) -> int:
        return self.objective

    @property
    def num_swaps(self) -> int:
        return len(self.swaps0) + len(self.swaps1)


class RoutingState:
    """Occupied time per physical qubit plus the live logical/physical bijection."""

    __slots__ = ("device", "ocp", "log2phys", "phys2log")

    def __init__(self, device: DeviceGraph, ocp: np.ndarray, log2phys: np.ndarray, phys2log: np.ndarray):
        self.device = device
        self.ocp = ocp
        self.log2phys = log2phys
        self.phys2log = phys2log

    @classmethod
    def from_mapping(cls, device: DeviceGraph, mapping: Mapping, ocp: Sequence[int] | None = None) -> "RoutingState":
        n = device.num_qubits
        if len(mapping.phys2log) != n:
            raise ContractViolation("mapping size does not match the device")
        ocp_arr = np.zeros(n, dtype=np.int64) if ocp is None else np.array(ocp, dtype=np.int64)
        if ocp_arr.shape != (n,) or (ocp_arr < 0).any():
            raise ContractViolation("ocp must hold one non-negative time per physical qubit")
        l2p = np.array(mapping.log2phys, dtype=np.int64)
        p2l = np.array([-1 if v is None else v for v in mapping.phys2log], dtype=np.int64)
        return cls(device, ocp_arr, l2p, p2l)

    @classmethod
    def identity(cls, device: DeviceGraph, ocp: Sequence[int] | None = None) -> "RoutingState":
        n = device.num_qubits
        return cls.from_mapping(device, Mapping.from_log2phys(range(n), n), ocp)

    def copy(self) -> "RoutingState":
        return RoutingState(self.device, self.ocp.copy(), self.log2phys.copy(), self.phys2log.copy())

    def mapping(self) -> Mapping:
        return Mapping.from_log2phys(self.log2phys.tolist(), self.device.num_qubits)

    def snapshot(self) -> tuple[bytes, bytes, bytes]:
        return self.ocp.tobytes(), self.log2phys.tobytes(), self.phys2log.tobytes()

    @property
    def makespan(self) -> int:
        return int(self.ocp.max()) if self.ocp.size else 0


def edge_ocp(state: RoutingState, i: int, j: int, with_swap: bool, tau_swap: int = 6) -> int:
    if not state.device.are_adjacent(i, j):
        raise ContractViolation(f"({i}, {j}) is not a device edge")
    base = max(int(state.ocp[i]), int(state.ocp[j]))
    return base + tau_swap if with_swap else base


def _chain(ocp: np.ndarray, path: Sequence[int], tau_swap: int) -> tuple[tuple[Swap, ...], int]:
    """Swaps moving the qubit on ``path[0]`` to ``path[-1]``; returns them and the arrival time."""
    cur = int(ocp[path[0]])
    swaps = []
    for a, b in zip(path, path[1:]):
        start = max(cur, int(ocp[b]))
        cur = start + tau_swap
        swaps.append(Swap((int(a), int(b)), start, cur))
    return tuple(swaps), cur


def _check_sources(state: RoutingState, s0: int, s1: int) -> None:
    n = state.device.num_qubits
    if not (0 <= s0 < n and 0 <= s1 < n) or s0 == s1:
        raise ContractViolation(f"routing sources must be two distinct physical qubits, got {s0}, {s1}")


def _backtrace(parent: np.ndarray, v: int) -> list[int]:
    path = [v]
    while parent[path[-1]] >= 0:
        path.append(int(parent[path[-1]]))
    path.reverse()
    return path


def duostra_route(
    state: RoutingState,
    s0: int,
    s1: int,
    tau_swap: int = 6,
    trace: list | None = None,
) -> RoutingPlan:
    """Optimal two-sided SWAP plan bringing ``s0`` and ``s1`` together.

    Minimises ``max(arrival(s0 side), arrival(s1 side))`` over every device edge
    and every pair of vertex-disjoint paths into it. ``state`` is not modified.
    If ``trace`` is a list, the sequence of popped queue costs is appended.
    """
    _check_sources(state, s0, s1)
    ocp = state.ocp
    dev = state.device
    if dev.are_adjacent(s0, s1):
        return RoutingPlan((s0, s1), (), (), (s0, s1), max(int(ocp[s0]), int(ocp[s1])))

    pops = np.empty(dev.num_qubits, dtype=np.int64)
    parent, _cost, source, m, v, npops = duostra_search(
        dev.indptr, dev.indices, ocp, np.int64(s0), np.int64(s1), np.int64(tau_swap), pops
    )
    if trace is not None:
        trace.extend(int(c) for c in pops[:npops])
    if m < 0:
        raise RoutingError(f"physical qubits {s0} and {s1} are not connected")
    t0, t1 = (int(m), int(v)) if source[m] == 0 else (int(v), int(m))
    swaps0, arrive0 = _chain(ocp, _backtrace(parent, t0), tau_swap)
    swaps1, arrive1 = _chain(ocp, _backtrace(parent, t1), tau_swap)
    return RoutingPlan((s0, s1), swaps0, swaps1, (t0, t1), max(arrive0, arrive1))


def lexicographic_shortest_path(dist: DistanceMatrix, device: DeviceGraph, s0: int, s1: int) -> list[int]:
    """Lexicographically smallest shortest hop path from ``s0`` to ``s1``."""
    to_target = dist.row(s1)
    if to_target[s0] < 0:
        raise RoutingError(f"physical qubits {s0} and {s1} are not connected")
    path = [s0]
    cur = s0
    while cur != s1:
        want = to_target[cur] - 1
        cur = next(w for w in device.adjacency[cur] if to_target[w] == want)
        path.append(cur)
    return path


def shortest_path_route(
    state: RoutingState,
    s0: int,
    s1: int,
    dist: DistanceMatrix,
    tau_swap: int = 6,
) -> RoutingPlan:
    """Baseline: fixed shortest path, swaps split between both ends.

    With ``k`` intermediate qubits the ``s0`` side takes ``ceil(k/2)`` swaps and
    the ``s1`` side ``floor(k/2)``; timing still follows the occupied-time law.
    """
    _check_sources(state, s0, s1)
    path = lexicographic_shortest_path(dist, state.device, s0, s1)
    k = len(path) - 2
    split = (k + 1) // 2
    left = path[: split + 1]
    right = path[split + 1 :][::-1]
    swaps0, arrive0 = _chain(state.ocp, left, tau_swap)
    swaps1, arrive1 = _chain(state.ocp, right, tau_swap)
    return RoutingPlan((s0, s1), swaps0, swaps1, (left[-1], right[-1]), max(arrive0, arrive1))


Router = Callable[[RoutingState, int, int, int], RoutingPlan]


def make_router(kind: str, dist: DistanceMatrix | None = None) -> Router:
    if kind == "duostra":
        return lambda state, s0, s1, tau: duostra_route(state, s0, s1, tau)
    if kind in ("shortest-path", "shortest_path", "sp"):
        if dist is None:
            raise ValueError("shortest-path router needs a distance matrix")
        return lambda state, s0, s1, tau: shortest_path_route(state, s0, s1, dist, tau)
    raise ValueError(f"unknown router {kind!r}; expected one of {ROUTERS}")


def apply_plan(
    state: RoutingState,
    plan: RoutingPlan,
    gate: Gate,
    timing: TimingModel,
    ops: list | None = None,
) -> int:
    """Commit the plan's swaps and then the gate; returns the gate finish time."""
    ocp, l2p, p2l = state.ocp, state.log2phys, state.phys2log
    a, b = gate.qubits
    s0, s1 = plan.sources
    if p2l[s0] != a or p2l[s1] != b:
        raise StalePlanError(f"gate {gate.id}: sources {plan.sources} no longer host logical ({a}, {b})")

    events = sorted(
        [(sw.start, 0, k, sw) for k, sw in enumerate(plan.swaps0)]
        + [(sw.start, 1, k, sw) for k, sw in enumerate(plan.swaps1)]
    )
    tau = timing.tau_swap
    for _, _, _, sw in events:
        i, j = sw.edge
        start = max(int(ocp[i]), int(ocp[j]))
        if start != sw.start or sw.finish != start + tau:
            raise StalePlanError(f"gate {gate.id}: swap {sw.edge} planned at {sw.start}, state says {start}")
        if not state.device.are_adjacent(i, j):
            raise StalePlanError(f"gate {gate.id}: swap {sw.edge} is not on a device edge")
        ocp[i] = ocp[j] = start + tau
        li, lj = p2l[i], p2l[j]
        p2l[i], p2l[j] = lj, li
        if li >= 0:
            l2p[li] = j
        if lj >= 0:
            l2p[lj] = i
        if ops is not None:
            ops.append(PhysicalOp("swap", "swap", (i, j), start, start + tau))

    t0, t1 = plan.final_edge
    if p2l[t0] != a or p2l[t1] != b or not state.device.are_adjacent(t0, t1):
        raise StalePlanError(f"gate {gate.id}: final edge {plan.final_edge} does not host ({a}, {b})")
    start = max(int(ocp[t0]), int(ocp[t1]))
    finish = start + timing.tau_double
    ocp[t0] = ocp[t1] = finish
    if ops is not None:
        ops.append(PhysicalOp("gate", gate.kind, (t0, t1), start, finish, gate.id, gate.params))
    return finish


def _path_table(device: DeviceGraph, ocp: np.ndarray, src: int, tau_swap: int) -> np.ndarray:
    """``best[mask, end]``: cheapest arrival over simple paths from ``src`` with vertex set ``mask``."""
    n = device.num_qubits
    size = 1 << n
    inf = np.iinfo(np.int64).max
    best = np.full((size, n), inf, dtype=np.int64)
    best[1 << src, src] = ocp[src]
    masks = np.arange(size, dtype=np.int64)
    popcount = np.array([bin(m).count("1") for m in range(size)])
    arcs = [(u, w) for u in range(n) for w in device.adjacency[u]]
    for k in range(1, n):
        layer = masks[popcount == k]
        for u, w in arcs:
            sel = layer[((layer >> u) & 1 == 1) & ((layer >> w) & 1 == 0)]
            if sel.size == 0:
                continue
            cur = best[sel, u]
            ok = cur != inf
            if not ok.any():
                continue
            sel, cur = sel[ok], cur[ok]
            cand = np.maximum(cur, ocp[w]) + tau_swap
            np.minimum.at(best[:, w], sel | (1 << w), cand)
    return best


def oracle_route(state: RoutingState, s0: int, s1: int, tau_swap: int = 6) -> int:
    """Exhaustive optimum of the two-sided routing objective (test oracle).

    Considers every device edge ``(u, v)`` and every pair of vertex-disjoint
    simple paths ``s0 -> u`` and ``s1 -> v``. Exponential; refuses devices with
    more than ``ORACLE_MAX_QUBITS`` qubits.
    """
    _check_sources(state, s0, s1)
    dev = state.device
    n = dev.num_qubits
    if n > ORACLE_MAX_QUBITS:
        raise ContractViolation(f"oracle_route is limited to {ORACLE_MAX_QUBITS} qubits, device has {n}")
    ocp = state.ocp.astype(np.int64)
    best0 = _path_table(dev, ocp, s0, tau_swap)
    best1 = _path_table(dev, ocp, s1, tau_swap)

    # sub1[S, v]: cheapest s1-path ending at v whose vertex set lies inside S
    sub1 = best1.copy()
    size = 1 << n
    for b in range(n):
        view = sub1.reshape(size >> (b + 1), 2, 1 << b, n)
        np.minimum(view[:, 1], view[:, 0], out=view[:, 1])

    inf = np.iinfo(np.int64).max
    full = size - 1
    result = inf
    masks0, ends0 = np.nonzero(best0 != inf)
    for mask0, u in zip(masks0.tolist(), ends0.tolist()):
        c0 = int(best0[mask0, u])
        if c0 >= result:
            continue
        free = full ^ mask0
        for v in dev.adjacency[u]:
            if (mask0 >> v) & 1:
                continue
            c1 = int(sub1[free, v])
            if c1 != inf:
                result = min(result, max(c0, c1))
    if result == inf:
        raise RoutingError(f"physical qubits {s0} and {s1} are not connected")
    return result
