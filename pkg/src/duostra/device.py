"""Device coupling graphs, builtin topologies and hop distances."""

from __future__ import annotations

import json
import re
import threading
from dataclasses import dataclass, field
from typing import Iterable

import numpy as np

from .errors import DeviceValidationError
from .kernels import all_pairs_bfs, bfs_row

DENSE_DISTANCE_LIMIT = 4096

# 16-qubit IBM Falcon r4P layout (ibmq_guadalupe), reproduced from the public coupling map.
GUADALUPE_EDGES = (
    (0, 1), (1, 2), (1, 4), (2, 3), (3, 5), (4, 7), (5, 8), (6, 7),
    (7, 10), (8, 9), (8, 11), (10, 12), (11, 14), (12, 13), (12, 15), (13, 14),
)


@dataclass(frozen=True, eq=False)
class DeviceGraph:
    """Undirected, simple, connected coupling graph."""

    num_qubits: int
    edges: tuple[tuple[int, int], ...]
    name: str = ""
    adjacency: tuple[tuple[int, ...], ...] = field(init=False, repr=False)
    indptr: np.ndarray = field(init=False, repr=False)
    indices: np.ndarray = field(init=False, repr=False)
    edge_index: dict = field(init=False, repr=False)

    def __post_init__(self):
        n = self.num_qubits
        if n < 1:
            raise DeviceValidationError("device needs at least one qubit")
        canon = set()
        for e in self.edges:
            try:
                i, j = (int(v) for v in e)
            except (TypeError, ValueError):
                raise DeviceValidationError(f"edge {e!r} is not a pair of integers") from None
            if not (0 <= i < n and 0 <= j < n):
                raise DeviceValidationError(f"edge {[i, j]} has an index outside 0..{n - 1}")
            if i == j:
                raise DeviceValidationError(f"edge {[i, j]} is a self-loop")
            canon.add((min(i, j), max(i, j)))
        edges = tuple(sorted(canon))
        adj: list[list[int]] = [[] for _ in range(n)]
        for i, j in edges:
            adj[i].append(j)
            adj[j].append(i)
        adjacency = tuple(tuple(sorted(a)) for a in adj)
        indptr = np.zeros(n + 1, dtype=np.int64)
        indptr[1:] = np.cumsum([len(a) for a in adjacency])
        indices = np.fromiter((v for a in adjacency for v in a), dtype=np.int64, count=int(indptr[-1]))
        object.__setattr__(self, "edges", edges)
        object.__setattr__(self, "adjacency", adjacency)
        object.__setattr__(self, "indptr", indptr)
        object.__setattr__(self, "indices", indices)
        object.__setattr__(self, "edge_index", {e: k for k, e in enumerate(edges)})

        reach = bfs_row(indptr, indices, 0)
        missing = np.flatnonzero(reach < 0)
        if missing.size:
            raise DeviceValidationError(f"device graph is disconnected (qubit {int(missing[0])} unreachable from 0)")

    def __eq__(self, other):
        if not isinstance(other, DeviceGraph):
            return NotImplemented
        return self.num_qubits == other.num_qubits and self.edges == other.edges

    def __hash__(self):
        return hash((self.num_qubits, self.edges))

    def are_adjacent(self, i: int, j: int) -> bool:
        return (min(i, j), max(i, j)) in self.edge_index

    def degree(self, i: int) -> int:
        return len(self.adjacency[i])

    @property
    def max_degree(self) -> int:
        return max(len(a) for a in self.adjacency)

    def to_json(self) -> str:
        doc = {
            "schema": 1,
            "name": self.name,
            "num_qubits": self.num_qubits,
            "edges": [list(e) for e in self.edges],
        }
        return json.dumps(doc, indent=1) + "\n"


def load_device(text: str) -> DeviceGraph:
    """Parse ``{"num_qubits": N, "edges": [[i, j], ...]}``."""
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise DeviceValidationError(f"device file is not valid JSON: {exc}") from None
    if not isinstance(doc, dict) or "num_qubits" not in doc or "edges" not in doc:
        raise DeviceValidationError('device JSON must be an object with "num_qubits" and "edges"')
    n = doc["num_qubits"]
    if isinstance(n, bool) or not isinstance(n, int):
        raise DeviceValidationError(f"num_qubits must be an integer, got {n!r}")
    edges = doc["edges"]
    if not isinstance(edges, list):
        raise DeviceValidationError("edges must be a list of pairs")
    for e in edges:
        if not isinstance(e, (list, tuple)) or len(e) != 2 or not all(
            isinstance(v, int) and not isinstance(v, bool) for v in e
        ):
            raise DeviceValidationError(f"edge {e!r} is not a pair of integers")
    return DeviceGraph(n, tuple(tuple(e) for e in edges), name=str(doc.get("name", "")))


# --- generators -----------------------------------------------------------


def _positive(*values: int) -> None:
    for v in values:
        if isinstance(v, bool) or not isinstance(v, (int, np.integer)) or v < 1:
            raise ValueError(f"topology parameters must be positive integers, got {v!r}")


def line(n: int) -> DeviceGraph:
    _positive(n)
    return DeviceGraph(n, tuple((i, i + 1) for i in range(n - 1)), name=f"line:{n}")


def ring(n: int) -> DeviceGraph:
    _positive(n)
    edges = [(i, i + 1) for i in range(n - 1)]
    if n > 2:
        edges.append((0, n - 1))
    return DeviceGraph(n, tuple(edges), name=f"ring:{n}")


def grid(rows: int, cols: int) -> DeviceGraph:
    _positive(rows, cols)
    edges = []
    for r in range(rows):
        for c in range(cols):
            q = r * cols + c
            if c + 1 < cols:
                edges.append((q, q + 1))
            if r + 1 < rows:
                edges.append((q, q + cols))
    return DeviceGraph(rows * cols, tuple(edges), name=f"grid:{rows}x{cols}")


def complete(n: int) -> DeviceGraph:
    _positive(n)
    edges = tuple((i, j) for i in range(n) for j in range(i + 1, n))
    return DeviceGraph(n, edges, name=f"complete:{n}")


def heavy_hex_qubits(rows: int, cols: int) -> int:
    """Qubit count of :func:`heavy_hex`: ``5rc + 4r + 4c - 1``."""
    return 5 * rows * cols + 4 * rows + 4 * cols - 1


def heavy_hex(rows: int, cols: int) -> DeviceGraph:
    """Heavy-hex lattice of ``rows x cols`` hexagonal cells.

    The underlying honeycomb is laid out as a brick wall: ``rows + 1`` vertex
    rows of ``2 * cols + 2`` sites, with rung edges between rows ``y`` and
    ``y + 1`` at columns of parity ``y``; the two corner sites that would dangle
    are dropped. A bridge qubit is placed on every honeycomb edge. Numbering
    goes row by row: vertex and horizontal bridges left to right, then the
    rung bridges below the next row.
    """
    _positive(rows, cols)
    width = 2 * cols + 2
    top_missing = width - 1 if (rows - 1) % 2 == 0 else 0

    def exists(y: int, x: int) -> bool:
        if y == 0:
            return x != width - 1
        if y == rows:
            return x != top_missing
        return True

    ids: dict[tuple[int, int], int] = {}
    edges: list[tuple[int, int]] = []
    rung_bridges: dict[int, int] = {}
    nxt = 0
    for y in range(rows + 1):
        pending = None
        for x in range(width):
            if not exists(y, x):
                continue
            ids[(y, x)] = nxt
            nxt += 1
            if pending is not None:
                edges.append((pending, ids[(y, x)]))
                pending = None
            if x + 1 < width and exists(y, x + 1):
                edges.append((ids[(y, x)], nxt))
                pending = nxt
                nxt += 1
        if y > 0:
            for x in range((y - 1) % 2, width, 2):
                bridge = rung_bridges[x]
                edges.append((bridge, ids[(y, x)]))
        if y < rows:
            rung_bridges.clear()
            for x in range(y % 2, width, 2):
                rung_bridges[x] = nxt
                edges.append((ids[(y, x)], nxt))
                nxt += 1
    return DeviceGraph(nxt, tuple(edges), name=f"heavy_hex:{rows}x{cols}")


def heavy_hex_for_qubits(target: int) -> tuple[int, int]:
    """Smallest near-square heavy-hex shape (``cols - rows`` in {0, 1}) with at least ``target`` qubits."""
    r = 1
    while True:
        for c in (r, r + 1):
            if heavy_hex_qubits(r, c) >= target:
                return r, c
        r += 1


def ibm_guadalupe() -> DeviceGraph:
    return DeviceGraph(16, GUADALUPE_EDGES, name="ibm_guadalupe (emulated)")


_SPEC_RE = re.compile(r"^([a-z_]+)(?::(\d+)(?:x(\d+))?)?$")


def builtin_topology(spec: str) -> DeviceGraph:
    """Build a device from ``"ring:8"``, ``"line:5"``, ``"grid:3x4"``, ``"heavy_hex:2x3"``,
    ``"complete:6"`` or ``"ibm_guadalupe"``."""
    m = _SPEC_RE.match(spec.strip().lower().replace("-", "_"))
    if not m:
        raise ValueError(f"unrecognised topology spec {spec!r}")
    kind, a, b = m.group(1), m.group(2), m.group(3)
    one = {"line": line, "ring": ring, "complete": complete}
    two = {"grid": grid, "heavy_hex": heavy_hex}
    if kind in one and a is not None and b is None:
        return one[kind](int(a))
    if kind in two and a is not None and b is not None:
        return two[kind](int(a), int(b))
    if kind in ("ibm_guadalupe", "guadalupe") and a is None:
        return ibm_guadalupe()
    raise ValueError(f"unrecognised topology spec {spec!r}")


# --- distances ------------------------------------------------------------


class DistanceMatrix:
    """Hop distances between physical qubits.

    Stored densely up to ``dense_limit`` qubits; larger devices compute BFS
    rows on demand and memoize them under a lock.
    """

    def __init__(self, device: DeviceGraph, dense_limit: int = DENSE_DISTANCE_LIMIT):
        self.device = device
        self.num_qubits = device.num_qubits
        self._lock = threading.Lock()
        self._rows: dict[int, np.ndarray] = {}
        if device.num_qubits <= dense_limit:
            self._dense: np.ndarray | None = all_pairs_bfs(device.indptr, device.indices)
        else:
            self._dense = None

    @property
    def is_dense(self) -> bool:
        return self._dense is not None

    def row(self, i: int) -> np.ndarray:
        if self._dense is not None:
            return self._dense[i]
        r = self._rows.get(i)
        if r is None:
            r = bfs_row(self.device.indptr, self.device.indices, i)
            r.setflags(write=False)
            with self._lock:
                r = self._rows.setdefault(i, r)
        return r

    def __getitem__(self, ij: tuple[int, int]) -> int:
        i, j = ij
        if self._dense is not None:
            return int(self._dense[i, j])
        return int(self.row(i)[j])

    def pairs(self, a: Iterable[int], b: Iterable[int]) -> np.ndarray:
        a = np.asarray(a, dtype=np.int64)
        b = np.asarray(b, dtype=np.int64)
        if self._dense is not None:
            return self._dense[a, b].astype(np.int64)
        return np.array([self.row(i)[j] for i, j in zip(a, b)], dtype=np.int64)

    def to_array(self) -> np.ndarray:
        if self._dense is not None:
            return self._dense
        return np.stack([self.row(i) for i in range(self.num_qubits)])


def all_pairs_shortest_hops(device: DeviceGraph, dense_limit: int = DENSE_DISTANCE_LIMIT) -> DistanceMatrix:
    return DistanceMatrix(device, dense_limit)
