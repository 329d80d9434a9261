"""Hot inner loops over CSR adjacency arrays.

Every function here is written in the numba-compatible subset of Python and
wrapped by :func:`duostra._jit.kernel`. Graphs are passed as CSR pairs
``(indptr, indices)`` with int64 entries; times are int64.
"""

from __future__ import annotations

import heapq

import numpy as np

from ._jit import kernel

__all__ = [
    "asap_makespan",
    "all_pairs_bfs",
    "bfs_row",
    "duostra_search",
]


@kernel
def bfs_row(indptr, indices, src):
    """Hop distances from ``src``; unreachable vertices get -1."""
    n = indptr.shape[0] - 1
    dist = np.full(n, -1, dtype=np.int32)
    queue = np.empty(n, dtype=np.int64)
    dist[src] = 0
    queue[0] = src
    head = 0
    tail = 1
    while head < tail:
        u = queue[head]
        head += 1
        du = dist[u] + 1
        for k in range(indptr[u], indptr[u + 1]):
            w = indices[k]
            if dist[w] < 0:
                dist[w] = du
                queue[tail] = w
                tail += 1
    return dist


@kernel
def all_pairs_bfs(indptr, indices):
    n = indptr.shape[0] - 1
    out = np.empty((n, n), dtype=np.int32)
    dist = np.empty(n, dtype=np.int32)
    queue = np.empty(n, dtype=np.int64)
    for src in range(n):
        dist[:] = -1
        dist[src] = 0
        queue[0] = src
        head = 0
        tail = 1
        while head < tail:
            u = queue[head]
            head += 1
            du = dist[u] + 1
            for k in range(indptr[u], indptr[u + 1]):
                w = indices[k]
                if dist[w] < 0:
                    dist[w] = du
                    queue[tail] = w
                    tail += 1
        out[src, :] = dist
    return out


@kernel
def duostra_search(indptr, indices, ocp, s0, s1, tau_swap, pops):
    """Dual-source search under the occupied-time cost.

    Both sources enter one priority queue at their own occupied time. A vertex
    reached from a popped vertex ``m`` is pushed exactly once, with cost
    ``max(cost[m], ocp[w]) + tau_swap``; that cost is final because pops are
    non-decreasing. The search stops at the first popped vertex that has a
    visited neighbour owned by the other source. Every such neighbour ties on
    the objective (its cost cannot exceed the popped one), so the earliest
    arrival wins, then the lowest index.

    Heap keys are ``cost * n + vertex`` so ties pop the lowest vertex first.
    Popped costs are written into ``pops`` (length >= n).

    Returns ``(parent, cost, source, m, v, npops)`` where ``(m, v)`` is the
    convergence edge, or ``m == v == -1`` if the sources are disconnected.
    """
    n = indptr.shape[0] - 1
    cost = np.full(n, -1, dtype=np.int64)
    source = np.full(n, -1, dtype=np.int64)
    parent = np.full(n, -1, dtype=np.int64)
    visited = np.zeros(n, dtype=np.bool_)

    heap = [np.int64(0)]
    heap.pop()
    cost[s0] = ocp[s0]
    source[s0] = 0
    heapq.heappush(heap, np.int64(cost[s0] * n + s0))
    cost[s1] = ocp[s1]
    source[s1] = 1
    heapq.heappush(heap, np.int64(cost[s1] * n + s1))

    npops = 0
    while len(heap) > 0:
        key = heapq.heappop(heap)
        m = key % n
        cm = key // n
        visited[m] = True
        pops[npops] = cm
        npops += 1

        best_v = -1
        for k in range(indptr[m], indptr[m + 1]):
            w = indices[k]
            if visited[w] and source[w] != source[m]:
                if best_v < 0 or cost[w] < cost[best_v] or (cost[w] == cost[best_v] and w < best_v):
                    best_v = w
        if best_v >= 0:
            return parent, cost, source, m, best_v, npops

        for k in range(indptr[m], indptr[m + 1]):
            w = indices[k]
            if cost[w] < 0:
                cw = max(cm, ocp[w]) + tau_swap
                cost[w] = cw
                source[w] = source[m]
                parent[w] = m
                heapq.heappush(heap, np.int64(cw * n + w))
    return parent, cost, source, -1, -1, npops


@kernel
def asap_makespan(q0, q1, durations, num_qubits):
    """ASAP makespan of a gate list; ``q1 < 0`` marks a single-qubit gate."""
    ready = np.zeros(num_qubits, dtype=np.int64)
    best = np.int64(0)
    for g in range(q0.shape[0]):
        a = q0[g]
        b = q1[g]
        start = ready[a]
        if b >= 0 and ready[b] > start:
            start = ready[b]
        finish = start + durations[g]
        ready[a] = finish
        if b >= 0:
            ready[b] = finish
        if finish > best:
            best = finish
    return best
