import itertools
import math
import random

import networkx as nx
import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from duostra.circuit import (
    Gate,
    LogicalCircuit,
    TimingModel,
    build_dependency_graph,
    decompose,
    generate_qft,
    ideal_circuit_cost,
    is_decomposed,
    logical_adjacency,
    random_circuit,
)
from duostra.errors import CircuitValidationError, UnsupportedGateError
from helpers import circuit_unitary, controlled, equal_up_to_phase, rz, toffoli_matrix


def ops_of(circuit):
    return [(g.kind, g.qubits, g.params) for g in circuit.gates]


class TestGateValidation:
    def test_repeated_qubit_rejected(self):
        with pytest.raises(CircuitValidationError):
            Gate(0, "cx", (1, 1))

    def test_qubit_outside_register(self):
        with pytest.raises(CircuitValidationError, match="outside register"):
            LogicalCircuit.from_ops(2, [("cx", (0, 2))])

    def test_timing_model_rejects_non_positive(self):
        with pytest.raises(ValueError):
            TimingModel(0, 2, 6)


class TestDecompose:
    def test_swap_is_three_cx(self):
        c = decompose(LogicalCircuit.from_ops(2, [("swap", (0, 1))]))
        assert ops_of(c) == [("cx", (0, 1), ()), ("cx", (1, 0), ()), ("cx", (0, 1), ())]

    def test_identity_on_primitive_circuit(self):
        c = random_circuit(4, 30, seed=2)
        assert ops_of(decompose(c)) == ops_of(c)

    def test_ids_dense_after_expansion(self):
        c = decompose(LogicalCircuit.from_ops(3, [("h", (0,)), ("ccx", (0, 1, 2)), ("x", (2,))]))
        assert [g.id for g in c.gates] == list(range(17))
        assert is_decomposed(c)

    def test_ccx_matches_toffoli(self):
        for a, b, t in itertools.permutations(range(3)):
            c = decompose(LogicalCircuit.from_ops(3, [("ccx", (a, b, t))]))
            assert len(c.gates) == 15
            assert equal_up_to_phase(circuit_unitary(c), toffoli_matrix(a, b, t))

    @pytest.mark.parametrize("theta", [math.pi / 2, math.pi / 8, 0.3, -1.7])
    def test_controlled_phase(self, theta):
        c = decompose(LogicalCircuit.from_ops(2, [("cp", (1, 0), (theta,))]))
        target = np.diag([1, 1, 1, np.exp(1j * theta)])
        assert equal_up_to_phase(circuit_unitary(c), target)

    @pytest.mark.parametrize("theta", [math.pi / 2, 0.3, 2.9])
    def test_controlled_rz(self, theta):
        c = decompose(LogicalCircuit.from_ops(2, [("crz", (0, 1), (theta,))]))
        assert equal_up_to_phase(circuit_unitary(c), controlled(rz(theta), 0, 1, 2))

    def test_unknown_three_qubit_gate(self):
        with pytest.raises(UnsupportedGateError):
            decompose(LogicalCircuit.from_ops(3, [("cswap", (0, 1, 2))]))


class TestDependencyGraph:
    def test_shared_qubit_edge(self):
        g = build_dependency_graph(LogicalCircuit.from_ops(3, [("cx", (0, 1)), ("cx", (1, 2))]))
        assert g.successors == ((1,), ())
        assert g.predecessors == ((), (0,))

    def test_disjoint_qubits(self):
        g = build_dependency_graph(LogicalCircuit.from_ops(2, [("h", (0,)), ("h", (1,))]))
        assert g.successors == ((), ())
        assert g.roots() == [0, 1]

    @pytest.mark.parametrize("seed", range(6))
    def test_topological_orders_are_qubit_order_preserving_permutations(self, seed):
        c = random_circuit(3, 7, seed=seed)
        dag = build_dependency_graph(c)
        nxg = nx.DiGraph()
        nxg.add_nodes_from(range(len(c.gates)))
        nxg.add_edges_from((p, s) for s, ps in enumerate(dag.predecessors) for p in ps)
        topo = {tuple(o) for o in nx.all_topological_sorts(nxg)}

        def preserves(perm):
            pos = {g: k for k, g in enumerate(perm)}
            for q in range(c.num_qubits):
                seq = [pos[g.id] for g in c.gates if q in g.qubits]
                if seq != sorted(seq):
                    return False
            return True

        brute = {p for p in itertools.permutations(range(len(c.gates))) if preserves(p)}
        assert topo == brute

    def test_30_gate_graph_is_acyclic(self):
        c = random_circuit(5, 30, seed=11)
        order = build_dependency_graph(c).topological_order()
        assert sorted(order) == list(range(30))


def longest_path_cost(circuit, timing=TimingModel()):
    """Independent oracle: heaviest path in the dependency DAG."""
    dag = build_dependency_graph(circuit)
    finish = [0] * len(circuit.gates)
    for g in range(len(circuit.gates)):
        start = max((finish[p] for p in dag.predecessors[g]), default=0)
        finish[g] = start + timing.duration(circuit.gates[g])
    return max(finish, default=0)


class TestIdealCost:
    def test_single_h(self):
        assert ideal_circuit_cost(LogicalCircuit.from_ops(1, [("h", (0,))])) == 1

    def test_serial_doubles(self):
        assert ideal_circuit_cost(LogicalCircuit.from_ops(2, [("cx", (0, 1)), ("cx", (0, 1))])) == 4

    def test_mixed(self):
        c = LogicalCircuit.from_ops(3, [("cx", (0, 1)), ("h", (2,)), ("cx", (1, 2))])
        assert ideal_circuit_cost(c) == 4
        assert longest_path_cost(c) == 4

    def test_empty(self):
        assert ideal_circuit_cost(LogicalCircuit(3, ())) == 0

    @given(st.integers(1, 6), st.integers(0, 60), st.integers(0, 10**6))
    def test_matches_longest_path(self, n, g, seed):
        c = random_circuit(n, g, seed)
        assert ideal_circuit_cost(c) == longest_path_cost(c)

    def test_custom_timing(self):
        c = random_circuit(4, 40, seed=5)
        t = TimingModel(3, 5, 7)
        assert ideal_circuit_cost(c, t) == longest_path_cost(c, t)


class TestQft:
    @pytest.mark.parametrize("n,count", [(1, 1), (2, 7), (3, 18)])
    def test_gate_counts(self, n, count):
        assert len(generate_qft(n).gates) == count

    def test_general_count(self):
        for n in range(1, 12):
            assert len(generate_qft(n).gates) == n + 5 * n * (n - 1) // 2

    def test_qft2_phase_block(self):
        c = generate_qft(2)
        controlled_part = LogicalCircuit.from_ops(2, [(g.kind, g.qubits, g.params) for g in c.gates[1:6]])
        target = np.diag([1, 1, 1, np.exp(1j * math.pi / 2)])
        assert equal_up_to_phase(circuit_unitary(controlled_part), target)

    def test_qft3_unitary(self):
        # qubit 0 is the most significant input bit; output comes out bit-reversed
        n = 3
        dim = 2**n
        w = np.exp(2j * math.pi / dim)
        f = np.array([[w ** (j * k) for j in range(dim)] for k in range(dim)]) / math.sqrt(dim)
        rev = np.zeros((dim, dim))
        for k in range(dim):
            rev[int(format(k, f"0{n}b")[::-1], 2), k] = 1
        big_endian = rev @ circuit_unitary(generate_qft(n)) @ rev
        assert equal_up_to_phase(big_endian, rev @ f)


class TestLogicalAdjacency:
    def test_single_cx(self):
        assert logical_adjacency(LogicalCircuit.from_ops(2, [("cx", (0, 1))])) == [[1], [0]]

    def test_running_example_table(self, running_example):
        c, _ = running_example
        adj = logical_adjacency(c)
        assert adj[1] == [0, 4, 2]
        assert adj == [[1, 6], [0, 4, 2], [1], [4, 6], [3, 1], [6], [5, 3, 0]]

    @given(st.integers(2, 8), st.integers(0, 40), st.integers(0, 10**6))
    def test_symmetric(self, n, g, seed):
        adj = logical_adjacency(random_circuit(n, g, seed))
        for q in range(n):
            assert len(set(adj[q])) == len(adj[q])
            for p in range(n):
                assert (p in adj[q]) == (q in adj[p])


def test_random_circuit_reproducible():
    assert random_circuit(5, 50, seed=9) == random_circuit(5, 50, seed=9)
    assert random_circuit(5, 50, seed=9) != random_circuit(5, 50, seed=10)


def test_random_circuit_fraction():
    rng = random.Random(0)
    c = random_circuit(6, 400, seed=rng.randrange(1000), double_fraction=1.0)
    assert all(g.kind == "cx" for g in c.gates)
