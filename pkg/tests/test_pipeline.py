import dataclasses
import json

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from duostra.circuit import LogicalCircuit, TimingModel, decompose, generate_qft, ideal_circuit_cost, random_circuit
from duostra.device import complete, grid, heavy_hex, line, ring
from duostra.errors import CapacityError, ContractViolation
from duostra.pipeline import (
    MappedResult,
    cost_report,
    edge_utilization,
    emit_mapped_qasm,
    layout_json,
    map_circuit,
    mapping_cost,
    verify,
)
from duostra.placement import Mapping
from duostra.qasm import parse_qasm
from duostra.router import PhysicalOp
from duostra.scheduler import SchedulerConfig

CONFIGS = [(r, s) for r in ("duostra", "shortest-path") for s in ("sp", "le", "static")]


def sched(kind):
    return SchedulerConfig(kind, depth=2)


@pytest.mark.parametrize("router,kind", CONFIGS)
def test_single_cx(router, kind):
    r = map_circuit(LogicalCircuit.from_ops(2, [("cx", (0, 1))]), line(2), router=router, scheduler=sched(kind))
    assert r.swap_count == 0 and r.mapping_cost == 2
    assert verify(LogicalCircuit.from_ops(2, [("cx", (0, 1))]), r, line(2)) == []


def test_empty_circuit():
    r = map_circuit(LogicalCircuit(3, ()), ring(4))
    assert r.mapping_cost == mapping_cost(r) == 0
    assert r.ops == ()


@pytest.mark.parametrize("kind", ["sp", "le", "static"])
def test_running_example_first_gates_need_no_swaps(running_example, kind):
    circuit, ids = running_example
    r = map_circuit(circuit, ring(8), "dfs", scheduler=sched(kind))
    l2p = r.initial_mapping.log2phys
    by_gate = {op.gate_id: op for op in r.gate_ops}
    for name in ("G1", "G2", "G3", "G4"):
        a, b = circuit.gates[ids[name]].qubits
        assert by_gate[ids[name]].qubits == (l2p[a], l2p[b])
    assert verify(circuit, r, ring(8)) == []


def test_le_depth_two_improves_final_cost():
    circuit = LogicalCircuit.from_ops(4, [("cx", (2, 0)), ("cx", (3, 1))])
    ident = Mapping.from_log2phys([0, 1, 2, 3], 4)
    d1 = map_circuit(circuit, line(4), ident, scheduler=SchedulerConfig("le", 1))
    d2 = map_circuit(circuit, line(4), ident, scheduler=SchedulerConfig("le", 2))
    assert (d1.mapping_cost, d2.mapping_cost) == (16, 8)


devices = st.sampled_from([ring(8), ring(11), grid(3, 4), heavy_hex(1, 2), line(10)])


@given(
    st.integers(1, 10),
    st.integers(0, 100),
    st.integers(0, 10**6),
    devices,
    st.sampled_from(CONFIGS),
    st.sampled_from(["dfs", "identity", "random"]),
)
def test_semantic_preservation(n, g, seed, dev, config, placement):
    circuit = random_circuit(min(n, dev.num_qubits), g, seed)
    r = map_circuit(circuit, dev, placement, router=config[0], scheduler=sched(config[1]), seed=seed)
    assert verify(circuit, r, dev) == []
    assert r.mapping_cost >= ideal_circuit_cost(circuit)
    assert r.mapping_cost == max((op.finish for op in r.ops), default=0)
    assert sorted(op.gate_id for op in r.gate_ops) == list(range(g))


@given(st.integers(5, 10), st.integers(0, 80), st.integers(0, 10**6), st.sampled_from(["sp", "le", "static"]))
def test_complete_graph_collapse(n, g, seed, kind):
    circuit = random_circuit(n, g, seed)
    r = map_circuit(circuit, complete(n), "identity", scheduler=sched(kind))
    assert r.swap_count == 0
    assert r.mapping_cost == ideal_circuit_cost(circuit)


def test_custom_timing_respected():
    circuit = random_circuit(6, 60, seed=8)
    timing = TimingModel(2, 3, 9)
    r = map_circuit(circuit, ring(6), timing=timing)
    assert verify(circuit, r, ring(6)) == []
    assert {op.finish - op.start for op in r.ops if op.kind == "swap"} <= {9}


def test_deterministic_serialisation():
    circuit = random_circuit(8, 120, seed=21)
    a = map_circuit(circuit, heavy_hex(1, 2), scheduler=sched("le"))
    b = map_circuit(circuit, heavy_hex(1, 2), scheduler=sched("le"))
    assert json.dumps(a.to_dict()) == json.dumps(b.to_dict())
    assert a == b


def test_capacity_error():
    with pytest.raises(CapacityError):
        map_circuit(random_circuit(9, 10), ring(8))


def test_requires_decomposed_input():
    with pytest.raises(ContractViolation):
        map_circuit(LogicalCircuit.from_ops(3, [("ccx", (0, 1, 2))]), ring(4))
    r = map_circuit(decompose(LogicalCircuit.from_ops(3, [("ccx", (0, 1, 2))])), ring(4))
    assert r.mapping_cost > 0


class TestVerifyMutations:
    @pytest.fixture
    def mapped(self):
        circuit = generate_qft(6)
        dev = line(6)
        r = map_circuit(circuit, dev)
        assert r.swap_count > 0
        return circuit, dev, r

    def test_untampered(self, mapped):
        circuit, dev, r = mapped
        assert verify(circuit, r, dev) == []

    def test_deleted_swap_breaks_placement(self, mapped):
        circuit, dev, r = mapped
        k = next(i for i, op in enumerate(r.ops) if op.kind == "swap")
        tampered = dataclasses.replace(r, ops=r.ops[:k] + r.ops[k + 1 :])
        kinds = [v.kind for v in verify(circuit, tampered, dev)]
        assert "placement" in kinds
        first = next(v for v in verify(circuit, tampered, dev) if v.kind == "placement")
        assert first.op_index >= k

    def test_swapped_dependent_gates_break_order(self, mapped):
        circuit, dev, r = mapped
        ops = list(r.ops)
        # first two gate ops that share a logical qubit
        gates = [i for i, op in enumerate(ops) if op.kind == "gate"]
        i, j = next(
            (a, b)
            for a, b in zip(gates, gates[1:])
            if set(circuit.gates[ops[a].gate_id].qubits) & set(circuit.gates[ops[b].gate_id].qubits)
        )
        ops[i], ops[j] = ops[j], ops[i]
        kinds = {v.kind for v in verify(circuit, dataclasses.replace(r, ops=tuple(ops)), dev)}
        assert "order" in kinds

    def test_off_device_gate(self, mapped):
        circuit, dev, r = mapped
        k = next(i for i, op in enumerate(r.ops) if op.kind == "gate" and len(op.qubits) == 2)
        op = r.ops[k]
        bad = op._replace(qubits=(0, 5))
        kinds = {v.kind for v in verify(circuit, dataclasses.replace(r, ops=r.ops[:k] + (bad,) + r.ops[k + 1 :]), dev)}
        assert "coupling" in kinds

    def test_wrong_cost_and_missing_gate(self, mapped):
        circuit, dev, r = mapped
        last_gate = max(i for i, op in enumerate(r.ops) if op.kind == "gate")
        tampered = dataclasses.replace(r, ops=r.ops[:last_gate] + r.ops[last_gate + 1 :], mapping_cost=r.mapping_cost + 1)
        kinds = {v.kind for v in verify(circuit, tampered, dev)}
        assert {"missing_gate", "cost"} <= kinds

    def test_garbage_does_not_raise(self, mapped):
        circuit, dev, r = mapped
        junk = (PhysicalOp("gate", "cx", (99, 100), 0, 2, 0), PhysicalOp("teleport", "x", (0,), 0, 1, None))
        out = verify(circuit, dataclasses.replace(r, ops=junk), dev)
        assert {"qubit_range", "swap", "missing_gate"} <= {v.kind for v in out}


class TestUtilization:
    def test_zero_swaps(self):
        r = map_circuit(LogicalCircuit.from_ops(2, [("cx", (0, 1))]), line(3))
        u = edge_utilization(r, line(3))
        assert u.counts == (0, 0) and u.stddev == 0.0 and u.max == 0

    def test_two_swaps_one_edge(self):
        ops = (PhysicalOp("swap", "swap", (1, 0), 0, 6), PhysicalOp("swap", "swap", (0, 1), 6, 12))
        mapping = Mapping.from_log2phys([0], 3)
        r = MappedResult(ops, mapping, mapping, 12, 2, (2, 0), 3)
        u = edge_utilization(r, line(3))
        assert u.counts == (2, 0) and u.max == 2 and u.stddev == pytest.approx(1.0)

    def test_matches_recorded_counts(self):
        circuit = random_circuit(10, 150, seed=6)
        dev = grid(3, 4)
        r = map_circuit(circuit, dev)
        u = edge_utilization(r, dev)
        assert u.counts == r.edge_swap_counts
        assert sum(u.counts) == r.swap_count
        assert u.stddev == pytest.approx(float(np.std(u.counts)))

    def test_cost_report(self):
        circuit = random_circuit(6, 50, seed=1)
        r = map_circuit(circuit, ring(6))
        rep = cost_report(circuit, r, ring(6))
        assert rep.ideal_cost == ideal_circuit_cost(circuit) <= rep.mapping_cost
        assert "wall_ms" not in rep.to_dict(include_wall=False)


class TestEmission:
    def test_atomic_swaps(self):
        circuit = generate_qft(5)
        r = map_circuit(circuit, line(5))
        text = emit_mapped_qasm(r)
        parsed = parse_qasm(text)
        assert sum(1 for g in parsed.gates if g.kind == "swap") == r.swap_count
        assert parsed.num_qubits == 5

    def test_expanded_swaps(self):
        circuit = generate_qft(5)
        r = map_circuit(circuit, line(5))
        parsed = parse_qasm(emit_mapped_qasm(r, expand_swaps=True))
        assert all(g.kind != "swap" for g in parsed.gates)
        n_cx = sum(1 for g in circuit.gates if g.kind == "cx")
        assert sum(1 for g in parsed.gates if g.kind == "cx") == n_cx + 3 * r.swap_count

    def test_mapped_qasm_respects_coupling(self):
        dev = heavy_hex(1, 2)
        r = map_circuit(random_circuit(12, 100, seed=2), dev)
        for g in parse_qasm(emit_mapped_qasm(r, True)).gates:
            if g.arity == 2:
                assert dev.are_adjacent(*g.qubits)

    def test_layout_json(self):
        r = map_circuit(random_circuit(4, 20, seed=0), ring(5))
        doc = json.loads(layout_json(r, {"note": 1}))
        assert doc["schema"] == 1 and doc["note"] == 1
        assert doc["final"] == {str(q): p for q, p in enumerate(r.final_mapping.log2phys)}
