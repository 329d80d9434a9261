"""Qubit mapping by dual-source occupied-time routing (Duostra)."""

from ._jit import USE_NUMBA
from .circuit import (
    DependencyGraph,
    Gate,
    LogicalCircuit,
    TimingModel,
    build_dependency_graph,
    decompose,
    generate_qft,
    ideal_circuit_cost,
    logical_adjacency,
    random_circuit,
)
from .device import DeviceGraph, DistanceMatrix, all_pairs_shortest_hops, builtin_topology, load_device
from .errors import (
    CapacityError,
    CircuitValidationError,
    ContractViolation,
    DeviceValidationError,
    DuostraError,
    QasmParseError,
    RoutingError,
    StalePlanError,
    UnsupportedGateError,
)
from .pipeline import (
    CostReport,
    MappedResult,
    Violation,
    cost_report,
    edge_utilization,
    emit_mapped_qasm,
    map_circuit,
    mapping_cost,
    verify,
)
from .placement import Mapping, dfs_order_logical, dfs_order_physical, initial_placement
from .qasm import emit_qasm, parse_qasm
from .router import (
    RoutingPlan,
    RoutingState,
    Swap,
    apply_plan,
    duostra_route,
    edge_ocp,
    oracle_route,
    shortest_path_route,
)
from .scheduler import (
    MapperContext,
    SchedulerConfig,
    flush_ready_singles,
    le_select,
    sp_select,
    static_select,
)

__version__ = "0.1.0"
