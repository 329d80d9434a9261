"""Command-line entry points: ``map``, ``bench``, ``topo`` and ``gen``.

Exit codes: 0 success, 1 usage error, 2 invalid input, 3 verification failure.
"""

from __future__ import annotations

import argparse
import csv
import io
import itertools
import json
import logging
import os
import sys
import time
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path
from typing import Sequence

from .circuit import LogicalCircuit, TimingModel, decompose, generate_qft, random_circuit
from .device import DeviceGraph, builtin_topology, load_device
from .errors import DuostraError
from .pipeline import SCHEMA_VERSION, cost_report, emit_mapped_qasm, layout_json, map_circuit, verify
from .placement import STRATEGIES
from .qasm import emit_qasm, parse_qasm
from .router import ROUTERS
from .scheduler import SCHEDULERS, SchedulerConfig

EXIT_OK, EXIT_USAGE, EXIT_INPUT, EXIT_VERIFY = 0, 1, 2, 3

log = logging.getLogger("duostra")


class InputError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _int_at_least(low: int):
    def parse(text: str) -> int:
        try:
            value = int(text)
        except ValueError:
            raise argparse.ArgumentTypeError(f"expected an integer, got {text!r}") from None
        if value < low:
            raise argparse.ArgumentTypeError(f"must be at least {low}, got {value}")
        return value

    return parse


def circuit_from_spec(spec: str, base: Path | None = None) -> LogicalCircuit:
    """``qft:N``, ``random:Q:G[:SEED]`` or a path to an OpenQASM file."""
    head, _, rest = spec.partition(":")
    if head == "qft" and rest:
        try:
            return generate_qft(int(rest))
        except ValueError:
            raise InputError(f"bad generator spec {spec!r}") from None
    if head == "random" and rest:
        try:
            nums = [int(v) for v in rest.split(":")]
            q, g, seed = (nums + [0])[:3]
            return random_circuit(q, g, seed)
        except ValueError:
            raise InputError(f"bad generator spec {spec!r} (random:QUBITS:GATES[:SEED])") from None
    path = Path(spec)
    if base is not None and not path.is_absolute():
        path = base / path
    if not path.is_file():
        raise InputError(f"circuit file not found: {path}")
    circ = parse_qasm(path.read_text(encoding="utf-8"))
    return LogicalCircuit(circ.num_qubits, circ.gates, path.stem)


def device_from_spec(spec: str, base: Path | None = None) -> DeviceGraph:
    """A builtin topology spec such as ``heavy_hex:3x4``, or a device JSON path."""
    path = Path(spec)
    if base is not None and not path.is_absolute():
        path = base / path
    if path.is_file():
        dev = load_device(path.read_text(encoding="utf-8"))
        return dev if dev.name else DeviceGraph(dev.num_qubits, dev.edges, name=path.stem)
    try:
        return builtin_topology(spec)
    except ValueError:
        raise InputError(f"device file not found and not a builtin spec: {spec}") from None


def _config_from_args(a: argparse.Namespace) -> dict:
    return {
        "circuit": a.gen if a.gen else a.input,
        "device": a.device,
        "router": a.router,
        "scheduler": a.scheduler,
        "depth": a.depth,
        "sp_constant": a.sp_constant,
        "placement": a.placement,
        "seed": a.seed,
        "tau_single": a.tau_single,
        "tau_double": a.tau_double,
        "tau_swap": a.tau_swap,
        "expand_swaps": a.expand_swaps,
    }


def run_config(cfg: dict, base: Path | None = None) -> dict:
    """Run one mapping described by a config dict; returns a result record."""
    t0 = time.perf_counter()
    logical = circuit_from_spec(cfg["circuit"], base)
    device = device_from_spec(cfg["device"], base)
    circuit = decompose(logical)
    parse_ms = (time.perf_counter() - t0) * 1e3
    timing = TimingModel(cfg.get("tau_single", 1), cfg.get("tau_double", 2), cfg.get("tau_swap", 6))
    sched = SchedulerConfig(cfg.get("scheduler", "sp"), cfg.get("depth", 4), cfg.get("sp_constant", 1))
    result = map_circuit(
        circuit,
        device,
        placement=cfg.get("placement", "dfs"),
        router=cfg.get("router", "duostra"),
        scheduler=sched,
        timing=timing,
        seed=cfg.get("seed", 0),
    )
    violations = verify(circuit, result, device)
    return {
        "circuit": circuit,
        "device": device,
        "result": result,
        "report": cost_report(circuit, result, device),
        "violations": violations,
        "parse_ms": parse_ms,
    }


def _stats_doc(cfg: dict, run: dict, with_timing: bool) -> dict:
    circ, dev = run["circuit"], run["device"]
    doc = {
        "schema": SCHEMA_VERSION,
        "circuit": {"name": circ.name, "num_qubits": circ.num_qubits, "num_gates": len(circ.gates)},
        "device": {"name": dev.name, "num_qubits": dev.num_qubits, "num_edges": len(dev.edges)},
        **run["report"].to_dict(include_wall=with_timing),
        "verified": not run["violations"],
        "config": cfg,
    }
    if with_timing:
        doc["parse_ms"] = round(run["parse_ms"], 3)
    return doc


def _layout_notes(cfg: dict, circuit: LogicalCircuit) -> dict:
    if str(cfg["circuit"]).startswith("qft:"):
        n = circuit.num_qubits
        return {
            "output_relabeling": {
                "reason": "QFT generated without the final bit-reversal swaps",
                "output_bit_to_logical": {str(k): n - 1 - k for k in range(n)},
            }
        }
    return {}


def cmd_map(a: argparse.Namespace) -> int:
    cfg = _config_from_args(a)
    try:
        run = run_config(cfg)
    except (InputError, DuostraError, OSError, ValueError) as exc:
        print(f"duostra map: {exc}", file=sys.stderr)
        return EXIT_INPUT
    if run["violations"]:
        for v in run["violations"][:20]:
            print(f"violation {v.kind} at op {v.op_index}: {v.detail}", file=sys.stderr)
        return EXIT_VERIFY

    rep = run["report"]
    log.info(
        "%s on %s: ideal %d, mapped %d, %d swaps, %.1f ms",
        run["circuit"].name, run["device"].name, rep.ideal_cost, rep.mapping_cost, rep.swap_count, rep.wall_ms,
    )
    stats = json.dumps(_stats_doc(cfg, run, a.timing), indent=1, sort_keys=True) + "\n"
    outputs = []
    if a.out_qasm:
        outputs.append((a.out_qasm, emit_mapped_qasm(run["result"], a.expand_swaps)))
    if a.out_layout:
        outputs.append((a.out_layout, layout_json(run["result"], _layout_notes(cfg, run["circuit"]))))
    if a.out_stats:
        outputs.append((a.out_stats, stats))
    else:
        sys.stdout.write(stats)
    for path, text in outputs:
        Path(path).write_text(text, encoding="utf-8")
    return EXIT_OK


# --- bench ------------------------------------------------------------------

BENCH_COLUMNS = [
    "circuit", "device", "router", "scheduler", "depth", "placement", "seed",
    "num_qubits", "num_gates", "ideal", "mapped", "swaps", "wall_ms", "stddev", "max_edge",
    "verified", "error",
]
_CELL_DEFAULTS = {
    "router": "duostra",
    "scheduler": "sp",
    "depth": 4,
    "sp_constant": 1,
    "placement": "dfs",
    "seed": 0,
    "tau_single": 1,
    "tau_double": 2,
    "tau_swap": 6,
}


def expand_suite(suite: list) -> list[dict]:
    """Each entry may give a list for any field; lists expand as a cartesian product."""
    cells = []
    for entry in suite:
        if not isinstance(entry, dict) or "circuit" not in entry or "device" not in entry:
            raise InputError("each suite entry needs 'circuit' and 'device'")
        merged = {**_CELL_DEFAULTS, **entry}
        keys = list(merged)
        values = [v if isinstance(v, list) else [v] for v in merged.values()]
        for combo in itertools.product(*values):
            cells.append(dict(zip(keys, combo)))
    return cells


def run_cell(cell: dict, base: str | None = None) -> dict:
    row = {k: cell.get(k, "") for k in ("circuit", "device", "router", "scheduler", "depth", "placement", "seed")}
    try:
        run = run_config(cell, Path(base) if base else None)
        rep = run["report"]
        row.update(
            num_qubits=run["circuit"].num_qubits,
            num_gates=len(run["circuit"].gates),
            ideal=rep.ideal_cost,
            mapped=rep.mapping_cost,
            swaps=rep.swap_count,
            wall_ms=round(rep.wall_ms, 3),
            stddev=round(rep.edge_utilization.stddev, 6),
            max_edge=rep.edge_utilization.max,
            verified=not run["violations"],
            error="",
        )
    except Exception as exc:  # a failing cell must not stop the harness
        row.update({k: "" for k in BENCH_COLUMNS if k not in row})
        row["verified"] = False
        row["error"] = f"{type(exc).__name__}: {exc}"
    return row


def run_suite(cells: list[dict], jobs: int = 1, base: str | None = None) -> list[dict]:
    if jobs <= 1 or len(cells) <= 1:
        return [run_cell(c, base) for c in cells]
    with ProcessPoolExecutor(max_workers=jobs) as pool:
        return list(pool.map(run_cell, cells, [base] * len(cells)))


def write_table(rows: list[dict], path: str | None) -> None:
    if path and path.endswith(".json"):
        Path(path).write_text(json.dumps({"schema": SCHEMA_VERSION, "rows": rows}, indent=1) + "\n", encoding="utf-8")
        return
    buf = io.StringIO()
    writer = csv.DictWriter(buf, fieldnames=BENCH_COLUMNS, lineterminator="\n")
    writer.writeheader()
    for r in rows:
        writer.writerow(r)
    if path:
        Path(path).write_text(buf.getvalue(), encoding="utf-8")
    else:
        sys.stdout.write(buf.getvalue())


def cmd_bench(a: argparse.Namespace) -> int:
    suite_path = Path(a.suite)
    try:
        suite = json.loads(suite_path.read_text(encoding="utf-8"))
        if not isinstance(suite, list):
            raise InputError("suite file must hold a JSON array of run configs")
        cells = expand_suite(suite)
    except (OSError, json.JSONDecodeError, InputError) as exc:
        print(f"duostra bench: {exc}", file=sys.stderr)
        return EXIT_INPUT
    jobs = a.jobs if a.jobs else (os.cpu_count() or 1)
    rows = run_suite(cells, jobs, str(suite_path.parent.resolve()))
    write_table(rows, a.out)
    failed = sum(1 for r in rows if r["error"])
    if failed:
        print(f"duostra bench: {failed} of {len(rows)} cells failed", file=sys.stderr)
    return EXIT_OK


# --- topo / gen -------------------------------------------------------------


def cmd_topo(a: argparse.Namespace) -> int:
    try:
        dev = builtin_topology(a.spec)
    except ValueError as exc:
        print(f"duostra topo: {exc}", file=sys.stderr)
        return EXIT_USAGE
    text = dev.to_json()
    if a.out:
        Path(a.out).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)
    print(f"qubits={dev.num_qubits} edges={len(dev.edges)} max_degree={dev.max_degree}", file=sys.stderr)
    return EXIT_OK


def cmd_gen(a: argparse.Namespace) -> int:
    try:
        circ = circuit_from_spec(a.spec) if ":" in a.spec else None
    except InputError as exc:
        print(f"duostra gen: {exc}", file=sys.stderr)
        return EXIT_USAGE
    if circ is None:
        print(f"duostra gen: expected qft:N or random:Q:G[:SEED], got {a.spec!r}", file=sys.stderr)
        return EXIT_USAGE
    text = emit_qasm(circ)
    if a.out:
        Path(a.out).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="duostra", description=__doc__.splitlines()[0])
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("-v", "--verbose", action="count", default=0, help="-v info, -vv per-gate routing trace")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    m = sub.add_parser("map", parents=[common], help="map a circuit onto a device")
    src = m.add_mutually_exclusive_group(required=True)
    src.add_argument("--input", help="OpenQASM 2.0 file")
    src.add_argument("--gen", help="generator spec: qft:N or random:Q:G[:SEED]")
    dev = m.add_mutually_exclusive_group(required=True)
    dev.add_argument("--device", help="device JSON file or builtin spec")
    dev.add_argument("--topo", dest="device", help="builtin spec, e.g. heavy_hex:3x4")
    m.add_argument("--router", choices=ROUTERS, default="duostra")
    m.add_argument("--scheduler", choices=SCHEDULERS, default="sp")
    m.add_argument("--depth", type=_int_at_least(1), default=4, help="LE search depth")
    m.add_argument("--sp-constant", type=_int_at_least(0), default=1, help="hop weight in SP estimation")
    m.add_argument("--placement", choices=STRATEGIES, default="dfs")
    m.add_argument("--seed", type=_int_at_least(0), default=0)
    m.add_argument("--tau-single", type=_int_at_least(1), default=1)
    m.add_argument("--tau-double", type=_int_at_least(1), default=2)
    m.add_argument("--tau-swap", type=_int_at_least(1), default=6)
    m.add_argument("--expand-swaps", action="store_true", help="emit each SWAP as three CX")
    m.add_argument("--out-qasm")
    m.add_argument("--out-layout")
    m.add_argument("--out-stats", help="stats JSON path (stdout when omitted)")
    m.add_argument("--timing", action="store_true", help="include wall-clock fields in the stats")
    m.set_defaults(func=cmd_map)

    b = sub.add_parser("bench", parents=[common], help="run a benchmark suite")
    b.add_argument("suite", help="JSON array of run configs")
    b.add_argument("--out", help="table path (.csv or .json); CSV to stdout when omitted")
    b.add_argument("--jobs", type=_int_at_least(0), default=0, help="worker processes (default: all cores)")
    b.set_defaults(func=cmd_bench)

    t = sub.add_parser("topo", parents=[common], help="write a builtin topology as device JSON")
    t.add_argument("spec")
    t.add_argument("--out")
    t.set_defaults(func=cmd_topo)

    g = sub.add_parser("gen", parents=[common], help="write a generated circuit as OpenQASM")
    g.add_argument("spec")
    g.add_argument("--out")
    g.set_defaults(func=cmd_gen)
    return p


_handler: logging.Handler | None = None


def _configure_logging(verbosity: int) -> None:
    # own handler on the package logger, replaced on every call so repeated
    # in-process invocations write to the current stderr exactly once
    global _handler
    if _handler is not None:
        log.removeHandler(_handler)
    _handler = logging.StreamHandler(sys.stderr)
    _handler.setFormatter(logging.Formatter("%(message)s"))
    log.addHandler(_handler)
    log.setLevel(max(logging.WARNING - 10 * verbosity, logging.DEBUG))
    log.propagate = False


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    a = parser.parse_args(argv)
    _configure_logging(a.verbose)
    return a.func(a)


if __name__ == "__main__":
    sys.exit(main())
