"""Compiled kernels vs the pure-Python fallback.

Kernel timings run in-process (compiled function vs its ``py_func``). The
end-to-end timing maps one QFT in two subprocesses, with and without
``DUOSTRA_DISABLE_NUMBA``, and checks both produce the same cost.

    python3 benchmarks/bench_kernels.py [--qft 32] [--repeat 5]
"""

import argparse
import json
import os
import subprocess
import sys
import timeit

import numpy as np

from duostra import USE_NUMBA
from duostra._jit import python_impl
from duostra.circuit import gate_arrays, random_circuit
from duostra.device import heavy_hex
from duostra.kernels import all_pairs_bfs, asap_makespan, duostra_search

END_TO_END = """
import json, sys, time
from duostra import USE_NUMBA
from duostra.circuit import generate_qft
from duostra.device import heavy_hex, heavy_hex_for_qubits
from duostra.pipeline import map_circuit
n = int(sys.argv[1])
dev = heavy_hex(*heavy_hex_for_qubits(n + 1))
c = generate_qft(n)
map_circuit(generate_qft(4), dev)  # compile outside the timed region
t = time.perf_counter()
r = map_circuit(c, dev)
print(json.dumps({"numba": USE_NUMBA, "seconds": time.perf_counter() - t, "cost": r.mapping_cost}))
"""


def best_of(fn, repeat):
    return min(timeit.repeat(fn, number=1, repeat=repeat))


def kernel_rows(repeat):
    dev = heavy_hex(4, 4)
    n = dev.num_qubits
    rng = np.random.default_rng(0)
    ocp = rng.integers(0, 200, n).astype(np.int64)
    pops = np.empty(n, dtype=np.int64)
    q0, q1 = gate_arrays(random_circuit(40, 20000, seed=1))
    dur = np.where(q1 >= 0, 2, 1).astype(np.int64)
    cases = {
        f"duostra_search heavy_hex:4x4 ({n} q)": (duostra_search, (dev.indptr, dev.indices, ocp, 0, n - 1, 6, pops)),
        f"all_pairs_bfs heavy_hex:4x4 ({n} q)": (all_pairs_bfs, (dev.indptr, dev.indices)),
        "asap_makespan 20000 gates": (asap_makespan, (q0, q1, dur, 40)),
    }
    rows = []
    for name, (fn, args) in cases.items():
        fn(*args)
        fast = best_of(lambda: fn(*args), repeat)
        slow = best_of(lambda: python_impl(fn)(*args), repeat)
        rows.append((name, fast, slow))
    return rows


def end_to_end(n, disable):
    env = dict(os.environ, DUOSTRA_DISABLE_NUMBA="1" if disable else "0")
    out = subprocess.run(
        [sys.executable, "-c", END_TO_END, str(n)], env=env, capture_output=True, text=True, check=True
    ).stdout
    return json.loads(out)


def main():
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--qft", type=int, default=32, help="QFT size for the end-to-end run")
    parser.add_argument("--repeat", type=int, default=5)
    args = parser.parse_args()
    if not USE_NUMBA:
        sys.exit("numba is disabled in this process; unset DUOSTRA_DISABLE_NUMBA")

    print(f"{'kernel':44s} {'numba ms':>10s} {'python ms':>10s} {'speedup':>8s}")
    for name, fast, slow in kernel_rows(args.repeat):
        print(f"{name:44s} {fast * 1e3:10.3f} {slow * 1e3:10.3f} {slow / fast:7.1f}x")

    fast = end_to_end(args.qft, disable=False)
    slow = end_to_end(args.qft, disable=True)
    assert fast["numba"] and not slow["numba"]
    assert fast["cost"] == slow["cost"], (fast, slow)
    print(
        f"map qft:{args.qft} end to end: numba {fast['seconds']:.3f} s, "
        f"python {slow['seconds']:.3f} s, {slow['seconds'] / fast['seconds']:.1f}x, cost {fast['cost']} on both"
    )


if __name__ == "__main__":
    main()
