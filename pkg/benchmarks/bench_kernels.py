"""Compare the compiled and numpy kernel backends.

    python benchmarks/bench_kernels.py [--repeat 5]

Times one RK4 slot, one Hebbian update and a full 40-unit impulse run on
the shipped 14-node network, then a 64-node generated network.
"""

from __future__ import annotations

import argparse
import time

import numpy as np

from neurocactus import _kernels, _pykernels
from neurocactus.dynamics import Impulse, InputSignal, NetworkParams, simulate
from neurocactus.graph import generate_generalized, load_graph
from neurocactus.scenario import shipped_path


def best_of(fn, repeat):
    times = []
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn()
        times.append(time.perf_counter() - t0)
    return min(times)


def use(backend):
    _kernels.rk4_slot = backend.rk4_slot
    _kernels.hebbian_step = backend.hebbian_step


def run_case(label, g, repeat):
    p = NetworkParams(c_n=max(4.1, float(g.degrees().max()) + 0.1))
    u = InputSignal(tuple(Impulse(2.0) for _ in g.control_nodes))
    x0 = np.ones(g.n)
    A = g.weight_matrix()
    M = np.ascontiguousarray(A - p.c_n * np.eye(g.n))
    cols = np.ascontiguousarray(g.input_matrix())
    kind, par = u.encode(p.dt)
    out = np.empty((p.steps_per_slot + 1, g.n))
    ei, ej, sg = g.edge_arrays()
    b = p.bounds

    rows = []
    for name, backend in (("python", _pykernels), ("cython", _kernels.compiled_backend)):
        if backend is None:
            continue
        use(backend)
        slot = best_of(lambda: backend.rk4_slot(M, np.zeros(g.n), cols, kind, par, x0, 0.0, p.dt,
                                                p.steps_per_slot, out), repeat)
        heb = best_of(lambda: backend.hebbian_step(A.copy(), ei, ej, sg, x0, 0.9, 0.9, b.a_plus_lo,
                                                   b.a_plus_hi, b.a_minus_lo, b.a_minus_hi, 0), repeat)
        full = best_of(lambda: simulate(g, p, u, x0, 40.0), max(1, repeat // 2))
        rows.append((name, slot, heb, full))
    use(_kernels.compiled_backend or _pykernels)

    print(f"\n{label} (N={g.n}, {len(g.edges)} edges)")
    print(f"{'backend':<8} {'rk4 slot':>12} {'hebbian':>12} {'t=40 run':>12}")
    for name, slot, heb, full in rows:
        print(f"{name:<8} {slot * 1e6:>10.1f}us {heb * 1e6:>10.1f}us {full * 1e3:>10.1f}ms")
    if len(rows) == 2:
        print(f"{'speedup':<8} {rows[0][1] / rows[1][1]:>11.1f}x {rows[0][2] / rows[1][2]:>11.1f}x "
              f"{rows[0][3] / rows[1][3]:>11.1f}x")


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=5)
    args = ap.parse_args()
    if _kernels.compiled_backend is None:
        print("compiled kernels unavailable; timing the numpy fallback only")
    run_case("shipped 14-node network", load_graph(shipped_path("net14_standin.json")), args.repeat)
    g, _ = generate_generalized(64, [1, 17, 33, 49], 3, extra_edges=8, max_degree=4)
    run_case("generated 64-node network", g, args.repeat)


if __name__ == "__main__":
    main()
