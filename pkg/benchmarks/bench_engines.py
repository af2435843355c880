#!/usr/bin/env python3
"""Compare the compiled and vectorized simulation engines.

Runs the same counter-addressed trial range through both implementations,
checks they agree hit-for-hit (they must: the streams are bit-identical),
and reports throughput.  Compilation is forced before timing.

Usage: python benchmarks/bench_engines.py [trials] [workers]
"""

import sys
import time

from triwave import mc_engine
from triwave.config import load_preset
from triwave.refl_prob import monte_carlo_reflection


def main() -> int:
    trials = int(sys.argv[1]) if len(sys.argv) > 1 else 400_000
    workers = int(sys.argv[2]) if len(sys.argv) > 2 else 4

    scenario = load_preset("paper_baseline")
    region = scenario.region()
    veh = scenario.vehicles
    n = scenario.topology.node_count

    try:
        mc_engine.warm_up("numba")
        have_numba = True
    except (RuntimeError, ValueError):
        have_numba = False
        print("numba not importable; timing the numpy engine only")

    results = {}
    plans = [("numpy", 1)]
    if have_numba:
        plans = [("numba", 1), ("numba", workers), ("numpy", 1)]

    for engine, w in plans:
        t0 = time.perf_counter()
        stats = monte_carlo_reflection(region, veh, n, trials=trials,
                                       seed=2024, engine=engine, workers=w)
        dt = time.perf_counter() - t0
        results[(engine, w)] = (stats.hits, dt)
        rate = trials / dt / 1e6
        print(f"{engine:>5} workers={w}: {dt:7.3f} s  "
              f"({rate:6.2f} M trials/s)  hits={stats.hits}")

    hits = {h for h, _ in results.values()}
    if len(hits) != 1:
        print(f"ENGINE MISMATCH: hit counts differ: {sorted(hits)}")
        return 1
    print(f"hit counts identical across engines: {hits.pop()} / {trials}")

    if have_numba:
        t_numba = results[("numba", 1)][1]
        t_numpy = results[("numpy", 1)][1]
        print(f"single-thread speedup (compiled vs vectorized): "
              f"{t_numpy / t_numba:.1f}x")
    return 0


if __name__ == "__main__":
    sys.exit(main())
