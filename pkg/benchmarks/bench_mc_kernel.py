"""Compare the compiled Monte Carlo kernel with the numpy fallback.

Usage: python benchmarks/bench_mc_kernel.py [--samples N] [--repeat R]
"""

from __future__ import annotations

import argparse
import time

import numpy as np

from privcache.config import example_path, load_scenario
from privcache.kernels import BACKENDS
from privcache.montecarlo import McTables, simulate


def bench(plan, tables, backend: str, samples: int, repeat: int) -> tuple[float, object]:
    best, stats = float("inf"), None
    for _ in range(repeat):
        rng = np.random.default_rng(7)
        t0 = time.perf_counter()
        stats = simulate(plan, samples, rng, backend=backend, tables=tables)
        best = min(best, time.perf_counter() - t0)
    return best, stats


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--samples", type=int, default=1_000_000)
    ap.add_argument("--repeat", type=int, default=3)
    args = ap.parse_args(argv)
    cases = [("example1", (2, 2)), ("example2", ())]
    print(f"{'scenario':<10} {'backend':<9} {'seconds':>8} {'Msamples/s':>11}  mean_length")
    for name, d in cases:
        s = load_scenario(example_path(name))
        plan = s.plan(d)
        tables = McTables.from_plan(plan)
        results = {}
        for backend in sorted(BACKENDS):
            secs, stats = bench(plan, tables, backend, args.samples, args.repeat)
            results[backend] = stats
            print(f"{name:<10} {backend:<9} {secs:8.3f} {args.samples / secs / 1e6:11.2f}  {stats.mean_length:.6f}")
        tallies = {(st.total_length, st.total_length_sq, st.mismatches, st.counts.tobytes()) for st in results.values()}
        print(f"{'':<10} backends agree: {len(tallies) == 1}")


if __name__ == "__main__":
    main()
