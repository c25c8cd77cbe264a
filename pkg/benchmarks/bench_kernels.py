"""Benchmark the p-median hot kernels: numba backend vs numpy fallback.

Times each kernel on synthetic instances at two scales and prints per-call
medians plus the numba speedup. The numba functions are warmed up first so
JIT compilation is excluded. Run from anywhere:

    python3 benchmarks/bench_kernels.py [--repeats 30]

Production code picks the backend at import time: numba when importable,
numpy when not or when BOXSUITE_NO_NUMBA is set. Here both are called
directly through the registry so one process can time them side by side.
"""
from __future__ import annotations

import argparse
import statistics
import time

import numpy as np

from boxsuite.pmedian import PMedianInstance, Suite, closest_two
from boxsuite.pmedian.kernels import BACKENDS, active_backend


def build_case(n: int, m: int, p: int, seed: int):
    rng = np.random.default_rng(seed)
    d = rng.uniform(1.0, 100.0, size=(n, m))
    inst = PMedianInstance(d, p)
    suite = Suite(rng.choice(m, size=p, replace=False))
    d1, d2, c1 = closest_two(inst, suite)
    mask = np.zeros(m, dtype=bool)
    idx = np.asarray(suite.members, dtype=np.int64)
    mask[idx] = True
    lam = rng.uniform(0.0, 50.0, size=n)
    return {
        "best_swap": (d, mask, idx, c1, d1, d2, False, 1e-9),
        "greedy_augment_costs": (d, d1),
        "rho": (d, lam),
    }


def time_call(fn, args, repeats: int) -> float:
    fn(*args)  # warmup; compiles the jitted variant on first call
    samples = []
    for _ in range(repeats):
        t0 = time.perf_counter()
        fn(*args)
        samples.append(time.perf_counter() - t0)
    return statistics.median(samples)


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeats", type=int, default=30)
    args = ap.parse_args()

    print(f"active backend for library calls: {active_backend()}")
    print(f"backends available: {', '.join(sorted(BACKENDS))}")
    if "numba" not in BACKENDS:
        print("numba backend unavailable (not installed or BOXSUITE_NO_NUMBA "
              "set); timing numpy only")
    cases = [("n=60 m=15 p=3", build_case(60, 15, 3, 7)),
             ("n=2000 m=400 p=10", build_case(2000, 400, 10, 7))]

    header = f"{'kernel':<22}{'scale':<20}" + "".join(
        f"{name + ' [ms]':>14}" for name in sorted(BACKENDS))
    if "numba" in BACKENDS:
        header += f"{'speedup':>10}"
    print()
    print(header)
    print("-" * len(header))
    for label, kernel_args in cases:
        for kernel in ("best_swap", "greedy_augment_costs", "rho"):
            row = f"{kernel:<22}{label:<20}"
            medians = {}
            for name in sorted(BACKENDS):
                med = time_call(BACKENDS[name][kernel], kernel_args[kernel],
                                args.repeats)
                medians[name] = med
                row += f"{med * 1e3:>14.3f}"
            if "numba" in BACKENDS:
                row += f"{medians['numpy'] / medians['numba']:>9.1f}x"
            print(row)


if __name__ == "__main__":
    main()
