#!/usr/bin/env python3
"""Benchmark the time-stepping kernels: compiled extension vs pure Python.

Runs the same parametric-oscillation buildup workload through both
implementations and reports steps/second and the speedup.  Usage:

    python benchmarks/bench_integrate.py [n_steps] [repeats]
"""
import math
import sys
import time

import numpy as np

from parosc import _step_py

try:
    from parosc import _step_c
except ImportError:
    _step_c = None


def bench(mod, n_steps, repeats):
    gam = 2 * math.pi * 0.5e6
    dt = 0.01 / gam
    b_half = np.zeros(2 * n_steps + 1, dtype=complex)
    args = (1e-6 + 0j, dt, n_steps, 0.1 * gam, 2.0 * gam,
            2 * math.pi * 100e3, gam, math.sqrt(1.2 * gam), b_half)
    mod.rk4_trajectory(*args)  # warm up
    best = math.inf
    for _ in range(repeats):
        t0 = time.perf_counter()
        out = mod.rk4_trajectory(*args)
        best = min(best, time.perf_counter() - t0)
    return best, out


def main():
    n_steps = int(sys.argv[1]) if len(sys.argv) > 1 else 200_000
    repeats = int(sys.argv[2]) if len(sys.argv) > 2 else 5

    t_py, out_py = bench(_step_py, n_steps, repeats)
    print(f"python   kernel: {n_steps / t_py / 1e6:8.2f} M steps/s  "
          f"({t_py * 1e3:.1f} ms for {n_steps} RK4 steps)")

    if _step_c is None:
        print("compiled kernel: not built (pip install -e . with a C compiler)")
        return

    t_c, out_c = bench(_step_c, n_steps, repeats)
    print(f"compiled kernel: {n_steps / t_c / 1e6:8.2f} M steps/s  "
          f"({t_c * 1e3:.1f} ms for {n_steps} RK4 steps)")
    print(f"speedup: {t_py / t_c:.1f}x")

    worst = float(np.max(np.abs(out_c - out_py) / np.maximum(np.abs(out_py), 1e-300)))
    print(f"max relative trajectory difference: {worst:.2e}")


if __name__ == "__main__":
    main()
