#!/usr/bin/env python3
"""Benchmark the compiled kernels against the pure-Python fallback.

Usage: python benchmarks/bench_kernels.py [--repeat N]

Workloads mirror real use: a 990-cell coupled-mode integration at sweep
tolerance, the same integration with a QPM sign profile, and a loaded-line
dispersion scan (2001 frequencies x 60-cell super-cell).
"""

import argparse
import time

import numpy as np

from twpakit import _kernels_py

try:
    from twpakit import _kernels as _kernels_c
except ImportError:
    _kernels_c = None


def bench(fn, repeat):
    best = float("inf")
    for _ in range(repeat):
        start = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - start)
    return best


def cme_workload(kernels, sign=None):
    ap = 1e8
    kernels.cme_rk45(
        ap0=ap + 0j, as0=ap * 1e-3 + 0j, ai0=0j,
        n_cells=990, mode=4,
        g3=0.0, g4=1.2e-20, kerr_p=1.0e-20, kerr_s=0.9e-20, kerr_i=1.1e-20,
        delta_k=1e-4, sign=sign, rtol=5e-10, deplete_pump=True,
    )


def cascade_workload(kernels, tables, seq):
    kernels.cascade_chain(tables, seq)


def main():
    parser = argparse.ArgumentParser()
    parser.add_argument("--repeat", type=int, default=5)
    args = parser.parse_args()

    rng = np.random.default_rng(1)
    n_types, n_freq, n_seq = 2, 2001, 60
    tables = np.empty((n_types, n_freq, 4), dtype=np.complex128)
    for t in range(n_types):
        z = 1j * rng.uniform(0.5, 5.0, n_freq)
        y = 1j * rng.uniform(0.001, 0.05, n_freq)
        tables[t] = np.stack([1.0 + z * y, z, y, np.ones(n_freq)], axis=1)
    seq = rng.integers(0, n_types, n_seq)
    qpm_sign = np.where(np.arange(990) % 100 < 50, 1.0, -1.0)

    workloads = [
        ("cme 990 cells, 4WM sweep point", lambda k: cme_workload(k)),
        ("cme 990 cells, QPM sign profile", lambda k: cme_workload(k, qpm_sign)),
        ("cascade 2001 freq x 60 cells", lambda k: cascade_workload(k, tables, seq)),
    ]

    print(f"{'workload':36s}  {'pure (ms)':>10s}  {'compiled (ms)':>13s}  {'speedup':>8s}")
    for label, work in workloads:
        t_pure = bench(lambda: work(_kernels_py), args.repeat) * 1e3
        if _kernels_c is not None:
            t_comp = bench(lambda: work(_kernels_c), args.repeat) * 1e3
            print(f"{label:36s}  {t_pure:10.2f}  {t_comp:13.2f}  {t_pure / t_comp:7.1f}x")
        else:
            print(f"{label:36s}  {t_pure:10.2f}  {'not built':>13s}  {'-':>8s}")


if __name__ == "__main__":
    main()
