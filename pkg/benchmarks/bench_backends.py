#!/usr/bin/env python3
"""Benchmark the numba kernels against their pure-numpy twins.

The hot paths are the pairwise grid scans behind the properness verifier
(G^2 * n inner products per check) and the lattice enumeration behind
simplex grids.  Run:

    python benchmarks/bench_backends.py [--sizes 200,600,1200] [--repeats 5]

The active package backend is controlled by LOSSGEOM_BACKEND; this script
times both twins directly, so one invocation covers both.
"""

import argparse
import time

import numpy as np

from lossgeom import _kernels as K
from lossgeom._backend import USE_NUMBA, backend_name


def _time(fn, *args, repeats=5, warmup=1):
    for _ in range(warmup):
        fn(*args)
    best = float("inf")
    for _ in range(repeats):
        t0 = time.perf_counter()
        fn(*args)
        best = min(best, time.perf_counter() - t0)
    return best


def bench_properness_scan(sizes, repeats):
    print("pairwise properness scan (G x G x n):")
    print(f"  {'G':>6} {'n':>3} {'numpy':>12} {'numba':>12} {'speedup':>9}")
    rng = np.random.default_rng(0)
    for G in sizes:
        for n in (2, 4):
            P = rng.dirichlet(np.ones(n), G)
            L = rng.uniform(0.0, 3.0, (G, n))
            diag = np.einsum("ij,ij->i", L, P)
            t_np = _time(K._worst_violation_numpy, L, P, diag, repeats=repeats)
            if USE_NUMBA:
                t_nb = _time(K._worst_violation_jit, L, P, diag, repeats=repeats)
                print(
                    f"  {G:>6} {n:>3} {t_np*1e3:>10.2f}ms {t_nb*1e3:>10.2f}ms "
                    f"{t_np/t_nb:>8.2f}x"
                )
            else:
                print(f"  {G:>6} {n:>3} {t_np*1e3:>10.2f}ms {'n/a':>12}")


def bench_compositions(repeats):
    print("lattice composition enumeration:")
    print(f"  {'total':>6} {'parts':>5} {'count':>9} {'numpy':>12} {'numba':>12}")
    for total, parts in ((50, 3), (100, 3), (60, 4), (200, 3)):
        count = K.compositions(total, parts).shape[0]
        t_np = _time(K._compositions_numpy, total, parts, repeats=repeats)
        if USE_NUMBA:
            t_nb = _time(K._compositions_jit, total, parts, repeats=repeats)
            print(
                f"  {total:>6} {parts:>5} {count:>9} {t_np*1e3:>10.2f}ms "
                f"{t_nb*1e3:>10.2f}ms"
            )
        else:
            print(f"  {total:>6} {parts:>5} {count:>9} {t_np*1e3:>10.2f}ms {'n/a':>12}")


def bench_end_to_end(repeats):
    import lossgeom as lg

    print("end-to-end properness verification (log loss, n=3, resolution 50):")
    loss = lg.log_loss(3)
    grid = lg.simplex_grid(3, 50)
    t = _time(lambda: lg.check_properness(loss, grid), repeats=repeats)
    print(f"  {len(grid)} grid points, {len(grid)**2} pairs: {t*1e3:.1f}ms "
          f"({backend_name()} backend)")


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--sizes", default="200,600,1200")
    parser.add_argument("--repeats", type=int, default=5)
    args = parser.parse_args()
    sizes = [int(s) for s in args.sizes.split(",")]

    print(f"active backend: {backend_name()}")
    bench_properness_scan(sizes, args.repeats)
    bench_compositions(args.repeats)
    bench_end_to_end(args.repeats)


if __name__ == "__main__":
    main()
