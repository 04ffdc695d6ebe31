#!/usr/bin/env python3
"""Compare the numba and pure-numpy kernels (P1 local matrices, cubic-sum batch).

Run from the repository root:

    python3 benchmarks/bench_kernels.py            # both paths in this process
    FBMORSE_NO_NUMBA=1 python3 benchmarks/bench_kernels.py   # numpy only

The first numba call includes compilation (or a cache load) and is timed
separately.
"""

import argparse
import time

import numpy as np

from fbmorse._accel import HAVE_NUMBA, backend
from fbmorse.fem import mesh_hemisphere
from fbmorse.fem.assemble import local_matrices
from fbmorse.verify.inequalities import alencar_batch


def best_of(fn, repeat):
    times = []
    for _ in range(repeat):
        t = time.perf_counter()
        out = fn()
        times.append(time.perf_counter() - t)
    return min(times), out


def bench_assembly(refine, repeat):
    mesh = mesh_hemisphere(refine)
    print(f"local P1 matrices, hemisphere refine {refine} ({len(mesh.cells)} cells)")
    t_np, (k_np, _, _) = best_of(lambda: local_matrices(mesh, use_numba=False), repeat)
    print(f"  numpy : {t_np * 1e3:8.2f} ms")
    if HAVE_NUMBA:
        t0 = time.perf_counter()
        local_matrices(mesh, use_numba=True)
        print(f"  numba first call: {(time.perf_counter() - t0) * 1e3:8.2f} ms")
        t_nb, (k_nb, _, _) = best_of(lambda: local_matrices(mesh, use_numba=True), repeat)
        print(f"  numba : {t_nb * 1e3:8.2f} ms  (x{t_np / t_nb:.1f}, max diff {np.abs(k_nb - k_np).max():.1e})")


def bench_alencar(n, samples, repeat):
    rng = np.random.default_rng(0)
    a = rng.standard_normal((samples, n))
    a -= a.mean(axis=1, keepdims=True)
    print(f"cubic-sum inequality, n={n}, {samples} tuples")
    t_np, (l_np, _) = best_of(lambda: alencar_batch(a, use_numba=False), repeat)
    print(f"  numpy : {t_np * 1e3:8.2f} ms")
    if HAVE_NUMBA:
        t0 = time.perf_counter()
        alencar_batch(a, use_numba=True)
        print(f"  numba first call: {(time.perf_counter() - t0) * 1e3:8.2f} ms")
        t_nb, (l_nb, _) = best_of(lambda: alencar_batch(a, use_numba=True), repeat)
        rel = np.abs(l_nb - l_np).max() / max(1.0, np.abs(l_np).max())
        print(f"  numba : {t_nb * 1e3:8.2f} ms  (x{t_np / t_nb:.1f}, max rel diff {rel:.1e})")


def main():
    p = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    p.add_argument("--refine", type=int, default=7)
    p.add_argument("--samples", type=int, default=100_000)
    p.add_argument("--repeat", type=int, default=5)
    args = p.parse_args()
    print(f"backend: {backend()}")
    bench_assembly(args.refine, args.repeat)
    for n in (3, 8):
        bench_alencar(n, args.samples, args.repeat)


if __name__ == "__main__":
    main()
