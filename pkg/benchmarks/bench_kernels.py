"""Time the compiled kernels against the pure-Python fallback.

Usage: python benchmarks/bench_kernels.py [--repeat 5]
"""

import argparse
import timeit

import numpy as np

from matraj import _kernels_py, kernels


def cases(rng):
    w = rng.normal(size=10000) + 1j * rng.normal(size=10000)
    ph = rng.uniform(0, 1e4, 10000)
    yield "scan_1d N=1e4 grid=2001", lambda m: m.scan_1d(w, ph, -1.0, 1e-3, 2001)
    w2 = w[:1000]
    yield "scan_1d N=1e3 grid=20001", lambda m: m.scan_1d(w2, ph[:1000], -1.0, 1e-4, 20001)
    yield "dp_tables M=120 N=6 step=50", lambda m: m.dp_tables(120, 6, 50, True)


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=5)
    args = ap.parse_args(argv)
    rng = np.random.default_rng(0)
    print(f"active backend: {kernels.BACKEND}")
    print(f"{'case':32s} {'compiled [ms]':>14s} {'python [ms]':>12s} {'speedup':>8s}")
    for name, fn in cases(rng):
        py = min(timeit.repeat(lambda: fn(_kernels_py), number=1, repeat=args.repeat)) * 1e3
        if kernels.BACKEND == "cython":
            cy = min(timeit.repeat(lambda: fn(kernels), number=1, repeat=args.repeat)) * 1e3
            print(f"{name:32s} {cy:14.3f} {py:12.3f} {py / cy:8.1f}")
        else:
            print(f"{name:32s} {'n/a':>14s} {py:12.3f} {'n/a':>8s}")


if __name__ == "__main__":
    main()
