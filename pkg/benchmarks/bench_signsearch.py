"""Time the compiled and NumPy sign-search backends on random projections.

    python3 benchmarks/bench_signsearch.py --k 12 16 20 24 --repeat 3
"""

import argparse
import time

import numpy as np

from projshape import kernels
from projshape.core import Configuration
from projshape.tyler import tyler_standardize


def weight_matrix(k, d, rng):
    a = tyler_standardize(Configuration(rng.standard_normal((k, d + 1))))
    b = tyler_standardize(Configuration(rng.standard_normal((k, d + 1))))
    return a.projection * b.projection


def best_time(fn, repeat):
    times = []
    for _ in range(repeat):
        t0 = time.perf_counter()
        out = fn()
        times.append(time.perf_counter() - t0)
    return min(times), out


def main(argv=None):
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--k", type=int, nargs="+", default=[12, 16, 20, 22, 24])
    parser.add_argument("--d", type=int, default=2)
    parser.add_argument("--repeat", type=int, default=3)
    parser.add_argument("--seed", type=int, default=0)
    args = parser.parse_args(argv)

    rng = np.random.default_rng(args.seed)
    print(f"available backends: {', '.join(kernels.AVAILABLE)} (default {kernels.BACKEND})")
    header = f"{'k':>4} " + " ".join(f"{b + ' [s]':>14}" for b in kernels.AVAILABLE) + f" {'max |dv|':>10}"
    print(header)
    for k in args.k:
        W = weight_matrix(k, args.d, rng)
        row, values = [], []
        for backend in kernels.AVAILABLE:
            t, (v, _) = best_time(lambda: kernels.max_sign_form(W, backend=backend), args.repeat)
            row.append(t)
            values.append(v)
        spread = max(values) - min(values)
        print(f"{k:>4} " + " ".join(f"{t:>14.4f}" for t in row) + f" {spread:>10.2e}")


if __name__ == "__main__":
    main()
