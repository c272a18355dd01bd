#!/usr/bin/env python3
"""Benchmark the numba kernels against their pure-numpy fallbacks.

Runs each hot kernel at explanation-realistic sizes on both backends and
prints a timing table. The numba path is what ``import peercf`` selects when
numba is available; set ``PEERCF_NO_NUMBA=1`` to force the numpy path in the
package itself.

Usage: python benchmarks/bench_kernels.py [--repeats 5]
"""

import argparse
import time

import numpy as np

from peercf import kernels
from peercf.kernels import (
    _fill_composites_np,
    _shapley_accumulate_np,
    _sq_distances_np,
)


def best_of(fn, repeats: int) -> float:
    times = []
    for _ in range(repeats):
        start = time.perf_counter()
        fn()
        times.append(time.perf_counter() - start)
    return min(times)


def bench_shapley(d: int, rng, repeats: int):
    v = rng.normal(size=1 << d)
    popcount = np.array([bin(m).count("1") for m in range(1 << d)], dtype=np.int64)
    weights = rng.uniform(0.1, 1.0, size=d)
    kernels.shapley_accumulate(v, weights, popcount, d)  # JIT warm-up
    fast = best_of(lambda: kernels.shapley_accumulate(v, weights, popcount, d), repeats)
    slow = best_of(lambda: _shapley_accumulate_np(v, weights, popcount, d), repeats)
    return f"shapley_accumulate d={d}", fast, slow


def bench_composites(d: int, n_bg: int, rng, repeats: int):
    masks = ((np.arange(1 << d)[:, None] >> np.arange(d)) & 1).astype(bool)
    x = rng.normal(size=d)
    bg = rng.normal(size=(n_bg, d))
    kernels.fill_composites(masks, x, bg)
    fast = best_of(lambda: kernels.fill_composites(masks, x, bg), repeats)
    slow = best_of(lambda: _fill_composites_np(masks, x, bg), repeats)
    return f"fill_composites d={d} bg={n_bg}", fast, slow


def bench_distances(n: int, d: int, rng, repeats: int):
    points = rng.normal(size=(n, d))
    q = rng.normal(size=d)
    kernels.sq_distances(points, q)
    fast = best_of(lambda: kernels.sq_distances(points, q), repeats)
    slow = best_of(lambda: _sq_distances_np(points, q), repeats)
    return f"sq_distances n={n} d={d}", fast, slow


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--repeats", type=int, default=5)
    args = parser.parse_args()

    if kernels.backend() != "numba":
        print("numba backend inactive (PEERCF_NO_NUMBA set or numba missing);")
        print("the 'active' column below is the numpy fallback timing itself.\n")

    rng = np.random.default_rng(0)
    rows = [
        bench_shapley(10, rng, args.repeats),
        bench_shapley(15, rng, args.repeats),
        bench_composites(10, 50, rng, args.repeats),
        bench_composites(12, 100, rng, args.repeats),
        bench_distances(3_000, 10, rng, args.repeats),
        bench_distances(100_000, 10, rng, args.repeats),
    ]

    name_width = max(len(name) for name, _, _ in rows)
    print(f"{'kernel':<{name_width}}  {'active':>10}  {'numpy':>10}  {'speedup':>8}")
    for name, fast, slow in rows:
        print(
            f"{name:<{name_width}}  {fast * 1e3:>8.3f}ms  {slow * 1e3:>8.3f}ms  "
            f"{slow / fast:>7.2f}x"
        )
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
