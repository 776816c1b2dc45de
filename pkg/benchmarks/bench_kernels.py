#!/usr/bin/env python3
"""Timing comparison of the compiled kernels against the numpy fallback.

Run with:  python3 benchmarks/bench_kernels.py
"""

import time

import numpy as np

from vecmap._kernels import _pure
from vecmap.geometry import ElementKind, permutation_group

try:
    from vecmap._kernels import _fast
except ImportError:
    _fast = None


def _time(fn, repeats):
    best = float("inf")
    for _ in range(repeats):
        start = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - start)
    return best


def bench_manhattan(backend, n_pred, n_points, kind, repeats=5):
    rng = np.random.default_rng(0)
    pred = rng.uniform(size=(n_pred, n_points, 2))
    gt = rng.uniform(size=(n_points, 2))
    perms = np.array(
        [m.index_map(n_points) for m in permutation_group(kind, n_points).members],
        dtype=np.int64,
    )
    return _time(lambda: backend.min_manhattan_over_perms(pred, gt, perms), repeats)


def bench_chamfer(backend, n_a, n_b, repeats=50):
    rng = np.random.default_rng(0)
    a = rng.uniform(size=(n_a, 2)) * 30
    b = rng.uniform(size=(n_b, 2)) * 30
    return _time(lambda: backend.chamfer_mean(a, b), repeats)


def main():
    if _fast is None:
        print("compiled backend unavailable; showing pure timings only")
    rows = []
    for label, kind, n_pred, n_points in [
        ("manhattan polyline 50x20", ElementKind.POLYLINE, 50, 20),
        ("manhattan polygon  50x20", ElementKind.POLYGON, 50, 20),
        ("manhattan polygon 200x40", ElementKind.POLYGON, 200, 40),
    ]:
        pure_t = bench_manhattan(_pure, n_pred, n_points, kind)
        fast_t = bench_manhattan(_fast, n_pred, n_points, kind) if _fast else None
        rows.append((label, pure_t, fast_t))
    for label, n_a, n_b in [("chamfer 20x20", 20, 20), ("chamfer 200x200", 200, 200)]:
        pure_t = bench_chamfer(_pure, n_a, n_b)
        fast_t = bench_chamfer(_fast, n_a, n_b) if _fast else None
        rows.append((label, pure_t, fast_t))

    print(f"{'kernel':<26}{'pure (ms)':>12}{'compiled (ms)':>15}{'speedup':>9}")
    for label, pure_t, fast_t in rows:
        if fast_t is None:
            print(f"{label:<26}{pure_t * 1e3:>12.3f}{'-':>15}{'-':>9}")
        else:
            print(
                f"{label:<26}{pure_t * 1e3:>12.3f}{fast_t * 1e3:>15.3f}"
                f"{pure_t / fast_t:>8.1f}x"
            )


if __name__ == "__main__":
    main()
