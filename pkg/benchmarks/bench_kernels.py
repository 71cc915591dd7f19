#!/usr/bin/env python
"""Benchmark the numba shuffle kernels against the pure-numpy fallback.

Both paths consume identical pregenerated uniforms and produce bit-identical
decks; this script measures throughput only. Run the fallback alone by
setting RIFFLE_PURE_NUMPY=1 (the jit column then reports n/a).

Usage:
    python benchmarks/bench_kernels.py
    python benchmarks/bench_kernels.py --deck-sizes 16 52 104 --rows 20000
    python benchmarks/bench_kernels.py --output results.json
"""

from __future__ import annotations

import argparse
import json
import time

import numpy as np

from riffle import _kernels


def make_inputs(rows: int, n: int, m: int, seed: int):
    rng = np.random.default_rng(seed)
    decks = np.tile(np.arange(1, n + 1, dtype=np.int32), (rows, 1))
    pack_m = np.full(rows, m, np.int64)
    digit_u = rng.random((rows, n))
    drop_u = rng.random((rows, n))
    return decks, pack_m, digit_u, drop_u


def time_call(fn, args, repeats: int) -> float:
    best = float("inf")
    for _ in range(repeats):
        start = time.perf_counter()
        fn(*args)
        best = min(best, time.perf_counter() - start)
    return best


def bench(rows: int, deck_sizes: list[int], m: int, repeats: int) -> list[dict]:
    results = []
    if _kernels.NUMBA_ENABLED:
        # Trigger JIT compilation outside the timed region.
        warm = make_inputs(64, 8, m, 0)
        _kernels.chain_step_jit(*warm)
        _kernels.rising_counts_jit(warm[0])

    header = f"{'n':>5} {'rows':>8} {'numpy (s)':>11} {'numba (s)':>11} {'speedup':>8}"
    print(header)
    print("-" * len(header))
    for n in deck_sizes:
        args = make_inputs(rows, n, m, seed=12345)
        t_numpy = time_call(_kernels.chain_step_numpy, args, repeats)
        if _kernels.NUMBA_ENABLED:
            t_jit = time_call(_kernels.chain_step_jit, args, repeats)
            assert np.array_equal(
                _kernels.chain_step_jit(*args), _kernels.chain_step_numpy(*args)
            ), "paths diverged"
            speedup = t_numpy / t_jit
            print(f"{n:>5} {rows:>8} {t_numpy:>11.4f} {t_jit:>11.4f} {speedup:>7.1f}x")
        else:
            t_jit = None
            print(f"{n:>5} {rows:>8} {t_numpy:>11.4f} {'n/a':>11} {'n/a':>8}")
        results.append(
            {
                "kernel": "chain_step",
                "n": n,
                "rows": rows,
                "m": m,
                "numpy_s": t_numpy,
                "numba_s": t_jit,
            }
        )

    print()
    print("rising_counts:")
    for n in deck_sizes:
        decks = make_inputs(rows, n, m, seed=54)[0]
        t_numpy = time_call(_kernels.rising_counts_numpy, (decks,), repeats)
        if _kernels.NUMBA_ENABLED:
            t_jit = time_call(_kernels.rising_counts_jit, (decks,), repeats)
            print(f"{n:>5} {rows:>8} {t_numpy:>11.4f} {t_jit:>11.4f} {t_numpy / t_jit:>7.1f}x")
        else:
            t_jit = None
            print(f"{n:>5} {rows:>8} {t_numpy:>11.4f} {'n/a':>11} {'n/a':>8}")
        results.append(
            {
                "kernel": "rising_counts",
                "n": n,
                "rows": rows,
                "numpy_s": t_numpy,
                "numba_s": t_jit,
            }
        )
    return results


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--rows", type=int, default=50_000)
    parser.add_argument("--deck-sizes", type=int, nargs="+", default=[16, 52, 104])
    parser.add_argument("--m", type=int, default=2, help="pack count per step")
    parser.add_argument("--repeats", type=int, default=3)
    parser.add_argument("--output", default=None, help="write results as JSON")
    args = parser.parse_args()

    print(f"numba enabled: {_kernels.NUMBA_ENABLED}")
    results = bench(args.rows, args.deck_sizes, args.m, args.repeats)
    if args.output:
        with open(args.output, "w") as handle:
            json.dump(results, handle, indent=2)
        print(f"\nwrote {args.output}")


if __name__ == "__main__":
    main()
