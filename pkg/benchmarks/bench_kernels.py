"""Compare the numba kernels against the numpy fallback.

Runs every kernel from both implementation sets on identically sized
inputs, reports the best wall time over a few repeats, and checks that
the two paths agree. Run from the repo root:

    python benchmarks/bench_kernels.py [--n 2708] [--d1 1000] [--repeats 5]
"""

import argparse
import sys
import time

import numpy as np

from hyla.kernels import NUMBA_IMPLS, NUMPY_IMPLS, warmup


def make_inputs(n, d0, d1, seed=0):
    rng = np.random.Generator(np.random.Philox(seed))
    Z = rng.uniform(-0.2, 0.2, size=(n, d0))
    omegas = rng.normal(size=(d1, d0))
    omegas /= np.linalg.norm(omegas, axis=1, keepdims=True)
    lambdas = rng.normal(scale=1.0, size=d1)
    biases = rng.uniform(0.0, 2.0 * np.pi, size=d1)
    dH = rng.normal(size=(n, d1))
    # sparse graph with ~8 neighbors per node, symmetrized
    heads = rng.integers(0, n, size=4 * n)
    tails = rng.integers(0, n, size=4 * n)
    keep = heads != tails
    rows = np.concatenate([heads[keep], tails[keep]])
    cols = np.concatenate([tails[keep], heads[keep]])
    order = np.lexsort((cols, rows))
    rows, cols = rows[order], cols[order]
    offsets = np.zeros(n + 1, dtype=np.int64)
    np.add.at(offsets, rows + 1, 1)
    offsets = np.cumsum(offsets)
    vals = np.ones(rows.shape[0])
    alpha = (d0 - 1) / 2.0
    clamp = 1e-15
    return {
        "log_poisson": (Z, omegas, clamp),
        "hyla_forward": (Z, omegas, lambdas, biases, alpha, clamp),
        "hyla_backward": (Z, omegas, lambdas, biases, alpha, clamp, dH),
        "rff_forward": (Z, omegas, lambdas, biases),
        "rff_backward": (Z, omegas, lambdas, biases, dH),
        "csr_spmm": (offsets, cols.astype(np.int64), vals, n, dH),
    }


def best_time(fn, args, repeats):
    best = float("inf")
    for _ in range(repeats):
        t0 = time.perf_counter()
        fn(*args)
        best = min(best, time.perf_counter() - t0)
    return best


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--n", type=int, default=2708)
    ap.add_argument("--d0", type=int, default=16)
    ap.add_argument("--d1", type=int, default=1000)
    ap.add_argument("--repeats", type=int, default=5)
    args = ap.parse_args(argv)

    if NUMBA_IMPLS is None:
        print("numba backend unavailable (HYLA_NUMBA=0 or numba missing); "
              "nothing to compare", file=sys.stderr)
        return 1

    warmup()
    inputs = make_inputs(args.n, args.d0, args.d1)
    print(f"n={args.n} d0={args.d0} d1={args.d1}, "
          f"best of {args.repeats} runs")
    print(f"{'kernel':<14}{'numpy':>12}{'numba':>12}{'speedup':>9}"
          f"{'max|diff|':>12}")
    for name, a in inputs.items():
        ref = NUMPY_IMPLS[name](*a)
        out = NUMBA_IMPLS[name](*a)
        diff = float(np.max(np.abs(np.asarray(ref) - out)))
        t_np = best_time(NUMPY_IMPLS[name], a, args.repeats)
        t_nb = best_time(NUMBA_IMPLS[name], a, args.repeats)
        print(f"{name:<14}{t_np * 1e3:>10.2f}ms{t_nb * 1e3:>10.2f}ms"
              f"{t_np / t_nb:>8.2f}x{diff:>12.2e}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
