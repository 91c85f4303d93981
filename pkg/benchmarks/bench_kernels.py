"""Compiled kernels vs the numpy fallback.

    python benchmarks/bench_kernels.py [--n 1000000] [--repeat 3]

Prints one line per kernel with the best-of-repeat wall time of each
backend and the speedup, and checks that both backends agree bit for bit.
"""
import argparse
import time

import numpy as np

from k3kit import _kernels_py
from k3kit.diophantine import DiophantinePair


def best_of(fn, repeat):
    best = float("inf")
    out = None
    for _ in range(repeat):
        t0 = time.perf_counter()
        out = fn()
        best = min(best, time.perf_counter() - t0)
    return best, out


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--n", type=int, default=10 ** 6, help="scan length")
    ap.add_argument("--repeat", type=int, default=3)
    args = ap.parse_args()
    try:
        from k3kit import _kernels
    except ImportError:
        raise SystemExit("compiled extension not built; run pip install -e . --no-build-isolation")

    fixed = DiophantinePair.parse("sqrt(2)-1", "sqrt(3)-1").fixed()
    rng = np.random.default_rng(0)
    m = args.n // 10
    x1, x2 = rng.uniform(-64, 64, m), rng.uniform(-64, 64, m)
    pts = rng.uniform(0, 1, (args.n, 3))
    cases = {
        f"residual_scan n={args.n}": lambda k: k.residual_scan(*fixed, 1, args.n + 1),
        f"leaf_reduce n={m}": lambda k: k.leaf_reduce(x1, x2, 0.25, *fixed),
        f"dyadic_histogram n={args.n}": lambda k: k.dyadic_histogram(pts, 16),
    }
    print(f"{'kernel':32s} {'cython s':>10s} {'python s':>10s} {'speedup':>8s}  identical")
    for name, fn in cases.items():
        tc, oc = best_of(lambda: fn(_kernels), args.repeat)
        tp, op = best_of(lambda: fn(_kernels_py), args.repeat)
        oc, op = (oc, op) if isinstance(oc, tuple) else ((oc,), (op,))
        same = all(np.array_equal(a, b) for a, b in zip(oc, op))
        print(f"{name:32s} {tc:10.4f} {tp:10.4f} {tp / tc:8.1f}x  {same}")


if __name__ == "__main__":
    main()
