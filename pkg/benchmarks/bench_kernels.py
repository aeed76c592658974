"""Time the compiled kernels against the numpy fallback.

Usage: python benchmarks/bench_kernels.py [--half 50000] [--d 10] [--repeat 5]
"""
import argparse
import timeit

import numpy as np

from swaptest.core import all_pairs
from swaptest.engine import tie_key
from swaptest.kernels import _pykernels

try:
    from swaptest.kernels import _ckernels
except ImportError:
    _ckernels = None


def _inputs(half, d, seed=0):
    rng = np.random.default_rng(seed)
    X2 = rng.standard_normal((half, d))
    theta = rng.standard_normal(d)
    y2 = X2 @ theta + rng.standard_normal(half)
    orig = np.abs(rng.standard_normal(half))
    pairs = np.array([(p.i, p.j) for p in all_pairs(d)], dtype=np.int64)
    keys = np.array([tie_key(seed, tuple(p)) for p in pairs], dtype=np.uint64)
    a = np.ascontiguousarray(np.broadcast_to(orig, (len(pairs), half)))
    b = np.ascontiguousarray(rng.standard_normal((len(pairs), half)))
    return (X2, X2 @ theta, y2, orig, theta, pairs, keys, 0), (a, b, keys)


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--half", type=int, default=50000)
    ap.add_argument("--d", type=int, default=10)
    ap.add_argument("--repeat", type=int, default=5)
    args = ap.parse_args()
    fused, batch = _inputs(args.half, args.d)
    backends = [("python", _pykernels)] + ([("cython", _ckernels)] if _ckernels else [])
    print(f"half={args.half} d={args.d} pairs={len(fused[5])}")
    timings = {}
    for name, mod in backends:
        for kernel, inputs in (("linear_family_counts", fused), ("count_wins_batch", batch)):
            fn = getattr(mod, kernel)
            best = min(timeit.repeat(lambda: fn(*inputs), number=1, repeat=args.repeat))
            timings[name, kernel] = best
            print(f"{name:7s} {kernel:22s} {best * 1e3:9.2f} ms")
    if _ckernels is None:
        print("compiled extension not available")
        return
    for kernel in ("linear_family_counts", "count_wins_batch"):
        print(f"speedup {kernel:22s} {timings['python', kernel] / timings['cython', kernel]:6.1f}x")


if __name__ == "__main__":
    main()
