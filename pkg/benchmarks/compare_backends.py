"""Timing comparison of the pure-Python reference backend and the compiled
kernels, on identical workloads with identical streams.

Besides the speedup table this doubles as a parity check: both backends must
produce bit-identical arrays for every workload, or the numbers mean nothing.

Usage:
    python benchmarks/compare_backends.py [--count 200000] [--repeats 3]
"""

import argparse
import sys
import time

import numpy as np

from ghzsim.backends import compiled_available, get_backend
from ghzsim.randomness import STREAM_TEST, make_stream


def best_time(fn, repeats):
    best = float("inf")
    out = None
    for _ in range(repeats):
        t0 = time.perf_counter()
        out = fn()
        best = min(best, time.perf_counter() - t0)
    return best, out


def as_arrays(result):
    return result if isinstance(result, tuple) else (result,)


def main(argv=None):
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--count", type=int, default=200000,
                        help="runs per workload (default 200000)")
    parser.add_argument("--repeats", type=int, default=3,
                        help="repetitions; the best time counts (default 3)")
    parser.add_argument("--seed", type=int, default=0)
    args = parser.parse_args(argv)

    if not compiled_available():
        print("compiled kernels are not built; nothing to compare", file=sys.stderr)
        return 1

    pure = get_backend("pure")
    compiled = get_backend("compiled")

    workloads = [
        ("uvs n=2 k=1", "uvs_batch", ((0.7, 1.9), 1)),
        ("uvs n=4 k=2", "uvs_batch", ((0.7, 1.9, 3.1, 5.2), 2)),
        ("ghz n=3", "ghz_batch", ((0.4, 1.1, 2.6),)),
        ("ghz n=6", "ghz_batch", ((0.4, 1.1, 2.6, 3.0, 0.2, 5.1),)),
        ("lemma1", "lemma1_batch", ()),
    ]

    print(f"count={args.count} repeats={args.repeats} seed={args.seed}")
    print(f"{'workload':<14} {'pure':>10} {'compiled':>10} {'speedup':>9}  parity")
    all_equal = True
    for label, kind, extra in workloads:
        def run(backend, kind=kind, extra=extra):
            stream = make_stream(args.seed, STREAM_TEST, 0)
            return getattr(backend, kind)(stream, *extra, args.count)

        t_pure, out_pure = best_time(lambda: run(pure), args.repeats)
        t_comp, out_comp = best_time(lambda: run(compiled), args.repeats)

        equal = all(
            np.array_equal(
                np.asarray(a).view(np.uint64) if a.dtype == np.float64 else a,
                np.asarray(b).view(np.uint64) if b.dtype == np.float64 else b,
            )
            for a, b in zip(as_arrays(out_pure), as_arrays(out_comp))
        )
        all_equal &= equal
        print(f"{label:<14} {t_pure:>9.3f}s {t_comp:>9.3f}s {t_pure / t_comp:>8.1f}x"
              f"  {'bit-identical' if equal else 'MISMATCH'}")

    if not all_equal:
        print("backend outputs diverged; see above", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
