"""Compare the compiled and pure Python kernels.

    python3 benchmarks/bench_kernels.py [--repeat 3]

Prints one line per kernel with the best time of each backend and the speedup.
The compiled column is skipped when the extension is not built.
"""

from __future__ import annotations

import argparse
import random
import timeit

from mockheegner import _kernels_py, kernels
from mockheegner.lseries import primes_below

try:
    from mockheegner import _kernels as compiled
except ImportError:
    compiled = None


def workloads():
    n = 3 * 151**2
    ps = primes_below(20000)
    ap = dict(zip(ps, _kernels_py.ap_batch(n, ps)))
    rng = random.Random(0)
    a = [rng.randint(-50, 50) for _ in range(2000)]
    b = [rng.randint(-50, 50) for _ in range(2000)]
    return {
        "ap_batch(3*151^2, primes < 20000)": lambda m: m.ap_batch(n, ps),
        "an_table(M = 20000)": lambda m: m.an_table(ap, [3, 151], 20000),
        "series_mul(2000 x 2000)": lambda m: m.series_mul(a, b, 2000),
    }


def main(argv=None):
    ap = argparse.ArgumentParser()
    ap.add_argument("--repeat", type=int, default=3)
    args = ap.parse_args(argv)
    print(f"active backend: {kernels.BACKEND}")
    print(f"{'kernel':40s} {'python':>10s} {'cython':>10s} {'speedup':>8s}")
    for name, fn in workloads().items():
        t_py = min(timeit.repeat(lambda: fn(_kernels_py), number=1, repeat=args.repeat))
        if compiled is not None:
            if fn(compiled) != fn(_kernels_py):
                raise SystemExit(f"{name}: backends disagree")
            t_cy = min(timeit.repeat(lambda: fn(compiled), number=1, repeat=args.repeat))
            print(f"{name:40s} {t_py:10.4f} {t_cy:10.4f} {t_py / t_cy:7.1f}x")
        else:
            print(f"{name:40s} {t_py:10.4f} {'-':>10s} {'-':>8s}")


if __name__ == "__main__":
    main()
