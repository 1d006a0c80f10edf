"""Timing comparison of the compiled alignment kernel vs the numpy fallback.

Usage: python3 benchmarks/bench_align.py [--sizes 2000x800,8000x3000,...]
"""

import argparse
import random
import time

from phonalign.align import AlignConfig, _purepy
from phonalign.align import core
from phonalign.labels import DETECTABLE

try:
    from phonalign.align import _kernel
except ImportError:
    _kernel = None


def _pair(rng, m, n):
    s = [rng.choice(DETECTABLE) for _ in range(m)]
    t = [rng.choice(DETECTABLE) for _ in range(n)]
    return core._encode(s, t)


def _time_last_row(backend, a, b, cfg, repeats=3):
    best = float("inf")
    row = None
    for _ in range(repeats):
        start = time.perf_counter()
        row = backend.last_row(a, b, cfg.copy_cost, cfg.delete_cost,
                               cfg.insert_cost, cfg.replace_cost)
        best = min(best, time.perf_counter() - start)
    return best, row


def main():
    parser = argparse.ArgumentParser()
    parser.add_argument("--sizes", default="2000x800,8000x3000,20000x8000",
                        help="comma-separated MxN problem sizes")
    args = parser.parse_args()

    cfg = AlignConfig()
    rng = random.Random(0)
    print(f"{'size':>14} {'compiled':>10} {'pure':>10} {'speedup':>8}")
    for spec in args.sizes.split(","):
        m, n = (int(x) for x in spec.lower().split("x"))
        a, b = _pair(rng, m, n)
        t_pure, row_pure = _time_last_row(_purepy, a, b, cfg)
        if _kernel is None:
            print(f"{spec:>14} {'n/a':>10} {t_pure:>9.3f}s {'':>8}")
            continue
        t_comp, row_comp = _time_last_row(_kernel, a, b, cfg)
        if abs(row_comp[-1] - row_pure[-1]) > 1e-9:
            raise SystemExit(f"backend mismatch at {spec}: "
                             f"{row_comp[-1]} vs {row_pure[-1]}")
        print(f"{spec:>14} {t_comp:>9.3f}s {t_pure:>9.3f}s "
              f"{t_pure / t_comp:>7.1f}x")
    if _kernel is None:
        print("compiled kernel not built; showing fallback timings only")


if __name__ == "__main__":
    main()
