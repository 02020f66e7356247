"""Time the numba and numpy kernel backends side by side.

    python benchmarks/bench_kernels.py --n 320 1000 --repeat 20

Both backends are called directly, so a single process compares them; the
first numba call per signature is a warm-up and is not timed.
"""

import argparse
import time

import numpy as np

from gmic import _kernels as K
from gmic._backend import NUMBA_AVAILABLE
from gmic.charmat import max_grid_bound
from gmic.grid import Sample, equipartition_labels, rank_transform


def _axis_inputs(rng, n):
    x = rng.random(n)
    r = rank_transform(Sample(x, x ** 2 + rng.normal(0, 0.2, n)))
    bound = max_grid_bound(n)
    rows = equipartition_labels(r.y, 2)[r.y.ranks][r.x.order]
    return (np.ascontiguousarray(r.x.group_of_rank, dtype=np.int64),
            np.ascontiguousarray(rows, dtype=np.int64), 2, bound // 2, 15)


def _best_time(func, args, repeat):
    func(*args)
    best = np.inf
    for _ in range(repeat):
        t = time.perf_counter()
        func(*args)
        best = min(best, time.perf_counter() - t)
    return best


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--n", type=int, nargs="+", default=[320, 1000, 2000])
    ap.add_argument("--repeat", type=int, default=10)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args(argv)
    if not NUMBA_AVAILABLE:
        ap.error("numba is not installed; nothing to compare")

    rng = np.random.default_rng(args.seed)
    kernels = [
        ("optimize_axis", K._optimize_axis_nb, K._optimize_axis_np, _axis_inputs),
        ("dcov_sums", K._dcov_sums_nb, K._dcov_sums_np,
         lambda r, n: (r.random(n), r.random(n))),
    ]
    print(f"{'kernel':<15}{'n':>6}{'numba ms':>12}{'numpy ms':>12}{'speedup':>10}")
    for name, fast, slow, make in kernels:
        for n in args.n:
            inputs = make(rng, n)
            a = _best_time(fast, inputs, args.repeat)
            b = _best_time(slow, inputs, args.repeat)
            print(f"{name:<15}{n:>6}{a * 1e3:>12.3f}{b * 1e3:>12.3f}{b / a:>9.1f}x")


if __name__ == "__main__":
    main()
