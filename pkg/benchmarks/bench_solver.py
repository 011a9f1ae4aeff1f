"""Time the numba and numpy batched solve paths on identical random batches.

Usage::

    python benchmarks/bench_solver.py [--sizes 100,1000,10000,100000] [--repeat 5]

Both paths run the same elimination algorithm, so the printed maximum
amplitude difference should sit at rounding level.
"""

import argparse
import time

import numpy as np

from kleinslab._jit import HAVE_NUMBA
from kleinslab.matching import scatter


def draw(n, rng):
    k1, k2, chi0 = rng.uniform(0.1, 10, (3, n))
    a = rng.uniform(0.1, 30, n) / chi0
    edges = (rng.uniform(0, 3, n), rng.uniform(-5, 5, n), rng.uniform(0, 3, n), rng.uniform(-5, 5, n))
    return (k1, k2, chi0, a, "general", *edges)


def best_time(args, use_numba, repeat):
    times = []
    for _ in range(repeat):
        t0 = time.perf_counter()
        out = scatter(*args, use_numba=use_numba)
        times.append(time.perf_counter() - t0)
    return min(times), out


def main(argv=None):
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--sizes", default="100,1000,10000,100000")
    parser.add_argument("--repeat", type=int, default=5)
    parser.add_argument("--seed", type=int, default=0)
    opts = parser.parse_args(argv)
    if not HAVE_NUMBA:
        raise SystemExit("numba is not importable; nothing to compare")

    rng = np.random.default_rng(opts.seed)
    # compile outside the timed region
    scatter(*draw(4, rng), use_numba=True)

    print(f"{'batch':>8} {'numba [ms]':>11} {'numpy [ms]':>11} {'speedup':>8} {'max |dR|':>10}")
    for n in (int(s) for s in opts.sizes.split(",")):
        args = draw(n, rng)
        t_jit, o_jit = best_time(args, True, opts.repeat)
        t_np, o_np = best_time(args, False, opts.repeat)
        diff = np.max(np.abs(o_jit["R"] - o_np["R"]))
        print(f"{n:>8} {1e3 * t_jit:>11.2f} {1e3 * t_np:>11.2f} {t_np / t_jit:>7.2f}x {diff:>10.1e}")


if __name__ == "__main__":
    main()
