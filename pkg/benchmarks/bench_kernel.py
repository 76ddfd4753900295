"""Compare the compiled round kernel with the pure-Python fallback.

Usage: python3 benchmarks/bench_kernel.py [--repeat N]

Times one full-swarm decision pass on random snapshots of several sizes, then
a small fsync sweep end to end with each backend.
"""

import argparse
import random
import time

from gridscatter import kernel, sim
from gridscatter.cli import generate_initial


def snapshots(n, count, seed):
    rng = random.Random(seed)
    out = []
    for _ in range(count):
        c = generate_initial(n, 15, rng.randrange(2**32))
        out.append(([p.x for p in c.values()], [p.y for p in c.values()]))
    return out


def time_pass(fn, snaps, repeat):
    best = float("inf")
    for _ in range(repeat):
        start = time.perf_counter()
        for xs, ys in snaps:
            fn(xs, ys)
        best = min(best, time.perf_counter() - start)
    return best / len(snaps)


def time_sweep(decide_all, runs):
    saved = kernel.decide_all
    kernel.decide_all = decide_all
    try:
        start = time.perf_counter()
        for n, seed in runs:
            sim.run(generate_initial(n, 15, seed), sim.Fsync())
        return time.perf_counter() - start
    finally:
        kernel.decide_all = saved


def main():
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--repeat", type=int, default=5)
    args = parser.parse_args()
    if kernel.decide_all_compiled is None:
        raise SystemExit("compiled kernel not built; run `pip install -e . --no-build-isolation`")

    print(f"{'n':>5} {'python us':>11} {'cython us':>11} {'speedup':>8}")
    for n in (5, 10, 30, 100, 300):
        snaps = snapshots(n, 40, n)
        py = time_pass(kernel.decide_all_python, snaps, args.repeat)
        cy = time_pass(kernel.decide_all_compiled, snaps, args.repeat)
        print(f"{n:>5} {py * 1e6:>11.1f} {cy * 1e6:>11.1f} {py / cy:>7.1f}x")

    runs = [(n, seed) for n in (10, 20, 30) for seed in range(3)]
    py = time_sweep(kernel.decide_all_python, runs)
    cy = time_sweep(kernel.decide_all_compiled, runs)
    print(f"fsync sweep of {len(runs)} runs: python {py:.2f}s, cython {cy:.2f}s ({py / cy:.1f}x)")


if __name__ == "__main__":
    main()
