"""Time the compiled and numpy trajectory kernels on the same batches.

    python benchmarks/bench_simulate.py --trials 100000 --repeat 3
"""
import argparse
import time

import numpy as np

from nbilliard import kernels
from nbilliard.collisions import BilliardSystem
from nbilliard.jacobi import JacobiMasses
from nbilliard.sim import _off_wall_samples, chunk_rng, collision_arrangement, reduced_arrangement

CASES = {
    "reduced_equal": lambda: reduced_arrangement(),
    "reduced_unequal": lambda: reduced_arrangement(JacobiMasses(0.05, 3.0, 1.0)),
    "line_5_bodies": lambda: collision_arrangement(BilliardSystem(5, 1, [1.0, 2.0, 0.5, 3.0, 1.5])),
}


def best_of(fn, repeat):
    times = []
    for _ in range(repeat):
        t0 = time.perf_counter()
        out = fn()
        times.append(time.perf_counter() - t0)
    return min(times), out


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--trials", type=int, default=50_000)
    ap.add_argument("--repeat", type=int, default=3)
    ap.add_argument("--max-events", type=int, default=20)
    args = ap.parse_args()

    backends = ["numpy"] + (["cython"] if kernels.HAVE_COMPILED else [])
    if len(backends) == 1:
        print("compiled kernel not built; timing numpy only")
    print(f"{'case':<18}{'backend':<9}{'seconds':>9}{'traj/s':>12}")
    for name, make in CASES.items():
        arr = make()
        perps = arr.perp_bases()
        x, v = _off_wall_samples(arr, perps, "collinear", args.trials, chunk_rng(0, 0))
        results = {}
        for b in backends:
            secs, out = best_of(lambda: kernels.simulate_batch(x, v, perps, args.max_events, backend=b), args.repeat)
            results[b] = (secs, out)
            print(f"{name:<18}{b:<9}{secs:>9.3f}{args.trials / secs:>12,.0f}")
        if len(results) == 2:
            same = all(np.array_equal(p, q) for p, q in zip(results["numpy"][1], results["cython"][1]))
            speedup = results["numpy"][0] / results["cython"][0]
            print(f"{'':<18}speedup {speedup:.1f}x, outputs identical: {same}")


if __name__ == "__main__":
    main()
