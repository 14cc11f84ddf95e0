"""Compare the compiled and pure-Python step kernels.

    python3 benchmarks/bench_backends.py [--steps N] [--agents N] [--capacity M]

Both kernels start from the same state and seed; the script also checks that
they end in the same state.
"""

import argparse
import time

import numpy as np

from srmwa._backend import KERNELS
from srmwa.model import ModelParams
from srmwa.rng import RandomSource
from srmwa.simulator import advance, init_state


def time_backend(name, params, steps, seed, repeats):
    best, state = float("inf"), None
    for _ in range(repeats):
        state = init_state(params)
        rng = RandomSource(seed)
        start = time.perf_counter()
        advance(state, params, rng, steps, backend=name)
        best = min(best, time.perf_counter() - start)
    return best, state


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--steps", type=int, default=200_000)
    ap.add_argument("--agents", type=int, default=100)
    ap.add_argument("--items", type=int, default=100)
    ap.add_argument("--capacity", type=int, default=10)
    ap.add_argument("--pressure", type=float, default=0.01)
    ap.add_argument("--repeats", type=int, default=3)
    ap.add_argument("--seed", type=int, default=1)
    args = ap.parse_args()

    params = ModelParams(args.agents, args.items, args.capacity, args.pressure)
    results = {}
    for name in sorted(KERNELS):
        steps = args.steps if name == "compiled" else max(1, args.steps // 10)
        seconds, state = time_backend(name, params, steps, args.seed, args.repeats)
        results[name] = (steps, seconds, state)
        print(f"{name:>9}: {steps:>9} steps in {seconds:8.4f} s  "
              f"{steps / seconds:14,.0f} steps/s  {1e9 * seconds / steps:9.1f} ns/step")

    if len(results) == 2:
        speedup = (results["python"][1] / results["python"][0]) / (
            results["compiled"][1] / results["compiled"][0])
        print(f"speedup: {speedup:.0f}x")
        # same number of steps on both for the equality check
        n = results["python"][0]
        ends = [time_backend(name, params, n, args.seed, 1)[1] for name in ("compiled", "python")]
        same = np.array_equal(ends[0].stocks, ends[1].stocks)
        print(f"identical final state after {n} steps: {same}")
    else:
        print("compiled kernel not built; only the pure-Python kernel was timed")


if __name__ == "__main__":
    main()
