"""Compare wall-clock speed of the two engine backends on identical runs.

Usage: python -m agora.benchmark [--iterations N] [--seed N] [--repeats K]

Besides timing, the script asserts that both backends produced the same
trajectory, so a benchmark run doubles as a quick parity check.
"""

from __future__ import annotations

import argparse
import time

from .core import MarketParams
from .engine import Simulation, available_backends


def time_backend(backend: str, params: MarketParams, seed: int, iterations: int, repeats: int):
    best = float("inf")
    sim = None
    for _ in range(repeats):
        sim = Simulation(params, seed=seed, backend=backend)
        t0 = time.perf_counter()
        sim.run(iterations)
        best = min(best, time.perf_counter() - t0)
    return best, sim


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--iterations", type=int, default=10000)
    parser.add_argument("--seed", type=int, default=0)
    parser.add_argument("--repeats", type=int, default=3)
    args = parser.parse_args(argv)

    params = MarketParams()
    backends = available_backends()
    print(f"backends available: {', '.join(backends)}")
    results = {}
    sims = {}
    for backend in backends:
        elapsed, sim = time_backend(backend, params, args.seed, args.iterations, args.repeats)
        results[backend] = elapsed
        sims[backend] = sim
        rate = args.iterations / elapsed
        print(f"{backend:>8}: {elapsed * 1000:8.1f} ms for {args.iterations} iterations "
              f"({rate:,.0f} iterations/s)")

    if len(backends) == 2:
        a, b = sims["compiled"], sims["python"]
        if a.snapshots != b.snapshots or a.trades != b.trades:
            print("PARITY FAILURE: backends disagree on the trajectory")
            return 1
        print(f"parity: trajectories identical; "
              f"speedup x{results['python'] / results['compiled']:.1f}")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
