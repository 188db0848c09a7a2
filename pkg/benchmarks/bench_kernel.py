#!/usr/bin/env python3
"""Time the compiled kernel against the pure-Python fallback.

    python benchmarks/bench_kernel.py --n 100000 --repeat 5 [--json out.json]

Each backend runs the same random-walk trace under every scheme; results
are checked for bit-identical records before timing is reported.
"""

import argparse
import json
import statistics
import sys
import time

import numpy as np

from dualpred import GainSet, available_backends, dual_run

SCHEMES = {
    "PAST": GainSet(1, 0, 0),
    "AVERAGE": GainSet(0, 1, 0),
    "LINEAR": GainSet(1, 0, 1),
    "PID": GainSet(0.6, 0.4, 0.3),
}


def time_backend(backend, samples, gains, m, eps, repeat):
    times = []
    result = None
    for _ in range(repeat):
        start = time.perf_counter()
        result = dual_run(samples, gains, m, eps, backend=backend)
        times.append(time.perf_counter() - start)
    return result, times


def main(argv=None):
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--n", type=int, default=100_000, help="samples per run")
    parser.add_argument("--m", type=int, default=3)
    parser.add_argument("--eps", type=float, default=0.5)
    parser.add_argument("--repeat", type=int, default=5)
    parser.add_argument("--seed", type=int, default=0)
    parser.add_argument("--json", help="write results here")
    args = parser.parse_args(argv)

    backends = available_backends()
    if "cython" not in backends:
        print("compiled kernel not available; timing the Python fallback only", file=sys.stderr)

    samples = np.cumsum(np.random.default_rng(args.seed).uniform(-1, 1, args.n))
    rows = []
    print(f"{'scheme':<8} {'backend':<7} {'median s':>10} {'Msteps/s':>9} {'speedup':>8}")
    for name, gains in SCHEMES.items():
        results = {}
        medians = {}
        for backend in backends:
            result, times = time_backend(backend, samples, gains, args.m, args.eps, args.repeat)
            results[backend] = result
            medians[backend] = statistics.median(times)
        reference = results["python"]
        for backend, result in results.items():
            if not np.array_equal(result.y_sensor.view(np.uint64), reference.y_sensor.view(np.uint64)):
                print(f"{name}: {backend} disagrees with python backend", file=sys.stderr)
                return 1
        for backend in backends:
            speedup = medians["python"] / medians[backend]
            rate = args.n / medians[backend] / 1e6
            print(f"{name:<8} {backend:<7} {medians[backend]:>10.5f} {rate:>9.2f} {speedup:>7.1f}x")
            rows.append(
                {
                    "scheme": name,
                    "backend": backend,
                    "n": args.n,
                    "median_seconds": medians[backend],
                    "n_tx": results[backend].n_tx,
                    "speedup_vs_python": speedup,
                }
            )

    if args.json:
        with open(args.json, "w", encoding="utf-8") as fh:
            json.dump(rows, fh, indent=2)
    return 0


if __name__ == "__main__":
    sys.exit(main())
