"""Compare the pure-Python and compiled FSA kernels.

Runs the same workloads against both backends and prints a table of
per-call timings plus the speedup. Usage:

    python3 benchmarks/bench_backends.py [--repeats 5]
"""

from __future__ import annotations

import argparse
import random
import time

from polich.kernels import available_backends, load_backend


def bench_valid_mask(backend, calls: int) -> float:
    rng = random.Random(0)
    cases = [(rng.randrange(3), rng.randrange(4), rng.randrange(1, 1 << 6))
             for _ in range(1024)]
    start = time.perf_counter()
    for i in range(calls):
        phase, balance, unused = cases[i % 1024]
        backend.valid_mask(phase, balance, unused, False, True, 3, False)
    return time.perf_counter() - start


def bench_random_walks(backend, walks: int) -> float:
    rng = random.Random(1)
    start = time.perf_counter()
    for _ in range(walks):
        phase, balance, unused = 0, 0, (1 << rng.randint(1, 6)) - 1
        for _ in range(24):
            mask = backend.valid_mask(phase, balance, unused, False, True, 3, False)
            if mask == 0:
                break
            token = max(t for t in range(17) if mask >> t & 1)
            phase, balance, unused = backend.step(phase, balance, unused, token)
    return time.perf_counter() - start


def main() -> None:
    parser = argparse.ArgumentParser()
    parser.add_argument("--repeats", type=int, default=5)
    parser.add_argument("--calls", type=int, default=200_000)
    parser.add_argument("--walks", type=int, default=20_000)
    args = parser.parse_args()

    backends = available_backends()
    if "compiled" not in backends:
        print("compiled backend unavailable; reinstall without POLICH_PURE")
    workloads = [
        ("valid_mask", bench_valid_mask, args.calls),
        ("random_walks", bench_random_walks, args.walks),
    ]
    results: dict[tuple[str, str], float] = {}
    for name in backends:
        backend = load_backend(name)
        for label, fn, size in workloads:
            best = min(fn(backend, size) for _ in range(args.repeats))
            results[(label, name)] = best

    print(f"{'workload':<14} {'backend':<10} {'seconds':>9} {'per call (us)':>14}")
    for label, fn, size in workloads:
        for name in backends:
            seconds = results[(label, name)]
            print(f"{label:<14} {name:<10} {seconds:>9.4f} {1e6 * seconds / size:>14.3f}")
        if "pure" in backends and "compiled" in backends:
            ratio = results[(label, "pure")] / results[(label, "compiled")]
            print(f"{label:<14} speedup (pure/compiled): {ratio:.2f}x")


if __name__ == "__main__":
    main()
