"""Benchmark the compiled Ryser kernel against the numpy fallback.

Usage: python benchmarks/bench_permanent.py [max_n]

Prints per-size timings for both kernels on random complex matrices, plus a
small end-to-end timing of the two-photon output distribution that drives
them in practice.
"""

import sys
import time

import numpy as np

from erravg.fock import output_distribution
from erravg.permanent import backend, permanent, ryser_permanent_numpy


def time_call(fn, *args, repeats: int) -> float:
    best = float("inf")
    for _ in range(repeats):
        start = time.perf_counter()
        fn(*args)
        best = min(best, time.perf_counter() - start)
    return best


def main() -> None:
    max_n = int(sys.argv[1]) if len(sys.argv) > 1 else 14
    rng = np.random.default_rng(0)
    print(f"active backend: {backend()}")
    print(f"{'n':>3} {'compiled (ms)':>14} {'numpy (ms)':>12} {'speedup':>8}")
    for n in range(2, max_n + 1):
        a = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
        repeats = 200 if n <= 8 else (20 if n <= 12 else 3)
        t_fast = time_call(permanent, a, repeats=repeats)
        t_slow = time_call(ryser_permanent_numpy, a, repeats=repeats)
        check = abs(permanent(a) - ryser_permanent_numpy(a))
        assert check <= 1e-8 * max(1.0, abs(permanent(a))), "kernels disagree"
        print(f"{n:>3} {t_fast * 1e3:>14.4f} {t_slow * 1e3:>12.4f} {t_slow / t_fast:>8.1f}x")

    z = rng.standard_normal((12, 12)) + 1j * rng.standard_normal((12, 12))
    q, _ = np.linalg.qr(z)
    state = (1, 1) + (0,) * 10
    t_dist = time_call(output_distribution, q, state, repeats=5)
    print(f"\ntwo-photon distribution on 12 modes: {t_dist * 1e3:.2f} ms")


if __name__ == "__main__":
    main()
