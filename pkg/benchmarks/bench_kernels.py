#!/usr/bin/env python3
"""Benchmark the compiled kernels against the pure-numpy fallback.

Sizes mirror the heaviest real workload (n = 20, omega = 1023: K x V about
1025 x 1023) plus a small case. Run after `pip install -e .`; if the
extension is missing only the python column appears.
"""

from __future__ import annotations

import time

import numpy as np

from noisyshor.kernels import available_backends


def time_call(fn, *args, repeats: int = 3) -> float:
    best = float("inf")
    for _ in range(repeats):
        t0 = time.perf_counter()
        fn(*args)
        best = min(best, time.perf_counter() - t0)
    return best


def bench_case(K: int, V: int, rng: np.random.Generator) -> list[tuple[str, dict[str, float]]]:
    phases = rng.random((K, V))
    zbase = np.ascontiguousarray(np.exp(2j * np.pi * phases))
    noise = np.ascontiguousarray(rng.standard_normal((K, V)) * 0.1)
    out1 = np.empty(V)
    out4 = np.empty((4, V))
    amps = (rng.standard_normal(1 << 18) + 1j * rng.standard_normal(1 << 18))
    amps /= np.linalg.norm(amps)

    rows = []
    for label, runner in (
        ("colsum_sq_phases", lambda impl: impl.colsum_sq_phases(phases, out1)),
        ("colsum_sq_scaled", lambda impl: impl.colsum_sq_scaled(zbase, noise, 0.5, out1)),
        ("colsum_sq_doubling(4)", lambda impl: impl.colsum_sq_doubling(zbase, noise, 0.125, 3, out4)),
        ("controlled_phase(2^18)", lambda impl: impl.controlled_phase(amps, 18, 3, 11, 0.123)),
    ):
        times = {
            name: time_call(runner, impl)
            for name, impl in available_backends().items()
        }
        rows.append((label, times))
    return rows


def main() -> None:
    rng = np.random.default_rng(0)
    backends = list(available_backends())
    print(f"backends available: {', '.join(backends)}")
    for K, V in ((128, 1024), (1025, 1023)):
        print(f"\nK={K}, V={V}")
        header = f"{'kernel':<24}" + "".join(f"{b:>12}" for b in backends)
        if len(backends) == 2:
            header += f"{'speedup':>10}"
        print(header)
        for label, times in bench_case(K, V, rng):
            row = f"{label:<24}" + "".join(f"{times[b] * 1e3:>10.2f}ms" for b in backends)
            if "compiled" in times and "python" in times:
                row += f"{times['python'] / times['compiled']:>9.1f}x"
            print(row)


if __name__ == "__main__":
    main()
