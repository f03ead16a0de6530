"""Benchmark the hot kernels on both backends (numba vs pure numpy).

Usage: python benchmarks/bench_kernels.py [--repeat N]

The numba backend JIT-compiles on first use; a warm-up call is excluded from
the timings.  On single-core machines expect the two backends to be close
(the contractions are BLAS in both; only the exponential assembly differs).
"""

from __future__ import annotations

import argparse
import time

import numpy as np

from hszego import (
    GridSpec,
    LambdaSignature,
    ScalarField,
    WavePacketSpec,
    frequency_pairing,
    make_wave_packet,
    scalar_pipeline_project,
    szego_apply_direct,
)
from hszego import _kernels

SIG1 = LambdaSignature((1.0,))
SIG2 = LambdaSignature((1.0, 1.0))


def _timed(fn, repeat):
    fn()  # warm-up (JIT compile on the numba backend)
    best = np.inf
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - t0)
    return best


def build_cases():
    grid1 = GridSpec.make(4.0, 33, 16.0, 128)
    u1 = make_wave_packet(WavePacketSpec(alpha=(1,), t_low=1.0, t_high=3.2, order=6), SIG1, grid1)
    g1 = make_wave_packet(WavePacketSpec(alpha=(0,), t_low=1.5, t_high=3.6, order=6), SIG1, grid1)

    grid2 = GridSpec.make(3.5, 17, 30.0, 128)
    sig_m = LambdaSignature((-1.0, 1.0))
    u2 = make_wave_packet(
        WavePacketSpec(alpha=(0, 0), t_low=1.0, t_high=1.8, conjugated_axes=(1,)), sig_m, grid2
    )
    v2 = ScalarField(grid=grid2, values=u2.values)

    gridm = GridSpec.make(3.4, 17, 20.0, 65)
    um = make_wave_packet(WavePacketSpec(alpha=(1,), t_low=1.1, t_high=2.3), SIG1, gridm)
    gm = make_wave_packet(WavePacketSpec(alpha=(0,), t_low=1.2, t_high=2.2), SIG1, gridm)

    return [
        ("pipeline n=1 (33^2 x 128)", lambda: scalar_pipeline_project(u1, SIG1)),
        ("pipeline n=2 (17^4 x 128)", lambda: scalar_pipeline_project(
            ScalarField(grid=grid2, values=v2.values), SIG2, enforce_budget=False)),
        ("dense pairing (17^2 x 65)", lambda: frequency_pairing(um, gm, SIG1)),
        ("direct kernel (17^2 x 65)", lambda: szego_apply_direct(um, SIG1, epsilon=0.43, t_points=256)),
    ]


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--repeat", type=int, default=3)
    args = ap.parse_args()

    backends = ["numpy"]
    if _kernels.HAVE_NUMBA:
        backends.append("numba")
    else:
        print("numba not importable; benchmarking numpy only")

    cases = build_cases()
    results = {}
    for be in backends:
        _kernels.set_backend(be)
        for name, fn in cases:
            results[(be, name)] = _timed(fn, args.repeat)

    width = max(len(name) for name, _ in cases)
    header = f"{'kernel':<{width}}  " + "  ".join(f"{be:>10}" for be in backends)
    print(header)
    print("-" * len(header))
    for name, _ in cases:
        row = f"{name:<{width}}  " + "  ".join(
            f"{results[(be, name)]:>9.3f}s" for be in backends
        )
        print(row)
    if len(backends) == 2:
        print("-" * len(header))
        for name, _ in cases:
            ratio = results[("numpy", name)] / results[("numba", name)]
            print(f"{name:<{width}}  numpy/numba speed ratio: {ratio:.2f}x")


if __name__ == "__main__":
    main()
