"""Benchmark the Monte Carlo shot kernel: numba @njit versus pure numpy.

Run with:  python3 benchmarks/kernel_benchmark.py [--shots N] [--photons n]

Both backends are exercised on the same parameters and the tallies are
checked for exact equality before timing.
"""

import argparse
import importlib
import os
import time

import numpy as np


def run_backend(backend, seq_args, shots):
    os.environ["LOOPCLUSTER_BACKEND"] = backend
    import loopcluster._mc_kernels as k
    import loopcluster.montecarlo as mc

    importlib.reload(k)
    importlib.reload(mc)
    from loopcluster.protocol import NoiseModel
    from loopcluster.scaling import PRESETS

    seq = mc.PulseSequence.for_photons(seq_args["photons"])
    noise = NoiseModel.distinguishing(0.9, g2=0.02)
    bg = mc.BackgroundModel()
    kwargs = dict(phi=0.9, background=bg)
    # warm-up compiles the numba kernel and touches the numpy path
    mc.run_sequence(seq, noise, PRESETS["paper"], 10_000, 1, **kwargs)
    t0 = time.perf_counter()
    tally = mc.run_sequence(seq, noise, PRESETS["paper"], shots, 42, **kwargs)
    dt = time.perf_counter() - t0
    return tally.counts, dt


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--shots", type=int, default=5_000_000)
    parser.add_argument("--photons", type=int, default=3)
    args = parser.parse_args()

    results = {}
    for backend in ("numpy", "numba"):
        try:
            counts, dt = run_backend(backend, {"photons": args.photons}, args.shots)
        except ImportError:
            print(f"{backend:>6}: unavailable")
            continue
        results[backend] = (counts, dt)
        rate = args.shots / dt / 1e6
        print(f"{backend:>6}: {dt:8.3f} s   {rate:7.2f} Mshots/s   total counts {counts.sum()}")

    if len(results) == 2:
        same = np.array_equal(results["numpy"][0], results["numba"][0])
        print("tallies identical:", same)
        if not same:
            raise SystemExit(1)
        print(f"speedup numba/numpy: {results['numpy'][1] / results['numba'][1]:.1f}x")


if __name__ == "__main__":
    main()
