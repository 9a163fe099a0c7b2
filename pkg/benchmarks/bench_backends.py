#!/usr/bin/env python3
"""Timing comparison of the two sample-synthesis backends.

Runs the same trial batches through the numba kernel and the pure-numpy
chunked kernel, reports trials/second for each, and cross-checks that
the two agree. Usage:

    python3 benchmarks/bench_backends.py [--trials N] [--prd PRD ...]

The numba column is skipped when numba is not installed.
"""

import argparse
import time

import numpy as np

from cubicber import montecarlo
from cubicber.params import SystemParams, dbm_to_watts, derive


def available_backends():
    try:
        from cubicber import _mc_numba
        if _mc_numba.NUMBA_OK:
            return ("numba", "numpy")
    except ImportError:
        pass
    return ("numpy",)


def run(sp, dp, trials, backend):
    t0 = time.perf_counter()
    got = montecarlo.generate_samples(sp, dp, bit=1, n_trials=trials,
                                      orders=(1, 2, 3), seed=12,
                                      backend=backend)
    dt = time.perf_counter() - t0
    return dt, got


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--trials", type=int, default=50_000)
    ap.add_argument("--prd", type=float, nargs="+",
                    default=[10.0, 25.0, 50.0])
    args = ap.parse_args()

    backends = available_backends()
    if "numba" in backends:
        # trigger compilation outside the timed region
        sp = SystemParams(tau_c=100e-15, prd=10.0, wavelength=1.55e-6,
                          g_amp=1e5, p_r=dbm_to_watts(33.0))
        run(sp, derive(sp), 16, "numba")

    print(f"{'prd':>6s} {'backend':>8s} {'trials':>9s} {'time':>8s} "
          f"{'trials/s':>10s}")
    for prd in args.prd:
        sp = SystemParams(tau_c=100e-15, prd=prd, wavelength=1.55e-6,
                          g_amp=1e5, p_r=dbm_to_watts(33.0))
        dp = derive(sp)
        results = {}
        for backend in backends:
            dt, got = run(sp, dp, args.trials, backend)
            results[backend] = got
            print(f"{prd:6g} {backend:>8s} {args.trials:9d} {dt:7.2f}s "
                  f"{args.trials / dt:10.0f}")
        if len(results) == 2:
            worst = max(
                float(np.max(np.abs(results["numba"][o].values
                                    - results["numpy"][o].values)
                             / np.abs(results["numpy"][o].values).max()))
                for o in (1, 2, 3))
            print(f"{'':6s} cross-backend worst rel diff: {worst:.2e}")


if __name__ == "__main__":
    main()
