#!/usr/bin/env python3
"""Compare the compiled kernels against the pure-Python fallback.

    python3 benchmarks/bench_kernels.py [--reps 2000] [--e2e-reps 2000]

Per-kernel timings call both backends directly. The end-to-end timing runs a
cooperative per-hop experiment in a subprocess per backend, since the
backend is chosen once at import.
"""
import argparse
import os
import subprocess
import sys
import timeit

import numpy as np

from coopgeo import _purekernels

try:
    from coopgeo import _fastkernels
except ImportError:
    _fastkernels = None


def kernel_cases(rng):
    xs = rng.uniform(-1, 1, 12).tolist()
    ys = rng.uniform(-1, 1, 12).tolist()
    return {
        "arc_metric_max": lambda k: k.arc_metric_max(
            0.0, 0.0, 1.0, 0.0, np.pi / 3, 0.0, 0.0, 1.0, 0.0, 0.25, 0.375, 2.0,
            1001, 1e-9),
        "proximity_matrix(12)": lambda k: k.proximity_matrix(0.0, 0.0, xs, ys, 1e-9),
        "ser_mqam": lambda k: k.ser_mqam(300.0, 64.0),
        "packet_success_snr": lambda k: k.packet_success_snr(300.0, 64.0, 2051.0),
    }


E2E = ("import time; from coopgeo.simcore.config import SimConfig; "
       "from coopgeo.simcore.experiment import run_replications; "
       "from coopgeo import kernels; "
       "cfg = SimConfig(neighbor_count=10, replications={reps}); "
       "t = time.perf_counter(); run_replications(cfg); "
       "print(kernels.BACKEND, time.perf_counter() - t)")


def end_to_end(reps, pure):
    env = dict(os.environ)
    env["COOPGEO_PURE_PYTHON"] = "1" if pure else "0"
    out = subprocess.run([sys.executable, "-c", E2E.format(reps=reps)], env=env,
                         check=True, capture_output=True, text=True).stdout.split()
    return out[0], float(out[1])


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--reps", type=int, default=2000, help="calls per kernel timing")
    ap.add_argument("--e2e-reps", type=int, default=2000, help="replications end to end")
    args = ap.parse_args(argv)

    cases = kernel_cases(np.random.default_rng(0))
    print(f"{'kernel':24s} {'python us':>10s} {'cython us':>10s} {'speedup':>8s}")
    for name, fn in cases.items():
        tp = min(timeit.repeat(lambda: fn(_purekernels), number=args.reps, repeat=3))
        tp = tp / args.reps * 1e6
        if _fastkernels is None:
            print(f"{name:24s} {tp:10.2f} {'n/a':>10s}")
            continue
        tc = min(timeit.repeat(lambda: fn(_fastkernels), number=args.reps, repeat=3))
        tc = tc / args.reps * 1e6
        print(f"{name:24s} {tp:10.2f} {tc:10.2f} {tp / tc:8.1f}x")

    print()
    b_pure, t_pure = end_to_end(args.e2e_reps, True)
    b_fast, t_fast = end_to_end(args.e2e_reps, False)
    print(f"end to end, {args.e2e_reps} cooperative hops at 10 neighbors:")
    print(f"  {b_pure:7s} {t_pure:8.2f} s")
    print(f"  {b_fast:7s} {t_fast:8.2f} s  ({t_pure / t_fast:.2f}x)")


if __name__ == "__main__":
    main()
