#!/usr/bin/env python3
"""Compare the compiled and numpy kernel backends on the experiment workloads.

    python3 benchmarks/bench_kernels.py [--q 6007] [--N 763] [--xs 20000] [--repeat 3]
"""
from __future__ import annotations

import argparse
import time

import numpy as np

from gausslab import kernels
from gausslab.numtheory import coprime_residues


def best_of(fn, repeat):
    times = []
    for _ in range(repeat):
        t = time.perf_counter()
        out = fn()
        times.append(time.perf_counter() - t)
    return min(times), out


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--q", type=int, default=6007)
    ap.add_argument("--N", type=int, default=763)
    ap.add_argument("--xs", type=int, default=20000)
    ap.add_argument("--repeat", type=int, default=3)
    ap.add_argument("--threads", type=int, default=1)
    args = ap.parse_args()

    ps = np.fromiter(coprime_residues(args.q), dtype=np.int64)
    w = np.ones(args.N)
    xs = np.random.Generator(np.random.Philox(0)).random(args.xs)
    print(f"backends available: {sorted(kernels.BACKENDS)} (default {kernels.BACKEND})")
    print(f"{'workload':<34}{'backend':<9}{'seconds':>10}{'terms/s':>14}")
    results = {}
    for name in sorted(kernels.BACKENDS):
        t_g, g = best_of(lambda: kernels.gauss_sum_batch(ps, args.q, 1, w, threads=args.threads, backend=name),
                         args.repeat)
        t_t, s = best_of(lambda: kernels.theta_sum_batch(xs, 1, w, threads=args.threads, backend=name),
                         args.repeat)
        results[name] = (g, s)
        label_g = f"gauss q={args.q} N={args.N} ({len(ps)} p)"
        label_t = f"theta N={args.N} ({args.xs} x)"
        print(f"{label_g:<34}{name:<9}{t_g:>10.4f}{len(ps) * args.N / t_g:>14.3e}")
        print(f"{label_t:<34}{name:<9}{t_t:>10.4f}{args.xs * args.N / t_t:>14.3e}")
    if len(results) == 2:
        (g1, s1), (g2, s2) = results.values()
        print(f"max backend difference: gauss {np.abs(g1 - g2).max():.2e}, theta {np.abs(s1 - s2).max():.2e}")


if __name__ == "__main__":
    main()
