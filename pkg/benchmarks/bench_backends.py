#!/usr/bin/env python3
"""Compare the compiled kernel against the pure-Python fallback.

The backend is fixed at import time, so this script re-executes itself in a
subprocess per backend (EVOSYM_PURE=1 forces the fallback) and prints a
side-by-side table.

Usage: python benchmarks/bench_backends.py [--repeat N]
"""

from __future__ import annotations

import argparse
import json
import os
import subprocess
import sys
import time


def workloads():
    from evosym import (AnsatzConfig, bracket, classify, determining_system,
                        find_symmetries, parse, total_d_power)

    kdv = classify(parse("u3 + 6*u*u1"))
    g5 = parse("u5 + 10*u*u3 + 20*u1*u2 + 30*u^2*u1")
    g7_seed = parse("x*u1 + 2*u + 3*t*(u3 + 6*u*u1)")

    def bench_bracket():
        bracket(kdv.F, g5)

    def bench_determining():
        determining_system(kdv, g5)

    def bench_search():
        find_symmetries(kdv, AnsatzConfig(order=7, weight_max=9))

    def bench_d_power():
        total_d_power(g7_seed * g5, 6)

    return [
        ("bracket {F, G5}", bench_bracket, 40),
        ("determining system (k=5)", bench_determining, 10),
        ("ansatz search (k=7)", bench_search, 3),
        ("D^6 of a product", bench_d_power, 10),
    ]


def run_one_backend() -> None:
    import evosym

    results = {}
    for name, fn, reps in workloads():
        fn()  # warm up
        start = time.perf_counter()
        for _ in range(reps):
            fn()
        results[name] = (time.perf_counter() - start) / reps
    print(json.dumps({"backend": evosym.BACKEND, "results": results}))


def main() -> int:
    parser = argparse.ArgumentParser()
    parser.add_argument("--inner", action="store_true", help=argparse.SUPPRESS)
    args = parser.parse_args()

    if args.inner:
        run_one_backend()
        return 0

    rows = {}
    for env_extra in ({}, {"EVOSYM_PURE": "1"}):
        env = dict(os.environ, **env_extra)
        out = subprocess.run(
            [sys.executable, os.path.abspath(__file__), "--inner"],
            env=env, capture_output=True, text=True, check=True)
        payload = json.loads(out.stdout.strip().splitlines()[-1])
        rows[payload["backend"]] = payload["results"]

    backends = list(rows)
    if len(backends) < 2:
        print("only one backend available:", backends)
        return 1
    names = list(next(iter(rows.values())))
    width = max(len(n) for n in names) + 2
    header = f"{'workload':<{width}}" + "".join(f"{b:>14}" for b in backends)
    print(header + f"{'speedup':>10}")
    print("-" * len(header + "          "))
    for name in names:
        times = [rows[b][name] for b in backends]
        ratio = times[1] / times[0] if times[0] else float("inf")
        cells = "".join(f"{t * 1000:>11.2f} ms" for t in times)
        print(f"{name:<{width}}{cells}{ratio:>9.2f}x")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
