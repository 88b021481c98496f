"""Benchmark the flow integrator: numba-compiled kernels vs the plain-Python path.

The kernel mode is fixed at import time by ATTRARITH_NO_NUMBA, so each mode
runs in its own subprocess.  Reported numbers: `first` includes any JIT
compilation (or cache load), `warm` is the best of --repeat timed passes over
the workload.

Usage: python3 benchmarks/bench_flow.py [--repeat 5] [--charges 20]
"""

import argparse
import json
import os
import subprocess
import sys
import time


def workload(n_charges: int):
    from attrarith.attractor import ChargeData
    from attrarith.flow import FlowConfig, flow_integrate

    cfg = FlowConfig(step=1e-2, tol=1e-12, max_steps=10**6)
    charges = [(2, 3, 1), (1, 1, 0), (3, 5, 2)]
    k = 0
    while len(charges) < n_charges:
        p2 = 1 + k % 7
        pq = (k * 5) % 11 - 5
        charges.append((p2, pq * pq // p2 + 1 + k % 5, pq))
        k += 1
    total = 0
    for p2, q2, pq in charges[:n_charges]:
        res = flow_integrate(ChargeData(p2, q2, pq), complex(0.35, 1.45), cfg)
        total += res.steps
    return total


def run_worker(repeat: int, n_charges: int) -> None:
    t0 = time.perf_counter()
    steps = workload(n_charges)
    first = time.perf_counter() - t0
    warm = min(_timed(n_charges) for _ in range(repeat))
    from attrarith._kernels import USE_NUMBA
    print(json.dumps({
        "mode": "numba" if USE_NUMBA else "python",
        "first_s": first,
        "warm_s": warm,
        "steps": steps,
    }))


def _timed(n_charges: int) -> float:
    t0 = time.perf_counter()
    workload(n_charges)
    return time.perf_counter() - t0


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=5)
    ap.add_argument("--charges", type=int, default=20)
    ap.add_argument("--worker", action="store_true", help=argparse.SUPPRESS)
    args = ap.parse_args()

    if args.worker:
        run_worker(args.repeat, args.charges)
        return

    rows = []
    for disable in ("", "1"):
        env = dict(os.environ)
        if disable:
            env["ATTRARITH_NO_NUMBA"] = "1"
        else:
            env.pop("ATTRARITH_NO_NUMBA", None)
        out = subprocess.run(
            [sys.executable, os.path.abspath(__file__), "--worker",
             "--repeat", str(args.repeat), "--charges", str(args.charges)],
            env=env, capture_output=True, text=True, check=True)
        rows.append(json.loads(out.stdout.strip().splitlines()[-1]))

    assert rows[0]["steps"] == rows[1]["steps"], "modes disagree on work done"
    print(f"{'mode':<8} {'first (s)':>12} {'warm (s)':>12}")
    for r in rows:
        print(f"{r['mode']:<8} {r['first_s']:>12.4f} {r['warm_s']:>12.4f}")
    if rows[0]["mode"] == "numba":
        print(f"warm speedup (python/numba): "
              f"{rows[1]['warm_s'] / rows[0]['warm_s']:.1f}x "
              f"over {rows[0]['steps']} accepted steps")
    else:
        print("numba unavailable; both runs used the plain-Python path")


if __name__ == "__main__":
    main()
