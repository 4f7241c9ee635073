"""Benchmark the compiled RK4 kernels against the interpreted fallback.

The kernel path is fixed at import time by ``ANAI_DISABLE_NUMBA``, so each
path is timed in its own subprocess with the flag set accordingly. Usage:

    python3 benchmarks/bench_kernels.py [--steps 100000] [--repeats 5]
"""

from __future__ import annotations

import argparse
import json
import os
import subprocess
import sys

_WORKER = r"""
import json, sys, time
import numpy as np
from anai import _kernels

steps = int(sys.argv[1])
repeats = int(sys.argv[2])

def best(fn, *args):
    fn(*args)  # warm up (includes jit compilation when enabled)
    times = []
    for _ in range(repeats):
        t0 = time.perf_counter()
        fn(*args)
        times.append(time.perf_counter() - t0)
    return min(times)

pair_args = (0.5, 0.9, 0.1, 0.3, 0.8, 0.05, 0.01, steps, 1e-9)
fb_args = (0.5, 0.9, 0.1, 0.3, 0.8, 0.05, False, 0.1, 0.2, 1.0,
           _kernels.COUPLING_SATURATING, 1.0, 0.5, 0.01, steps, 1e-9)
print(json.dumps({
    "numba": _kernels.NUMBA_ENABLED,
    "pair_s": best(_kernels.rk4_logistic_pair, *pair_args),
    "feedback_s": best(_kernels.rk4_feedback, *fb_args),
}))
"""


def _run(disable_numba: bool, steps: int, repeats: int) -> dict:
    env = dict(os.environ)
    env["ANAI_DISABLE_NUMBA"] = "1" if disable_numba else "0"
    out = subprocess.run(
        [sys.executable, "-c", _WORKER, str(steps), str(repeats)],
        env=env, capture_output=True, text=True, check=True,
    )
    return json.loads(out.stdout.strip().splitlines()[-1])


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--steps", type=int, default=100_000, help="RK4 steps per run")
    parser.add_argument("--repeats", type=int, default=5, help="timed repeats (min taken)")
    args = parser.parse_args()

    fallback = _run(True, args.steps, args.repeats)
    compiled = _run(False, args.steps, args.repeats)

    print(f"RK4 kernels, {args.steps} steps, best of {args.repeats}")
    print(f"{'kernel':<14}{'fallback':>12}{'numba':>12}{'speedup':>10}")
    for key, name in (("pair_s", "decoupled"), ("feedback_s", "feedback")):
        slow, fast = fallback[key], compiled[key]
        ratio = slow / fast if compiled["numba"] else float("nan")
        print(f"{name:<14}{slow * 1e3:>10.2f}ms{fast * 1e3:>10.2f}ms{ratio:>9.1f}x")
    if not compiled["numba"]:
        print("note: numba unavailable; both columns ran the interpreted path")


if __name__ == "__main__":
    main()
