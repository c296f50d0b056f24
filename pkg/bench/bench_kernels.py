"""Compare the compiled and pure-Python row kernels.

Runs a synthetic ``combine`` workload and a random exact simplex solve
in-process against both implementations, then times one end-to-end solve of a
bundled benchmark in a subprocess with and without ``CEFASOLVE_PURE=1``.

    python bench/bench_kernels.py [--rows N] [--file NAME]
"""

from __future__ import annotations

import argparse
import os
import random
import subprocess
import sys
import time
from importlib import resources

from cefasolve import _kernels_py
from cefasolve import kernels


def _workload(rng: random.Random, n: int, width: int):
    rows = []
    for _ in range(n):
        k = rng.randint(1, width)
        row = {rng.randrange(4 * width): rng.randint(-9, 9) or 1 for _ in range(k)}
        rows.append((row, rng.randint(-50, 50)))
    return rows


def time_combine(fn, rows, reps: int) -> float:
    start = time.perf_counter()
    for _ in range(reps):
        for (a, ra), (b, rb) in zip(rows, rows[1:]):
            fn(a, ra, 3, b, rb, -2)
            fn(a, ra, 1, b, rb, 1)
    return time.perf_counter() - start


def time_simplex(module, rng_seed: int, n_cols: int, n_rows: int) -> float:
    from cefasolve.lia import simplex

    rng = random.Random(rng_seed)
    rows = []
    for _ in range(n_rows):
        cols = rng.sample(range(n_cols), 6)
        rows.append(({j: rng.choice([-3, -2, -1, 1, 2]) for j in cols}, rng.randint(-20, 5)))
    saved = simplex.kernels
    simplex.kernels = module
    try:
        start = time.perf_counter()
        simplex.Tableau(n_cols, rows, [1] * n_cols).solve()
        return time.perf_counter() - start
    finally:
        simplex.kernels = saved


def time_solve(name: str, pure: bool) -> float:
    path = resources.files("cefasolve.data") / "benchmarks" / name
    env = dict(os.environ)
    env.pop("CEFASOLVE_PURE", None)
    if pure:
        env["CEFASOLVE_PURE"] = "1"
    start = time.perf_counter()
    subprocess.run([sys.executable, "-m", "cefasolve", "solve", str(path)], env=env,
                   check=False, capture_output=True)
    return time.perf_counter() - start


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--rows", type=int, default=2000)
    ap.add_argument("--reps", type=int, default=20)
    ap.add_argument("--file", default="url.smt2")
    args = ap.parse_args()
    if not kernels.COMPILED:
        print("compiled kernels unavailable; only the pure version can be timed")
    rows = _workload(random.Random(0), args.rows, 30)
    pure_t = time_combine(_kernels_py.combine, rows, args.reps)
    print(f"combine pure      {pure_t:8.3f} s")
    if kernels.COMPILED:
        comp_t = time_combine(kernels.impl.combine, rows, args.reps)
        print(f"combine compiled  {comp_t:8.3f} s  speedup {pure_t / comp_t:5.2f}x")
    pure_t = time_simplex(_kernels_py, 1, 80, 64)
    print(f"simplex pure      {pure_t:8.3f} s")
    if kernels.COMPILED:
        comp_t = time_simplex(kernels.impl, 1, 80, 64)
        print(f"simplex compiled  {comp_t:8.3f} s  speedup {pure_t / comp_t:5.2f}x")
    for pure in (True, False):
        label = "pure" if pure else "default"
        print(f"solve {args.file} ({label:7}) {time_solve(args.file, pure):8.3f} s")


if __name__ == "__main__":
    main()
