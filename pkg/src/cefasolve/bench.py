"""Benchmark harness: one CSV row per file plus a summary row."""

from __future__ import annotations

import csv
import sys
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from pathlib import Path

COLUMNS = ("file", "verdict", "wall_millis", "branches", "product_states_max")


@dataclass
class Row:
    file: str
    verdict: str
    wall_millis: int
    branches: int
    product_states_max: int

    def cells(self) -> list:
        return [self.file, self.verdict, self.wall_millis, self.branches, self.product_states_max]


def solve_file(path: str, timeout: float | None) -> Row:
    from .engine import SolveConfig
    from .cli import solve_text
    name = Path(path).name
    t0 = time.monotonic()
    try:
        text = Path(path).read_text(encoding="utf-8")
        res, _ = solve_text(text, SolveConfig(timeout=timeout))
    except Exception as e:  # noqa: BLE001 - one bad file must not stop the run
        print(f"{name}: {type(e).__name__}: {e}", file=sys.stderr)
        return Row(name, "error", int((time.monotonic() - t0) * 1000), 0, 0)
    return Row(name, res.verdict, int((time.monotonic() - t0) * 1000), res.stats.branches,
               res.stats.product_states_max)


def run_bench(folder: Path, timeout: float | None = 60.0, jobs: int = 1) -> list[Row]:
    if not folder.is_dir():
        raise NotADirectoryError(str(folder))
    files = sorted(str(p) for p in folder.glob("*.smt2"))
    if jobs > 1 and len(files) > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            return list(pool.map(solve_file, files, [timeout] * len(files)))
    return [solve_file(f, timeout) for f in files]


def summary(rows: list[Row]) -> Row:
    sat = sum(r.verdict == "sat" for r in rows)
    unsat = sum(r.verdict == "unsat" for r in rows)
    other = len(rows) - sat - unsat
    return Row("summary", f"sat={sat};unsat={unsat};inconclusive={other}",
               sum(r.wall_millis for r in rows), sum(r.branches for r in rows),
               max((r.product_states_max for r in rows), default=0))


def write_csv(rows: list[Row], out: str | None) -> None:
    fh = open(out, "w", newline="", encoding="utf-8") if out else sys.stdout
    try:
        w = csv.writer(fh)
        w.writerow(COLUMNS)
        for r in rows + [summary(rows)]:
            w.writerow(r.cells())
    finally:
        if out:
            fh.close()
