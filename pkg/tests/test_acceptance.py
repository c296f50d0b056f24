"""Acceptance criteria 1 to 9.

Every test records a PASS/FAIL line; the lines are printed at the end of the
pytest run (see conftest.py) and also when this file is run as a script.
Time limits are part of each criterion and are asserted alongside the result.
"""

from __future__ import annotations

import csv
import random
import re
import subprocess
import sys
import time
from importlib import resources
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).resolve().parent))

import checks  # noqa: E402
from cefasolve.alphabet import Alphabet  # noqa: E402
from cefasolve.automata import cefa_accepts  # noqa: E402
from cefasolve.builders import build_const_nfa, build_contains_substring_nfa, build_len_cefa  # noqa: E402
from cefasolve.engine import SolveConfig, check_sat  # noqa: E402
from cefasolve.oracle import eval_indexof, eval_replaceall, eval_substring, interpret_program  # noqa: E402
from cefasolve.preimage import preimage_substring, preimage_transducer  # noqa: E402
from cefasolve.program import (Arith, Assert, Concat, IndexOf, IntConst, Length, Member,  # noqa: E402
                               ReplaceAll, SlintProgram, Substring, Transduce, int_var)
from cefasolve.regex import parse_regex  # noqa: E402
from cefasolve.transducers import load_builtin  # noqa: E402

RESULTS: dict[int, tuple[bool, str]] = {}

VERDICT_LINE = re.compile(r"^(sat|unsat|unknown)$")
BUNDLED = {
    "concat_lengths.smt2": "sat",
    "distinct_same_length.smt2": "sat",
    "indexof_positions.smt2": "sat",
    "replace_first.smt2": "unsat",
    "reverse_unsat.smt2": "unsat",
    "substr_unsat.smt2": "unsat",
    "toupper.smt2": "sat",
    "url.smt2": "sat",
    "url_fragment.smt2": "sat",
    "url_short.smt2": "unsat",
}


def record(n: int, ok: bool, detail: str) -> None:
    RESULTS[n] = (ok, detail)


def report_lines() -> list[str]:
    return [f"criterion {n}: {'PASS' if ok else 'FAIL'}  {detail}"
            for n, (ok, detail) in sorted(RESULTS.items())]


def _timed(fn):
    t0 = time.perf_counter()
    out = fn()
    return out, time.perf_counter() - t0


# ---------------------------------------------------------------------------


def test_criterion_1_worked_semantics_examples():
    ab_plus = parse_regex("(ab)+")
    cases = [
        ("substring(abaab,-1,1)", lambda: eval_substring("abaab", -1, 1), ""),
        ("substring(abaab,3,0)", lambda: eval_substring("abaab", 3, 0), ""),
        ("substring(abaab,3,2)", lambda: eval_substring("abaab", 3, 2), "ab"),
        ("substring(abaab,3,3)", lambda: eval_substring("abaab", 3, 3), "ab"),
        ("indexof_ab(aaba,-1)", lambda: eval_indexof("ab", "aaba", -1), 1),
        ("indexof_ab(aaba,1)", lambda: eval_indexof("ab", "aaba", 1), 1),
        ("indexof_ab(aaba,2)", lambda: eval_indexof("ab", "aaba", 2), -1),
        ("indexof_ab(aaba,4)", lambda: eval_indexof("ab", "aaba", 4), -1),
        ("replaceall_(ab)+,c(aababaab)", lambda: eval_replaceall(ab_plus, "c", "aababaab"), "acac"),
        ("replaceall_(ab)+,c(aab)", lambda: eval_replaceall(ab_plus, "c", "aab"), "ac"),
    ]
    t0 = time.perf_counter()
    wrong = [f"{name} = {fn()!r}, expected {want!r}" for name, fn, want in cases if fn() != want]
    elapsed = time.perf_counter() - t0
    ok = not wrong and elapsed < 1.0
    record(1, ok, f"{len(cases) - len(wrong)}/{len(cases)} values exact in {elapsed:.3f}s"
           + (f"; {wrong}" if wrong else ""))
    assert not wrong
    assert elapsed < 1.0


def test_criterion_2_preimage_language_equation():
    t0 = time.perf_counter()
    summary = {}
    failures = []
    for op in checks.PREIMAGE_OPERATORS:
        bad, n = checks.preimage_mismatches(op, random.Random(2024), 1000)
        summary[op] = n
        failures += bad
    elapsed = time.perf_counter() - t0
    ok = not failures and all(n >= 1000 for n in summary.values()) and elapsed < 300
    record(2, ok, f"checks per operator {summary}, {len(failures)} disagreements, {elapsed:.1f}s")
    assert not failures, failures[:5]
    assert all(n >= 1000 for n in summary.values())
    assert elapsed < 300


def test_criterion_3_substring_preimage_example():
    t0 = time.perf_counter()
    p = preimage_substring(checks.substring_example_automaton())
    (b,) = p.disjunct(0)
    # registers of b: start, length, then the copy of the length register
    expect = {("aaaa", (1, 2, 2)): True, ("aaa", (2, 0, 0)): True, ("aaa", (1, 3, 3)): False}
    got = {cs: cefa_accepts(b, cs) for cs in expect}
    elapsed = time.perf_counter() - t0
    ok = got == expect and elapsed < 1.0
    record(3, ok, f"{got} in {elapsed:.3f}s")
    assert got == expect
    assert elapsed < 1.0


def test_criterion_4_parikh_soundness():
    bad, n = None, 0
    (bad, n), elapsed = _timed(lambda: checks.parikh_mismatches(random.Random(4), 200, 12))
    ok = not bad and elapsed < 300
    record(4, ok, f"200 automata, {n} register targets, {len(bad)} disagreements, {elapsed:.1f}s")
    assert not bad, bad[:5]
    assert elapsed < 300


def url_program() -> SlintProgram:
    trim = load_builtin("trim")
    q, s = int_var("qmarkpos"), int_var("sharppos")
    eps = build_const_nfa("")
    return SlintProgram([
        Assert(Member("prothostpath", eps)),
        Assert(Member("querfrag", eps)),
        Transduce("url1", trim, "url"),
        Assert(Arith(q, "=", IndexOf("url1", "?", IntConst(0)))),
        Assert(Arith(s, "=", IndexOf("url1", "#", IntConst(0)))),
        Assert(Arith(q, ">=", IntConst(0))),
        Substring("prothostpath1", "url1", IntConst(0), q),
        Substring("querfrag1", "url1", q, Length("url1") - q),
        ReplaceAll("querfrag2", parse_regex("script"), "", "querfrag1"),
        Concat("url2", "prothostpath1", "querfrag2"),
        Assert(Member("querfrag2", build_contains_substring_nfa("script"))),
    ])


def test_criterion_5_url_sanitiser():
    p = url_program()
    res, elapsed = _timed(lambda: check_sat(p, SolveConfig(timeout=60)))
    detail = f"{res.verdict} in {elapsed:.1f}s"
    ok = res.verdict == "sat" and elapsed < 60
    if res.verdict == "sat":
        run = interpret_program(p, res.model)
        ok = ok and bool(run) and "script" in run.strings["querfrag2"]
        detail += f", url={res.model.strings['url']!r}"
        if run:
            detail += f", query after removal={run.strings['querfrag2']!r}"
    record(5, ok, detail)
    assert ok


def test_criterion_6_differential():
    (bad, counts), elapsed = _timed(
        lambda: checks.differential_mismatches(random.Random(6), 500, timeout=60))
    ok = not bad and elapsed < 900
    record(6, ok, f"500 programs {counts}, {len(bad)} disagreements, {elapsed:.1f}s")
    assert not bad, bad[:3]
    assert elapsed < 900


def test_criterion_7_case_split_coverage():
    t0 = time.perf_counter()
    bad_s, n_s = checks.substring_split_mismatches()
    bad_i, n_i = checks.indexof_split_mismatches()
    elapsed = time.perf_counter() - t0
    bad = bad_s + bad_i
    ok = not bad and elapsed < 60
    record(7, ok, f"{n_s} substring and {n_i} indexof grid checks, {len(bad)} gaps or "
                  f"conflicts, {elapsed:.1f}s")
    assert not bad, bad[:5]
    assert elapsed < 60


def test_criterion_8_doubling_transducer():
    t0 = time.perf_counter()
    one = Alphabet.explicit("a")
    p = preimage_transducer(checks.doubling_transducer(one), build_len_cefa(alphabet=one))
    (b,) = p.disjunct(0)
    got = (cefa_accepts(b, ("aa", (4,))), cefa_accepts(b, ("aa", (3,))))
    elapsed = time.perf_counter() - t0
    ok = got == (True, False) and elapsed < 1.0
    record(8, ok, f"accepts (aa,4)={got[0]}, accepts (aa,3)={got[1]} in {elapsed:.3f}s")
    assert got == (True, False)
    assert elapsed < 1.0


def _bundled_dir() -> Path:
    return Path(str(resources.files("cefasolve.data") / "benchmarks"))


def test_criterion_9_cli_contract(tmp_path):
    t0 = time.perf_counter()
    folder = _bundled_dir()
    problems = []
    verdicts = {}
    for name, want in sorted(BUNDLED.items()):
        out = subprocess.run([sys.executable, "-m", "cefasolve", "solve", str(folder / name)],
                             capture_output=True, text=True, timeout=120)
        first = out.stdout.splitlines()[0] if out.stdout else ""
        verdicts[name] = first
        if not VERDICT_LINE.match(first):
            problems.append(f"{name}: first line {first!r}")
        elif first != want:
            problems.append(f"{name}: {first}, expected {want}")
    csv_path = tmp_path / "bench.csv"
    subprocess.run([sys.executable, "-m", "cefasolve", "bench", str(folder), "--csv",
                    str(csv_path), "--jobs", "2"], check=True, timeout=120)
    rows = list(csv.DictReader(csv_path.open()))
    per_file = {r["file"]: r["verdict"] for r in rows if r["file"] != "summary"}
    if per_file != verdicts:
        problems.append(f"bench verdicts {per_file} differ from solve verdicts")
    sat = sum(v == "sat" for v in per_file.values())
    unsat = sum(v == "unsat" for v in per_file.values())
    expected_summary = f"sat={sat};unsat={unsat};inconclusive={len(per_file) - sat - unsat}"
    summary = [r for r in rows if r["file"] == "summary"]
    if len(summary) != 1 or summary[0]["verdict"] != expected_summary:
        problems.append(f"summary row {summary} does not match {expected_summary}")
    elapsed = time.perf_counter() - t0
    ok = not problems and len(verdicts) == 10 and elapsed < 120
    record(9, ok, f"{len(verdicts)} files, {expected_summary}, {elapsed:.1f}s"
           + (f"; {problems}" if problems else ""))
    assert not problems
    assert elapsed < 120


if __name__ == "__main__":
    code = pytest.main([__file__, "-q"])
    print("\n".join(report_lines()))
    sys.exit(code)
