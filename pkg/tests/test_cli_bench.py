import csv
import re
import shutil
from importlib import resources
from pathlib import Path

import pytest

from cefasolve.bench import COLUMNS, Row, run_bench, summary
from cefasolve.cli import main

FIRST = re.compile(r"^(sat|unsat|unknown)$")
BUNDLED = Path(str(resources.files("cefasolve.data") / "benchmarks"))


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out.splitlines(), out.err


def test_solve_with_model(capsys):
    code, lines, _ = run(capsys, "solve", str(BUNDLED / "concat_lengths.smt2"), "--model")
    assert code == 0 and lines[0] == "sat" and lines[1] == "(model"


def test_solve_unsat(capsys):
    code, lines, _ = run(capsys, "solve", str(BUNDLED / "reverse_unsat.smt2"))
    assert (code, lines) == (0, ["unsat"])


def test_error_exit_codes(capsys, tmp_path):
    bad = tmp_path / "bad.smt2"
    bad.write_text("(assert (= x")
    code, lines, err = run(capsys, "solve", str(bad))
    assert code == 1 and lines == ["unknown"] and "parse error" in err
    code, lines, _ = run(capsys, "solve", str(tmp_path / "missing.smt2"))
    assert code == 1 and FIRST.match(lines[0])
    odd = tmp_path / "odd.smt2"
    odd.write_text("(declare-fun x () String)\n(assert (str.prefixof x x))")
    code, lines, err = run(capsys, "solve", str(odd))
    assert code == 2 and lines == ["unknown"] and "unsupported" in err
    assert main(["frobnicate"]) == 1
    capsys.readouterr()


def test_explicit_alphabet_file(capsys, tmp_path):
    letters = tmp_path / "letters.txt"
    letters.write_text("ab\n")
    code, lines, _ = run(capsys, "solve", str(BUNDLED / "reverse_unsat.smt2"),
                         "--alphabet", "file", str(letters))
    assert code == 0 and lines == ["unsat"]
    letters.write_text("\n")
    code, lines, _ = run(capsys, "solve", str(BUNDLED / "reverse_unsat.smt2"),
                         "--alphabet", "file", str(letters))
    assert code == 1 and lines == ["unknown"]


def test_bench_csv(tmp_path, capsys):
    for name in ("concat_lengths.smt2", "reverse_unsat.smt2"):
        shutil.copy(BUNDLED / name, tmp_path)
    (tmp_path / "broken.smt2").write_text("(assert")
    out = tmp_path / "out.csv"
    assert main(["bench", str(tmp_path), "--csv", str(out)]) == 0
    rows = list(csv.DictReader(out.open()))
    assert tuple(rows[0]) == COLUMNS
    got = {r["file"]: r["verdict"] for r in rows}
    assert got == {"broken.smt2": "error", "concat_lengths.smt2": "sat",
                   "reverse_unsat.smt2": "unsat", "summary": "sat=1;unsat=1;inconclusive=1"}
    assert rows[-1]["file"] == "summary"


def test_bench_empty_dir_has_summary_only(tmp_path, capsys):
    assert main(["bench", str(tmp_path)]) == 0
    lines = capsys.readouterr().out.splitlines()
    assert lines == [",".join(COLUMNS), "summary,sat=0;unsat=0;inconclusive=0,0,0,0"]
    assert main(["bench", str(tmp_path / "nope")]) == 1


def test_summary_row():
    rows = [Row("a", "sat", 5, 1, 7), Row("b", "unknown", 3, 2, 9)]
    s = summary(rows)
    assert (s.verdict, s.wall_millis, s.branches, s.product_states_max) == \
        ("sat=1;unsat=0;inconclusive=1", 8, 3, 9)
    with pytest.raises(NotADirectoryError):
        run_bench(Path("/nonexistent-dir"))
