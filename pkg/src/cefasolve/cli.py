"""Command line: ``cefasolve solve FILE`` and ``cefasolve bench DIR``."""

from __future__ import annotations

import argparse
import logging
import sys
from pathlib import Path

from .alphabet import ASCII, Alphabet
from .engine import SolveConfig, SolveResult, check_sat
from .oracle import interpret_program
from .errors import InputError, ParseError, UnsupportedError
from .smtlib import Translation, format_model, load_program

EXIT_OK, EXIT_ERROR, EXIT_UNKNOWN = 0, 1, 2


def _alphabet(spec: list[str] | None) -> Alphabet:
    if not spec or spec == ["ascii"]:
        return ASCII
    if len(spec) == 2 and spec[0] == "file":
        letters = Path(spec[1]).read_text(encoding="utf-8")
        letters = "".join(ch for ch in letters if ch not in "\r\n")
        if not letters:
            raise InputError("alphabet file is empty")
        return Alphabet.explicit(letters)
    raise InputError("--alphabet takes 'ascii' or 'file PATH'")


def solve_text(text: str, cfg: SolveConfig, strict: bool = False,
               external: str | None = None) -> tuple[SolveResult, Translation]:
    tr = load_program(text, cfg.alphabet, strict)
    if external:
        from .lia.external import ExternalSolver
        cfg.external = ExternalSolver(external)
    return check_sat(tr.program, cfg), tr


def _cmd_solve(args: argparse.Namespace) -> int:
    try:
        alphabet = _alphabet(args.alphabet)
        text = Path(args.file).read_text(encoding="utf-8")
    except (OSError, InputError) as e:
        print("unknown")
        print(f"error: {e}", file=sys.stderr)
        return EXIT_ERROR
    cfg = SolveConfig(timeout=args.timeout, alphabet=alphabet)
    if args.max_product_states is not None:
        cfg.max_product_states = args.max_product_states
    try:
        res, tr = solve_text(text, cfg, args.smtlib_strict, args.external_smt)
    except ParseError as e:
        print("unknown")
        print(f"parse error: {e}", file=sys.stderr)
        return EXIT_ERROR
    except (UnsupportedError, InputError) as e:
        print("unknown")
        print(f"unsupported: {e}", file=sys.stderr)
        return EXIT_UNKNOWN
    print(res.verdict)
    if res.verdict == "sat" and args.model and res.model is not None:
        run = interpret_program(tr.program, res.model)
        print(format_model(tr, run.strings, run.ints))
    if res.reason:
        print(f"reason: {res.reason}", file=sys.stderr)
    return EXIT_UNKNOWN if res.verdict == "unknown" else EXIT_OK


def _cmd_bench(args: argparse.Namespace) -> int:
    from .bench import run_bench, write_csv
    try:
        rows = run_bench(Path(args.dir), timeout=args.timeout, jobs=args.jobs)
    except OSError as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_ERROR
    write_csv(rows, args.csv)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="cefasolve",
                                description="Path feasibility of straight-line string programs.")
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="command", required=True)
    s = sub.add_parser("solve", help="decide one SMT-LIB file")
    s.add_argument("file")
    s.add_argument("--timeout", type=float, default=None, help="seconds")
    s.add_argument("--model", action="store_true", help="print a model after sat")
    s.add_argument("--alphabet", nargs="+", metavar="ascii|file PATH")
    s.add_argument("--external-smt", metavar="CMD",
                   help="hand the final arithmetic to an SMT solver reading SMT-LIB on stdin")
    s.add_argument("--smtlib-strict", action="store_true",
                   help="negative indexof start yields -1 instead of starting at 0")
    s.add_argument("--max-product-states", type=int, default=None)
    s.set_defaults(func=_cmd_solve)
    b = sub.add_parser("bench", help="solve every .smt2 file of a directory")
    b.add_argument("dir")
    b.add_argument("--csv", default=None, help="output file (default stdout)")
    b.add_argument("--timeout", type=float, default=60.0)
    b.add_argument("--jobs", type=int, default=1)
    b.set_defaults(func=_cmd_bench)
    return p


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return EXIT_ERROR if e.code else EXIT_OK
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    return args.func(args)


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
