"""Hand a linear integer problem to an external SMT solver over SMT-LIB text.

The solver command receives the script on standard input and must print
``sat``/``unsat``/``unknown`` followed, after ``sat``, by a model.
"""

from __future__ import annotations

import shlex
import subprocess
from dataclasses import dataclass
from typing import Sequence

from ..automata import Var
from ..errors import InternalError, ResourceLimit
from ..sexpr import Num, SList, Sym, read_all
from .linear import Atom, Lin


def _name(v: Var) -> str:
    return f"v{v.uid}"


def _term(e: Lin) -> str:
    parts = []
    for v, c in e.coeffs:
        parts.append(_name(v) if c == 1 else f"(* {_int(c)} {_name(v)})")
    if e.const or not parts:
        parts.append(_int(e.const))
    return parts[0] if len(parts) == 1 else "(+ " + " ".join(parts) + ")"


def _int(c: int) -> str:
    return str(c) if c >= 0 else f"(- {-c})"


def atom_to_smt(a: Atom) -> str:
    lhs, rhs = _term(a.lhs), _term(a.rhs)
    if a.rel == "!=":
        return f"(not (= {lhs} {rhs}))"
    return f"({a.rel} {lhs} {rhs})"


def _conj(atoms: Sequence[Atom]) -> str:
    if not atoms:
        return "true"
    if len(atoms) == 1:
        return atom_to_smt(atoms[0])
    return "(and " + " ".join(atom_to_smt(a) for a in atoms) + ")"


def to_smtlib(base: Sequence[Atom], alternatives: Sequence[Sequence[Atom]],
              clauses: Sequence[Sequence[Sequence[Atom]]] = ()) -> tuple[str, dict[str, Var]]:
    names: dict[str, Var] = {}
    for a in list(base) + [x for alt in alternatives for x in alt] + \
            [x for cl in clauses for alt in cl for x in alt]:
        for v in a.variables():
            names[_name(v)] = v
    lines = ["(set-logic QF_LIA)"]
    lines += [f"(declare-fun {n} () Int)" for n in sorted(names)]
    lines += [f"(assert {atom_to_smt(a)})" for a in base]
    lines.append("(assert (or " + " ".join(_conj(alt) for alt in alternatives) + "))"
                 if len(alternatives) != 1 else f"(assert {_conj(alternatives[0])})")
    for cl in clauses:
        lines.append("(assert (or " + " ".join(_conj(alt) for alt in cl) + "))")
    lines += ["(check-sat)", "(get-model)"]
    return "\n".join(lines) + "\n", names


def parse_model(text: str, names: dict[str, Var]) -> tuple[str, dict[Var, int]]:
    forms = read_all(text)
    if not forms or not isinstance(forms[0], Sym):
        raise InternalError(f"unexpected solver output: {text[:200]!r}")
    verdict = forms[0].name
    model: dict[Var, int] = {}
    for f in forms[1:]:
        defs = f.items[1:] if isinstance(f, SList) and f.head() == "model" else \
            f.items if isinstance(f, SList) else ()
        for d in defs:
            if isinstance(d, SList) and d.head() == "define-fun" and len(d) == 5:
                n = d[1].name if isinstance(d[1], Sym) else None
                if n in names:
                    model[names[n]] = _value(d[4])
    return verdict, model


def _value(e) -> int:
    if isinstance(e, Num):
        return e.value
    if isinstance(e, SList) and e.head() == "-" and len(e) == 2:
        return -_value(e[1])
    raise InternalError(f"unexpected model value {e}")


@dataclass
class ExternalSolver:
    command: str
    timeout: float | None = None

    def solve(self, base: Sequence[Atom], alternatives: Sequence[Sequence[Atom]],
              clauses: Sequence[Sequence[Sequence[Atom]]] = ()) -> dict[Var, int] | None:
        script, names = to_smtlib(base, alternatives, clauses)
        try:
            proc = subprocess.run(shlex.split(self.command), input=script, capture_output=True,
                                  text=True, timeout=self.timeout, check=False)
        except subprocess.TimeoutExpired:
            raise ResourceLimit("external solver timed out") from None
        except OSError as e:
            raise ResourceLimit(f"external solver failed to start: {e}") from None
        verdict, model = parse_model(proc.stdout, names)
        if verdict == "unsat":
            return None
        if verdict != "sat":
            raise ResourceLimit(f"external solver answered {verdict}")
        for v in names.values():
            model.setdefault(v, 0)
        return model
