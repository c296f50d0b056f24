"""Reference semantics, a forward interpreter and a bounded brute-force solver.

Nothing here depends on the symbolic machinery (pre-images, Parikh images);
the only shared pieces are NFA simulation and the regex compiler, which are
tested separately against a direct recursive matcher.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Iterator, Mapping, Sequence

from .alphabet import Alphabet
from .automata import Cefa, Nfa, Nft, Var, cefa_accepts, nfa_accepts
from .errors import FunctionalityError, InputError
from .program import (Add, And, Arith, Assert, Concat, Formula, IndexOf, IntConst, IntTerm,
                      IntVar, Length, Member, Mul, Or, Replace, ReplaceAll, Reverse,
                      SlintProgram, Substring, Transduce)
from .regex import Regex, regex_to_nfa


def eval_substring(y: str, t1: int, t2: int) -> str:
    if t1 < 0 or t1 >= len(y) or t2 <= 0:
        return ""
    return y[t1:min(t1 + t2, len(y))]


def eval_indexof(v: str, x: str, i: int, strict: bool = False) -> int:
    """First occurrence of ``v`` in ``x`` at a position >= ``i``, else -1.

    A negative start is clamped to 0; with ``strict`` it yields -1 instead.
    """
    if not v:
        raise InputError("indexOf pattern must be nonempty")
    if i < 0:
        if strict:
            return -1
        i = 0
    if i >= len(x):
        return -1
    return x.find(v, i)


def _longest_match(nfa: Nfa, x: str, i: int) -> int:
    """End of the longest match of ``nfa`` starting at ``i``; -1 if none."""
    cur = set(nfa.initial)
    best = i if cur & nfa.final else -1
    j = i
    while cur and j < len(x):
        cur = nfa.step(cur, x[j])
        j += 1
        if cur & nfa.final:
            best = j
    return best


def _scan(e: Regex | Nfa, u: str, x: str, alphabet: Alphabet | None, first_only: bool) -> str:
    nfa = e if isinstance(e, Nfa) else regex_to_nfa(e, alphabet) if alphabet else regex_to_nfa(e)
    if nfa.initial & nfa.final:
        raise InputError("replacement pattern must not match the empty string")
    out = []
    i = 0
    replaced = False
    while i < len(x):
        end = -1 if (first_only and replaced) else _longest_match(nfa, x, i)
        if end > i:
            out.append(u)
            i = end
            replaced = True
        else:
            out.append(x[i])
            i += 1
    return "".join(out)


def eval_replaceall(e: Regex | Nfa, u: str, x: str, alphabet: Alphabet | None = None) -> str:
    return _scan(e, u, x, alphabet, first_only=False)


def eval_replace(e: Regex | Nfa, u: str, x: str, alphabet: Alphabet | None = None) -> str:
    return _scan(e, u, x, alphabet, first_only=True)


def run_transducer(t: Nft, w: str) -> str | None:
    """Output of an accepting run, or ``None``.  Raises if a transducer declared
    functional yields two different outputs."""
    t.alphabet.check_word(w)
    configs: set[tuple[int, str]] = {(q, "") for q in t.initial}
    for ch in w:
        nxt = set()
        for q, out in configs:
            for tr in t.out[q]:
                if ch in tr.label:
                    nxt.add((tr.dst, out + (ch if tr.copy else tr.output)))
        configs = nxt
        if not configs:
            return None
    outs = sorted({out for q, out in configs if q in t.final})
    if not outs:
        return None
    if len(outs) > 1 and t.functional:
        raise FunctionalityError(f"transducer {t.name} maps {w!r} to both {outs[0]!r} and {outs[1]!r}")
    return outs[0]


# ---------------------------------------------------------------------------
# interpreter


@dataclass(frozen=True)
class Feasible:
    strings: Mapping[str, str]
    ints: Mapping[Var, int]

    def __bool__(self) -> bool:
        return True


@dataclass(frozen=True)
class Infeasible:
    statement: int
    reason: str = ""

    def __bool__(self) -> bool:
        return False


@dataclass
class ConcreteAssignment:
    strings: dict[str, str] = field(default_factory=dict)
    ints: dict[Var, int] = field(default_factory=dict)


def eval_term(t: IntTerm, strings: Mapping[str, str], ints: Mapping[Var, int]) -> int:
    if isinstance(t, IntConst):
        return t.value
    if isinstance(t, IntVar):
        return ints[t.var]
    if isinstance(t, Length):
        return len(strings[t.x])
    if isinstance(t, IndexOf):
        return eval_indexof(t.pattern, strings[t.x], eval_term(t.start, strings, ints), t.strict)
    if isinstance(t, Add):
        return eval_term(t.left, strings, ints) + eval_term(t.right, strings, ints)
    if isinstance(t, Mul):
        return t.coef * eval_term(t.term, strings, ints)
    raise TypeError(t)


_REL = {
    "=": lambda a, b: a == b, "!=": lambda a, b: a != b, "<=": lambda a, b: a <= b,
    "<": lambda a, b: a < b, ">=": lambda a, b: a >= b, ">": lambda a, b: a > b,
}


def eval_formula(f: Formula, strings: Mapping[str, str], ints: Mapping[Var, int]) -> bool:
    if isinstance(f, And):
        return all(eval_formula(p, strings, ints) for p in f.parts)
    if isinstance(f, Or):
        return any(eval_formula(p, strings, ints) for p in f.parts)
    if isinstance(f, Arith):
        return _REL[f.rel](eval_term(f.lhs, strings, ints), eval_term(f.rhs, strings, ints))
    if isinstance(f, Member):
        w = strings[f.x]
        if isinstance(f.aut, Cefa):
            return cefa_accepts(f.aut, (w, tuple(ints[r] for r in f.aut.registers)))
        return nfa_accepts(f.aut, w)
    raise TypeError(f)


def interpret_program(p: SlintProgram, a: ConcreteAssignment) -> Feasible | Infeasible:
    strings = dict(a.strings)
    ints = dict(a.ints)
    for k, s in enumerate(p.statements):
        if isinstance(s, Concat):
            strings[s.target] = strings[s.left] + strings[s.right]
        elif isinstance(s, ReplaceAll):
            strings[s.target] = eval_replaceall(s.pattern, s.replacement, strings[s.source])
        elif isinstance(s, Replace):
            strings[s.target] = eval_replace(s.pattern, s.replacement, strings[s.source])
        elif isinstance(s, Reverse):
            strings[s.target] = strings[s.source][::-1]
        elif isinstance(s, Transduce):
            out = run_transducer(s.transducer, strings[s.source])
            if out is None:
                return Infeasible(k, f"transducer {s.transducer.name} rejects its input")
            strings[s.target] = out
        elif isinstance(s, Substring):
            strings[s.target] = eval_substring(strings[s.source], eval_term(s.start, strings, ints),
                                               eval_term(s.length, strings, ints))
        elif isinstance(s, Assert):
            if not eval_formula(s.formula, strings, ints):
                return Infeasible(k, "assertion fails")
        else:
            raise TypeError(s)
    return Feasible(strings, ints)


# ---------------------------------------------------------------------------
# brute force


def words(alphabet: Alphabet | Sequence[str], max_len: int) -> Iterator[str]:
    """All words up to ``max_len`` in length-then-lexicographic order."""
    letters = sorted(alphabet.chars() if isinstance(alphabet, Alphabet) else alphabet)
    for n in range(max_len + 1):
        for tup in itertools.product(letters, repeat=n):
            yield "".join(tup)


def brute_force_solve(p: SlintProgram, alphabet: Alphabet | Sequence[str], max_len: int,
                      int_box: tuple[int, int]) -> ConcreteAssignment | None:
    svars = p.string_inputs()
    ivars = p.int_inputs()
    pool = list(words(alphabet, max_len))
    box = range(int_box[0], int_box[1] + 1)
    for sv in itertools.product(pool, repeat=len(svars)):
        strings = dict(zip(svars, sv))
        for iv in itertools.product(box, repeat=len(ivars)):
            a = ConcreteAssignment(strings, dict(zip(ivars, iv)))
            if interpret_program(p, a):
                return a
    return None
