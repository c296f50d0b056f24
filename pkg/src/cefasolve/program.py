"""Straight-line string programs with integer data.

String variables are plain names.  Integer variables wrap a :class:`Var` so the
same identity flows into cost registers and the arithmetic layer.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Iterator, Union as TUnion

from .automata import Cefa, Nfa, Nft, Var, fresh
from .errors import NotStraightLine
from .regex import Regex, to_text

# ---------------------------------------------------------------------------
# integer terms


class IntTerm:
    def __add__(self, other: "IntTerm | int") -> "IntTerm":
        return Add(self, as_term(other))

    def __radd__(self, other: int) -> "IntTerm":
        return Add(as_term(other), self)

    def __sub__(self, other: "IntTerm | int") -> "IntTerm":
        return Add(self, Mul(-1, as_term(other)))

    def __rsub__(self, other: int) -> "IntTerm":
        return Add(as_term(other), Mul(-1, self))

    def __neg__(self) -> "IntTerm":
        return Mul(-1, self)

    def __rmul__(self, c: int) -> "IntTerm":
        return Mul(c, self)


@dataclass(frozen=True)
class IntVar(IntTerm):
    var: Var

    @property
    def name(self) -> str:
        return self.var.name


@dataclass(frozen=True)
class IntConst(IntTerm):
    value: int


@dataclass(frozen=True)
class Length(IntTerm):
    x: str


@dataclass(frozen=True)
class IndexOf(IntTerm):
    x: str
    pattern: str
    start: IntTerm
    strict: bool = False


@dataclass(frozen=True)
class Add(IntTerm):
    left: IntTerm
    right: IntTerm


@dataclass(frozen=True)
class Mul(IntTerm):
    coef: int
    term: IntTerm


def as_term(t: "IntTerm | int") -> IntTerm:
    return IntConst(t) if isinstance(t, int) else t


def int_var(name: str) -> IntVar:
    return IntVar(fresh(name))


# ---------------------------------------------------------------------------
# formulas

RELATIONS = ("=", "!=", "<=", "<", ">=", ">")


class Formula:
    pass


@dataclass(frozen=True)
class Member(Formula):
    """``x`` belongs to the language of an NFA, or of a CEFA whose registers are
    integer variables of the program."""

    x: str
    aut: TUnion[Nfa, Cefa]
    label: str = ""


@dataclass(frozen=True)
class Arith(Formula):
    lhs: IntTerm
    rel: str
    rhs: IntTerm

    def __post_init__(self) -> None:
        if self.rel not in RELATIONS:
            raise ValueError(f"unknown relation {self.rel!r}")
        object.__setattr__(self, "lhs", as_term(self.lhs))
        object.__setattr__(self, "rhs", as_term(self.rhs))


@dataclass(frozen=True)
class And(Formula):
    parts: tuple[Formula, ...]


@dataclass(frozen=True)
class Or(Formula):
    parts: tuple[Formula, ...]


def conj(*parts: Formula) -> Formula:
    return parts[0] if len(parts) == 1 else And(tuple(parts))


def disj(*parts: Formula) -> Formula:
    return parts[0] if len(parts) == 1 else Or(tuple(parts))


# ---------------------------------------------------------------------------
# statements


class Statement:
    target: str | None

    def reads(self) -> tuple[str, ...]:
        return ()


@dataclass(frozen=True)
class Concat(Statement):
    target: str
    left: str
    right: str

    def reads(self) -> tuple[str, ...]:
        return (self.left, self.right)


@dataclass(frozen=True)
class ReplaceAll(Statement):
    target: str
    pattern: Regex
    replacement: str
    source: str

    def reads(self) -> tuple[str, ...]:
        return (self.source,)


@dataclass(frozen=True)
class Replace(Statement):
    target: str
    pattern: Regex
    replacement: str
    source: str

    def reads(self) -> tuple[str, ...]:
        return (self.source,)


@dataclass(frozen=True)
class Reverse(Statement):
    target: str
    source: str

    def reads(self) -> tuple[str, ...]:
        return (self.source,)


@dataclass(frozen=True)
class Transduce(Statement):
    target: str
    transducer: Nft
    source: str

    def reads(self) -> tuple[str, ...]:
        return (self.source,)


@dataclass(frozen=True)
class Substring(Statement):
    target: str
    source: str
    start: IntTerm
    length: IntTerm

    def reads(self) -> tuple[str, ...]:
        return (self.source,) + tuple(string_vars_of_term(self.start)) + tuple(
            string_vars_of_term(self.length))


@dataclass(frozen=True)
class Assert(Statement):
    formula: Formula
    target: None = None

    def reads(self) -> tuple[str, ...]:
        return tuple(string_vars_of_formula(self.formula))


Assignment = TUnion[Concat, ReplaceAll, Replace, Reverse, Transduce, Substring]


# ---------------------------------------------------------------------------
# traversal helpers


def iter_term(t: IntTerm) -> Iterator[IntTerm]:
    yield t
    if isinstance(t, Add):
        yield from iter_term(t.left)
        yield from iter_term(t.right)
    elif isinstance(t, Mul):
        yield from iter_term(t.term)
    elif isinstance(t, IndexOf):
        yield from iter_term(t.start)


def iter_atoms(f: Formula) -> Iterator[Formula]:
    if isinstance(f, (And, Or)):
        for p in f.parts:
            yield from iter_atoms(p)
    else:
        yield f


def string_vars_of_term(t: IntTerm) -> Iterator[str]:
    for s in iter_term(t):
        if isinstance(s, (Length, IndexOf)):
            yield s.x


def string_vars_of_formula(f: Formula) -> Iterator[str]:
    for a in iter_atoms(f):
        if isinstance(a, Member):
            yield a.x
        elif isinstance(a, Arith):
            yield from string_vars_of_term(a.lhs)
            yield from string_vars_of_term(a.rhs)


def int_vars_of_term(t: IntTerm) -> Iterator[Var]:
    for s in iter_term(t):
        if isinstance(s, IntVar):
            yield s.var


def int_vars_of_formula(f: Formula) -> Iterator[Var]:
    for a in iter_atoms(f):
        if isinstance(a, Arith):
            yield from int_vars_of_term(a.lhs)
            yield from int_vars_of_term(a.rhs)
        elif isinstance(a, Member) and isinstance(a.aut, Cefa):
            yield from a.aut.registers


def int_vars_of_statement(s: Statement) -> Iterator[Var]:
    if isinstance(s, Assert):
        yield from int_vars_of_formula(s.formula)
    elif isinstance(s, Substring):
        yield from int_vars_of_term(s.start)
        yield from int_vars_of_term(s.length)


# ---------------------------------------------------------------------------
# programs


@dataclass(frozen=True)
class SlintProgram:
    statements: tuple[Statement, ...]
    declared_strings: tuple[str, ...] = ()
    declared_ints: tuple[Var, ...] = ()

    def __post_init__(self) -> None:
        object.__setattr__(self, "statements", tuple(self.statements))

    def assigned(self) -> dict[str, int]:
        return {s.target: k for k, s in enumerate(self.statements) if s.target is not None}

    def string_vars(self) -> list[str]:
        seen: dict[str, None] = dict.fromkeys(self.declared_strings)
        for s in self.statements:
            if s.target is not None:
                seen.setdefault(s.target)
            for x in s.reads():
                seen.setdefault(x)
        return list(seen)

    def string_inputs(self) -> list[str]:
        assigned = self.assigned()
        return [x for x in self.string_vars() if x not in assigned]

    def int_inputs(self) -> list[Var]:
        seen: dict[Var, None] = dict.fromkeys(self.declared_ints)
        for s in self.statements:
            for v in int_vars_of_statement(s):
                seen.setdefault(v)
        return list(seen)

    def validate_ssa(self) -> None:
        first_use: dict[str, int] = {}
        assigned: dict[str, int] = {}
        for k, s in enumerate(self.statements):
            for x in s.reads():
                first_use.setdefault(x, k)
            if s.target is not None:
                if s.target in assigned:
                    raise NotStraightLine(
                        f"variable {s.target!r} assigned twice (statements {assigned[s.target]} and {k})")
                if s.target in first_use:
                    raise NotStraightLine(
                        f"variable {s.target!r} read at statement {first_use[s.target]} "
                        f"before its assignment at statement {k}")
                assigned[s.target] = k
                first_use.setdefault(s.target, k)

    def __str__(self) -> str:
        return "\n".join(show_statement(s) for s in self.statements)


# ---------------------------------------------------------------------------
# pretty printing


def show_term(t: IntTerm) -> str:
    if isinstance(t, IntVar):
        return t.var.name
    if isinstance(t, IntConst):
        return str(t.value)
    if isinstance(t, Length):
        return f"length({t.x})"
    if isinstance(t, IndexOf):
        return f"indexof[{t.pattern!r}]({t.x}, {show_term(t.start)})"
    if isinstance(t, Add):
        return f"({show_term(t.left)} + {show_term(t.right)})"
    if isinstance(t, Mul):
        return f"{t.coef}*{show_term(t.term)}"
    raise TypeError(t)


def show_formula(f: Formula) -> str:
    if isinstance(f, Member):
        return f"{f.x} in {f.label or repr(f.aut)}"
    if isinstance(f, Arith):
        return f"{show_term(f.lhs)} {f.rel} {show_term(f.rhs)}"
    if isinstance(f, And):
        return "(" + " and ".join(map(show_formula, f.parts)) + ")"
    if isinstance(f, Or):
        return "(" + " or ".join(map(show_formula, f.parts)) + ")"
    raise TypeError(f)


def show_statement(s: Statement) -> str:
    if isinstance(s, Concat):
        return f"{s.target} := {s.left} . {s.right}"
    if isinstance(s, ReplaceAll):
        return f"{s.target} := replaceall[{to_text(s.pattern)}, {s.replacement!r}]({s.source})"
    if isinstance(s, Replace):
        return f"{s.target} := replace[{to_text(s.pattern)}, {s.replacement!r}]({s.source})"
    if isinstance(s, Reverse):
        return f"{s.target} := reverse({s.source})"
    if isinstance(s, Transduce):
        return f"{s.target} := {s.transducer.name}({s.source})"
    if isinstance(s, Substring):
        return f"{s.target} := substring({s.source}, {show_term(s.start)}, {show_term(s.length)})"
    if isinstance(s, Assert):
        return f"assert({show_formula(s.formula)})"
    raise TypeError(s)


_tmp = itertools.count()


def temp_name(prefix: str = "t") -> str:
    """Engine-introduced name; ``#`` cannot occur in an unquoted SMT-LIB symbol."""
    return f"{prefix}#{next(_tmp)}"
