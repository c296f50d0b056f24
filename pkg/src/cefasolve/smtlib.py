"""A subset of SMT-LIB 2 for string constraints, translated into straight-line programs.

Equations ``(= x f(...))`` whose left side is a variable not yet defined become
assignments; nested string terms are named by fresh temporaries.  The
assignments are then ordered so every variable is defined before it is read.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Mapping

from .alphabet import ASCII, Alphabet, CharClass
from .automata import Nft, Var, fresh
from .builders import build_const_nfa
from .errors import InputError, NotStraightLine, ParseError, UnsupportedError
from .program import (And, Arith, Assert, Concat, Formula, IndexOf, IntConst, IntTerm, IntVar,
                      Length, Member, Mul, Or, Replace, ReplaceAll, Reverse, SlintProgram,
                      Statement, Substring, Transduce, conj, disj, temp_name)
from .regex import (Concat as RConcat, EmptySet, Epsilon, Lit, Optional, Plus, Regex, Star,
                    Union as RUnion, regex_to_nfa, word)
from .sexpr import Num, SExpr, SList, Str, Sym, encode_string_literal, position, read_all, show
from .transducers import load_builtin, parse_transducer_def

STRING_FUNCS = {"str.++", "str.replace_all", "str.replaceall", "str.replace", "str.rev",
                "str.substr", "str.at", "str.transduce"}
INT_RELS = {"=": "=", "<=": "<=", "<": "<", ">=": ">=", ">": ">", "distinct": "!="}


@dataclass
class ParsedScript:
    declarations: list[tuple[str, str]] = field(default_factory=list)
    assertions: list[SExpr] = field(default_factory=list)
    commands: list[SList] = field(default_factory=list)
    transducers: dict[str, Nft] = field(default_factory=dict)
    forms: list[SExpr] = field(default_factory=list)

    def sort_of(self, name: str) -> str | None:
        for n, s in self.declarations:
            if n == name:
                return s
        return None


def parse_smtlib(text: str, alphabet: Alphabet = ASCII) -> ParsedScript:
    script = ParsedScript()
    for form in read_all(text):
        if not isinstance(form, SList) or not form.head():
            raise ParseError("expected a command", *position(form))
        head = form.head()
        script.forms.append(form)
        if head in ("declare-fun", "declare-const"):
            if head == "declare-fun":
                if len(form) != 4 or not isinstance(form[2], SList) or len(form[2]):
                    raise UnsupportedError("only nullary declare-fun is supported")
                sort = form[3]
            else:
                if len(form) != 3:
                    raise ParseError("declare-const takes a name and a sort", *position(form))
                sort = form[2]
            if not isinstance(form[1], Sym) or not isinstance(sort, Sym):
                raise ParseError("bad declaration", *position(form))
            if sort.name not in ("String", "Int"):
                raise UnsupportedError(f"sort {sort.name} is not supported")
            if script.sort_of(form[1].name) is not None:
                raise ParseError(f"{form[1].name} declared twice", *position(form))
            script.declarations.append((form[1].name, sort.name))
        elif head == "assert":
            if len(form) != 2:
                raise ParseError("assert takes one term", *position(form))
            script.assertions.append(form[1])
        elif head == "define-transducer":
            t = parse_transducer_def(form, alphabet)
            script.transducers[t.name] = t
        elif head in ("set-logic", "set-info", "set-option", "check-sat", "get-model",
                      "exit", "get-info"):
            script.commands.append(form)
        else:
            raise UnsupportedError(f"command {head} is not supported")
    return script


def print_script(s: ParsedScript) -> str:
    return "\n".join(show(f) for f in s.forms) + "\n"


# ---------------------------------------------------------------------------
# translation


@dataclass
class Translation:
    program: SlintProgram
    string_names: list[str]
    int_vars: dict[str, Var]


class _Translator:
    def __init__(self, script: ParsedScript, alphabet: Alphabet, strict: bool):
        self.script = script
        self.alphabet = alphabet
        self.strict = strict
        self.sorts = dict(script.declarations)
        self.int_vars = {n: fresh(n) for n, s in script.declarations if s == "Int"}
        self.defined: set[str] = set()
        self.assignments: list[Statement] = []
        self.asserts: list[Statement] = []

    # -- helpers ------------------------------------------------------------
    def err(self, msg: str, e: SExpr) -> ParseError:
        return ParseError(msg, *position(e))

    def check_word(self, w: str, e: SExpr) -> None:
        try:
            self.alphabet.check_word(w)
        except InputError as exc:
            raise self.err(str(exc), e) from None

    def is_string(self, e: SExpr) -> bool:
        if isinstance(e, Str):
            return True
        if isinstance(e, Sym):
            return self.sorts.get(e.name) == "String"
        if isinstance(e, SList):
            return e.head() in STRING_FUNCS
        return False

    # -- string terms ---------------------------------------------------------
    def string_var(self, e: SExpr) -> str:
        """Name of a string variable holding the value of ``e``."""
        if isinstance(e, Sym):
            if self.sorts.get(e.name) != "String":
                raise self.err(f"{e.name} is not a declared string", e)
            return e.name
        if isinstance(e, Str):
            self.check_word(e.value, e)
            t = temp_name("lit")
            self.asserts.append(Assert(Member(t, build_const_nfa(e.value, self.alphabet),
                                              label=encode_string_literal(e.value))))
            return t
        t = temp_name()
        self.assign(t, e)
        return t

    def assign(self, x: str, e: SExpr) -> None:
        if x in self.defined:
            raise NotStraightLine(f"{x} is defined twice")
        self.defined.add(x)
        if isinstance(e, (Sym, Str)):
            # x = y: x := y . ""
            y = self.string_var(e)
            self.assignments.append(Concat(x, y, self.string_var(Str(""))))
            return
        if not isinstance(e, SList) or e.head() not in STRING_FUNCS:
            raise self.err("unsupported string term", e)
        h = e.head()
        args = e.items[1:]
        if h == "str.++":
            if not args:
                self.assignments.append(Concat(x, self.string_var(Str("")), self.string_var(Str(""))))
                return
            parts = [self.string_var(a) for a in args]
            while len(parts) > 2:
                t = temp_name()
                self.defined.add(t)
                self.assignments.append(Concat(t, parts[-2], parts[-1]))
                parts[-2:] = [t]
            if len(parts) == 1:
                parts.append(self.string_var(Str("")))
            self.assignments.append(Concat(x, parts[0], parts[1]))
        elif h in ("str.replace_all", "str.replaceall", "str.replace"):
            if len(args) != 3:
                raise self.err(f"{h} takes three arguments", e)
            src = self.string_var(args[0])
            pattern = self.pattern(args[1])
            if not isinstance(args[2], Str):
                raise UnsupportedError(f"{h} with a non-constant replacement")
            self.check_word(args[2].value, args[2])
            cls = Replace if h == "str.replace" else ReplaceAll
            self.assignments.append(cls(x, pattern, args[2].value, src))
        elif h == "str.rev":
            self.assignments.append(Reverse(x, self.string_var(self.one(args, e))))
        elif h == "str.substr":
            if len(args) != 3:
                raise self.err("str.substr takes three arguments", e)
            src = self.string_var(args[0])
            self.assignments.append(Substring(x, src, self.int_term(args[1]), self.int_term(args[2])))
        elif h == "str.at":
            if len(args) != 2:
                raise self.err("str.at takes two arguments", e)
            src = self.string_var(args[0])
            self.assignments.append(Substring(x, src, self.int_term(args[1]), IntConst(1)))
        elif h == "str.transduce":
            if len(args) != 2 or not isinstance(args[0], Sym):
                raise self.err("str.transduce takes a transducer name and a string", e)
            t = self.transducer(args[0])
            self.assignments.append(Transduce(x, t, self.string_var(args[1])))

    def one(self, args, e):
        if len(args) != 1:
            raise self.err("expected one argument", e)
        return args[0]

    def pattern(self, e: SExpr) -> Regex:
        if isinstance(e, Str):
            if not e.value:
                raise UnsupportedError("replacing the empty string is not supported")
            self.check_word(e.value, e)
            return word(e.value)
        if isinstance(e, SList) and e.head() and e.head().startswith("re."):
            return self.regex(e)
        if isinstance(e, SList) and e.head() == "str.to_re":
            return self.regex(e)
        raise UnsupportedError("replace patterns must be literals or regular expressions")

    def transducer(self, name: Sym) -> Nft:
        if name.name in self.script.transducers:
            return self.script.transducers[name.name]
        try:
            return load_builtin(name.name, self.alphabet)
        except InputError:
            raise self.err(f"unknown transducer {name.name}", name) from None

    # -- regexes -------------------------------------------------------------
    def regex(self, e: SExpr) -> Regex:
        if isinstance(e, Sym):
            if e.name == "re.allchar":
                return Lit(self.alphabet.full)
            if e.name == "re.all":
                return Star(Lit(self.alphabet.full))
            if e.name in ("re.none", "re.nostr"):
                return EmptySet()
            raise self.err(f"unknown regex {e.name}", e)
        if not isinstance(e, SList):
            raise self.err("expected a regular expression", e)
        if isinstance(e[0], SList) and len(e[0]) >= 2 and isinstance(e[0][0], Sym) \
                and e[0][0].name == "_":
            return self.indexed_regex(e)
        h = e.head()
        args = e.items[1:]
        if h == "str.to_re" or h == "str.to.re":
            lit = self.one(args, e)
            if not isinstance(lit, Str):
                raise UnsupportedError("str.to_re needs a literal")
            self.check_word(lit.value, lit)
            return word(lit.value)
        if h == "re.range":
            if len(args) != 2 or not all(isinstance(a, Str) and len(a.value) == 1 for a in args):
                return EmptySet()
            cls = CharClass.range(args[0].value, args[1].value) & self.alphabet.full
            return Lit(cls) if cls else EmptySet()
        if h == "re.++":
            return _fold(RConcat, [self.regex(a) for a in args], Epsilon())
        if h == "re.union":
            return _fold(RUnion, [self.regex(a) for a in args], EmptySet())
        if h == "re.*":
            return Star(self.regex(self.one(args, e)))
        if h == "re.+":
            return Plus(self.regex(self.one(args, e)))
        if h == "re.opt":
            return Optional(self.regex(self.one(args, e)))
        raise UnsupportedError(f"regex operator {h} is not supported")

    def indexed_regex(self, e: SList) -> Regex:
        idx = e[0]
        op = idx[1].name if isinstance(idx[1], Sym) else ""
        nums = [x.value for x in idx.items[2:] if isinstance(x, Num)]
        body = self.regex(self.one(e.items[1:], e))
        if op == "re.^" and len(nums) == 1:
            lo, hi = nums[0], nums[0]
        elif op == "re.loop" and len(nums) == 2:
            lo, hi = nums
        else:
            raise UnsupportedError(f"indexed regex {show(idx)} is not supported")
        parts = [body] * lo + [Optional(body)] * max(hi - lo, 0)
        return _fold(RConcat, parts, Epsilon()) if hi >= lo else EmptySet()

    # -- integer terms ----------------------------------------------------------
    def int_term(self, e: SExpr) -> IntTerm:
        if isinstance(e, Num):
            return IntConst(e.value)
        if isinstance(e, Sym):
            if e.name in self.int_vars:
                return IntVar(self.int_vars[e.name])
            raise self.err(f"{e.name} is not a declared integer", e)
        if not isinstance(e, SList):
            raise self.err("expected an integer term", e)
        h = e.head()
        args = e.items[1:]
        if h == "str.len":
            return Length(self.string_var(self.one(args, e)))
        if h == "str.indexof":
            if len(args) != 3:
                raise self.err("str.indexof takes three arguments", e)
            if not isinstance(args[1], Str):
                raise UnsupportedError("str.indexof needs a literal needle")
            if not args[1].value:
                raise UnsupportedError("str.indexof with an empty needle")
            self.check_word(args[1].value, args[1])
            return IndexOf(self.string_var(args[0]), args[1].value, self.int_term(args[2]),
                           self.strict)
        if h == "+":
            terms = [self.int_term(a) for a in args]
            acc = terms[0]
            for t in terms[1:]:
                acc = acc + t
            return acc
        if h == "-":
            terms = [self.int_term(a) for a in args]
            if len(terms) == 1:
                return -terms[0]
            acc = terms[0]
            for t in terms[1:]:
                acc = acc - t
            return acc
        if h == "*":
            terms = [self.int_term(a) for a in args]
            consts = [t for t in terms if isinstance(t, IntConst)]
            others = [t for t in terms if not isinstance(t, IntConst)]
            if len(others) > 1:
                raise UnsupportedError("nonlinear multiplication")
            c = 1
            for t in consts:
                c *= t.value
            return Mul(c, others[0]) if others else IntConst(c)
        raise UnsupportedError(f"integer operator {h} is not supported")

    # -- formulas -------------------------------------------------------------
    def formula(self, e: SExpr, top: bool) -> Formula | None:
        """Translate a boolean term; ``None`` means it became an assignment."""
        if isinstance(e, Sym) and e.name == "true":
            return And(())
        if not isinstance(e, SList):
            raise self.err("expected a boolean term", e)
        h = e.head()
        args = e.items[1:]
        if h == "and":
            parts = [self.formula(a, top) for a in args]
            parts = [p for p in parts if p is not None]
            return conj(*parts) if parts else None if top else And(())
        if h == "or":
            return disj(*[self._nonassign(a) for a in args])
        if h == "not":
            return self.negation(self.one(args, e))
        if h == "str.in_re" or h == "str.in.re":
            if len(args) != 2:
                raise self.err("str.in_re takes two arguments", e)
            x = self.string_var(args[0])
            return Member(x, regex_to_nfa(self.regex(args[1]), self.alphabet), label=show(args[1]))
        if h in ("=", "distinct") and len(args) == 2 and self.is_string(args[0]) \
                and self.is_string(args[1]):
            return self.string_equation(h, args[0], args[1], top, e)
        if h in INT_RELS:
            if len(args) != 2:
                chain = [SList((Sym(h), a, b)) for a, b in zip(args, args[1:])] if h != "distinct" \
                    else [SList((Sym(h), a, b)) for a, b in itertools.combinations(args, 2)]
                return conj(*[self.formula(c, False) for c in chain])
            return Arith(self.int_term(args[0]), INT_RELS[h], self.int_term(args[1]))
        raise UnsupportedError(f"boolean operator {h} is not supported")

    def _nonassign(self, e: SExpr) -> Formula:
        f = self.formula(e, False)
        if f is None:
            raise UnsupportedError("string definitions under a disjunction")
        return f

    def negation(self, e: SExpr) -> Formula:
        if isinstance(e, SList) and e.head() == "=" and len(e) == 3:
            if self.is_string(e[1]) and self.is_string(e[2]):
                return self.string_equation("distinct", e[1], e[2], False, e)
            return Arith(self.int_term(e[1]), "!=", self.int_term(e[2]))
        if isinstance(e, SList) and e.head() in ("<=", "<", ">=", ">") and len(e) == 3:
            flip = {"<=": ">", "<": ">=", ">=": "<", ">": "<="}[e.head()]
            return Arith(self.int_term(e[1]), flip, self.int_term(e[2]))
        raise UnsupportedError("negation is only supported on (in)equalities")

    def string_equation(self, h: str, a: SExpr, b: SExpr, top: bool, e: SExpr) -> Formula | None:
        if h == "distinct":
            x, y = self.string_var(a), self.string_var(b)
            return self.disequality(x, y)
        for lhs, rhs in ((a, b), (b, a)):
            if isinstance(rhs, Str):
                self.check_word(rhs.value, rhs)
                return Member(self.string_var(lhs), build_const_nfa(rhs.value, self.alphabet),
                              label=encode_string_literal(rhs.value))
        if not top:
            raise UnsupportedError("string equations under a disjunction")
        for lhs, rhs in ((a, b), (b, a)):
            if isinstance(lhs, Sym) and lhs.name not in self.defined and \
                    self.sorts.get(lhs.name) == "String" and not _mentions(rhs, lhs.name):
                self.assign(lhs.name, rhs)
                return None
        if isinstance(a, Sym) and isinstance(b, Sym) and a.name == b.name:
            return And(())
        for lhs, rhs in ((a, b), (b, a)):
            if isinstance(lhs, Sym) and _mentions(rhs, lhs.name):
                raise NotStraightLine(f"{lhs.name} is defined in terms of itself")
        raise UnsupportedError(f"cannot orient string equation {show(e)}")

    def disequality(self, x: str, y: str) -> Formula:
        stmts, f = desugar_disequality(x, y, self.alphabet)
        for s in stmts:
            self.defined.add(s.target)
        self.assignments.extend(stmts)
        return f

    # -- driver -----------------------------------------------------------------
    def run(self) -> Translation:
        for a in self.script.assertions:
            f = self.formula(a, True)
            if f is not None:
                self.asserts.append(Assert(f))
        ordered = _order(self.assignments)
        strings = [n for n, s in self.script.declarations if s == "String"]
        ints = tuple(self.int_vars.values())
        prog = SlintProgram(tuple(ordered) + tuple(self.asserts), tuple(strings), ints)
        prog.validate_ssa()
        return Translation(prog, strings, dict(self.int_vars))


def _fold(ctor, parts: list[Regex], unit: Regex) -> Regex:
    if not parts:
        return unit
    acc = parts[-1]
    for p in reversed(parts[:-1]):
        acc = ctor(p, acc)
    return acc


def _mentions(e: SExpr, name: str) -> bool:
    if isinstance(e, Sym):
        return e.name == name
    if isinstance(e, SList):
        return any(_mentions(x, name) for x in e.items)
    return False


def _order(assignments: list[Statement]) -> list[Statement]:
    """Topological order (definitions before uses); cycles are not straight-line."""
    by_target = {s.target: s for s in assignments}
    done: set[str] = set()
    visiting: set[str] = set()
    out: list[Statement] = []

    def visit(x: str) -> None:
        if x in done or x not in by_target:
            return
        if x in visiting:
            raise NotStraightLine(f"cyclic definition through {x}")
        visiting.add(x)
        for y in by_target[x].reads():
            visit(y)
        visiting.discard(x)
        done.add(x)
        out.append(by_target[x])

    for s in assignments:
        visit(s.target)
    return out


def desugar_disequality(x: str, y: str, alphabet: Alphabet = ASCII) -> tuple[list[Statement], Formula]:
    """``x != y`` as: lengths differ, or the letters at some position ``i`` differ."""
    i = IntVar(fresh("neq_i"))
    z1, z2 = temp_name("neq"), temp_name("neq")
    stmts: list[Statement] = [Substring(z1, x, i, IntConst(1)), Substring(z2, y, i, IntConst(1))]
    cases: list[Formula] = [Arith(Length(x), "!=", Length(y))]
    full = alphabet.full
    for ch in alphabet.chars():
        a = CharClass.of(ch)
        cases.append(And((Member(z1, build_const_nfa(ch, alphabet), label=repr(ch)),
                          Member(z2, _class_nfa(full - a, alphabet), label=f"not {ch!r}"))))
    return stmts, Or(tuple(cases))


def _class_nfa(cls: CharClass, alphabet: Alphabet):
    from .builders import build_class_nfa
    return build_class_nfa(cls, alphabet)


def script_to_program(script: ParsedScript, alphabet: Alphabet = ASCII,
                      strict: bool = False) -> Translation:
    return _Translator(script, alphabet, strict).run()


def load_program(text: str, alphabet: Alphabet = ASCII, strict: bool = False) -> Translation:
    return script_to_program(parse_smtlib(text, alphabet), alphabet, strict)


def format_model(t: Translation, strings: Mapping[str, str], ints: Mapping[Var, int]) -> str:
    lines = ["(model"]
    for n in t.string_names:
        lines.append(f"  (define-fun {n} () String {encode_string_literal(strings.get(n, ''))})")
    for n, v in t.int_vars.items():
        val = ints.get(v, 0)
        lit = str(val) if val >= 0 else f"(- {-val})"
        lines.append(f"  (define-fun {n} () Int {lit})")
    lines.append(")")
    return "\n".join(lines)
