"""Regular expressions: AST, concrete-syntax parser and NFA compiler.

Concrete syntax::

    union   := concat ('|' concat)*
    concat  := postfix*
    postfix := atom ('*' | '+' | '?')*
    atom    := letter | '\\' any | '[' items ']' | '(' union ')' | '()'

``[]`` denotes the empty language and ``()`` the empty word.  Inside a class,
``x-y`` is an inclusive range.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

from .alphabet import ASCII, Alphabet, CharClass
from .automata import NTrans, Nfa
from .errors import ParseError

METACHARS = set("|*+?()[]\\")


class Regex:
    """Base class of regex AST nodes."""

    def __or__(self, other: "Regex") -> "Regex":
        return Union(self, other)

    def __add__(self, other: "Regex") -> "Regex":
        return Concat(self, other)


@dataclass(frozen=True)
class EmptySet(Regex):
    pass


@dataclass(frozen=True)
class Epsilon(Regex):
    pass


@dataclass(frozen=True)
class Lit(Regex):
    cls: CharClass


@dataclass(frozen=True)
class Concat(Regex):
    left: Regex
    right: Regex


@dataclass(frozen=True)
class Union(Regex):
    left: Regex
    right: Regex


@dataclass(frozen=True)
class Star(Regex):
    body: Regex


@dataclass(frozen=True)
class Plus(Regex):
    body: Regex


@dataclass(frozen=True)
class Optional(Regex):
    body: Regex


def lit(ch: str) -> Lit:
    return Lit(CharClass.of(ch))


def word(w: str) -> Regex:
    if not w:
        return Epsilon()
    out: Regex = lit(w[0])
    for ch in w[1:]:
        out = Concat(out, lit(ch))
    return out


# ---------------------------------------------------------------------------
# printing


def _esc(ch: str) -> str:
    return "\\" + ch if ch in METACHARS or ch == "-" else ch


def to_text(e: Regex) -> str:
    """Render ``e`` back into concrete syntax (parse(to_text(e)) == e up to grouping)."""
    if isinstance(e, EmptySet):
        return "[]"
    if isinstance(e, Epsilon):
        return "()"
    if isinstance(e, Lit):
        rs = e.cls.ranges
        if len(rs) == 1 and rs[0][0] == rs[0][1]:
            return _esc(chr(rs[0][0]))
        body = "".join(_esc(chr(lo)) if lo == hi else f"{_esc(chr(lo))}-{_esc(chr(hi))}"
                       for lo, hi in rs)
        return f"[{body}]"
    if isinstance(e, Concat):
        return _wrap(e.left, (Union,)) + _wrap(e.right, (Union,))
    if isinstance(e, Union):
        return f"{to_text(e.left)}|{to_text(e.right)}"
    op = {Star: "*", Plus: "+", Optional: "?"}[type(e)]
    return _wrap(e.body, (Union, Concat)) + op


def _wrap(e: Regex, kinds: tuple) -> str:
    s = to_text(e)
    return f"({s})" if isinstance(e, kinds) else s


# ---------------------------------------------------------------------------
# parser


class _Parser:
    def __init__(self, text: str):
        self.text = text
        self.pos = 0

    def error(self, msg: str) -> ParseError:
        err = ParseError(f"{msg} at position {self.pos} in regex {self.text!r}")
        err.col = self.pos
        return err

    def peek(self) -> str | None:
        return self.text[self.pos] if self.pos < len(self.text) else None

    def take(self) -> str:
        ch = self.peek()
        if ch is None:
            raise self.error("unexpected end of input")
        self.pos += 1
        return ch

    def parse(self) -> Regex:
        e = self.union()
        if self.pos != len(self.text):
            raise self.error(f"unexpected {self.peek()!r}")
        return e

    def union(self) -> Regex:
        e = self.concat()
        while self.peek() == "|":
            self.pos += 1
            e = Union(e, self.concat())
        return e

    def concat(self) -> Regex:
        parts = []
        while self.peek() is not None and self.peek() not in "|)":
            parts.append(self.postfix())
        if not parts:
            return Epsilon()
        e = parts[0]
        for p in parts[1:]:
            e = Concat(e, p)
        return e

    def postfix(self) -> Regex:
        e = self.atom()
        while self.peek() is not None and self.peek() in "*+?":
            op = self.take()
            e = Star(e) if op == "*" else Plus(e) if op == "+" else Optional(e)
        return e

    def atom(self) -> Regex:
        ch = self.take()
        if ch == "(":
            if self.peek() == ")":
                self.pos += 1
                return Epsilon()
            e = self.union()
            if self.peek() != ")":
                raise self.error("expected ')'")
            self.pos += 1
            return e
        if ch == "[":
            return self.char_class()
        if ch == "\\":
            return lit(self.take())
        if ch in "*+?":
            self.pos -= 1
            raise self.error(f"nothing to repeat with {ch!r}")
        if ch in ")]":
            self.pos -= 1
            raise self.error(f"unbalanced {ch!r}")
        return lit(ch)

    def char_class(self) -> Regex:
        ranges = []
        while True:
            ch = self.peek()
            if ch is None:
                raise self.error("unterminated class")
            if ch == "]":
                self.pos += 1
                break
            lo = self.class_char()
            hi = lo
            if self.peek() == "-" and self.pos + 1 < len(self.text) and self.text[self.pos + 1] != "]":
                self.pos += 1
                hi = self.class_char()
            if ord(hi) < ord(lo):
                raise self.error(f"reversed range {lo}-{hi}")
            ranges.append((ord(lo), ord(hi)))
        if not ranges:
            return EmptySet()
        return Lit(CharClass(tuple(ranges)))

    def class_char(self) -> str:
        ch = self.take()
        return self.take() if ch == "\\" else ch


def parse_regex(text: str) -> Regex:
    return _Parser(text).parse()


# ---------------------------------------------------------------------------
# compilation


class _Builder:
    """Thompson construction with explicit epsilon edges."""

    def __init__(self, alphabet: Alphabet):
        self.alphabet = alphabet
        self.n = 0
        self.eps: list[tuple[int, int]] = []
        self.edges: list[tuple[int, CharClass, int]] = []

    def new(self) -> int:
        self.n += 1
        return self.n - 1

    def build(self, e: Regex) -> tuple[int, int]:
        s, f = self.new(), self.new()
        if isinstance(e, EmptySet):
            pass
        elif isinstance(e, Epsilon):
            self.eps.append((s, f))
        elif isinstance(e, Lit):
            label = e.cls & self.alphabet.full
            if label:
                self.edges.append((s, label, f))
        elif isinstance(e, Concat):
            s1, f1 = self.build(e.left)
            s2, f2 = self.build(e.right)
            self.eps += [(s, s1), (f1, s2), (f2, f)]
        elif isinstance(e, Union):
            s1, f1 = self.build(e.left)
            s2, f2 = self.build(e.right)
            self.eps += [(s, s1), (s, s2), (f1, f), (f2, f)]
        elif isinstance(e, (Star, Plus, Optional)):
            s1, f1 = self.build(e.body)
            self.eps += [(s, s1), (f1, f)]
            if not isinstance(e, Plus):
                self.eps.append((s, f))
            if not isinstance(e, Optional):
                self.eps.append((f1, s1))
        else:
            raise TypeError(f"not a regex node: {e!r}")
        return s, f


def remove_epsilon(n: int, eps: list[tuple[int, int]], edges: list[tuple[int, CharClass, int]],
                   initial: set[int], final: set[int], alphabet: Alphabet) -> Nfa:
    eadj: list[list[int]] = [[] for _ in range(n)]
    for a, b in eps:
        eadj[a].append(b)
    closure = []
    for q in range(n):
        seen = {q}
        todo = [q]
        while todo:
            p = todo.pop()
            for r in eadj[p]:
                if r not in seen:
                    seen.add(r)
                    todo.append(r)
        closure.append(seen)
    out: list[list[tuple[CharClass, int]]] = [[] for _ in range(n)]
    for a, c, b in edges:
        out[a].append((c, b))
    merged: dict[tuple[int, int], CharClass] = {}
    for p in range(n):
        for q in closure[p]:
            for c, r in out[q]:
                key = (p, r)
                merged[key] = merged[key] | c if key in merged else c
    fin = {p for p in range(n) if closure[p] & final}
    trans = tuple(NTrans(a, c, b) for (a, b), c in sorted(merged.items(), key=lambda kv: kv[0]))
    return Nfa(n, trans, initial, fin, alphabet).trim()


@lru_cache(maxsize=512)
def regex_to_nfa(e: Regex, alphabet: Alphabet = ASCII) -> Nfa:
    b = _Builder(alphabet)
    s, f = b.build(e)
    return remove_epsilon(b.n, b.eps, b.edges, {s}, {f}, alphabet)


def nullable(e: Regex) -> bool:
    if isinstance(e, (Epsilon, Star, Optional)):
        return True
    if isinstance(e, (EmptySet, Lit)):
        return False
    if isinstance(e, Concat):
        return nullable(e.left) and nullable(e.right)
    if isinstance(e, Union):
        return nullable(e.left) or nullable(e.right)
    return nullable(e.body)


def matches(e: Regex, w: str) -> bool:
    """Direct recursive matcher, independent of the automaton compiler."""

    @lru_cache(maxsize=None)
    def m(node: Regex, i: int, j: int) -> bool:
        if isinstance(node, EmptySet):
            return False
        if isinstance(node, Epsilon):
            return i == j
        if isinstance(node, Lit):
            return j == i + 1 and w[i] in node.cls
        if isinstance(node, Concat):
            return any(m(node.left, i, k) and m(node.right, k, j) for k in range(i, j + 1))
        if isinstance(node, Union):
            return m(node.left, i, j) or m(node.right, i, j)
        if isinstance(node, Optional):
            return i == j or m(node.body, i, j)
        if isinstance(node, (Star, Plus)):
            if i == j:
                return isinstance(node, Star) or m(node.body, i, i)
            # split off a nonempty first iteration
            return any(m(node.body, i, k) and m(Star(node.body), k, j) for k in range(i + 1, j + 1))
        raise TypeError(node)

    return m(e, 0, len(w))
