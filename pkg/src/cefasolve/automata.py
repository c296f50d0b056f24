"""Finite automata, transducers and cost-enriched automata.

States are dense integers ``0..n_states-1``.  Every automaton is an immutable
value; derived indexes (adjacency lists) are cached lazily.
"""

from __future__ import annotations

import itertools
import threading
from collections import deque
from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterable, NamedTuple, Sequence

from .alphabet import ASCII, Alphabet, CharClass
from .errors import InputError, PreconditionError, ResourceLimit

# ---------------------------------------------------------------------------
# variables / registers

_counter = itertools.count(1)
_counter_lock = threading.Lock()


@dataclass(frozen=True, order=True)
class Var:
    """An integer variable or cost register; identity is the ``uid``."""

    uid: int
    name: str = field(compare=False, default="v")

    def __repr__(self) -> str:
        return f"{self.name}#{self.uid}"

    __str__ = __repr__


def fresh(name: str = "r") -> Var:
    with _counter_lock:
        uid = next(_counter)
    return Var(uid, name)


def fresh_vector(names: Iterable[str]) -> tuple[Var, ...]:
    return tuple(fresh(n) for n in names)


# ---------------------------------------------------------------------------
# transitions


class NTrans(NamedTuple):
    src: int
    label: CharClass
    dst: int


class FTrans(NamedTuple):
    """Transducer transition.  With ``copy`` set the output is the letter read."""

    src: int
    label: CharClass
    dst: int
    output: str = ""
    copy: bool = False


class CTrans(NamedTuple):
    src: int
    label: CharClass
    dst: int
    update: tuple[int, ...]


class CostString(NamedTuple):
    word: str
    costs: tuple[int, ...]


def _check_states(n: int, trans: Iterable, initial: Iterable[int], final: Iterable[int]) -> None:
    for t in trans:
        if not (0 <= t.src < n and 0 <= t.dst < n):
            raise InputError(f"transition {t} has an endpoint outside 0..{n - 1}")
        if not t.label:
            raise InputError(f"transition {t} has an empty label")
    for q in itertools.chain(initial, final):
        if not 0 <= q < n:
            raise InputError(f"state {q} outside 0..{n - 1}")


class _Graph:
    """Mixin providing adjacency and reachability for any transition type."""

    n_states: int
    transitions: tuple
    initial: frozenset[int]
    final: frozenset[int]

    @property
    def states(self) -> range:
        return range(self.n_states)

    @cached_property
    def out(self) -> list[list]:
        adj: list[list] = [[] for _ in range(self.n_states)]
        for t in self.transitions:
            adj[t.src].append(t)
        return adj

    @cached_property
    def into(self) -> list[list]:
        adj: list[list] = [[] for _ in range(self.n_states)]
        for t in self.transitions:
            adj[t.dst].append(t)
        return adj

    def forward_reachable(self, start: Iterable[int] | None = None) -> set[int]:
        seen = set(self.initial if start is None else start)
        todo = list(seen)
        while todo:
            q = todo.pop()
            for t in self.out[q]:
                if t.dst not in seen:
                    seen.add(t.dst)
                    todo.append(t.dst)
        return seen

    def backward_reachable(self, start: Iterable[int] | None = None) -> set[int]:
        seen = set(self.final if start is None else start)
        todo = list(seen)
        while todo:
            q = todo.pop()
            for t in self.into[q]:
                if t.src not in seen:
                    seen.add(t.src)
                    todo.append(t.src)
        return seen

    def useful_states(self) -> set[int]:
        return self.forward_reachable() & self.backward_reachable()

    def is_string_empty(self) -> bool:
        return not (self.forward_reachable() & self.final)

    @property
    def size(self) -> int:
        return self.n_states + len(self.transitions)


# ---------------------------------------------------------------------------
# NFA


@dataclass(frozen=True, eq=False)
class Nfa(_Graph):
    n_states: int
    transitions: tuple[NTrans, ...]
    initial: frozenset[int]
    final: frozenset[int]
    alphabet: Alphabet = ASCII

    def __post_init__(self) -> None:
        object.__setattr__(self, "transitions", tuple(NTrans(*t) for t in self.transitions))
        object.__setattr__(self, "initial", frozenset(self.initial))
        object.__setattr__(self, "final", frozenset(self.final))
        _check_states(self.n_states, self.transitions, self.initial, self.final)

    def step(self, current: Iterable[int], ch: str) -> set[int]:
        nxt: set[int] = set()
        for q in current:
            for t in self.out[q]:
                if ch in t.label:
                    nxt.add(t.dst)
        return nxt

    def accepts(self, w: str) -> bool:
        return nfa_accepts(self, w)

    def trim(self) -> "Nfa":
        keep = sorted(self.useful_states())
        if len(keep) == self.n_states:
            return self
        idx = {q: i for i, q in enumerate(keep)}
        trans = [NTrans(idx[t.src], t.label, idx[t.dst]) for t in self.transitions
                 if t.src in idx and t.dst in idx]
        if not keep:
            return Nfa(1, (), {0}, (), self.alphabet)
        return Nfa(len(keep), tuple(trans), {idx[q] for q in self.initial if q in idx},
                   {idx[q] for q in self.final if q in idx}, self.alphabet)

    def reverse(self) -> "Nfa":
        return Nfa(self.n_states, tuple(NTrans(t.dst, t.label, t.src) for t in self.transitions),
                   self.final, self.initial, self.alphabet)

    def __repr__(self) -> str:
        return f"Nfa(states={self.n_states}, transitions={len(self.transitions)})"


def nfa_accepts(a: Nfa, w: str) -> bool:
    a.alphabet.check_word(w)
    cur = set(a.initial)
    for ch in w:
        if not cur:
            return False
        cur = a.step(cur, ch)
    return bool(cur & a.final)


def nfa_product(a: Nfa, b: Nfa) -> Nfa:
    """Intersection of two NFAs (reachable part only)."""
    lifted = cefa_product(lift(a), lift(b))
    return Nfa(lifted.n_states, tuple(NTrans(t.src, t.label, t.dst) for t in lifted.transitions),
               lifted.initial, lifted.final, a.alphabet)


# ---------------------------------------------------------------------------
# NFT


@dataclass(frozen=True, eq=False)
class Nft(_Graph):
    n_states: int
    transitions: tuple[FTrans, ...]
    initial: frozenset[int]
    final: frozenset[int]
    functional: bool = True
    alphabet: Alphabet = ASCII
    name: str = "T"

    def __post_init__(self) -> None:
        object.__setattr__(self, "transitions", tuple(FTrans(*t) for t in self.transitions))
        object.__setattr__(self, "initial", frozenset(self.initial))
        object.__setattr__(self, "final", frozenset(self.final))
        _check_states(self.n_states, self.transitions, self.initial, self.final)
        for t in self.transitions:
            if t.copy and t.output:
                raise InputError("copy transitions carry no literal output")

    @property
    def max_output_length(self) -> int:
        return max((1 if t.copy else len(t.output) for t in self.transitions), default=0)

    def domain(self) -> Nfa:
        """The NFA of inputs having at least one accepting run."""
        return Nfa(self.n_states, tuple(NTrans(t.src, t.label, t.dst) for t in self.transitions),
                   self.initial, self.final, self.alphabet)

    def __repr__(self) -> str:
        return f"Nft({self.name}, states={self.n_states}, transitions={len(self.transitions)})"


# ---------------------------------------------------------------------------
# CEFA


@dataclass(frozen=True, eq=False)
class Cefa(_Graph):
    n_states: int
    registers: tuple[Var, ...]
    transitions: tuple[CTrans, ...]
    initial: frozenset[int]
    final: frozenset[int]
    alphabet: Alphabet = ASCII

    def __post_init__(self) -> None:
        object.__setattr__(self, "registers", tuple(self.registers))
        object.__setattr__(self, "transitions",
                           tuple(CTrans(t[0], t[1], t[2], tuple(t[3])) for t in self.transitions))
        object.__setattr__(self, "initial", frozenset(self.initial))
        object.__setattr__(self, "final", frozenset(self.final))
        if len(set(self.registers)) != len(self.registers):
            raise InputError("register vector has duplicates")
        k = len(self.registers)
        for t in self.transitions:
            if len(t.update) != k:
                raise InputError(f"update {t.update} does not cover {k} registers")
        _check_states(self.n_states, self.transitions, self.initial, self.final)

    @property
    def k(self) -> int:
        return len(self.registers)

    def trim(self) -> "Cefa":
        keep = sorted(self.useful_states())
        if len(keep) == self.n_states:
            return self
        if not keep:
            return Cefa(1, self.registers, (), {0}, (), self.alphabet)
        idx = {q: i for i, q in enumerate(keep)}
        trans = [CTrans(idx[t.src], t.label, idx[t.dst], t.update) for t in self.transitions
                 if t.src in idx and t.dst in idx]
        return Cefa(len(keep), self.registers, tuple(trans),
                    {idx[q] for q in self.initial if q in idx},
                    {idx[q] for q in self.final if q in idx}, self.alphabet)

    def with_ends(self, initial: Iterable[int], final: Iterable[int]) -> "Cefa":
        return Cefa(self.n_states, self.registers, self.transitions, initial, final, self.alphabet)

    def string_nfa(self) -> Nfa:
        return Nfa(self.n_states, tuple(NTrans(t.src, t.label, t.dst) for t in self.transitions),
                   self.initial, self.final, self.alphabet)

    def accepts(self, word: str, costs: Sequence[int]) -> bool:
        return cefa_accepts(self, CostString(word, tuple(costs)))

    def __repr__(self) -> str:
        regs = ",".join(map(str, self.registers))
        return f"Cefa(states={self.n_states}, regs=({regs}), transitions={len(self.transitions)})"


def lift(a: Nfa, registers: Sequence[Var] = ()) -> Cefa:
    """View an NFA as a CEFA whose registers (if any) are never updated."""
    zero = (0,) * len(registers)
    return Cefa(a.n_states, tuple(registers),
                tuple(CTrans(t.src, t.label, t.dst, zero) for t in a.transitions),
                a.initial, a.final, a.alphabet)


def cefa_accepts(a: Cefa, cs: CostString | tuple) -> bool:
    """Exhaustive run search; exponential in the worst case, meant for tests."""
    word, costs = cs
    costs = tuple(costs)
    if len(costs) != a.k:
        raise InputError(f"cost vector of length {len(costs)} for {a.k} registers")
    a.alphabet.check_word(word)
    zero = (0,) * a.k
    if not word:
        return costs == zero and bool(a.initial & a.final)
    configs = {(q, zero) for q in a.initial}
    for ch in word:
        nxt = set()
        for q, acc in configs:
            for t in a.out[q]:
                if ch in t.label:
                    nxt.add((t.dst, tuple(x + y for x, y in zip(acc, t.update))))
        configs = nxt
        if not configs:
            return False
    return any(q in a.final and acc == costs for q, acc in configs)


def cefa_costs(a: Cefa, word: str) -> set[tuple[int, ...]]:
    """All cost vectors ``n`` with ``(word, n)`` accepted."""
    zero = (0,) * a.k
    configs = {(q, zero) for q in a.initial}
    for ch in word:
        configs = {(t.dst, tuple(x + y for x, y in zip(acc, t.update)))
                   for q, acc in configs for t in a.out[q] if ch in t.label}
    return {acc for q, acc in configs if q in a.final}


def cefa_product(a1: Cefa, a2: Cefa, max_states: int | None = None) -> Cefa:
    """Synchronised product over the reachable pairs; registers ``R1 ++ R2``."""
    if set(a1.registers) & set(a2.registers):
        raise PreconditionError("product operands share registers; rename first")
    if a1.alphabet != a2.alphabet:
        raise PreconditionError("product operands use different alphabets")
    index: dict[tuple[int, int], int] = {}
    todo: deque[tuple[int, int]] = deque()
    for p in sorted(a1.initial):
        for q in sorted(a2.initial):
            index[(p, q)] = len(index)
            todo.append((p, q))
    initial = set(index.values())
    trans: list[CTrans] = []
    while todo:
        p, q = todo.popleft()
        s = index[(p, q)]
        out2 = a2.out[q]
        for t1 in a1.out[p]:
            for t2 in out2:
                lab = t1.label & t2.label
                if not lab:
                    continue
                key = (t1.dst, t2.dst)
                d = index.get(key)
                if d is None:
                    d = index[key] = len(index)
                    if max_states is not None and d >= max_states:
                        raise ResourceLimit(f"product exceeds {max_states} states")
                    todo.append(key)
                trans.append(CTrans(s, lab, d, t1.update + t2.update))
    final = {i for (p, q), i in index.items() if p in a1.final and q in a2.final}
    return Cefa(max(len(index), 1), a1.registers + a2.registers, tuple(trans), initial, final,
                a1.alphabet)


def cefa_rename(a: Cefa, fresh_regs: Sequence[Var]) -> Cefa:
    fresh_regs = tuple(fresh_regs)
    if len(fresh_regs) != a.k:
        raise InputError(f"rename needs {a.k} registers, got {len(fresh_regs)}")
    if len(set(fresh_regs)) != len(fresh_regs):
        raise InputError("rename target has duplicates")
    if set(fresh_regs) & set(a.registers):
        raise InputError("rename target collides with current registers")
    return Cefa(a.n_states, fresh_regs, a.transitions, a.initial, a.final, a.alphabet)


def cefa_rename_fresh(a: Cefa) -> Cefa:
    return cefa_rename(a, tuple(fresh(r.name) for r in a.registers))


def string_emptiness(a: Cefa | Nfa) -> bool:
    return a.is_string_empty()


def project(a: Cefa, keep: Iterable[Var]) -> Cefa:
    """Drop registers not in ``keep`` (existential projection of costs)."""
    keep = set(keep)
    pos = [i for i, r in enumerate(a.registers) if r in keep]
    if len(pos) == a.k:
        return a
    return Cefa(a.n_states, tuple(a.registers[i] for i in pos),
                tuple(CTrans(t.src, t.label, t.dst, tuple(t.update[i] for i in pos))
                      for t in a.transitions),
                a.initial, a.final, a.alphabet)


def dump(a: Cefa | Nfa | Nft) -> str:
    """Deterministic textual rendering, one transition per line."""
    lines = []
    regs = getattr(a, "registers", ())
    if regs:
        lines.append("regs: " + " ".join(str(r) for r in regs))
    lines.append("init: " + " ".join(map(str, sorted(a.initial))))
    lines.append("final: " + " ".join(map(str, sorted(a.final))))
    rows = []
    for t in a.transitions:
        label = f"[{t.label.render()}]"
        extra = ""
        if isinstance(t, CTrans):
            extra = "{" + ",".join(f"{r}:{c:+d}" for r, c in zip(regs, t.update)) + "}"
        elif isinstance(t, FTrans):
            extra = "/copy" if t.copy else "/" + repr(t.output)
        rows.append((t.src, t.label.ranges, t.dst, f"{t.src} -{label}{extra}-> {t.dst}"))
    rows.sort(key=lambda r: r[:3] + (r[3],))
    lines.extend(r[3] for r in rows)
    return "\n".join(lines)
