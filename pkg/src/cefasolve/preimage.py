"""Cost-enriched pre-images of CEFA languages under the string functions.

Each operator returns a :class:`CerrRepresentation`: a family of tuples of
CEFAs (one CEFA per string argument) together with linear terms that rebuild
the target automaton's registers from the argument automata's registers.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field
from typing import Callable, Iterator, Sequence

from .automata import CTrans, Cefa, Nft, Var, fresh
from .builders import build_replace_nft, build_replaceall_nft
from .errors import PreconditionError, UnsupportedError
from .lia.linear import Lin
from .regex import Regex

MAX_OUTPUT_LENGTH = 64


@dataclass(frozen=True, eq=False)
class CerrRepresentation:
    """Lazily materialised disjunct family.

    ``slot_registers[j]`` is the register vector of argument ``j``: first the
    registers standing for that argument's integer parameters (``int_registers``),
    then its copies of the target's registers.  ``terms[i]`` rebuilds target
    register ``i``.
    """

    arity: int
    count: int
    slot_registers: tuple[tuple[Var, ...], ...]
    int_registers: tuple[tuple[Var, ...], ...]
    terms: tuple[Lin, ...]
    target_registers: tuple[Var, ...]
    _make: Callable[[int], tuple[Cefa, ...]] = field(repr=False)

    def disjunct(self, i: int) -> tuple[Cefa, ...]:
        if not 0 <= i < self.count:
            raise IndexError(i)
        return self._make(i)

    def __len__(self) -> int:
        return self.count

    def __iter__(self) -> Iterator[tuple[Cefa, ...]]:
        for i in range(self.count):
            yield self._make(i)

    def disjuncts(self) -> list[tuple[Cefa, ...]]:
        return list(self)


def _copies(regs: Sequence[Var], tag: str) -> tuple[Var, ...]:
    return tuple(fresh(f"{r.name}{tag}") for r in regs)


def _identity_terms(regs: Sequence[Var]) -> tuple[Lin, ...]:
    return tuple(Lin.var(r) for r in regs)


def preimage_concat(a: Cefa) -> CerrRepresentation:
    r1 = _copies(a.registers, "'1")
    r2 = _copies(a.registers, "'2")
    left = Cefa(a.n_states, r1, a.transitions, a.initial, (), a.alphabet)
    right = Cefa(a.n_states, r2, a.transitions, (), a.final, a.alphabet)

    def make(q: int) -> tuple[Cefa, ...]:
        return (left.with_ends(a.initial, {q}), right.with_ends({q}, a.final))

    terms = tuple(Lin.var(x) + Lin.var(y) for x, y in zip(r1, r2))
    return CerrRepresentation(2, a.n_states, (r1, r2), ((), ()), terms, a.registers, make)


def preimage_reverse(a: Cefa) -> CerrRepresentation:
    regs = _copies(a.registers, "'")
    rev = Cefa(a.n_states, regs, tuple(CTrans(t.dst, t.label, t.src, t.update) for t in a.transitions),
               a.final, a.initial, a.alphabet)
    return CerrRepresentation(1, 1, (regs,), ((),), _identity_terms(regs), a.registers,
                              lambda i: (rev,))


def preimage_substring(a: Cefa) -> CerrRepresentation:
    """Registers ``(start, length) ++ copies``.  Phases: 0 before the substring,
    1 inside it, 2 after it.  Only meaningful where ``start >= 0`` and
    ``start + length <= |w|``; the engine's case split guarantees that domain."""
    start, length = fresh("sub_start"), fresh("sub_len")
    regs = _copies(a.registers, "'")
    k = a.k
    zero = (0,) * k
    full = a.alphabet.full

    def st(q: int, p: int) -> int:
        return 3 * q + p

    trans: list[CTrans] = []
    for q in a.initial:
        trans.append(CTrans(st(q, 0), full, st(q, 0), (1, 0) + zero))
        if q in a.final:
            # empty substring: leave the prefix phase without reading the target
            trans.append(CTrans(st(q, 0), full, st(q, 2), (0, 0) + zero))
        for t in a.out[q]:
            trans.append(CTrans(st(q, 0), t.label, st(t.dst, 1), (0, 1) + t.update))
            if t.dst in a.final:
                trans.append(CTrans(st(q, 0), t.label, st(t.dst, 2), (0, 1) + t.update))
    for t in a.transitions:
        trans.append(CTrans(st(t.src, 1), t.label, st(t.dst, 1), (0, 1) + t.update))
        if t.dst in a.final:
            trans.append(CTrans(st(t.src, 1), t.label, st(t.dst, 2), (0, 1) + t.update))
    for q in a.final:
        trans.append(CTrans(st(q, 2), full, st(q, 2), (0, 0) + zero))
    initial = {st(q, 0) for q in a.initial}
    final = {st(q, 2) for q in a.final} | {st(q, 0) for q in a.initial & a.final}
    b = Cefa(3 * a.n_states, (start, length) + regs, tuple(trans), initial, final, a.alphabet)
    return CerrRepresentation(1, 1, ((start, length) + regs,), ((start, length),),
                              _identity_terms(regs), a.registers, lambda i: (b,))


def _paths(a: Cefa, p: int, u: str, memo: dict) -> frozenset[tuple[int, tuple[int, ...]]]:
    """(end state, summed update) over all runs of ``a`` from ``p`` reading ``u``."""
    key = (p, u)
    if key in memo:
        return memo[key]
    if not u:
        res = frozenset({(p, (0,) * a.k)})
    else:
        acc = set()
        for t in a.out[p]:
            if u[0] in t.label:
                for q, upd in _paths(a, t.dst, u[1:], memo):
                    acc.add((q, tuple(x + y for x, y in zip(t.update, upd))))
        res = frozenset(acc)
    memo[key] = res
    return res


def preimage_transducer(t: Nft, a: Cefa, allow_nonfunctional: bool = False) -> CerrRepresentation:
    """Product of the transducer's input side with runs of ``a`` on its outputs."""
    if not t.functional and not allow_nonfunctional:
        raise PreconditionError(f"transducer {t.name} is not declared functional")
    if t.alphabet != a.alphabet:
        raise PreconditionError("transducer and automaton use different alphabets")
    if t.max_output_length > MAX_OUTPUT_LENGTH:
        raise UnsupportedError(
            f"transducer {t.name} emits {t.max_output_length} letters on one transition "
            f"(limit {MAX_OUTPUT_LENGTH})")
    regs = _copies(a.registers, "'")
    zero = (0,) * a.k
    memo: dict = {}
    ids: dict[tuple[int, int], int] = {}
    todo: deque[tuple[int, int]] = deque()

    def sid(s: int, p: int) -> int:
        key = (s, p)
        if key not in ids:
            ids[key] = len(ids)
            todo.append(key)
        return ids[key]

    for s in sorted(t.initial):
        for p in sorted(a.initial):
            sid(s, p)
    trans: list[CTrans] = []
    while todo:
        s, p = todo.popleft()
        src = ids[(s, p)]
        for tr in t.out[s]:
            if tr.copy:
                for at in a.out[p]:
                    lab = tr.label & at.label
                    if lab:
                        trans.append(CTrans(src, lab, sid(tr.dst, at.dst), at.update))
            elif not tr.output:
                trans.append(CTrans(src, tr.label, sid(tr.dst, p), zero))
            else:
                for q, upd in sorted(_paths(a, p, tr.output, memo)):
                    trans.append(CTrans(src, tr.label, sid(tr.dst, q), upd))
    final = {i for (s, p), i in ids.items() if s in t.final and p in a.final}
    initial = {ids[(s, p)] for s in t.initial for p in a.initial}
    b = Cefa(max(len(ids), 1), regs, tuple(trans), initial, final, a.alphabet)
    return CerrRepresentation(1, 1, (regs,), ((),), _identity_terms(regs), a.registers,
                              lambda i: (b,))


def preimage_replaceall(e: Regex, u: str, a: Cefa) -> CerrRepresentation:
    return preimage_transducer(build_replaceall_nft(e, u, a.alphabet), a)


def preimage_replace(e: Regex, u: str, a: Cefa) -> CerrRepresentation:
    return preimage_transducer(build_replace_nft(e, u, a.alphabet), a)
