"""Special-purpose automata: constants, substring avoidance/containment,
the length and indexOf cost automata, and the replace transducers."""

from __future__ import annotations

import logging
from collections import deque
from functools import lru_cache
from typing import Sequence

from .alphabet import ASCII, Alphabet, CharClass, minterms
from .automata import CTrans, Cefa, FTrans, NTrans, Nfa, Nft, Var, fresh
from .errors import InputError

log = logging.getLogger(__name__)
from .regex import Regex, regex_to_nfa

WindowProfile = tuple[bool, ...]


def build_const_nfa(w: str, alphabet: Alphabet = ASCII) -> Nfa:
    alphabet.check_word(w)
    trans = [NTrans(i, CharClass.of(ch), i + 1) for i, ch in enumerate(w)]
    return Nfa(len(w) + 1, tuple(trans), {0}, {len(w)}, alphabet)


def build_universal_nfa(alphabet: Alphabet = ASCII) -> Nfa:
    return Nfa(1, (NTrans(0, alphabet.full, 0),), {0}, {0}, alphabet)


def build_class_nfa(cls: CharClass, alphabet: Alphabet = ASCII) -> Nfa:
    """Single letters drawn from ``cls``."""
    cls = cls & alphabet.full
    trans = (NTrans(0, cls, 1),) if cls else ()
    return Nfa(2, trans, {0}, {1}, alphabet)


def _kmp_table(v: str) -> list[int]:
    fail = [0] * len(v)
    k = 0
    for i in range(1, len(v)):
        while k and v[i] != v[k]:
            k = fail[k - 1]
        if v[i] == v[k]:
            k += 1
        fail[i] = k
    return fail


def _kmp_step(v: str, fail: list[int], k: int, ch: str) -> int:
    """Length of the longest prefix of ``v`` that is a suffix after reading ``ch``."""
    if k == len(v):
        k = fail[k - 1]
    while k and v[k] != ch:
        k = fail[k - 1]
    return k + 1 if v[k] == ch else 0


def _kmp_transitions(v: str, alphabet: Alphabet, states: int) -> list[NTrans]:
    fail = _kmp_table(v)
    letters = sorted(set(v))
    others = alphabet.full - CharClass.of(*letters)
    trans = []
    for k in range(states):
        for ch in letters:
            if ch not in alphabet:
                continue
            nk = _kmp_step(v, fail, k, ch)
            if nk < states:
                trans.append(NTrans(k, CharClass.of(ch), nk))
        if others:
            trans.append(NTrans(k, others, 0))
    return trans


def build_avoid_substring_nfa(v: str, alphabet: Alphabet = ASCII) -> Nfa:
    """Strings in which ``v`` never occurs; states are the proper prefixes of ``v``."""
    if not v:
        raise InputError("pattern must be nonempty")
    n = len(v)
    return Nfa(n, tuple(_kmp_transitions(v, alphabet, n)), {0}, set(range(n)), alphabet)


def build_contains_substring_nfa(v: str, alphabet: Alphabet = ASCII) -> Nfa:
    if not v:
        raise InputError("pattern must be nonempty")
    n = len(v)
    trans = _kmp_transitions(v, alphabet, n)
    trans.append(NTrans(n - 1, CharClass.of(v[-1]), n))
    trans.append(NTrans(n, alphabet.full, n))
    return Nfa(n + 1, tuple(trans), {0}, {n}, alphabet)


def build_len_cefa(register: Var | None = None, alphabet: Alphabet = ASCII) -> Cefa:
    r = register if register is not None else fresh("len")
    return Cefa(1, (r,), (CTrans(0, alphabet.full, 0, (1,)),), {0}, {0}, alphabet)


# ---------------------------------------------------------------------------
# indexOf


def uwp_update(pi: WindowProfile, b: str, v: str) -> WindowProfile:
    """Profile after reading ``b``: entry j says the last j+1 letters spell ``v[:j+1]``."""
    if len(v) < 2 or len(pi) != len(v) - 1:
        raise InputError(f"profile of length {len(pi)} does not fit pattern {v!r}")
    return (b == v[0],) + tuple(pi[i] and b == v[i + 1] for i in range(len(pi) - 1))


def _letter_groups(v: str, alphabet: Alphabet) -> list[tuple[str, CharClass]]:
    """One representative letter per behaviour class: each letter of ``v``, plus the rest."""
    groups = [(ch, CharClass.of(ch)) for ch in sorted(set(v)) if ch in alphabet]
    rest = alphabet.full - CharClass.of(*set(v))
    if rest:
        groups.append((rest.least(), rest))
    return groups


@lru_cache(maxsize=256)
def _indexof_shape(v: str, alphabet: Alphabet) -> tuple[int, tuple[CTrans, ...], int]:
    """Transitions over placeholder registers; returns (n_states, transitions, n_profiles)."""
    full = alphabet.full
    if len(v) == 1:
        a = CharClass.of(v)
        not_a = full - a
        trans = [CTrans(0, full, 0, (1, 1)), CTrans(0, a, 2, (0, 0)), CTrans(2, full, 2, (0, 0))]
        if not_a:
            trans += [CTrans(0, not_a, 1, (0, 1)), CTrans(1, not_a, 1, (0, 1))]
        if a & full:
            trans.append(CTrans(1, a, 2, (0, 0)))
        return 3, tuple(t for t in trans if t.label), 0

    n = len(v)
    last = n - 1
    groups = _letter_groups(v, alphabet)
    ids: dict[object, int] = {"q0": 0, "q1": 1}
    trans: list[CTrans] = []
    todo: deque = deque()

    def sid(key) -> int:
        if key not in ids:
            ids[key] = len(ids)
            todo.append(key)
        return ids[key]

    bottom = (False,) * last
    # from q0 at the start position: either scan on, or our match begins at once
    for ch, cls in groups:
        trans.append(CTrans(0, cls, sid(("p", uwp_update(bottom, ch, v))), (0, 1)))
        if ch == v[0]:
            trans.append(CTrans(0, cls, sid(("m", uwp_update(bottom, ch, v), 1)), (0, 0)))
    trans.append(CTrans(0, full, 0, (1, 1)))
    trans.append(CTrans(1, full, 1, (0, 0)))
    while todo:
        key = todo.popleft()
        s = ids[key]
        pi = key[1]
        for ch, cls in groups:
            completes_earlier = pi[-1] and ch == v[last]
            if key[0] == "p":
                if completes_earlier:
                    continue
                nxt = uwp_update(pi, ch, v)
                trans.append(CTrans(s, cls, sid(("p", nxt)), (0, 1)))
                if ch == v[0]:
                    trans.append(CTrans(s, cls, sid(("m", nxt, 1)), (0, 0)))
            else:
                i = key[2]
                if ch != v[i]:
                    continue
                if i == last:
                    trans.append(CTrans(s, cls, 1, (0, 0)))
                elif not completes_earlier:
                    trans.append(CTrans(s, cls, sid(("m", uwp_update(pi, ch, v), i + 1)), (0, 0)))
    profiles = len({k[1] for k in ids if isinstance(k, tuple)})
    return len(ids), tuple(trans), profiles


def build_indexof_cefa(v: str, registers: Sequence[Var] | None = None,
                       alphabet: Alphabet = ASCII) -> Cefa:
    """Registers (start, result): accepts (w,(n,m)) iff m is the first occurrence at or after n."""
    if not v:
        raise InputError("indexOf pattern must be nonempty")
    alphabet.check_word(v)
    regs = tuple(registers) if registers is not None else (fresh("ix_start"), fresh("ix_pos"))
    n, trans, profiles = _indexof_shape(v, alphabet)
    if profiles > len(v):
        log.warning("pattern %r has %d window profiles, more than its length", v, profiles)
    final = {2} if len(v) == 1 else {1}
    return Cefa(n, regs, trans, {0}, final, alphabet)


def indexof_profile_count(v: str, alphabet: Alphabet = ASCII) -> int:
    return _indexof_shape(v, alphabet)[2]


# ---------------------------------------------------------------------------
# transducers


def build_identity_nft(alphabet: Alphabet = ASCII) -> Nft:
    return Nft(1, (FTrans(0, alphabet.full, 0, "", True),), {0}, {0}, True, alphabet, "identity")


def _merge_ftrans(raw: dict[tuple, CharClass]) -> tuple[FTrans, ...]:
    return tuple(FTrans(s, cls, d, out, copy) for (s, d, out, copy), cls in sorted(
        raw.items(), key=lambda kv: (kv[0][0], kv[0][1], kv[0][2], kv[0][3])))


def _add(raw: dict, key: tuple, cls: CharClass) -> None:
    raw[key] = raw[key] | cls if key in raw else cls


def _pattern_nfa(e: Regex, alphabet: Alphabet) -> Nfa:
    nfa = regex_to_nfa(e, alphabet)
    if nfa.initial & nfa.final:
        raise InputError("replacement pattern must not match the empty string")
    return nfa


@lru_cache(maxsize=64)
def build_replace_nft(e: Regex, u: str, alphabet: Alphabet = ASCII, *, all_matches: bool = False) -> Nft:
    """Leftmost-longest replacement of the first match (or every match with ``all_matches``).

    A state is ``(forbidden, match, done)``.  ``forbidden`` collects pattern runs that
    must never complete: runs started at copied positions (a match there would be
    further left) and continuations of a finished match (a longer match).
    ``match`` is the run set of the match being consumed, or ``None``.
    """
    alphabet.check_word(u)
    nfa = _pattern_nfa(e, alphabet)
    p0 = frozenset(nfa.initial)
    pf = nfa.final
    blocks = [(b.least(), b) for b in minterms([t.label for t in nfa.transitions], alphabet.full)]
    empty: frozenset[int] = frozenset()

    def step(states: frozenset[int], ch: str) -> frozenset[int]:
        return frozenset(nfa.step(states, ch)) if states else empty

    ids: dict[tuple, int] = {}
    todo: deque[tuple] = deque()

    def sid(key: tuple) -> int:
        if key not in ids:
            ids[key] = len(ids)
            todo.append(key)
        return ids[key]

    sid((empty, None, False))
    raw: dict[tuple, CharClass] = {}
    while todo:
        key = todo.popleft()
        forb, match, done = key
        s = ids[key]
        for ch, cls in blocks:
            f1 = step(forb, ch)
            if f1 & pf:
                continue
            if match is None:
                if done:
                    _add(raw, (s, sid((f1, None, True)), "", True), cls)
                    continue
                start = step(p0, ch)
                fc = f1 | start
                if not (fc & pf):
                    _add(raw, (s, sid((fc, None, False)), "", True), cls)
                m1 = start
            else:
                m1 = step(match, ch)
            if not m1:
                continue
            _add(raw, (s, sid((f1, m1, False)), "", False), cls)
            if m1 & pf:
                _add(raw, (s, sid((f1 | m1, None, not all_matches)), u, False), cls)
    final = {i for k, i in ids.items() if k[1] is None}
    name = "replaceall" if all_matches else "replace"
    return Nft(len(ids), _merge_ftrans(raw), {0}, final, True, alphabet, name)


def build_replaceall_nft(e: Regex, u: str, alphabet: Alphabet = ASCII) -> Nft:
    return build_replace_nft(e, u, alphabet, all_matches=True)


def trim_nft(t: Nft) -> Nft:
    keep = sorted(t.useful_states())
    if len(keep) == t.n_states:
        return t
    idx = {q: i for i, q in enumerate(keep)}
    trans = tuple(FTrans(idx[x.src], x.label, idx[x.dst], x.output, x.copy)
                  for x in t.transitions if x.src in idx and x.dst in idx)
    if not keep:
        return Nft(1, (), {0}, (), t.functional, t.alphabet, t.name)
    return Nft(len(keep), trans, {idx[q] for q in t.initial if q in idx},
               {idx[q] for q in t.final if q in idx}, t.functional, t.alphabet, t.name)
