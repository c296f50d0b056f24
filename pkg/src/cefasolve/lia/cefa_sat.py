"""Satisfiability of per-variable CEFA constraints together with arithmetic.

For every string variable the constraints are intersected into one product
automaton, registers the arithmetic never mentions are projected away, and
the result is shrunk by a forward bisimulation quotient.  The Parikh images
of the shrunk automata are then solved together with the arithmetic, and a
model is turned back into words by an Euler walk that is replayed in the full
product to recover every register value.
"""

from __future__ import annotations

import time
from collections import deque
from dataclasses import dataclass, field
from typing import Mapping, Sequence

from ..alphabet import CharClass
from ..automata import CTrans, Cefa, Var, cefa_accepts, cefa_product, project
from ..errors import InternalError, PreconditionError, ResourceLimit
from .linear import Atom
from .parikh import ParikhEncoding, decompose_flow_to_witness, parikh_encode
from .solver import LiaStats, Model, lia_solve


@dataclass
class CefaSatStats:
    product_states_max: int = 0
    reduced_states: int = 0
    flow_vars: int = 0
    lia: LiaStats = field(default_factory=LiaStats)


@dataclass
class CefaSatModel:
    strings: dict[str, str]
    ints: Model


@dataclass
class _Reduced:
    full: Cefa
    small: Cefa
    block: list[int]  # full state -> small state


def intersect_all(automata: Sequence[Cefa], max_states: int | None = None,
                  deadline: float | None = None) -> Cefa:
    """Product of all automata (trimmed after every step)."""
    if not automata:
        raise PreconditionError("nothing to intersect")
    todo = sorted(automata, key=lambda a: a.n_states)
    acc = todo[0].trim()
    for a in todo[1:]:
        if deadline is not None and time.monotonic() > deadline:
            raise ResourceLimit("deadline reached while building products")
        acc = cefa_product(acc, a, max_states).trim()
        if not acc.final:
            break
    return acc


def quotient(a: Cefa) -> tuple[Cefa, list[int]]:
    """Forward bisimulation quotient; parallel transitions are merged."""
    block = [1 if q in a.final else 0 for q in range(a.n_states)]
    n_blocks = len(set(block))
    while True:
        sigs: dict[tuple, int] = {}
        new = []
        for q in range(a.n_states):
            moves: dict[tuple, CharClass] = {}
            for t in a.out[q]:
                key = (t.update, block[t.dst])
                moves[key] = moves[key] | t.label if key in moves else t.label
            sig = (block[q], frozenset((k, v.ranges) for k, v in moves.items()))
            new.append(sigs.setdefault(sig, len(sigs)))
        block = new
        if len(sigs) == n_blocks:
            break
        n_blocks = len(sigs)
    merged: dict[tuple, CharClass] = {}
    for t in a.transitions:
        key = (block[t.src], block[t.dst], t.update)
        merged[key] = merged[key] | t.label if key in merged else t.label
    trans = tuple(CTrans(s, lab, d, u) for (s, d, u), lab in sorted(merged.items(),
                                                                   key=lambda kv: kv[0]))
    small = Cefa(max(n_blocks, 1), a.registers, trans, {block[q] for q in a.initial},
                 {block[q] for q in a.final}, a.alphabet)
    return small, block


def _reduce(full: Cefa, relevant: set[Var]) -> _Reduced:
    small, block = quotient(project(full, relevant))
    return _Reduced(full, small, block)


def _replay_costs(red: _Reduced, word: str, small_path: list[int],
                  target: tuple[int, ...]) -> tuple[int, ...]:
    """Walk the full product along the quotient run, keeping kept-register costs exact."""
    full, small, block = red.full, red.small, red.block
    pos = [full.registers.index(r) for r in small.registers]
    init_block = small.transitions[small_path[0]].src if small_path else None
    if not small_path:
        starts = [q for q in full.initial if q in full.final]
        if not starts:
            raise InternalError("empty witness but no initial final state")
        return (0,) * full.k
    q = next(q for q in sorted(full.initial) if block[q] == init_block)
    acc = [0] * full.k
    for ch, k in zip(word, small_path):
        st = small.transitions[k]
        for t in full.out[q]:
            if ch in t.label and block[t.dst] == st.dst and \
                    tuple(t.update[i] for i in pos) == st.update:
                break
        else:
            raise InternalError("quotient run has no counterpart in the product")
        for i, u in enumerate(t.update):
            acc[i] += u
        q = t.dst
    if q not in full.final:
        raise InternalError("replayed run ends outside the final states")
    got = tuple(acc[i] for i in pos)
    if got != target:
        raise InternalError("replayed run disagrees with the arithmetic model")
    return tuple(acc)


def _shortest(a: Cefa) -> tuple[str, list[int]]:
    """Shortest accepted word of the string projection, with its run."""
    out: list[list[int]] = [[] for _ in range(a.n_states)]
    for k, t in enumerate(a.transitions):
        out[t.src].append(k)
    prev: dict[int, tuple[int, int] | None] = {q: None for q in sorted(a.initial)}
    todo = deque(sorted(a.initial))
    end = None
    while todo:
        q = todo.popleft()
        if q in a.final:
            end = q
            break
        for k in out[q]:
            d = a.transitions[k].dst
            if d not in prev:
                prev[d] = (q, k)
                todo.append(d)
    if end is None:
        raise InternalError("shortest word requested for an empty automaton")
    path = []
    q = end
    while prev[q] is not None:
        p, k = prev[q]  # type: ignore[misc]
        path.append(k)
        q = p
    path.reverse()
    return "".join(a.transitions[k].label.least() for k in path), path


def check_cefa_lia_sat(constraints: Mapping[str, Sequence[Cefa]],
                       alternatives: Sequence[Sequence[Atom]], *,
                       deadline: float | None = None,
                       max_product_states: int | None = None,
                       verify: bool = True,
                       stats: CefaSatStats | None = None,
                       external=None) -> CefaSatModel | None:
    """Find words and integers satisfying every automaton and one alternative.

    Registers of different automata must be pairwise distinct.
    """
    stats = stats if stats is not None else CefaSatStats()
    seen: set[Var] = set()
    for auts in constraints.values():
        for a in auts:
            if seen & set(a.registers):
                raise PreconditionError("automata share registers")
            seen |= set(a.registers)
    relevant = {v for alt in alternatives for atom in alt for v in atom.variables()}
    reduced: dict[str, _Reduced] = {}
    for x in sorted(constraints):
        full = intersect_all(constraints[x], max_product_states, deadline)
        stats.product_states_max = max(stats.product_states_max, full.n_states)
        if not full.final:
            return None
        reduced[x] = _reduce(full, relevant & set(full.registers))
        stats.reduced_states += reduced[x].small.n_states
    encodings: dict[str, ParikhEncoding] = {}
    for x, red in reduced.items():
        if red.small.k:
            encodings[x] = parikh_encode(red.small)
    stats.flow_vars = sum(len(e.flow) for e in encodings.values())
    base = [atom for e in encodings.values() for atom in e.atoms]

    def refine(model: Model):
        for e in encodings.values():
            cut = e.cut(model)
            if cut is not None:
                return cut
        return None

    if external is not None:
        clauses = [cl for e in encodings.values() for cl in e.rank_atoms()]
        model = external.solve(base, alternatives, clauses)
    else:
        model = lia_solve([base + list(alt) for alt in alternatives], deadline=deadline,
                          refine=refine, stats=stats.lia)
    if model is None:
        return None
    strings: dict[str, str] = {}
    ints: Model = {}
    for x, red in reduced.items():
        if x in encodings:
            enc = encodings[x]
            word, small_path = decompose_flow_to_witness(red.small, enc.flow_solution(model))
            target = tuple(model.get(r, 0) for r in red.small.registers)
        else:
            word, small_path = _shortest(red.small)
            target = ()
        costs = _replay_costs(red, word, small_path, target)
        strings[x] = word
        ints.update(zip(red.full.registers, costs))
    for v, n in model.items():
        if v in relevant and v not in ints:
            ints[v] = n
    if verify:
        for x, auts in constraints.items():
            for a in auts:
                if not cefa_accepts(a, (strings[x], tuple(ints[r] for r in a.registers))):
                    raise InternalError(f"witness for {x} rejected by a constraint")
        if not any(all(atom.holds(ints) for atom in alt) for alt in alternatives):
            raise InternalError("witness violates the arithmetic constraint")
    return CefaSatModel(strings, ints)
