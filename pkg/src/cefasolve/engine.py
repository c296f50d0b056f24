"""Decision procedure for straight-line programs with integer data.

The pipeline is:

1. split every assertion into the minimal sets of atoms that make it true;
2. case-split each ``indexof`` term and each ``substring`` assignment on how
   its integer arguments relate to the string length;
3. turn ``length`` and ``indexof`` terms into CEFA memberships over fresh
   integer variables;
4. walk the assignments backwards, replacing the constraints on each target
   by constraints on its arguments (a finite family of alternatives for
   concatenation, explored depth first);
5. decide the remaining CEFA memberships of the input variables together
   with the linear arithmetic.

Every ``sat`` answer is replayed through the reference interpreter.
"""

from __future__ import annotations

import itertools
import logging
import time
from collections import defaultdict, deque
from dataclasses import dataclass, field
from typing import Iterator, Sequence

from .alphabet import ASCII, Alphabet
from .automata import Cefa, Nfa, Var, cefa_rename_fresh, fresh, lift
from .builders import (build_avoid_substring_nfa, build_const_nfa, build_indexof_cefa,
                       build_len_cefa, build_universal_nfa)
from .errors import InternalError, PreconditionError, ResourceLimit, UnsupportedError
from .lia.cefa_sat import CefaSatStats, check_cefa_lia_sat
from .lia.linear import Atom, Lin, eq, ge, gt, le, lt
from .lia.solver import lia_solve
from .oracle import ConcreteAssignment, interpret_program
from .preimage import (CerrRepresentation, preimage_concat, preimage_replace,
                       preimage_replaceall, preimage_reverse, preimage_substring,
                       preimage_transducer)
from .program import (Add, And, Arith, Assert, Concat, Formula, IndexOf, IntConst, IntTerm,
                      IntVar, Length, Member, Mul, Or, Replace, ReplaceAll, Reverse,
                      SlintProgram, Statement, Substring, Transduce, temp_name)

log = logging.getLogger(__name__)


@dataclass
class SolveConfig:
    timeout: float | None = None
    max_product_states: int | None = 200_000
    max_disjuncts: int | None = 1_000_000
    alphabet: Alphabet = ASCII
    validate: bool = True
    external: object | None = None  # an ExternalSolver for the final arithmetic
    # accept transducers not declared functional; unsat then becomes unknown
    allow_nonfunctional: bool = False


@dataclass
class SolveStats:
    branches: int = 0
    leaves: int = 0
    product_states_max: int = 0
    elapsed: float = 0.0
    cefa: CefaSatStats = field(default_factory=CefaSatStats)


@dataclass
class SolveResult:
    verdict: str  # "sat" | "unsat" | "unknown"
    model: ConcreteAssignment | None = None
    stats: SolveStats = field(default_factory=SolveStats)
    reason: str = ""


# ---------------------------------------------------------------------------
# splitting assertions into atoms


def minimal_models(f: Formula) -> list[frozenset]:
    """Minimal sets of atoms whose joint truth implies ``f`` (which has no negation)."""
    if isinstance(f, And):
        acc: list[frozenset] = [frozenset()]
        for part in f.parts:
            acc = [a | b for a in acc for b in minimal_models(part)]
            acc = _minimize(acc)
        return acc
    if isinstance(f, Or):
        return _minimize([m for part in f.parts for m in minimal_models(part)])
    return [frozenset({f})]


def _minimize(sets: list[frozenset]) -> list[frozenset]:
    out: list[frozenset] = []
    for s in sorted(set(sets), key=len):
        if not any(k <= s for k in out):
            out.append(s)
    # keep construction order among survivors for reproducible exploration
    order = {s: i for i, s in reversed(list(enumerate(sets)))}
    return sorted(out, key=lambda s: order[s])


def normalize_assertions(p: SlintProgram) -> Iterator[SlintProgram]:
    """Programs whose assertions are single atoms, one per combination of minimal models."""
    slots: list[list[tuple[Formula, ...]]] = []
    for s in p.statements:
        if isinstance(s, Assert):
            ms = minimal_models(s.formula)
            slots.append([tuple(sorted(m, key=_atom_key)) for m in ms])
    for choice in itertools.product(*slots):
        it = iter(choice)
        out: list[Statement] = []
        for s in p.statements:
            if isinstance(s, Assert):
                out.extend(Assert(a) for a in next(it))
            else:
                out.append(s)
        yield SlintProgram(tuple(out), p.declared_strings, p.declared_ints)


def _atom_key(a: Formula) -> str:
    from .program import show_formula
    return show_formula(a)


# ---------------------------------------------------------------------------
# lowered form shared by the case splits and term removal


@dataclass(frozen=True)
class IdxOcc:
    x: str
    pattern: str
    start: Lin
    result: Var
    strict: bool


@dataclass(frozen=True)
class SubStmt:
    target: str
    source: str
    start: Var
    length: Var


@dataclass
class Lowered:
    """Assignments, memberships and linear atoms with placeholders for pending splits."""

    assignments: list[Statement]
    members: list[tuple[str, Cefa]]
    atoms: list[Atom]
    lengths: list[tuple[str, Var]]
    pending_idx: list[IdxOcc]
    pending_sub: list[SubStmt]
    alphabet: Alphabet

    def copy(self) -> "Lowered":
        return Lowered(list(self.assignments), list(self.members), list(self.atoms),
                       list(self.lengths), list(self.pending_idx), list(self.pending_sub),
                       self.alphabet)

    def length_of(self, x: str) -> Var:
        v = fresh(f"len_{x}")
        self.lengths.append((x, v))
        return v


class _Linearizer:
    def __init__(self, low: Lowered):
        self.low = low

    def __call__(self, t: IntTerm) -> Lin:
        if isinstance(t, IntConst):
            return Lin.constant(t.value)
        if isinstance(t, IntVar):
            return Lin.var(t.var)
        if isinstance(t, Add):
            return self(t.left) + self(t.right)
        if isinstance(t, Mul):
            return self(t.term) * t.coef
        if isinstance(t, Length):
            return Lin.var(self.low.length_of(t.x))
        if isinstance(t, IndexOf):
            r = fresh(f"idx_{t.x}")
            self.low.pending_idx.append(IdxOcc(t.x, t.pattern, self(t.start), r, t.strict))
            return Lin.var(r)
        raise TypeError(t)


def lower(p: SlintProgram, alphabet: Alphabet = ASCII) -> Lowered:
    """Program with atomic assertions -> lowered form (before case splits)."""
    low = Lowered([], [], [], [], [], [], alphabet)
    lin = _Linearizer(low)
    for s in p.statements:
        if isinstance(s, Assert):
            a = s.formula
            if isinstance(a, Member):
                _add_member(low, a)
            elif isinstance(a, Arith):
                low.atoms.append(Atom(lin(a.lhs), a.rel, lin(a.rhs)))
            else:
                raise InternalError("assertions must be atomic here")
        elif isinstance(s, Substring):
            i, j = fresh("sub_i"), fresh("sub_j")
            low.atoms += [eq(i, lin(s.start)), eq(j, lin(s.length))]
            low.pending_sub.append(SubStmt(s.target, s.source, i, j))
            low.assignments.append(s)
        else:
            low.assignments.append(s)
    return low


def _add_member(low: Lowered, a: Member) -> None:
    aut = a.aut
    if isinstance(aut, Nfa):
        low.members.append((a.x, lift(aut)))
        return
    renamed = cefa_rename_fresh(aut)
    low.members.append((a.x, renamed))
    low.atoms += [eq(n, o) for n, o in zip(renamed.registers, aut.registers)]


# ---------------------------------------------------------------------------
# case splits for indexof and substring


INDEXOF_ORDER = (4, 5, 3, 1, 2)
SUBSTRING_ORDER = (1, 2, 5, 4, 3)


def apply_indexof_option(low: Lowered, occ: IdxOcc, option: int) -> None:
    """Rewrite one indexof occurrence according to ``option`` (1 to 5)."""
    x, v, start, r = occ.x, occ.pattern, occ.start, occ.result
    al = low.alphabet
    if option == 1:
        if occ.strict:
            raise ValueError("option 1 does not apply under strict semantics")
        low.atoms.append(lt(start, 0))
        low.pending_idx.append(IdxOcc(x, v, Lin.constant(0), r, False))
    elif option == 2:
        low.atoms += [lt(start, 0), eq(r, -1)]
        if not occ.strict:
            low.members.append((x, lift(build_avoid_substring_nfa(v, al))))
    elif option == 3:
        n = low.length_of(x)
        low.atoms += [ge(start, n), ge(start, 0), eq(r, -1)]
    elif option == 4:
        n = low.length_of(x)
        i1 = fresh("ix_start")
        low.atoms += [ge(start, 0), lt(start, n), eq(i1, start),
                      le(Lin.var(r) + len(v), n), ge(r, i1)]
        low.members.append((x, build_indexof_cefa(v, (i1, r), al)))
    elif option == 5:
        n = low.length_of(x)
        y = temp_name("sfx")
        i, j = fresh("sub_i"), fresh("sub_j")
        low.atoms += [ge(start, 0), lt(start, n), eq(i, start), eq(j, Lin.var(n) - start),
                      eq(r, -1)]
        low.assignments.append(Substring(y, x, IntVar(i), IntVar(j)))
        low.members.append((y, lift(build_avoid_substring_nfa(v, al))))
    else:
        raise ValueError(f"unknown indexof option {option}")


def indexof_options(occ: IdxOcc) -> tuple[int, ...]:
    if occ.strict:
        return tuple(o for o in INDEXOF_ORDER if o != 1)
    return INDEXOF_ORDER


def apply_substring_option(low: Lowered, s: SubStmt, option: int) -> None:
    """Rewrite one substring assignment according to ``option`` (1 to 5)."""
    y, i, j = s.source, s.start, s.length
    idx = next(k for k, st in enumerate(low.assignments)
               if isinstance(st, Substring) and st.target == s.target)
    if option in (1, 2):
        n = low.length_of(y)
        if option == 1:
            low.atoms += [ge(i, 0), le(Lin.var(i) + Lin.var(j), n)]
            low.assignments[idx] = Substring(s.target, y, IntVar(i), IntVar(j))
        else:
            j2 = fresh("sub_j")
            low.atoms += [ge(i, 0), le(i, n), gt(Lin.var(i) + Lin.var(j), n),
                          eq(j2, Lin.var(n) - Lin.var(i))]
            low.assignments[idx] = Substring(s.target, y, IntVar(i), IntVar(j2))
        return
    if option == 3:
        low.atoms.append(lt(i, 0))
    elif option == 4:
        low.atoms.append(ge(i, low.length_of(y)))
    elif option == 5:
        low.atoms += [ge(i, 0), le(j, 0)]
    else:
        raise ValueError(f"unknown substring option {option}")
    del low.assignments[idx]
    low.members.append((s.target, lift(build_const_nfa("", low.alphabet))))


def implied_facts(low: Lowered) -> list[Atom]:
    """Sound consequences that let the arithmetic pre-check see through fresh variables."""
    facts: list[Atom] = []
    first: dict[str, Var] = {}
    for x, v in low.lengths:
        facts.append(ge(v, 0))
        if x in first:
            facts.append(eq(v, first[x]))
        else:
            first[x] = v
    return facts


def _arith_feasible(low: Lowered, deadline: float | None) -> bool:
    return lia_solve([low.atoms + implied_facts(low)], deadline=deadline) is not None


def case_splits(low: Lowered, deadline: float | None = None) -> Iterator[Lowered]:
    """All fully split variants whose arithmetic part is satisfiable, depth first."""
    stack = [low]
    while stack:
        _check(deadline)
        cur = stack.pop()
        if not _arith_feasible(cur, deadline):
            continue
        if cur.pending_idx:
            occ = cur.pending_idx[0]
            children = []
            for opt in indexof_options(occ):
                nxt = cur.copy()
                nxt.pending_idx.pop(0)
                apply_indexof_option(nxt, occ, opt)
                children.append(nxt)
            stack.extend(reversed(children))
        elif cur.pending_sub:
            s = cur.pending_sub[0]
            children = []
            for opt in SUBSTRING_ORDER:
                nxt = cur.copy()
                nxt.pending_sub.pop(0)
                apply_substring_option(nxt, s, opt)
                children.append(nxt)
            stack.extend(reversed(children))
        else:
            yield cur


# ---------------------------------------------------------------------------
# removing length and indexof terms


def remove_length_indexof(low: Lowered) -> tuple[list[Statement], dict[str, list[Cefa]], list[Atom]]:
    if low.pending_idx or low.pending_sub:
        raise PreconditionError("case splits must be applied first")
    constraints: dict[str, list[Cefa]] = defaultdict(list)
    for x, a in low.members:
        constraints[x].append(a)
    for x, v in low.lengths:
        constraints[x].append(build_len_cefa(v, low.alphabet))
    atoms = low.atoms + implied_facts(low)
    return list(low.assignments), dict(constraints), atoms


# ---------------------------------------------------------------------------
# backward elimination of assignments


def _check(deadline: float | None) -> None:
    if deadline is not None and time.monotonic() > deadline:
        raise ResourceLimit("timeout")


def string_nonempty(auts: Sequence[Cefa], deadline: float | None = None,
                    max_states: int | None = None) -> bool:
    """Whether the string projections of ``auts`` have a common word (registers ignored)."""
    if not auts:
        return True
    for a in auts:
        if not a.initial or not a.final:
            return False
    starts = list(itertools.product(*(sorted(a.initial) for a in auts)))
    seen = set(starts)
    todo = deque(starts)
    while todo:
        tup = todo.popleft()
        if all(q in a.final for q, a in zip(tup, auts)):
            return True
        if len(seen) % 4096 == 0:
            _check(deadline)
        # expand transitions of the first automaton and filter by the others
        def rec(k: int, label, acc: tuple):
            if k == len(auts):
                yield acc
                return
            for t in auts[k].out[tup[k]]:
                lab = t.label if label is None else label & t.label
                if lab:
                    yield from rec(k + 1, lab, acc + (t.dst,))
        for nxt in rec(0, None, ()):
            if nxt not in seen:
                seen.add(nxt)
                if max_states is not None and len(seen) > max_states:
                    raise ResourceLimit("emptiness check exceeds the product limit")
                todo.append(nxt)
    return False


def _cerr(st: Statement, a: Cefa, allow_nonfunctional: bool = False) -> CerrRepresentation:
    if isinstance(st, Concat):
        return preimage_concat(a)
    if isinstance(st, ReplaceAll):
        return preimage_replaceall(st.pattern, st.replacement, a)
    if isinstance(st, Replace):
        return preimage_replace(st.pattern, st.replacement, a)
    if isinstance(st, Reverse):
        return preimage_reverse(a)
    if isinstance(st, Transduce):
        return preimage_transducer(st.transducer, a, allow_nonfunctional)
    if isinstance(st, Substring):
        return preimage_substring(a)
    raise TypeError(st)


def _args(st: Statement) -> tuple[str, ...]:
    if isinstance(st, Concat):
        return (st.left, st.right)
    return (st.source,)


@dataclass
class _Search:
    cfg: SolveConfig
    deadline: float | None
    stats: SolveStats
    disjuncts: int = 0


def back_dfs_exp(assignments: Sequence[Statement], constraints: dict[str, list[Cefa]],
                 atoms: list[Atom], search: _Search):
    """Eliminate assignments from the last to the first; returns the final model or ``None``."""
    from .lia.cefa_sat import intersect_all

    search.stats.branches += 1
    _check(search.deadline)
    if not assignments:
        search.stats.leaves += 1
        res = check_cefa_lia_sat({x: cs for x, cs in constraints.items() if cs}, [atoms],
                                 deadline=search.deadline,
                                 max_product_states=search.cfg.max_product_states,
                                 stats=search.stats.cefa, external=search.cfg.external)
        search.stats.product_states_max = max(search.stats.product_states_max,
                                              search.stats.cefa.product_states_max)
        return res
    st = assignments[-1]
    rest = assignments[:-1]
    x = st.target
    active = constraints.get(x, [])
    if not active:
        if isinstance(st, Transduce):
            active = [lift(build_universal_nfa(search.cfg.alphabet))]
        else:
            return back_dfs_exp(rest, constraints, atoms, search)
    product = intersect_all(active, search.cfg.max_product_states, search.deadline)
    search.stats.product_states_max = max(search.stats.product_states_max, product.n_states)
    if not product.final:
        return None
    cerr = _cerr(st, product, search.cfg.allow_nonfunctional)
    base = {k: v for k, v in constraints.items() if k != x}
    args = _args(st)
    link = [eq(r, term) for r, term in zip(cerr.target_registers, cerr.terms)]
    if isinstance(st, Substring):
        start, length = cerr.int_registers[0]
        link += [eq(start, st.start.var), eq(length, st.length.var)]  # type: ignore[union-attr]
    for tup in cerr:
        search.disjuncts += 1
        if search.cfg.max_disjuncts is not None and search.disjuncts > search.cfg.max_disjuncts:
            raise ResourceLimit("too many disjuncts")
        _check(search.deadline)
        new = {k: list(v) for k, v in base.items()}
        ok = True
        for y, aut in zip(args, tup):
            aut = aut.trim()
            if not aut.final:
                ok = False
                break
            new.setdefault(y, []).append(aut)
        if ok:
            ok = all(string_nonempty(new[y], search.deadline, search.cfg.max_product_states)
                     for y in set(args))
        if not ok:
            continue
        res = back_dfs_exp(rest, new, atoms + link, search)
        if res is not None:
            return res
    return None


# ---------------------------------------------------------------------------
# driver


def check_sat(p: SlintProgram, cfg: SolveConfig | None = None) -> SolveResult:
    cfg = cfg or SolveConfig()
    t0 = time.monotonic()
    deadline = None if cfg.timeout is None else t0 + cfg.timeout
    stats = SolveStats()
    p.validate_ssa()
    relational = sorted({s.transducer.name for s in p.statements
                         if isinstance(s, Transduce) and not s.transducer.functional})
    if relational and not cfg.allow_nonfunctional:
        raise UnsupportedError(f"transducer {relational[0]} is not declared functional")
    unknown_reason = ""
    try:
        for prog in normalize_assertions(p):
            low = lower(prog, cfg.alphabet)
            for split in case_splits(low, deadline):
                assignments, constraints, atoms = remove_length_indexof(split)
                search = _Search(cfg, deadline, stats)
                try:
                    res = back_dfs_exp(assignments, constraints, atoms, search)
                except ResourceLimit as e:
                    if deadline is not None and time.monotonic() > deadline:
                        raise
                    unknown_reason = str(e)
                    log.info("branch abandoned: %s", e)
                    continue
                if res is None:
                    continue
                model = _extract(p, res)
                if cfg.validate:
                    out = interpret_program(p, model)
                    if not out and relational:
                        # the interpreter follows one output of a relation; the model may use another
                        unknown_reason = "model of a non-functional transducer could not be replayed"
                        break
                    if not out:
                        raise InternalError(f"model fails at statement {out.statement}: {out.reason}")
                stats.elapsed = time.monotonic() - t0
                return SolveResult("sat", model, stats)
    except ResourceLimit as e:
        stats.elapsed = time.monotonic() - t0
        return SolveResult("unknown", None, stats, str(e))
    stats.elapsed = time.monotonic() - t0
    if unknown_reason:
        return SolveResult("unknown", None, stats, unknown_reason)
    if relational:
        return SolveResult("unknown", None, stats,
                           "pre-images of non-functional transducers may over-approximate")
    return SolveResult("unsat", None, stats)


def _extract(p: SlintProgram, res) -> ConcreteAssignment:
    strings = {x: res.strings.get(x, "") for x in p.string_inputs()}
    ints = {v: res.ints.get(v, 0) for v in p.int_inputs()}
    return ConcreteAssignment(strings, ints)
