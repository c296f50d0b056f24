"""Satisfiability of existential linear integer arithmetic.

A conjunction is first reduced by exact equality elimination.  The remaining
inequalities go to branch and bound over the exact dual simplex; if the node
budget runs out, the Omega test decides the reduced system, so the procedure
always terminates with a definite answer (or a deadline error).
"""

from __future__ import annotations

import itertools
import time
from dataclasses import dataclass
from math import floor
from typing import Callable, Iterable, Iterator, Sequence

from ..automata import Var
from ..errors import InternalError, ResourceLimit
from .linear import Atom, Lin
from .omega import back_substitute, omega_solve, reduce_equalities
from .simplex import Tableau

Model = dict[Var, int]
Refiner = Callable[[Model], "list[list[Atom]] | None"]

DEFAULT_NODE_BUDGET = 400
OMEGA_DIRECT_VARS = 3
# Above this many variables, equality elimination first makes the simplex rows
# dense; such systems are first tried with the equalities left in place.
SPARSE_FIRST_VARS = 150


@dataclass
class LiaStats:
    conjunctions: int = 0
    bb_nodes: int = 0
    omega_fallbacks: int = 0
    refinements: int = 0


class _BudgetExceeded(Exception):
    pass


def _check(deadline: float | None) -> None:
    if deadline is not None and time.monotonic() > deadline:
        raise ResourceLimit("arithmetic solver deadline reached")


def split_disequalities(atoms: Sequence[Atom]) -> Iterator[list[Atom]]:
    """Every ``!=`` becomes ``<`` or ``>``; yields the resulting conjunctions."""
    plain = [a for a in atoms if a.rel != "!="]
    diseq = [a for a in atoms if a.rel == "!="]
    if not diseq:
        yield plain
        return
    for choice in itertools.product((0, 1), repeat=len(diseq)):
        extra = [Atom(a.lhs, "<" if c == 0 else ">", a.rhs) for a, c in zip(diseq, choice)]
        yield plain + extra


def _to_constraints(atoms: Iterable[Atom]) -> tuple[list[Lin], list[Lin]]:
    eqs: list[Lin] = []
    ineqs: list[Lin] = []
    for a in atoms:
        for n in a.normalize():
            if n.rel == "=":
                eqs.append(n.lhs)
            elif n.rel == "<=":
                ineqs.append(n.lhs)
            else:
                raise ValueError("disequalities must be split before solving")
    return eqs, ineqs


def _branch_and_bound(ineqs: list[Lin], budget: int, deadline: float | None,
                      stats: LiaStats) -> Model | None:
    variables = sorted({v for e in ineqs for v in e.variables})
    lo: dict[Var, int] = {}
    hi: dict[Var, int] = {}
    for e in ineqs:
        if len(e.coeffs) == 1:
            (v, a), = e.coeffs
            if a < 0:
                b = _ceil(e.const, -a)
                lo[v] = max(lo.get(v, b), b)
            else:
                b = (-e.const) // a
                hi[v] = min(hi.get(v, b), b)
    # x = offset + sum(sign * y_col)
    cols: dict[Var, tuple[int, list[tuple[int, int]]]] = {}
    n = 0
    for v in variables:
        if v in lo:
            cols[v] = (lo[v], [(n, 1)])
            n += 1
        elif v in hi:
            cols[v] = (hi[v], [(n, -1)])
            n += 1
        else:
            cols[v] = (0, [(n, 1), (n + 1, -1)])
            n += 2
    rows = []
    for e in ineqs:
        coeffs: dict[int, int] = {}
        rhs = -e.const
        for v, a in e.coeffs:
            off, parts = cols[v]
            rhs -= a * off
            for j, s in parts:
                coeffs[j] = coeffs.get(j, 0) + a * s
        coeffs = {j: c for j, c in coeffs.items() if c}
        if rhs >= 0 and all(c <= 0 for c in coeffs.values()):
            continue
        if not coeffs:
            if rhs < 0:
                return None
            continue
        rows.append((coeffs, rhs))
    stack = [Tableau(n, rows, [1] * n)]
    nodes = 0
    while stack:
        _check(deadline)
        t = stack.pop()
        if not t.solve():
            continue
        fr = t.fractional(n)
        if fr is None:
            vals = t.integer_values(n)
            return {v: off + sum(s * vals[j] for j, s in parts) for v, (off, parts) in cols.items()}
        nodes += 1
        stats.bb_nodes += 1
        if nodes > budget:
            raise _BudgetExceeded
        j, val = fr
        f = floor(val)
        down = t.copy()
        down.add_row({j: 1}, f)
        t.add_row({j: -1}, -(f + 1))
        if val - f < 0.5:
            stack += [t, down]
        else:
            stack += [down, t]
    return None


def _ceil(a: int, b: int) -> int:
    return -((-a) // b)


def solve_conjunction(atoms: Sequence[Atom], deadline: float | None = None,
                      node_budget: int = DEFAULT_NODE_BUDGET,
                      stats: LiaStats | None = None) -> Model | None:
    stats = stats if stats is not None else LiaStats()
    stats.conjunctions += 1
    atoms = list(atoms)
    eqs, ineqs = _to_constraints(atoms)
    if eqs and len({v for a in atoms for v in a.variables()}) > SPARSE_FIRST_VARS:
        try:
            model = _branch_and_bound(ineqs + eqs + [-e for e in eqs], node_budget, deadline,
                                      stats)
        except _BudgetExceeded:
            pass
        else:
            return _finish(model, [], atoms)
    reduced = reduce_equalities(eqs, ineqs, deadline)
    if reduced is None:
        return None
    subs, ineqs = reduced
    n_vars = len({v for e in ineqs for v in e.variables})
    model: Model | None
    if n_vars <= OMEGA_DIRECT_VARS:
        model = omega_solve([], ineqs, deadline)
    else:
        try:
            model = _branch_and_bound(ineqs, node_budget, deadline, stats)
        except _BudgetExceeded:
            stats.omega_fallbacks += 1
            model = omega_solve([], ineqs, deadline)
    return _finish(model, subs, atoms)


def _finish(model: Model | None, subs, atoms: Sequence[Atom]) -> Model | None:
    if model is None:
        return None
    back_substitute(model, subs)
    for a in atoms:
        for v in a.variables():
            model.setdefault(v, 0)
    for a in atoms:
        if not a.holds(model):
            raise InternalError(f"arithmetic model violates {a}")
    return model


def lia_solve(alternatives: Iterable[Sequence[Atom]], *, deadline: float | None = None,
              refine: Refiner | None = None, node_budget: int = DEFAULT_NODE_BUDGET,
              stats: LiaStats | None = None) -> Model | None:
    """First model of any alternative, or ``None`` when all are unsatisfiable.

    ``refine`` may reject a model by returning alternative lists of extra atoms
    (a lazy case split); the search then continues depth first into them.
    """
    stats = stats if stats is not None else LiaStats()
    for alt in alternatives:
        for conj in split_disequalities(list(alt)):
            stack: list[list[Atom]] = [conj]
            while stack:
                _check(deadline)
                atoms = stack.pop()
                model = solve_conjunction(atoms, deadline, node_budget, stats)
                if model is None:
                    continue
                extra = refine(model) if refine is not None else None
                if extra is None:
                    return model
                stats.refinements += 1
                for more in reversed(extra):
                    stack.append(atoms + list(more))
    return None
