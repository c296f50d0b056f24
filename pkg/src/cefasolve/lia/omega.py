"""Integer variable elimination in the style of Pugh's Omega test.

Constraints are :class:`Lin` values read as ``lin = 0`` (equalities) or
``lin <= 0`` (inequalities).  The procedure is complete for conjunctions and
returns a model for every variable that occurs in the input.
"""

from __future__ import annotations

import heapq
import time
from math import gcd
from typing import Iterable

from ..automata import Var, fresh
from ..errors import ResourceLimit
from .linear import Lin


def _ceil_div(a: int, b: int) -> int:
    return -((-a) // b)


def _mod_hat(a: int, m: int) -> int:
    """Symmetric residue in ``(-m/2, m/2]``."""
    r = a - m * ((2 * a + m) // (2 * m))
    return r


class _Deadline:
    def __init__(self, deadline: float | None):
        self.deadline = deadline
        self.ticks = 0

    def check(self) -> None:
        self.ticks += 1
        if self.deadline is not None and self.ticks % 64 == 0 and time.monotonic() > self.deadline:
            raise ResourceLimit("arithmetic solver deadline reached")


def _normalize_ineq(e: Lin) -> Lin | bool:
    if e.is_const():
        return e.const <= 0
    g = e.content()
    if g > 1:
        e = Lin(tuple((v, c // g) for v, c in e.coeffs), _ceil_div(e.const, g))
    return e


def omega_solve(eqs: Iterable[Lin], ineqs: Iterable[Lin],
                deadline: float | None = None) -> dict[Var, int] | None:
    eqs = list(eqs)
    ineqs = list(ineqs)
    names: set[Var] = set()
    for e in eqs + ineqs:
        names.update(e.variables)
    model = _solve(eqs, ineqs, _Deadline(deadline))
    if model is None:
        return None
    for v in names:
        model.setdefault(v, 0)
    return model


def reduce_equalities(eqs: list[Lin], ineqs: list[Lin], deadline: float | None = None
                      ) -> tuple[list[tuple[Var, Lin]], list[Lin]] | None:
    """Eliminate every equality (also those implied by opposite inequalities).

    Returns the substitutions in elimination order and the remaining
    inequalities, or ``None`` when unsatisfiability is already evident.
    """
    return _reduce(list(eqs), list(ineqs), _Deadline(deadline))


def back_substitute(model: dict[Var, int], substitutions: list[tuple[Var, Lin]]) -> dict[Var, int]:
    for v, expr in reversed(substitutions):
        for w in expr.variables:
            model.setdefault(w, 0)
        model[v] = expr.evaluate(model)
    return model


def _reduce(eqs: list[Lin], ineqs: list[Lin], dl: _Deadline):
    substitutions: list[tuple[Var, Lin]] = []
    while True:
        if eqs:
            ineqs = _eliminate_equalities(eqs, ineqs, substitutions, dl)
            if ineqs is None:
                return None
        normed = _tighten(ineqs)
        if normed is None:
            return None
        ineqs, eqs = normed
        if not eqs:
            return substitutions, ineqs


def _eliminate_equalities(eqs: list[Lin], ineqs: list[Lin],
                          substitutions: list[tuple[Var, Lin]], dl: _Deadline) -> list[Lin] | None:
    """Sparse Gaussian-style elimination with an occurrence index.

    Rows are mutable dictionaries; a substitution only visits rows that
    mention the eliminated variable.  Short equations and rarely occurring
    pivot variables go first to keep fill-in low.
    """
    rows: list[tuple[dict[Var, int], list[int]]] = []  # (coeffs, [const])
    is_eq: list[bool] = []
    occ: dict[Var, set[int]] = {}
    for e, flag in [(e, True) for e in eqs] + [(e, False) for e in ineqs]:
        k = len(rows)
        rows.append((dict(e.coeffs), [e.const]))
        is_eq.append(flag)
        for v in rows[k][0]:
            occ.setdefault(v, set()).add(k)
    heap = [(len(rows[k][0]), k) for k in range(len(rows)) if is_eq[k]]
    heapq.heapify(heap)
    dead: set[int] = set()
    while heap:
        size, k = heapq.heappop(heap)
        if k in dead:
            continue
        coeffs, const = rows[k]
        if size != len(coeffs):
            heapq.heappush(heap, (len(coeffs), k))
            continue
        dl.check()
        if not coeffs:
            if const[0] != 0:
                return None
            dead.add(k)
            continue
        g = 0
        for c in coeffs.values():
            g = gcd(g, c)
        if const[0] % g:
            return None
        if g > 1:
            for v in coeffs:
                coeffs[v] //= g
            const[0] //= g
        units = [v for v, c in coeffs.items() if abs(c) == 1]
        if units:
            v = min(units, key=lambda u: (len(occ[u]), u))
            c = coeffs[v]
            expr = Lin(tuple((w, -c * d) for w, d in coeffs.items() if w != v), -c * const[0])
            dead.add(k)
            _drop(occ, k, coeffs)
        else:
            v, c = min(coeffs.items(), key=lambda vc: (abs(vc[1]), vc[0]))
            m = abs(c) + 1
            sigma = fresh("sigma")
            sign = 1 if c > 0 else -1
            expr = Lin(tuple((w, _mod_hat(d, m)) for w, d in coeffs.items() if w != v)
                       + ((sigma, -m),), _mod_hat(const[0], m)) * sign
            heapq.heappush(heap, (len(coeffs), k))
        substitutions.append((v, expr))
        for j in list(occ.get(v, ())):
            if j in dead:
                continue
            rc, rconst = rows[j]
            a = rc.pop(v)
            for w, d in expr.coeffs:
                x = rc.get(w, 0) + a * d
                if x:
                    if w not in rc:
                        occ.setdefault(w, set()).add(j)
                    rc[w] = x
                elif w in rc:
                    del rc[w]
                    occ[w].discard(j)
            rconst[0] += a * expr.const
            if is_eq[j]:
                heapq.heappush(heap, (len(rc), j))
        occ.pop(v, None)
    return [Lin(tuple(rows[k][0].items()), rows[k][1][0])
            for k in range(len(rows)) if not is_eq[k]]


def _drop(occ: dict[Var, set[int]], k: int, coeffs: dict[Var, int]) -> None:
    for w in coeffs:
        s = occ.get(w)
        if s is not None:
            s.discard(k)


def _solve(eqs: list[Lin], ineqs: list[Lin], dl: _Deadline) -> dict[Var, int] | None:
    dl.check()
    reduced = _reduce(list(eqs), list(ineqs), dl)
    if reduced is None:
        return None
    substitutions, ineqs = reduced
    model = _eliminate(ineqs, dl)
    if model is None:
        return None
    return back_substitute(model, substitutions)


def _tighten(ineqs: list[Lin]) -> tuple[list[Lin], list[Lin]] | None:
    """Normalise, drop duplicates, detect contradictions and implied equalities."""
    best: dict[tuple, int] = {}
    for e in ineqs:
        n = _normalize_ineq(e)
        if n is False:
            return None
        if n is True:
            continue
        key = n.coeffs
        if key not in best or n.const > best[key]:
            best[key] = n.const
    eqs = []
    for key, c in best.items():
        neg = tuple((v, -a) for v, a in key)
        if neg in best:
            c2 = best[neg]
            if c + c2 > 0:
                return None
            if c + c2 == 0 and key < neg:
                eqs.append(Lin(key, c))
    return [Lin(k, c) for k, c in best.items()], eqs


def _bounds(ineqs: list[Lin], x: Var):
    lowers, uppers, rest = [], [], []
    for e in ineqs:
        a = e.coef(x)
        if a > 0:
            uppers.append((a, e - Lin.var(x, a)))
        elif a < 0:
            lowers.append((-a, e - Lin.var(x, a)))
        else:
            rest.append(e)
    return lowers, uppers, rest


def _pick_value(lowers, uppers, model: dict[Var, int]) -> int:
    """x with  b*x >= rest_l  and  a*x <= -rest_u  for every bound."""
    for _, r in lowers + uppers:
        for w in r.variables:
            model.setdefault(w, 0)
    lo = max((_ceil_div(r.evaluate(model), b) for b, r in lowers), default=None)
    hi = min(((-r.evaluate(model)) // a for a, r in uppers), default=None)
    if lo is not None:
        return lo
    if hi is not None:
        return hi
    return 0


def _eliminate(ineqs: list[Lin], dl: _Deadline) -> dict[Var, int] | None:
    dl.check()
    if not ineqs:
        return {}
    variables: dict[Var, list[int]] = {}
    for e in ineqs:
        for v, c in e.coeffs:
            cnt = variables.setdefault(v, [0, 0, 1, 1])
            if c > 0:
                cnt[1] += 1
                cnt[3] = cnt[3] and c == 1
            else:
                cnt[0] += 1
                cnt[2] = cnt[2] and c == -1
    # a variable bounded on one side only can absorb all its constraints
    for v, (nl, nu, _, _) in variables.items():
        if nl == 0 or nu == 0:
            lowers, uppers, rest = _bounds(ineqs, v)
            model = _solve([], rest, dl)
            if model is None:
                return None
            model[v] = _pick_value(lowers, uppers, model)
            return model
    exact = [(nl * nu, v) for v, (nl, nu, ul, uu) in variables.items() if ul or uu]
    if exact:
        x = min(exact, key=lambda t: (t[0], t[1]))[1]
    else:
        x = min(variables, key=lambda v: (variables[v][0] * variables[v][1], v))
    lowers, uppers, rest = _bounds(ineqs, x)
    is_exact = bool(exact) and x in {v for _, v in exact}
    real = [Lin.sum([r_l * a, r_u * b]) for b, r_l in lowers for a, r_u in uppers]
    if is_exact:
        model = _solve([], rest + real, dl)
        if model is None:
            return None
        model[x] = _pick_value(lowers, uppers, model)
        return model
    dark = [Lin.sum([r_l * a, r_u * b]) + (a - 1) * (b - 1)
            for b, r_l in lowers for a, r_u in uppers]
    model = _solve([], rest + dark, dl)
    if model is not None:
        model[x] = _pick_value(lowers, uppers, model)
        return model
    if _solve([], rest + real, dl) is None:
        return None
    amax = max(a for a, _ in uppers)
    for b, r_l in lowers:
        top = (amax * b - amax - b) // amax
        for i in range(top + 1):
            # b*x = rest_l + i
            eq = Lin.var(x, b) - r_l - i
            model = _solve([eq], ineqs, dl)
            if model is not None:
                return model
    return None
