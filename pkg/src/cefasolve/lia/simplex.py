"""Exact dual simplex over a sparse integer tableau.

Each row is stored as integer numerators with its own positive denominator, so
a pivot only touches rows that actually contain the entering column.  The
problem form is::

    minimise  c . y   subject to  A y <= b,  y >= 0,   with c >= 0

Because every cost is nonnegative the all-slack basis is dual feasible, so no
phase one is needed and bound rows added during branch and bound are handled
by the same dual iterations.
"""

from __future__ import annotations

from fractions import Fraction
from math import gcd
from typing import Mapping, Sequence

from .. import kernels

BLAND_AFTER = 64


class Tableau:
    __slots__ = ("n_cols", "rows", "rhs", "den", "basis", "basic_row", "obj", "obj_den", "pivots")

    def __init__(self, n_struct: int, rows: Sequence[tuple[Mapping[int, int], int]],
                 costs: Sequence[int]):
        self.n_cols = n_struct
        self.rows: list[dict[int, int]] = []
        self.rhs: list[int] = []
        self.den: list[int] = []
        self.basis: list[int] = []
        self.basic_row: dict[int, int] = {}
        self.obj = {j: c for j, c in enumerate(costs) if c}
        if any(c < 0 for c in costs):
            raise ValueError("costs must be nonnegative")
        self.obj_den = 1
        self.pivots = 0
        for coeffs, b in rows:
            self.add_row(coeffs, b)

    def copy(self) -> "Tableau":
        t = Tableau.__new__(Tableau)
        t.n_cols = self.n_cols
        t.rows = [dict(r) for r in self.rows]
        t.rhs = list(self.rhs)
        t.den = list(self.den)
        t.basis = list(self.basis)
        t.basic_row = dict(self.basic_row)
        t.obj = dict(self.obj)
        t.obj_den = self.obj_den
        t.pivots = self.pivots
        return t

    # ------------------------------------------------------------------
    def add_row(self, coeffs: Mapping[int, int], b: int) -> None:
        """Append ``coeffs . y <= b`` with a fresh slack basic in the new row."""
        s = self.n_cols
        self.n_cols += 1
        row = {j: c for j, c in coeffs.items() if c}
        row[s] = 1
        den = 1
        rhs = b
        for j in [j for j in row if j in self.basic_row]:
            f = row.get(j, 0)
            if not f:
                continue
            i = self.basic_row[j]
            di = self.den[i]
            row, rhs = kernels.combine(row, rhs, di, self.rows[i], self.rhs[i], f)
            den *= di
        i = len(self.rows)
        self.rows.append(row)
        self.rhs.append(rhs)
        self.den.append(den)
        self.basis.append(s)
        self.basic_row[s] = i
        self._normalize(i)

    def _normalize(self, i: int) -> None:
        row = self.rows[i]
        g = gcd(self.den[i], self.rhs[i], *row.values())
        if g > 1:
            self.rows[i] = {j: c // g for j, c in row.items()}
            self.rhs[i] //= g
            self.den[i] //= g

    def pivot(self, r: int, c: int) -> None:
        self.pivots += 1
        prow = self.rows[r]
        p = prow[c]
        if p < 0:
            prow = {j: -v for j, v in prow.items()}
            self.rows[r] = prow
            self.rhs[r] = -self.rhs[r]
            p = -p
        self.den[r] = p
        self._normalize(r)
        prow = self.rows[r]
        p = prow[c]
        prhs = self.rhs[r]
        kernels.eliminate_column(self.rows, self.rhs, self.den, r, c)
        f = self.obj.get(c)
        if f:
            self.obj, _ = kernels.combine(self.obj, 0, p, prow, prhs, f)
            self.obj_den *= p
            g = gcd(self.obj_den, *self.obj.values())
            if g > 1:
                self.obj = {j: v // g for j, v in self.obj.items()}
                self.obj_den //= g
        old = self.basis[r]
        del self.basic_row[old]
        self.basis[r] = c
        self.basic_row[c] = r

    # ------------------------------------------------------------------
    def solve(self, max_pivots: int | None = None) -> bool:
        """Dual simplex; returns False iff the constraints are infeasible."""
        iters = 0
        while True:
            r = self._leaving(iters >= BLAND_AFTER)
            if r is None:
                return True
            c = self._entering(r)
            if c is None:
                return False
            self.pivot(r, c)
            iters += 1
            if max_pivots is not None and iters > max_pivots:
                raise RuntimeError("pivot limit")

    def _leaving(self, bland: bool) -> int | None:
        best = None
        for i, b in enumerate(self.rhs):
            if b >= 0:
                continue
            if best is None:
                best = i
            elif bland:
                if self.basis[i] < self.basis[best]:
                    best = i
            elif b * self.den[best] < self.rhs[best] * self.den[i]:
                best = i
        return best

    def _entering(self, r: int) -> int | None:
        row = self.rows[r]
        obj = self.obj
        best = None
        bnum = bden = 0
        for j, a in row.items():
            if a >= 0:
                continue
            num = obj.get(j, 0)
            den = -a
            if best is None or num * bden < bnum * den or (num * bden == bnum * den and j < best):
                best, bnum, bden = j, num, den
        return best

    def value(self, j: int) -> Fraction:
        i = self.basic_row.get(j)
        if i is None:
            return Fraction(0)
        return Fraction(self.rhs[i], self.den[i])

    def fractional(self, n_struct: int) -> tuple[int, Fraction] | None:
        """A structural column with a fractional value, preferring the most fractional one."""
        best = None
        best_gap = -1
        for i, j in enumerate(self.basis):
            if j >= n_struct:
                continue
            d = self.den[i]
            rem = self.rhs[i] % d
            if rem:
                gap = min(rem, d - rem) * 1.0 / d
                if gap > best_gap:
                    best, best_gap = (j, Fraction(self.rhs[i], d)), gap
        return best

    def integer_values(self, n_struct: int) -> list[int]:
        vals = [0] * n_struct
        for i, j in enumerate(self.basis):
            if j < n_struct:
                q, rem = divmod(self.rhs[i], self.den[i])
                if rem:
                    raise ValueError("solution is not integral")
                vals[j] = q
        return vals
