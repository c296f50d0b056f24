"""Linear integer terms and atoms."""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property
from math import gcd
from typing import Iterable, Mapping

from ..automata import Var


@dataclass(frozen=True)
class Lin:
    """``const + sum(c * v)``; coefficients are nonzero and sorted by variable."""

    coeffs: tuple[tuple[Var, int], ...] = ()
    const: int = 0

    def __post_init__(self) -> None:
        acc: dict[Var, int] = {}
        for v, c in self.coeffs:
            acc[v] = acc.get(v, 0) + c
        object.__setattr__(self, "coeffs", tuple(sorted((v, c) for v, c in acc.items() if c)))

    @classmethod
    def of(cls, mapping: Mapping[Var, int] | None = None, const: int = 0) -> "Lin":
        return cls(tuple((mapping or {}).items()), const)

    @classmethod
    def var(cls, v: Var, c: int = 1) -> "Lin":
        return cls(((v, c),))

    @classmethod
    def constant(cls, c: int) -> "Lin":
        return cls((), c)

    @classmethod
    def sum(cls, items: Iterable["Lin | Var | int"]) -> "Lin":
        coeffs: list[tuple[Var, int]] = []
        const = 0
        for it in items:
            it = as_lin(it)
            coeffs.extend(it.coeffs)
            const += it.const
        return cls(tuple(coeffs), const)

    @cached_property
    def mapping(self) -> dict[Var, int]:
        return dict(self.coeffs)

    @property
    def variables(self) -> list[Var]:
        return [v for v, _ in self.coeffs]

    def coef(self, v: Var) -> int:
        return self.mapping.get(v, 0)

    def is_const(self) -> bool:
        return not self.coeffs

    def __add__(self, other: "Lin | Var | int") -> "Lin":
        other = as_lin(other)
        return Lin(self.coeffs + other.coeffs, self.const + other.const)

    __radd__ = __add__

    def __neg__(self) -> "Lin":
        return Lin(tuple((v, -c) for v, c in self.coeffs), -self.const)

    def __sub__(self, other: "Lin | Var | int") -> "Lin":
        return self + (-as_lin(other))

    def __rsub__(self, other: "Lin | Var | int") -> "Lin":
        return as_lin(other) - self

    def __mul__(self, k: int) -> "Lin":
        if not isinstance(k, int):
            return NotImplemented
        return Lin(tuple((v, c * k) for v, c in self.coeffs), self.const * k)

    __rmul__ = __mul__

    def evaluate(self, model: Mapping[Var, int]) -> int:
        return self.const + sum(c * model[v] for v, c in self.coeffs)

    def substitute(self, sub: Mapping[Var, "Lin"]) -> "Lin":
        if not any(v in sub for v, _ in self.coeffs):
            return self
        coeffs: list[tuple[Var, int]] = []
        const = self.const
        for v, c in self.coeffs:
            s = sub.get(v)
            if s is None:
                coeffs.append((v, c))
            else:
                coeffs.extend((w, c * d) for w, d in s.coeffs)
                const += c * s.const
        return Lin(tuple(coeffs), const)

    def content(self) -> int:
        g = 0
        for _, c in self.coeffs:
            g = gcd(g, c)
        return g

    def __str__(self) -> str:
        parts = [f"{c}*{v}" if c != 1 else str(v) for v, c in self.coeffs]
        if self.const or not parts:
            parts.append(str(self.const))
        return " + ".join(parts)

    __repr__ = __str__


def as_lin(x: "Lin | Var | int") -> Lin:
    if isinstance(x, Lin):
        return x
    if isinstance(x, Var):
        return Lin.var(x)
    if isinstance(x, int):
        return Lin.constant(x)
    raise TypeError(f"not a linear term: {x!r}")


REL_FLIP = {"=": "=", "!=": "!=", "<=": ">=", "<": ">", ">=": "<=", ">": "<"}


@dataclass(frozen=True)
class Atom:
    """``lhs rel rhs``; :meth:`normalize` turns it into ``lin = 0`` / ``lin <= 0`` form."""

    lhs: Lin
    rel: str
    rhs: Lin = Lin()

    def __post_init__(self) -> None:
        if self.rel not in REL_FLIP:
            raise ValueError(f"unknown relation {self.rel!r}")
        object.__setattr__(self, "lhs", as_lin(self.lhs))
        object.__setattr__(self, "rhs", as_lin(self.rhs))

    def holds(self, model: Mapping[Var, int]) -> bool:
        a, b = self.lhs.evaluate(model), self.rhs.evaluate(model)
        return {"=": a == b, "!=": a != b, "<=": a <= b, "<": a < b, ">=": a >= b, ">": a > b}[self.rel]

    def variables(self) -> set[Var]:
        return set(self.lhs.variables) | set(self.rhs.variables)

    def normalize(self) -> list["Atom"]:
        """Equivalent atoms over ``=``, ``<=`` and ``!=`` with zero right-hand side."""
        d = self.lhs - self.rhs
        if self.rel == "=":
            return [Atom(d, "=")]
        if self.rel == "!=":
            return [Atom(d, "!=")]
        if self.rel == "<=":
            return [Atom(d, "<=")]
        if self.rel == "<":
            return [Atom(d + 1, "<=")]
        if self.rel == ">=":
            return [Atom(-d, "<=")]
        return [Atom(-d + 1, "<=")]

    def substitute(self, sub: Mapping[Var, Lin]) -> "Atom":
        return Atom(self.lhs.substitute(sub), self.rel, self.rhs.substitute(sub))

    def __str__(self) -> str:
        return f"{self.lhs} {self.rel} {self.rhs}"

    __repr__ = __str__


def eq(a, b) -> Atom:
    return Atom(as_lin(a), "=", as_lin(b))


def le(a, b) -> Atom:
    return Atom(as_lin(a), "<=", as_lin(b))


def ge(a, b) -> Atom:
    return Atom(as_lin(a), ">=", as_lin(b))


def lt(a, b) -> Atom:
    return Atom(as_lin(a), "<", as_lin(b))


def gt(a, b) -> Atom:
    return Atom(as_lin(a), ">", as_lin(b))


def ne(a, b) -> Atom:
    return Atom(as_lin(a), "!=", as_lin(b))


LinearTerm = Lin
