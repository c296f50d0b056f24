"""Parikh images of CEFAs as flow constraints, and flows back to words."""

from __future__ import annotations

from collections import defaultdict
from dataclasses import dataclass, field

from ..automata import CTrans, Cefa, Var, fresh
from ..errors import InternalError
from .linear import Atom, Lin, eq, ge

Model = dict[Var, int]


def monotonic_split(a: Cefa, only_needed: bool = False) -> tuple[Cefa, dict[Var, Lin]]:
    """Replace each register ``r`` by ``r+`` and ``r-`` with nonnegative updates.

    Returns the new automaton and the substitution ``r -> r+ - r-``.  With
    ``only_needed`` registers that are never decreased are kept as they are.
    """
    negative = [any(t.update[i] < 0 for t in a.transitions) for i in range(a.k)]
    regs: list[Var] = []
    sub: dict[Var, Lin] = {}
    plan: list[tuple[int, int]] = []  # (index, kind) kind 0 keep, 1 plus, -1 minus
    for i, r in enumerate(a.registers):
        if only_needed and not negative[i]:
            regs.append(r)
            plan.append((i, 0))
            continue
        rp, rm = fresh(f"{r.name}+"), fresh(f"{r.name}-")
        regs += [rp, rm]
        plan += [(i, 1), (i, -1)]
        sub[r] = Lin.var(rp) - Lin.var(rm)
    trans = []
    for t in a.transitions:
        upd = []
        for i, kind in plan:
            u = t.update[i]
            upd.append(u if kind == 0 else max(u, 0) if kind == 1 else max(-u, 0))
        trans.append(CTrans(t.src, t.label, t.dst, tuple(upd)))
    return Cefa(a.n_states, tuple(regs), tuple(trans), a.initial, a.final, a.alphabet), sub


@dataclass
class FlowSolution:
    flows: dict[int, int]
    initial: int
    final: int


@dataclass
class ParikhEncoding:
    """Flow variables with conservation, source/sink choice and register sums.

    ``atoms`` is a plain conjunction.  Connectivity of the flow support is not
    part of it: :meth:`cut` checks a model and proposes a case split when the
    support contains a cycle unreachable from the chosen source.
    :meth:`rank_atoms` gives the eager alternative with per-state ranks.
    """

    cefa: Cefa
    flow: list[Var]
    source: dict[int, Var]
    sink: dict[int, Var]
    atoms: list[Atom] = field(default_factory=list)

    def register_terms(self) -> dict[Var, Lin]:
        terms: dict[Var, Lin] = {}
        for i, r in enumerate(self.cefa.registers):
            terms[r] = Lin(tuple((f, t.update[i]) for f, t in zip(self.flow, self.cefa.transitions)
                                 if t.update[i]))
        return terms

    def flow_solution(self, model: Model) -> FlowSolution:
        flows = {k: model.get(f, 0) for k, f in enumerate(self.flow) if model.get(f, 0)}
        init = [q for q, v in self.source.items() if model.get(v, 0) == 1]
        fin = [q for q, v in self.sink.items() if model.get(v, 0) == 1]
        if len(init) != 1 or len(fin) != 1:
            raise InternalError("flow model does not select one source and one sink")
        return FlowSolution(flows, init[0], fin[0])

    def cut(self, model: Model) -> list[list[Atom]] | None:
        sol = self.flow_solution(model)
        trans = self.cefa.transitions
        adj: dict[int, list[int]] = defaultdict(list)
        for k in sol.flows:
            adj[trans[k].src].append(trans[k].dst)
        seen = {sol.initial}
        todo = [sol.initial]
        while todo:
            q = todo.pop()
            for d in adj[q]:
                if d not in seen:
                    seen.add(d)
                    todo.append(d)
        stray = {q for k in sol.flows for q in (trans[k].src, trans[k].dst)} - seen
        if not stray:
            return None
        out_of = Lin(tuple((self.flow[k], 1) for k, t in enumerate(trans) if t.src in stray))
        into = Lin(tuple((self.flow[k], 1) for k, t in enumerate(trans)
                         if t.dst in stray and t.src not in stray))
        alts = [[eq(out_of, 0)], [ge(into, 1)]]
        starts = [self.source[q] for q in stray if q in self.source]
        if starts:
            alts.append([eq(Lin(tuple((v, 1) for v in starts)), 1)])
        return alts

    def rank_atoms(self) -> list[list[Atom]]:
        """Eager connectivity: a disjunction per state, as a list of clauses.

        Each clause is a list of alternative atom-conjunctions (a CNF of DNFs),
        meant for external solvers; the internal pipeline uses :meth:`cut`.
        """
        a = self.cefa
        n = a.n_states
        rank = [fresh(f"rank{q}") for q in range(n)]
        clauses: list[list[Atom]] = []
        for q in range(n):
            ins = [k for k, t in enumerate(a.transitions) if t.dst == q]
            outs = [k for k, t in enumerate(a.transitions) if t.src == q]
            if not outs:
                continue
            # out-flow(q) > 0 implies q is the source or has a used predecessor of smaller rank
            clause = [[eq(Lin(tuple((self.flow[k], 1) for k in outs)), 0)]]
            if q in self.source:
                clause.append([eq(self.source[q], 1)])
            for k in ins:
                src = a.transitions[k].src
                clause.append([ge(self.flow[k], 1), Atom(Lin.var(rank[src]), "<", Lin.var(rank[q]))])
            clauses.append(clause)
        return clauses


def parikh_encode(a: Cefa) -> ParikhEncoding:
    flow = [fresh(f"f{k}") for k in range(len(a.transitions))]
    source = {q: fresh(f"src{q}") for q in sorted(a.initial)}
    sink = {q: fresh(f"snk{q}") for q in sorted(a.final)}
    enc = ParikhEncoding(a, flow, source, sink)
    atoms = enc.atoms
    for v in flow + list(source.values()) + list(sink.values()):
        atoms.append(ge(v, 0))
    atoms.append(eq(Lin(tuple((v, 1) for v in source.values())), 1))
    atoms.append(eq(Lin(tuple((v, 1) for v in sink.values())), 1))
    balance: dict[int, list[tuple[Var, int]]] = defaultdict(list)
    for f, t in zip(flow, a.transitions):
        balance[t.dst].append((f, 1))
        balance[t.src].append((f, -1))
    for q, v in source.items():
        balance[q].append((v, 1))
    for q, v in sink.items():
        balance[q].append((v, -1))
    for q in range(a.n_states):
        terms = Lin(tuple(balance[q]))
        if terms.coeffs:
            atoms.append(eq(terms, 0))
    for r, term in enc.register_terms().items():
        atoms.append(eq(Lin.var(r), term))
    return enc


def decompose_flow_to_witness(a: Cefa, flow: FlowSolution) -> tuple[str, list[int]]:
    """An accepting run using each transition exactly as often as the flow says.

    Returns the word (least letter of each label) and the transition indices.
    """
    remaining = dict(flow.flows)
    out: dict[int, list[int]] = defaultdict(list)
    for k in sorted(remaining):
        out[a.transitions[k].src].append(k)
    # balance check
    bal: dict[int, int] = defaultdict(int)
    for k, c in remaining.items():
        if c < 0:
            raise InternalError("negative flow")
        bal[a.transitions[k].src] -= c
        bal[a.transitions[k].dst] += c
    bal[flow.initial] += 1
    bal[flow.final] -= 1
    if any(bal.values()):
        raise InternalError("flow is not conserved")
    if flow.initial not in a.initial or flow.final not in a.final:
        raise InternalError("flow endpoints are not initial/final")
    # Hierholzer on a multigraph given by multiplicities
    stack: list[tuple[int, int | None]] = [(flow.initial, None)]
    path: list[int] = []
    ptr: dict[int, int] = defaultdict(int)
    while stack:
        q, via = stack[-1]
        lst = out[q]
        i = ptr[q]
        while i < len(lst) and remaining[lst[i]] == 0:
            i += 1
        ptr[q] = i
        if i < len(lst):
            k = lst[i]
            remaining[k] -= 1
            stack.append((a.transitions[k].dst, k))
        else:
            stack.pop()
            if via is not None:
                path.append(via)
    path.reverse()
    if any(remaining.values()):
        raise InternalError("flow support is not connected to the source")
    end = a.transitions[path[-1]].dst if path else flow.initial
    if end != flow.final:
        raise InternalError("run does not end in the chosen final state")
    word = "".join(a.transitions[k].label.least() for k in path)
    return word, path
