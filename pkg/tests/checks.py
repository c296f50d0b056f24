"""Brute-force reference checks shared by the module tests and the acceptance run.

Each ``*_mismatches`` function returns a list of human-readable failures
(empty when everything agrees) together with the number of checks made.
"""

from __future__ import annotations

import itertools
import random
import sys
from pathlib import Path

sys.path.insert(0, str(Path(__file__).resolve().parent))

from cefasolve.alphabet import Alphabet, CharClass  # noqa: E402
from cefasolve.automata import CTrans, Cefa, FTrans, Nft, cefa_accepts, cefa_costs, fresh  # noqa: E402
from cefasolve.engine import (Lowered, SolveConfig, apply_indexof_option,  # noqa: E402
                              apply_substring_option, check_sat, indexof_options, lower,
                              SUBSTRING_ORDER)
from cefasolve.lia.cefa_sat import check_cefa_lia_sat  # noqa: E402
from cefasolve.lia.linear import eq  # noqa: E402
from cefasolve.lia.solver import lia_solve  # noqa: E402
from cefasolve.oracle import (ConcreteAssignment, brute_force_solve, eval_indexof,  # noqa: E402
                              eval_replaceall, eval_substring, interpret_program, run_transducer,
                              words)
from cefasolve.preimage import (preimage_concat, preimage_replaceall, preimage_reverse,  # noqa: E402
                                preimage_substring, preimage_transducer)
from cefasolve.program import (Arith, Assert, IndexOf, IntConst, IntVar, SlintProgram,  # noqa: E402
                               Substring, int_var)
from cefasolve.regex import parse_regex  # noqa: E402

AB = Alphabet.explicit("ab")
A_ = CharClass.of("a")
B_ = CharClass.of("b")
AB_ = CharClass.of("a", "b")


def random_cefa(rng: random.Random, *, max_states: int = 4, max_regs: int = 2,
                updates=range(-2, 3), max_trans: int = 7) -> Cefa:
    n = rng.randint(1, max_states)
    regs = tuple(fresh("r") for _ in range(rng.randint(0, max_regs)))
    ups = list(updates)
    trans = [CTrans(rng.randrange(n), rng.choice([A_, B_, AB_]), rng.randrange(n),
                    tuple(rng.choice(ups) for _ in regs))
             for _ in range(rng.randint(0, max_trans))]
    initial = {q for q in range(n) if rng.random() < 0.5} or {0}
    final = {q for q in range(n) if rng.random() < 0.5}
    return Cefa(n, regs, trans, initial, final, AB)


def random_functional_nft(rng: random.Random) -> Nft:
    """Deterministic (hence functional) random transducer over {a, b}."""
    n = rng.randint(1, 3)
    trans = []
    for q in range(n):
        for cls in (A_, B_):
            if rng.random() < 0.85:
                if rng.random() < 0.3:
                    trans.append(FTrans(q, cls, rng.randrange(n), "", True))
                else:
                    out = "".join(rng.choice("ab") for _ in range(rng.randint(0, 2)))
                    trans.append(FTrans(q, cls, rng.randrange(n), out))
    final = {q for q in range(n) if rng.random() < 0.6} or {0}
    return Nft(n, trans, {0}, final, True, AB, "rand")


def _eval_terms(terms, regs, vals) -> tuple[int, ...]:
    m = dict(zip(regs, vals))
    return tuple(t.evaluate(m) for t in terms)


def _unary_image(p, w: str, fixed: tuple[int, ...] = ()) -> set[tuple[int, ...]]:
    (b,) = p.disjunct(0)
    k = len(fixed)
    return {_eval_terms(p.terms, b.registers, d) for d in cefa_costs(b, w) if d[:k] == fixed}


# ---------------------------------------------------------------------------
# pre-image language equation


PREIMAGE_OPERATORS = ("concat", "reverse", "substring", "transducer", "replaceall")
_PATTERNS = ["a", "b", "ab", "b+", "(ab)+", "a|bb"]


def preimage_mismatches(op: str, rng: random.Random, min_checks: int) -> tuple[list[str], int]:
    """Compare target costs of ``f(args)`` with the costs the pre-image yields for ``args``.

    Both sides are full cost sets, so agreement covers both directions of the
    defining equation (every tuple in the pre-image maps into the language,
    and every tuple that maps into it is in the pre-image).
    """
    pool = list(words(AB, 5))
    bad: list[str] = []
    checks = 0
    while checks < min_checks:
        a = random_cefa(rng)
        if op == "concat":
            p = preimage_concat(a)
            assert len(p) == a.n_states
            parts = p.disjuncts()
            for w1, w2 in zip(rng.sample(pool, 12), rng.sample(pool, 12)):
                want = cefa_costs(a, w1 + w2)
                got = {_eval_terms(p.terms, p.slot_registers[0] + p.slot_registers[1], d1 + d2)
                       for b1, b2 in parts for d1 in cefa_costs(b1, w1) for d2 in cefa_costs(b2, w2)}
                checks += 1
                if want != got:
                    bad.append(f"concat {w1!r}.{w2!r}: {want} vs {got}")
        elif op == "reverse":
            p = preimage_reverse(a)
            for w in rng.sample(pool, 20):
                checks += 1
                if cefa_costs(a, w[::-1]) != _unary_image(p, w):
                    bad.append(f"reverse {w!r}")
        elif op == "substring":
            p = preimage_substring(a)
            (b,) = p.disjunct(0)
            for w in rng.sample(pool, 1):
                costs = cefa_costs(b, w)
                # integer arguments in [-2, 6]; the construction covers the in-range part
                for i, j in itertools.product(range(-2, 7), repeat=2):
                    got = {_eval_terms(p.terms, b.registers, d) for d in costs if d[:2] == (i, j)}
                    checks += 1
                    if 0 <= i and 0 <= j and i + j <= len(w):
                        want = cefa_costs(a, eval_substring(w, i, j))
                    else:
                        want = set()
                    if want != got:
                        bad.append(f"substring {w!r},{i},{j}: {want} vs {got}")
        elif op == "transducer":
            t = random_functional_nft(rng)
            p = preimage_transducer(t, a)
            for w in rng.sample(pool, 20):
                out = run_transducer(t, w)
                want = set() if out is None else cefa_costs(a, out)
                checks += 1
                if want != _unary_image(p, w):
                    bad.append(f"transducer {w!r} -> {out!r}")
        elif op == "replaceall":
            pat = rng.choice(_PATTERNS)
            u = rng.choice(["", "a", "b", "ab"])
            p = preimage_replaceall(parse_regex(pat), u, a)
            for w in rng.sample(pool, 20):
                checks += 1
                if cefa_costs(a, eval_replaceall(parse_regex(pat), u, w)) != _unary_image(p, w):
                    bad.append(f"replaceall {pat}/{u!r} on {w!r}")
        else:
            raise ValueError(op)
    return bad, checks


def substring_example_automaton() -> Cefa:
    """{(w, |w|) | w in (aa)*} over the one-letter alphabet {a}."""
    a = CharClass.of("a")
    r = fresh("r")
    return Cefa(2, (r,), [CTrans(0, a, 1, (1,)), CTrans(1, a, 0, (1,))], {0}, {0},
                Alphabet.explicit("a"))


def doubling_transducer(alphabet: Alphabet = Alphabet.explicit("a")) -> Nft:
    return Nft(1, [FTrans(0, CharClass.of("a"), 0, "aa")], {0}, {0}, True, alphabet, "double")


# ---------------------------------------------------------------------------
# Parikh image


def _monotonic_cefa(rng: random.Random) -> Cefa:
    return random_cefa(rng, max_regs=rng.randint(1, 2), updates=(0, 0, 1, 1, 2), max_trans=7)


def bounded_costs(a: Cefa, max_len: int, cap: int) -> set[tuple[int, ...]]:
    """Cost vectors of accepted words of length <= max_len, for monotone ``a``.

    Configurations with a component above ``cap`` are dropped since costs
    never decrease.
    """
    layer = {(q, (0,) * a.k) for q in a.initial}
    seen = set(layer)
    for _ in range(max_len):
        nxt = set()
        for q, c in layer:
            for t in a.out[q]:
                d = tuple(x + y for x, y in zip(c, t.update))
                if max(d, default=0) <= cap and (t.dst, d) not in seen:
                    nxt.add((t.dst, d))
        seen |= nxt
        layer = nxt
    return {c for q, c in seen if q in a.final}


def parikh_mismatches(rng: random.Random, automata: int, max_len: int = 12,
                      targets=range(0, 9)) -> tuple[list[str], int]:
    """Satisfiability of ``a`` with every register pinned to a target vs enumeration."""
    bad: list[str] = []
    checks = 0
    for _ in range(automata):
        a = _monotonic_cefa(rng)
        reachable = bounded_costs(a, max_len, max(targets))
        for target in itertools.product(targets, repeat=a.k):
            atoms = [eq(r, c) for r, c in zip(a.registers, target)]
            res = check_cefa_lia_sat({"x": [a]}, [atoms])
            checks += 1
            brute = target in reachable
            if res is None and brute:
                bad.append(f"missed {target}")
            elif res is not None:
                w = res.strings["x"]
                if not cefa_accepts(a, (w, target)):
                    bad.append(f"bad witness {w!r} for {target}")
                elif not brute and len(w) <= max_len:
                    bad.append(f"enumeration missed {w!r} for {target}")
    return bad, checks


# ---------------------------------------------------------------------------
# case splits


def _leaves(low: Lowered) -> list[tuple[tuple, Lowered]]:
    """Every fully split variant with the option path that produced it.

    Variants whose arithmetic alone is unsatisfiable are dropped; that is what
    stops option 1 from restarting at the literal 0 forever.
    """
    out = []
    stack = [((), low)]
    while stack:
        path, cur = stack.pop()
        if lia_solve([cur.atoms]) is None:
            continue
        if cur.pending_idx:
            occ = cur.pending_idx[0]
            for opt in indexof_options(occ):
                nxt = cur.copy()
                nxt.pending_idx.pop(0)
                apply_indexof_option(nxt, occ, opt)
                stack.append((path + (("idx", opt),), nxt))
        elif cur.pending_sub:
            s = cur.pending_sub[0]
            for opt in SUBSTRING_ORDER:
                nxt = cur.copy()
                nxt.pending_sub.pop(0)
                apply_substring_option(nxt, s, opt)
                stack.append((path + (("sub", opt),), nxt))
        else:
            out.append((path, cur))
    return out


def _admits(leaf: Lowered, strings: dict[str, str], fixed: dict) -> bool:
    """Does the split variant accept these concrete strings and integers?"""
    strings = dict(strings)
    pinned = [eq(v, len(strings[x])) for x, v in leaf.lengths if x in strings]
    pinned += [eq(v, c) for v, c in fixed.items()]
    model = lia_solve([leaf.atoms + pinned])
    if model is None:
        return False
    ints = {**{v: 0 for v in fixed}, **model}
    for st in leaf.assignments:
        assert isinstance(st, Substring)
        start = eval_term_lin(st.start, ints)
        length = eval_term_lin(st.length, ints)
        val = eval_substring(strings[st.source], start, length)
        if st.target in strings and strings[st.target] != val:
            return False
        strings[st.target] = val
    # assignments may define new lengths; re-solve with them pinned
    pinned = [eq(v, len(strings[x])) for x, v in leaf.lengths if x in strings]
    pinned += [eq(v, c) for v, c in fixed.items()]
    model = lia_solve([leaf.atoms + pinned])
    if model is None:
        return False
    for x, aut in leaf.members:
        if x not in strings:
            return False
        if not cefa_accepts(aut, (strings[x], tuple(model.get(r, 0) for r in aut.registers))):
            return False
    return True


def _live(leaves, strings: dict[str, str], fixed: dict):
    """Leaves whose arithmetic is satisfiable for the given input and integers."""
    out = []
    for path, leaf in leaves:
        pinned = [eq(v, len(strings[x])) for x, v in leaf.lengths if x in strings]
        pinned += [eq(v, c) for v, c in fixed.items()]
        if lia_solve([leaf.atoms + pinned]) is not None:
            out.append((path, leaf))
    return out


def eval_term_lin(t, ints) -> int:
    if isinstance(t, IntConst):
        return t.value
    if isinstance(t, IntVar):
        return ints.get(t.var, 0)
    raise TypeError(t)


def substring_split_mismatches(box=range(-3, 9), lengths=range(0, 7)) -> tuple[list[str], int]:
    bad: list[str] = []
    checks = 0
    i_var, j_var = int_var("i"), int_var("j")
    prog = SlintProgram([Substring("y", "x", i_var, j_var)])
    leaves = _leaves(lower(prog, AB))
    for n in lengths:
        for x in {"ab" * 4, "ba" * 4, "a" * 8}:
            x = x[:n]
            for i, j in itertools.product(box, repeat=2):
                want = eval_substring(x, i, j)
                fixed = {i_var.var: i, j_var.var: j}
                live = _live(leaves, {"x": x}, fixed)
                ok = [path for path, leaf in live if _admits(leaf, {"x": x, "y": want}, fixed)]
                checks += 1
                if not ok:
                    bad.append(f"substring({x!r},{i},{j}) covered by no branch")
                for cand in {x[s:e] for s in range(n + 1) for e in range(s, n + 1)} - {want}:
                    wrong = [path for path, leaf in live
                             if _admits(leaf, {"x": x, "y": cand}, fixed)]
                    if wrong:
                        bad.append(f"substring({x!r},{i},{j}) branch {wrong} admits {cand!r}")
    return bad, checks


def indexof_split_mismatches(patterns=("ab", "a"), box=range(-3, 9), lengths=range(0, 7),
                             strict: bool = False) -> tuple[list[str], int]:
    bad: list[str] = []
    checks = 0
    for v in patterns:
        i_var, r_var = int_var("i"), int_var("r")
        prog = SlintProgram([Assert(Arith(IntVar(r_var.var), "=",
                                          IndexOf("x", v, IntVar(i_var.var), strict)))])
        leaves = _leaves(lower(prog, AB))
        for n in lengths:
            for x in {"ab" * 4, "ba" * 4, "a" * 8, "b" * 8}:
                x = x[:n]
                for i in box:
                    want = eval_indexof(v, x, i, strict)
                    live = _live(leaves, {"x": x}, {i_var.var: i})
                    for cand in range(-2, n + 2):
                        fixed = {i_var.var: i, r_var.var: cand}
                        hits = [path for path, leaf in live if _admits(leaf, {"x": x}, fixed)]
                        checks += 1
                        if cand == want and not hits:
                            bad.append(f"indexof_{v}({x!r},{i}) = {want} covered by no branch")
                        if cand != want and hits:
                            bad.append(f"indexof_{v}({x!r},{i}) branch {hits} admits {cand}")
    return bad, checks


# ---------------------------------------------------------------------------
# differential engine test


def differential_mismatches(rng: random.Random, programs: int, *,
                            max_statements: int = 4,
                            timeout: float = 60.0) -> tuple[list[str], dict[str, int]]:
    from program_gen import random_program

    bad: list[str] = []
    counts: dict[str, int] = {}
    for k in range(programs):
        p = random_program(rng, max_statements)
        res = check_sat(p, SolveConfig(alphabet=AB, timeout=timeout))
        counts[res.verdict] = counts.get(res.verdict, 0) + 1
        witness = brute_force_solve(p, AB, 5, (-3, 8))
        if witness is not None and res.verdict != "sat":
            bad.append(f"#{k}: brute force found {witness} but solver said {res.verdict}\n{p}")
        if res.verdict == "sat" and not interpret_program(p, res.model):
            bad.append(f"#{k}: model does not validate\n{p}")
    return bad, counts


def validates(p: SlintProgram, model: ConcreteAssignment) -> bool:
    return bool(interpret_program(p, model))

