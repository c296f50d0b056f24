import random

import pytest

from cefasolve.automata import cefa_accepts, cefa_costs, fresh, lift
from cefasolve.builders import build_const_nfa, build_len_cefa
from cefasolve.errors import PreconditionError
from cefasolve.lia.cefa_sat import CefaSatStats, check_cefa_lia_sat, intersect_all
from cefasolve.lia.linear import eq, ge, Lin
from cefasolve.lia.parikh import decompose_flow_to_witness, monotonic_split, parikh_encode
from cefasolve.lia.solver import lia_solve
from cefasolve.oracle import words
from cefasolve.regex import parse_regex, regex_to_nfa

import checks
from checks import AB


def test_monotonic_split_keeps_costs():
    rng = random.Random(11)
    for _ in range(40):
        a = checks.random_cefa(rng)
        b, sub = monotonic_split(a)
        assert all(u >= 0 for t in b.transitions for u in t.update)
        for w in words(AB, 4):
            back = {tuple(sub[r].evaluate(dict(zip(b.registers, c))) for r in a.registers)
                    for c in cefa_costs(b, w)}
            assert back == cefa_costs(a, w)


def test_flow_decomposes_into_accepting_run():
    rng = random.Random(12)
    done = 0
    while done < 40:
        a = checks.random_cefa(rng, updates=(0, 1, 2))
        if not a.final or not a.initial:
            continue
        enc = parikh_encode(a)
        model = lia_solve([enc.atoms], refine=enc.cut)
        if model is None:
            continue
        done += 1
        w, path = decompose_flow_to_witness(a, enc.flow_solution(model))
        costs = tuple(enc.register_terms()[r].evaluate(model) for r in a.registers)
        assert cefa_accepts(a, (w, costs))
        assert len(path) == sum(model.get(f, 0) for f in enc.flow)


def test_connectivity_cut_rejects_detached_cycles():
    # the flow equations alone admit a loop on b that is detached from the start
    aa = regex_to_nfa(parse_regex("a|bb*"), AB)
    r = fresh("n")
    res = check_cefa_lia_sat({"x": [build_len_cefa(r, AB), lift(aa)]}, [[eq(r, 4)]])
    assert res is not None and res.strings["x"] == "bbbb"
    res = check_cefa_lia_sat({"x": [build_len_cefa(alphabet=AB), lift(build_const_nfa("ab", AB))]},
                             [[ge(Lin.var(fresh("unused")), 0)]])
    assert res is not None and res.strings["x"] == "ab"


def test_cefa_lia_examples():
    a1, a2 = build_len_cefa(alphabet=AB), build_len_cefa(alphabet=AB)
    even = lift(regex_to_nfa(parse_regex("(aa)*"), AB))
    r1, r2 = a1.registers[0], a2.registers[0]
    stats = CefaSatStats()
    res = check_cefa_lia_sat({"x": [a1, even], "y": [a2]},
                             [[eq(Lin.var(r1) + Lin.var(r2), 7), ge(r1, 3)]], stats=stats)
    assert res is not None
    assert len(res.strings["x"]) % 2 == 0 and len(res.strings["x"]) + len(res.strings["y"]) == 7
    assert stats.flow_vars > 0
    assert check_cefa_lia_sat({"x": [a1, even]}, [[eq(r1, 5)]]) is None
    with pytest.raises(PreconditionError):
        check_cefa_lia_sat({"x": [a1], "y": [a1]}, [[]])


def test_intersect_all_is_product():
    a = intersect_all([lift(regex_to_nfa(parse_regex("a*b"), AB)), build_len_cefa(alphabet=AB)])
    assert cefa_costs(a, "aab") == {(3,)}
    assert cefa_costs(a, "aba") == set()


def test_parikh_against_bounded_enumeration():
    bad, n = checks.parikh_mismatches(random.Random(40), 30)
    assert n > 0
    assert not bad, bad[:5]
