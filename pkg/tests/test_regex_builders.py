import random

import pytest
from hypothesis import given, settings, strategies as st

from cefasolve.alphabet import Alphabet, CharClass
from cefasolve.automata import cefa_accepts, nfa_accepts
from cefasolve.builders import (build_avoid_substring_nfa, build_const_nfa,
                                build_contains_substring_nfa, build_indexof_cefa, build_len_cefa,
                                indexof_profile_count,
                                build_replace_nft, build_replaceall_nft, uwp_update)
from cefasolve.errors import InputError, ParseError, PreconditionError
from cefasolve.oracle import eval_indexof, eval_replace, eval_replaceall, run_transducer, words
from cefasolve.regex import (Concat, EmptySet, Epsilon, Lit, Optional, Plus, Star, Union,
                             matches, nullable, parse_regex, regex_to_nfa, to_text)

from checks import AB

ASCII_WORDS = ["", "a", "ab", "ba", "abc", "xyz", "a-b", "scrscriptipt"]


def _nullable(e) -> bool:
    if isinstance(e, (Epsilon, Star, Optional)):
        return True
    if isinstance(e, (EmptySet, Lit)):
        return False
    if isinstance(e, Concat):
        return _nullable(e.left) and _nullable(e.right)
    if isinstance(e, Union):
        return _nullable(e.left) or _nullable(e.right)
    return _nullable(e.body)  # Plus


def _deriv(e, ch):
    if isinstance(e, (EmptySet, Epsilon)):
        return EmptySet()
    if isinstance(e, Lit):
        return Epsilon() if ch in e.cls else EmptySet()
    if isinstance(e, Concat):
        d = Concat(_deriv(e.left, ch), e.right)
        return Union(d, _deriv(e.right, ch)) if _nullable(e.left) else d
    if isinstance(e, Union):
        return Union(_deriv(e.left, ch), _deriv(e.right, ch))
    if isinstance(e, Optional):
        return _deriv(e.body, ch)
    return Concat(_deriv(e.body, ch), Star(e.body))  # Star and Plus


def derivative_match(e, w: str) -> bool:
    """Reference matcher built on derivatives, independent of the automaton path."""
    for ch in w:
        e = _deriv(e, ch)
    return _nullable(e)


def random_regex(rng: random.Random, depth: int):
    if depth == 0 or rng.random() < 0.25:
        return rng.choice([Lit(CharClass.of("a")), Lit(CharClass.of("b")),
                           Lit(CharClass.of("a", "b")), Epsilon(), EmptySet()])
    kind = rng.choice(["cat", "alt", "star", "plus", "opt"])
    if kind in ("cat", "alt"):
        l, r = random_regex(rng, depth - 1), random_regex(rng, depth - 1)
        return Concat(l, r) if kind == "cat" else Union(l, r)
    body = random_regex(rng, depth - 1)
    return {"star": Star, "plus": Plus, "opt": Optional}[kind](body)


def test_parse_examples():
    a, b = Lit(CharClass.of("a")), Lit(CharClass.of("b"))
    assert parse_regex("(ab)+") == Plus(Concat(a, b))
    assert parse_regex("a|b*") == Union(a, Star(b))
    assert parse_regex("[a-c]x") == Concat(Lit(CharClass.range("a", "c")), Lit(CharClass.of("x")))
    assert parse_regex(r"\*") == Lit(CharClass.of("*"))


@pytest.mark.parametrize("bad", ["(ab", "a)", "[a-", "*a", "\\"])
def test_parse_errors_carry_position(bad):
    with pytest.raises(ParseError) as info:
        parse_regex(bad)
    assert info.value.col is not None


def test_regex_examples():
    ab_plus = regex_to_nfa(parse_regex("(ab)+"))
    assert not nfa_accepts(ab_plus, "")
    assert nfa_accepts(ab_plus, "ab") and nfa_accepts(ab_plus, "abab")
    empty = regex_to_nfa(EmptySet())
    assert not any(nfa_accepts(empty, w) for w in ASCII_WORDS)
    star = regex_to_nfa(parse_regex("a*"))
    assert all(nfa_accepts(star, w) for w in ["", "a", "aa"])


def test_regex_to_nfa_matches_derivatives_exhaustively():
    rng = random.Random(8)
    pool = list(words(AB, 6))
    for _ in range(300):
        e = random_regex(rng, 4)
        nfa = regex_to_nfa(e, AB)
        for w in pool:
            assert nfa_accepts(nfa, w) == derivative_match(e, w), (to_text(e), w)
        assert nullable(e) == derivative_match(e, "")


@settings(max_examples=200, deadline=None)
@given(st.integers(0, 10**6))
def test_print_parse_round_trip(seed):
    e = random_regex(random.Random(seed), 4)
    back = parse_regex(to_text(e))
    for w in words(AB, 4):
        assert matches(back, w) == matches(e, w)


def test_const_nfa():
    eps = build_const_nfa("")
    assert nfa_accepts(eps, "") and not nfa_accepts(eps, "a")
    ab = build_const_nfa("ab")
    assert nfa_accepts(ab, "ab") and not nfa_accepts(ab, "a") and not nfa_accepts(ab, "abb")


def test_avoid_and_contains():
    avoid = build_avoid_substring_nfa("ab", AB)
    assert nfa_accepts(avoid, "ba") and nfa_accepts(avoid, "aaa") and not nfa_accepts(avoid, "aab")
    aa = build_avoid_substring_nfa("aa", AB)
    assert not nfa_accepts(aa, "aa") and nfa_accepts(aa, "aba")
    s = build_contains_substring_nfa("script")
    assert nfa_accepts(s, "xscripty") and nfa_accepts(s, "script") and not nfa_accepts(s, "scrip")
    for bad in (build_avoid_substring_nfa, build_contains_substring_nfa):
        with pytest.raises(InputError):
            bad("", AB)


@pytest.mark.parametrize("v", ["a", "ab", "aa", "aba", "abab", "bba"])
def test_avoid_contains_partition(v):
    avoid = build_avoid_substring_nfa(v, AB)
    contains = build_contains_substring_nfa(v, AB)
    for w in words(AB, 6):
        assert nfa_accepts(avoid, w) == (v not in w)
        assert nfa_accepts(contains, w) == (v in w)


def test_len_cefa():
    a = build_len_cefa()
    assert a.n_states == 1 and a.k == 1
    assert cefa_accepts(a, ("", (0,))) and cefa_accepts(a, ("aba", (3,)))
    assert not cefa_accepts(a, ("a", (0,)))


def test_window_profile_examples():
    v = "aba"
    assert uwp_update((False, False), "a", v) == (True, False)
    assert uwp_update((True, False), "b", v) == (False, True)
    assert uwp_update((True, True), "a", v) == (True, False)
    with pytest.raises(InputError):
        uwp_update((True,), "a", v)


@pytest.mark.parametrize("v", ["ab", "aab", "aba", "bbb"])
def test_window_profile_matches_naive_recomputation(v):
    for w in words(AB, 6):
        pi = (False,) * (len(v) - 1)
        for k, ch in enumerate(w):
            pi = uwp_update(pi, ch, v)
            seen = w[:k + 1]
            naive = tuple(seen.endswith(v[:j + 1]) for j in range(len(v) - 1))
            assert pi == naive


def test_indexof_examples():
    a = build_indexof_cefa("ab", alphabet=AB)
    assert cefa_accepts(a, ("aaba", (0, 1)))
    assert not any(cefa_accepts(a, ("aaba", (2, m))) for m in range(-2, 6))


@pytest.mark.parametrize("v", ["a", "b", "ab", "ba", "aa", "aba", "abb"])
def test_indexof_cefa_matches_reference(v):
    a = build_indexof_cefa(v, alphabet=AB)
    for w in words(AB, 6):
        for n in range(-1, len(w) + 1):
            for m in range(-2, len(w) + 2):
                want = 0 <= n < len(w) and m == eval_indexof(v, w, n) and m >= n
                assert cefa_accepts(a, (w, (n, m))) == want, (w, n, m)


def test_indexof_rejects_empty_pattern():
    with pytest.raises(InputError):
        build_indexof_cefa("")


def test_replaceall_examples():
    abc = Alphabet.explicit("abc")
    t = build_replaceall_nft(parse_regex("(ab)+"), "c", abc)
    assert run_transducer(t, "aababaab") == "acac"
    assert run_transducer(t, "ba") == "ba"
    with pytest.raises((InputError, PreconditionError)):
        build_replaceall_nft(parse_regex("a*"), "c", abc)


@pytest.mark.parametrize("pattern,u", [("(ab)+", "c"), ("a", ""), ("ab|b", "aa"), ("a+b", "b"),
                                       ("b*a", "ab"), ("aba", "")])
def test_replaceall_and_replace_agree_with_reference(pattern, u):
    abc = Alphabet.explicit("abc")
    e = parse_regex(pattern)
    t_all = build_replaceall_nft(e, u, abc)
    t_one = build_replace_nft(e, u, abc)
    rng = random.Random(hash((pattern, u)) & 0xFFFF)
    samples = list(words("ab", 6)) + ["".join(rng.choice("abc") for _ in range(rng.randint(0, 8)))
                                      for _ in range(500)]
    for w in samples:
        assert run_transducer(t_all, w) == eval_replaceall(e, u, w), w
        assert run_transducer(t_one, w) == eval_replace(e, u, w), w


def test_replace_examples():
    t = build_replace_nft(parse_regex("ab"), "x", Alphabet.explicit("abx"))
    assert run_transducer(t, "abab") == "xab"
    assert run_transducer(t, "bb") == "bb"
    assert run_transducer(t, "aab") == "ax"


def test_window_profile_count_stays_within_pattern_length():
    import itertools
    for n in range(2, 8):
        for v in map("".join, itertools.product("ab", repeat=n)):
            assert indexof_profile_count(v, AB) <= len(v), v
    assert indexof_profile_count("script") <= 6
