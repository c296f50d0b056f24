"""Random small straight-line programs over {a, b} for differential testing."""

from __future__ import annotations

import random

from cefasolve.alphabet import Alphabet
from cefasolve.program import (Arith, Assert, Concat, IndexOf, IntConst, Length, Member, Or,
                               ReplaceAll, Reverse, SlintProgram, Substring, int_var)
from cefasolve.regex import parse_regex, regex_to_nfa

AB = Alphabet.explicit("ab")
REGEXES = ["a*", "b*", "(ab)*", "a*b*", "[ab]*a", "b[ab]*", "()", "a", "ab", "[ab][ab]",
           "(a|bb)*", "[ab]*ab[ab]*", "[ab]*bb[ab]*", "a+b", "b?a?b?"]
PATTERNS = ["a", "b", "ab", "ba", "a+", "bb", "(ab)+"]
REPLACEMENTS = ["", "a", "b", "ba", "aa"]
NEEDLES = ["a", "b", "ab", "ba", "aa"]


def random_program(rng: random.Random, max_statements: int = 4) -> SlintProgram:
    strings = ["x0", "x1"][: rng.randint(1, 2)]
    ints = [int_var("n")] if rng.random() < 0.5 else []
    fresh_id = 0
    stmts = []
    n = rng.randint(1, max_statements)
    for _ in range(n):
        kind = rng.choice(["concat", "reverse", "substring", "replaceall",
                           "member", "member", "length", "indexof"])
        src = rng.choice(strings)
        if kind in ("concat", "reverse", "substring", "replaceall"):
            fresh_id += 1
            tgt = f"y{fresh_id}"
            if kind == "concat":
                stmts.append(Concat(tgt, src, rng.choice(strings)))
            elif kind == "reverse":
                stmts.append(Reverse(tgt, src))
            elif kind == "substring":
                start = rng.choice([IntConst(rng.randint(-1, 3))] + ints[:1])
                length = rng.choice([IntConst(rng.randint(-1, 3)), Length(src) - start] +
                                    ints[:1])
                stmts.append(Substring(tgt, src, start, length))
            else:
                stmts.append(ReplaceAll(tgt, parse_regex(rng.choice(PATTERNS)),
                                        rng.choice(REPLACEMENTS), src))
            strings.append(tgt)
        elif kind == "member":
            f = Member(src, regex_to_nfa(parse_regex(rng.choice(REGEXES)), AB))
            if rng.random() < 0.2:
                f = Or((f, Member(rng.choice(strings), regex_to_nfa(parse_regex(rng.choice(REGEXES)), AB))))
            stmts.append(Assert(f))
        elif kind == "length":
            lhs = Length(src)
            rhs = rng.choice([IntConst(rng.randint(0, 4))] + ints[:1] +
                             [Length(rng.choice(strings))])
            stmts.append(Assert(Arith(lhs, rng.choice(["=", "<=", ">", "!="]), rhs)))
        else:
            start = rng.choice([IntConst(rng.randint(-2, 3))] + ints[:1])
            term = IndexOf(src, rng.choice(NEEDLES), start)
            rhs = rng.choice([IntConst(rng.randint(-1, 3))] + ints[:1])
            stmts.append(Assert(Arith(term, rng.choice(["=", ">=", "<"]), rhs)))
    return SlintProgram(tuple(stmts))
