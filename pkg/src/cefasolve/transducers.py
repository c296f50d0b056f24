"""Text format for finite transducers and the bundled transducer library.

A definition reads::

    (define-transducer NAME
      (:states (s0 s1 ...)) (:init (s0)) (:final (s1)) (:functional true)
      (:trans (s0 [lo-hi,...] "output" s1) ...))

Ranges are decimal code points.  The output position may also hold the bare
symbol ``copy``, meaning "emit the letter just read"; single-letter
transitions that print their own letter are read as copies too, and parallel
copies between the same states are merged.
"""

from __future__ import annotations

from functools import lru_cache
from importlib import resources

from .alphabet import ASCII, Alphabet, CharClass
from .automata import FTrans, Nft
from .errors import InputError, ParseError
from .sexpr import SExpr, SList, Str, Sym, encode_string_literal, position, read_all


def parse_charclass(tok: str, line: int = 0, col: int = 0) -> CharClass:
    if not (tok.startswith("[") and tok.endswith("]")):
        raise ParseError(f"expected a range list like [97-122], got {tok!r}", line, col)
    body = tok[1:-1]
    ranges = []
    for part in filter(None, body.split(",")):
        lo, sep, hi = part.partition("-")
        try:
            lo_i = int(lo)
            hi_i = int(hi) if sep else lo_i
        except ValueError:
            raise ParseError(f"bad range {part!r}", line, col) from None
        if lo_i > hi_i:
            raise ParseError(f"empty range {part!r}", line, col)
        ranges.append((lo_i, hi_i))
    return CharClass(tuple(ranges))


def _syms(e: SExpr, what: str) -> list[str]:
    if not isinstance(e, SList) or not all(isinstance(x, Sym) for x in e):
        raise ParseError(f"{what} must be a list of state names", *position(e))
    return [x.name for x in e]


def _section(e: SList, key: str, many: bool = False):
    for item in e.items[2:]:
        if isinstance(item, SList) and item.head() == key:
            if many:
                return item.items[1:]
            if len(item) != 2:
                raise ParseError(f"{key} takes one argument", *position(item))
            return item[1]
    raise ParseError(f"missing {key}", *position(e))


def parse_transducer_def(e: SExpr | str, alphabet: Alphabet = ASCII) -> Nft:
    if isinstance(e, str):
        forms = read_all(e)
        if len(forms) != 1:
            raise ParseError("expected exactly one definition")
        e = forms[0]
    if not isinstance(e, SList) or e.head() != "define-transducer" or len(e) < 2 \
            or not isinstance(e[1], Sym):
        raise ParseError("expected (define-transducer NAME ...)", *position(e))
    name = e[1].name
    states = _syms(_section(e, ":states"), ":states")
    if len(set(states)) != len(states):
        raise ParseError(f"duplicate state names in {name}", *position(e))
    ids = {s: i for i, s in enumerate(states)}

    def sid(s: Sym | SExpr) -> int:
        if not isinstance(s, Sym) or s.name not in ids:
            raise ParseError(f"unknown state {s}", *position(s))
        return ids[s.name]

    init = [sid(Sym(s)) for s in _syms(_section(e, ":init"), ":init")]
    final = [sid(Sym(s)) for s in _syms(_section(e, ":final"), ":final")]
    func = _section(e, ":functional")
    if not isinstance(func, Sym) or func.name not in ("true", "false"):
        raise ParseError(":functional must be true or false", *position(func))
    trans_e = _section(e, ":trans", many=True)
    copies: dict[tuple[int, int], CharClass] = {}
    trans: list[FTrans] = []
    for t in trans_e:
        if not isinstance(t, SList) or len(t) != 4 or not isinstance(t[1], Sym):
            raise ParseError("transition must be (src [ranges] \"out\" dst)", *position(t))
        src, dst = sid(t[0]), sid(t[3])
        label = parse_charclass(t[1].name, *position(t[1]))
        if not label.issubset(alphabet.full):
            raise ParseError(f"range {t[1].name} leaves the alphabet", *position(t[1]))
        out = t[2]
        is_copy = isinstance(out, Sym) and out.name == "copy"
        if not is_copy and not isinstance(out, Str):
            raise ParseError("output must be a string literal or copy", *position(out))
        if not is_copy and len(label) == 1 and out.value == label.least():
            is_copy = True
        if is_copy:
            key = (src, dst)
            copies[key] = copies[key] | label if key in copies else label
        else:
            for ch in out.value:
                if ch not in alphabet:
                    raise ParseError(f"output letter {ch!r} leaves the alphabet", *position(out))
            trans.append(FTrans(src, label, dst, out.value, False))
    trans += [FTrans(s, lab, d, "", True) for (s, d), lab in sorted(copies.items())]
    try:
        return Nft(len(states), tuple(trans), init, final, func.name == "true", alphabet, name)
    except InputError as err:
        raise ParseError(str(err), *position(e)) from None


def render_transducer_def(t: Nft) -> str:
    names = [f"s{i}" for i in range(t.n_states)]
    lines = [f"(define-transducer {t.name}",
             f"  (:states ({' '.join(names)}))",
             f"  (:init ({' '.join(names[q] for q in sorted(t.initial))}))",
             f"  (:final ({' '.join(names[q] for q in sorted(t.final))}))",
             f"  (:functional {'true' if t.functional else 'false'})",
             "  (:trans"]
    for tr in sorted(t.transitions, key=lambda x: (x.src, x.label.ranges, x.dst, x.copy, x.output)):
        out = "copy" if tr.copy else encode_string_literal(tr.output)
        lines.append(f"    ({names[tr.src]} [{tr.label.render()}] {out} {names[tr.dst]})")
    lines[-1] += "))"
    return "\n".join(lines)


def builtin_names() -> list[str]:
    folder = resources.files("cefasolve.data") / "transducers"
    return sorted(p.name[:-5] for p in folder.iterdir() if p.name.endswith(".tdef"))


@lru_cache(maxsize=None)
def load_builtin(name: str, alphabet: Alphabet = ASCII) -> Nft:
    path = resources.files("cefasolve.data") / "transducers" / f"{name}.tdef"
    if not path.is_file():
        raise InputError(f"no bundled transducer named {name!r}")
    return parse_transducer_def(path.read_text(encoding="utf-8"), alphabet)
