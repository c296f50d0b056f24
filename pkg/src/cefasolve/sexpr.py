"""S-expression reader with source positions, shared by the SMT-LIB and transducer parsers."""

from __future__ import annotations

from dataclasses import dataclass

from .errors import ParseError


@dataclass(frozen=True)
class Sym:
    name: str
    line: int = 0
    col: int = 0

    def __str__(self) -> str:
        return self.name


@dataclass(frozen=True)
class Str:
    value: str
    line: int = 0
    col: int = 0


@dataclass(frozen=True)
class Num:
    value: int
    line: int = 0
    col: int = 0


@dataclass(frozen=True)
class SList:
    items: tuple
    line: int = 0
    col: int = 0

    def __iter__(self):
        return iter(self.items)

    def __len__(self) -> int:
        return len(self.items)

    def __getitem__(self, i):
        return self.items[i]

    def head(self) -> str | None:
        return self.items[0].name if self.items and isinstance(self.items[0], Sym) else None


SExpr = Sym | Str | Num | SList


def position(e: SExpr) -> tuple[int, int]:
    return e.line, e.col


def decode_string_literal(raw: str, line: int, col: int) -> str:
    """SMT-LIB 2.6 string literal body: ``""`` is a quote, ``\\u{..}`` and ``\\ud...`` escapes."""
    out = []
    i = 0
    n = len(raw)
    while i < n:
        c = raw[i]
        if c == "\\" and i + 1 < n and raw[i + 1] == "u":
            j = i + 2
            if j < n and raw[j] == "{":
                k = raw.find("}", j)
                digits = raw[j + 1:k] if k != -1 else ""
                if k != -1 and 1 <= len(digits) <= 5 and all(ch in "0123456789abcdefABCDEF" for ch in digits):
                    out.append(chr(int(digits, 16)))
                    i = k + 1
                    continue
            else:
                digits = raw[j:j + 4]
                if len(digits) == 4 and all(ch in "0123456789abcdefABCDEF" for ch in digits):
                    out.append(chr(int(digits, 16)))
                    i = j + 4
                    continue
        out.append(c)
        i += 1
    return "".join(out)


def encode_string_literal(s: str) -> str:
    out = ['"']
    for ch in s:
        o = ord(ch)
        if ch == '"':
            out.append('""')
        elif ch == "\\" or o < 0x20 or o > 0x7E:
            out.append(f"\\u{{{o:x}}}")
        else:
            out.append(ch)
    out.append('"')
    return "".join(out)


_DELIMS = set("()\";")


def read_all(text: str) -> list[SExpr]:
    """Parse every top-level expression; raises :class:`ParseError` with a position."""
    pos = 0
    line, col = 1, 1
    n = len(text)
    stack: list[tuple[list, int, int]] = []
    top: list[SExpr] = []

    def advance(k: int) -> None:
        nonlocal pos, line, col
        for ch in text[pos:pos + k]:
            if ch == "\n":
                line += 1
                col = 1
            else:
                col += 1
        pos += k

    def emit(e: SExpr) -> None:
        (stack[-1][0] if stack else top).append(e)

    while pos < n:
        c = text[pos]
        if c in " \t\r\n":
            advance(1)
        elif c == ";":
            end = text.find("\n", pos)
            advance((n if end == -1 else end) - pos)
        elif c == "(":
            stack.append(([], line, col))
            advance(1)
        elif c == ")":
            if not stack:
                raise ParseError("unexpected ')'", line, col)
            items, l0, c0 = stack.pop()
            advance(1)
            emit(SList(tuple(items), l0, c0))
        elif c == '"':
            l0, c0 = line, col
            j = pos + 1
            buf = []
            while True:
                if j >= n:
                    raise ParseError("unterminated string literal", l0, c0)
                if text[j] == '"':
                    if j + 1 < n and text[j + 1] == '"':
                        buf.append('"')
                        j += 2
                        continue
                    break
                buf.append(text[j])
                j += 1
            advance(j + 1 - pos)
            emit(Str(decode_string_literal("".join(buf), l0, c0), l0, c0))
        elif c == "|":
            l0, c0 = line, col
            end = text.find("|", pos + 1)
            if end == -1:
                raise ParseError("unterminated quoted symbol", l0, c0)
            name = text[pos + 1:end]
            advance(end + 1 - pos)
            emit(Sym(name, l0, c0))
        else:
            l0, c0 = line, col
            j = pos
            while j < n and text[j] not in _DELIMS and not text[j].isspace():
                j += 1
            tok = text[pos:j]
            advance(j - pos)
            if tok.isdigit():
                emit(Num(int(tok), l0, c0))
            else:
                emit(Sym(tok, l0, c0))
    if stack:
        _, l0, c0 = stack[-1]
        raise ParseError("unbalanced '('", l0, c0)
    return top


def show(e: SExpr) -> str:
    if isinstance(e, Sym):
        return e.name
    if isinstance(e, Str):
        return encode_string_literal(e.value)
    if isinstance(e, Num):
        return str(e.value)
    return "(" + " ".join(show(x) for x in e.items) + ")"
