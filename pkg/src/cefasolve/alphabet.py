"""Character classes and alphabets.

A :class:`CharClass` is a set of code points stored as sorted, disjoint,
inclusive ranges.  Transitions are labelled with classes instead of single
letters; a class label stands for one transition per member letter.
"""

from __future__ import annotations

import bisect
from dataclasses import dataclass
from functools import cached_property
from typing import Iterable, Iterator

from .errors import InputError

ASCII_LO = 0x20
ASCII_HI = 0x7E


class AlphabetError(InputError):
    """A letter or class falls outside the configured alphabet."""


def _normalize(ranges: Iterable[tuple[int, int]]) -> tuple[tuple[int, int], ...]:
    out: list[list[int]] = []
    for lo, hi in sorted(r for r in ranges if r[0] <= r[1]):
        if out and lo <= out[-1][1] + 1:
            if hi > out[-1][1]:
                out[-1][1] = hi
        else:
            out.append([lo, hi])
    return tuple((lo, hi) for lo, hi in out)


@dataclass(frozen=True)
class CharClass:
    ranges: tuple[tuple[int, int], ...] = ()

    def __post_init__(self) -> None:
        object.__setattr__(self, "ranges", _normalize(self.ranges))

    # -- constructors -------------------------------------------------------
    @classmethod
    def of(cls, *chars: str) -> "CharClass":
        return cls(tuple((ord(c), ord(c)) for c in chars))

    @classmethod
    def range(cls, lo: str | int, hi: str | int) -> "CharClass":
        lo_i = ord(lo) if isinstance(lo, str) else lo
        hi_i = ord(hi) if isinstance(hi, str) else hi
        return cls(((lo_i, hi_i),))

    @classmethod
    def from_codepoints(cls, points: Iterable[int]) -> "CharClass":
        return cls(tuple((p, p) for p in points))

    # -- queries ------------------------------------------------------------
    @cached_property
    def _los(self) -> list[int]:
        return [lo for lo, _ in self.ranges]

    def __contains__(self, ch: object) -> bool:
        if isinstance(ch, str):
            if len(ch) != 1:
                return False
            ch = ord(ch)
        if not isinstance(ch, int):
            return False
        i = bisect.bisect_right(self._los, ch) - 1
        return i >= 0 and ch <= self.ranges[i][1]

    def __bool__(self) -> bool:
        return bool(self.ranges)

    def __len__(self) -> int:
        return sum(hi - lo + 1 for lo, hi in self.ranges)

    def __iter__(self) -> Iterator[str]:
        for lo, hi in self.ranges:
            for p in range(lo, hi + 1):
                yield chr(p)

    def __lt__(self, other: "CharClass") -> bool:
        return self.ranges < other.ranges

    def least(self) -> str:
        if not self.ranges:
            raise ValueError("empty class has no least letter")
        return chr(self.ranges[0][0])

    def is_empty(self) -> bool:
        return not self.ranges

    # -- algebra ------------------------------------------------------------
    def __and__(self, other: "CharClass") -> "CharClass":
        a, b = self.ranges, other.ranges
        if not a or not b:
            return EMPTY
        if a == b:
            return self
        i = j = 0
        out = []
        while i < len(a) and j < len(b):
            lo = max(a[i][0], b[j][0])
            hi = min(a[i][1], b[j][1])
            if lo <= hi:
                out.append((lo, hi))
            if a[i][1] < b[j][1]:
                i += 1
            else:
                j += 1
        return CharClass(tuple(out))

    def __or__(self, other: "CharClass") -> "CharClass":
        return CharClass(self.ranges + other.ranges)

    def __sub__(self, other: "CharClass") -> "CharClass":
        out = []
        for lo, hi in self.ranges:
            cur = lo
            for olo, ohi in other.ranges:
                if ohi < cur or olo > hi:
                    continue
                if olo > cur:
                    out.append((cur, olo - 1))
                cur = max(cur, ohi + 1)
                if cur > hi:
                    break
            if cur <= hi:
                out.append((cur, hi))
        return CharClass(tuple(out))

    def issubset(self, other: "CharClass") -> bool:
        return not (self - other)

    def render(self) -> str:
        return ",".join(f"{lo}-{hi}" for lo, hi in self.ranges)

    def __repr__(self) -> str:
        parts = []
        for lo, hi in self.ranges:
            parts.append(_show(lo) if lo == hi else f"{_show(lo)}-{_show(hi)}")
        return f"[{''.join(parts)}]"


def _show(p: int) -> str:
    c = chr(p)
    return c if c.isprintable() and c not in "[]-\\" else f"\\x{p:02x}"


EMPTY = CharClass()


def minterms(classes: Iterable[CharClass], universe: CharClass) -> list[CharClass]:
    """Partition ``universe`` into the coarsest blocks that respect every class."""
    cuts: set[int] = {universe.ranges[0][0]} if universe else set()
    for c in classes:
        for lo, hi in c.ranges:
            cuts.add(lo)
            cuts.add(hi + 1)
    for lo, hi in universe.ranges:
        cuts.add(lo)
        cuts.add(hi + 1)
    points = sorted(cuts)
    classes = list(classes)
    blocks: dict[tuple[bool, ...], list[tuple[int, int]]] = {}
    for lo, nxt in zip(points, points[1:]):
        piece = CharClass(((lo, nxt - 1),)) & universe
        if not piece:
            continue
        sig = tuple(lo in c for c in classes)
        blocks.setdefault(sig, []).extend(piece.ranges)
    return [CharClass(tuple(r)) for r in blocks.values()]


@dataclass(frozen=True)
class Alphabet:
    """The letters strings may use.  ``kind`` is ``"ascii"`` or ``"explicit"``."""

    kind: str
    letters: CharClass

    def __post_init__(self) -> None:
        if not self.letters:
            raise AlphabetError("alphabet must be nonempty")

    @classmethod
    def ascii(cls) -> "Alphabet":
        return cls("ascii", CharClass(((ASCII_LO, ASCII_HI),)))

    @classmethod
    def explicit(cls, chars: Iterable[str]) -> "Alphabet":
        chars = list(chars)
        if len(set(chars)) != len(chars):
            raise AlphabetError("explicit alphabet has duplicate letters")
        return cls("explicit", CharClass.of(*chars))

    @property
    def size(self) -> int:
        return len(self.letters)

    @property
    def full(self) -> CharClass:
        return self.letters

    def __contains__(self, ch: object) -> bool:
        return ch in self.letters

    def check_word(self, w: str) -> None:
        for i, ch in enumerate(w):
            if ch not in self.letters:
                raise AlphabetError(f"letter {ch!r} at position {i} is outside the alphabet")

    def chars(self) -> list[str]:
        return list(self.letters)


ASCII = Alphabet.ascii()
