"""Freely reduced words in a free group of small rank.

A letter is a nonzero integer: +k is the k-th generator (1-based), -k its
inverse.  String form uses lowercase for generators and uppercase for
inverses, separated by spaces, e.g. ``"a B a a"``.
"""

from __future__ import annotations

import functools
import itertools
import string
from dataclasses import dataclass

from .errors import BadIndex

LETTERS = string.ascii_lowercase


def _reduce(letters):
    out = []
    for x in letters:
        if out and out[-1] == -x:
            out.pop()
        else:
            out.append(x)
    return tuple(out)


@dataclass(frozen=True)
class Word:
    letters: tuple = ()

    def __post_init__(self):
        lt = tuple(int(x) for x in self.letters)
        if any(x == 0 for x in lt):
            raise BadIndex("letter 0 is not a generator")
        object.__setattr__(self, "letters", _reduce(lt))

    @classmethod
    def parse(cls, s: str) -> Word:
        out = []
        for ch in s.replace(" ", ""):
            if ch == "1":  # explicit identity
                continue
            k = LETTERS.find(ch.lower()) + 1
            if k == 0:
                raise BadIndex(f"unknown letter {ch!r}")
            out.append(k if ch.islower() else -k)
        return cls(tuple(out))

    @classmethod
    def gen(cls, i: int) -> Word:
        """Word of the 0-based generator i."""
        return cls((i + 1,))

    def __str__(self):
        if not self.letters:
            return "1"
        return " ".join(LETTERS[abs(x) - 1] if x > 0 else LETTERS[abs(x) - 1].upper()
                        for x in self.letters)

    def __len__(self):
        return len(self.letters)

    def __mul__(self, other: Word) -> Word:
        return Word(self.letters + other.letters)

    def __pow__(self, n: int) -> Word:
        base = self if n >= 0 else self.inverse()
        return Word(base.letters * abs(n))

    def inverse(self) -> Word:
        return Word(tuple(-x for x in reversed(self.letters)))

    @property
    def rank_needed(self) -> int:
        return max((abs(x) for x in self.letters), default=0)

    def is_cyclically_reduced(self) -> bool:
        return len(self.letters) < 2 or self.letters[0] != -self.letters[-1]

    def cyclic_reduce(self) -> Word:
        lt = self.letters
        while len(lt) >= 2 and lt[0] == -lt[-1]:
            lt = lt[1:-1]
        return Word(lt)

    def rotations(self):
        lt = self.letters
        return [Word(lt[i:] + lt[:i]) for i in range(max(len(lt), 1))]

    def to_json(self):
        return str(self)


def _sort_key(letters):
    # generators before inverses, a before b
    return (len(letters), [(abs(x), x < 0) for x in letters])


def reduced_words(rank: int, max_len: int):
    """All freely reduced words of length 1..max_len in deterministic order."""
    alphabet = [k for i in range(1, rank + 1) for k in (i, -i)]
    level = [()]
    for _ in range(max_len):
        nxt = []
        for w in level:
            for x in alphabet:
                if w and w[-1] == -x:
                    continue
                nxt.append(w + (x,))
        nxt.sort(key=_sort_key)
        yield from (Word(w) for w in nxt)
        level = nxt


def cyclically_reduced_words(rank: int, max_len: int):
    return [w for w in reduced_words(rank, max_len) if w.is_cyclically_reduced()]


def canonical_conjugacy_rep(w: Word) -> Word:
    """Least rotation of w or of its inverse (length functions agree on both)."""
    w = w.cyclic_reduce()
    cands = w.rotations() + w.inverse().rotations()
    return min(cands, key=lambda v: _sort_key(v.letters))


def conjugacy_representatives(rank: int, max_len: int):
    """One cyclically reduced word per unoriented conjugacy class, length <= max_len."""
    return list(_conjugacy_representatives(rank, max_len))


@functools.lru_cache(maxsize=None)
def _conjugacy_representatives(rank, max_len):
    seen = set()
    out = []
    for w in cyclically_reduced_words(rank, max_len):
        c = canonical_conjugacy_rep(w)
        if c.letters not in seen:
            seen.add(c.letters)
            out.append(c)
    return tuple(out)


def all_words_up_to(rank: int, max_len: int):
    """Identity followed by all reduced words up to max_len."""
    return [Word()] + list(reduced_words(rank, max_len))


def product_words(words, repeat):
    for combo in itertools.product(words, repeat=repeat):
        out = Word()
        for w in combo:
            out = out * w
        yield out
