"""Subshifts of finite type over the alphabet ``{1, ..., m}``.

Symbols are 1-based in every public function (words are tuples of ints) and
0-based inside numpy arrays.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterator

import numpy as np

from .errors import InputError

Word = tuple[int, ...]


@dataclass(frozen=True, eq=False)
class SubshiftSpec:
    """Alphabet size and 0/1 transition matrix of a one-sided SFT."""

    adjacency: np.ndarray

    def __post_init__(self):
        a = np.asarray(self.adjacency)
        if a.ndim != 2 or a.shape[0] != a.shape[1]:
            raise InputError("adjacency must be a square matrix")
        if a.shape[0] < 2:
            raise InputError("alphabet size m must be >= 2")
        if not np.all((a == 0) | (a == 1)):
            raise InputError("adjacency entries must be 0 or 1")
        a = a.astype(np.int8)
        dead_rows = np.flatnonzero(a.sum(axis=1) == 0)
        dead_cols = np.flatnonzero(a.sum(axis=0) == 0)
        if dead_rows.size or dead_cols.size:
            dead = sorted({*(dead_rows + 1).tolist(), *(dead_cols + 1).tolist()})
            raise InputError(f"adjacency has dead symbols {dead} (empty row or column)")
        a.setflags(write=False)
        object.__setattr__(self, "adjacency", a)

    @classmethod
    def full(cls, m: int) -> "SubshiftSpec":
        return cls(np.ones((m, m), dtype=np.int8))

    @property
    def m(self) -> int:
        return self.adjacency.shape[0]

    @property
    def is_full_shift(self) -> bool:
        return bool(np.all(self.adjacency == 1))

    def __eq__(self, other):
        if not isinstance(other, SubshiftSpec):
            return NotImplemented
        return np.array_equal(self.adjacency, other.adjacency)

    def __hash__(self):
        return hash((self.m, self.adjacency.tobytes()))

    def __repr__(self):
        return f"SubshiftSpec(m={self.m}, adjacency={self.adjacency.tolist()})"


def _check_symbols(spec: SubshiftSpec, word) -> tuple[int, ...]:
    word = tuple(int(s) for s in word)
    for pos, s in enumerate(word):
        if not 1 <= s <= spec.m:
            raise InputError(f"symbol {s} at position {pos} is outside 1..{spec.m}")
    return word


def is_admissible(spec: SubshiftSpec, word) -> bool:
    word = _check_symbols(spec, word)
    a = spec.adjacency
    return all(a[x - 1, y - 1] for x, y in zip(word, word[1:]))


def is_primitive(spec: SubshiftSpec) -> tuple[bool, int | None]:
    """Return ``(True, p)`` with the least ``p`` such that ``A**p > 0``.

    The search stops at Wielandt's bound ``(m-1)**2 + 1``, beyond which a
    primitive matrix cannot need more steps, so ``(False, None)`` is final.
    """
    a = spec.adjacency.astype(bool)
    power = a.copy()
    for p in range(1, (spec.m - 1) ** 2 + 2):
        if power.all():
            return True, p
        power = (power.astype(np.int64) @ a.astype(np.int64)) > 0
    return False, None


def word_count(spec: SubshiftSpec, n: int) -> int:
    """``|Sigma_{A,n}| = 1^T A^(n-1) 1`` in exact integer arithmetic."""
    if n < 1:
        raise InputError("word length must be >= 1")
    a = [[int(x) for x in row] for row in spec.adjacency]
    v = [1] * spec.m
    for _ in range(n - 1):
        v = [sum(a[i][j] * v[j] for j in range(spec.m)) for i in range(spec.m)]
    return sum(v)


def enumerate_words(spec: SubshiftSpec, n: int, first: int | None = None) -> Iterator[Word]:
    """Yield the admissible words of length ``n`` in lexicographic order.

    Depth-first with pruning on the adjacency matrix; ``first`` restricts the
    stream to one first symbol so that the alphabet can be partitioned.
    """
    if n < 1:
        raise InputError("word length must be >= 1")
    a = spec.adjacency
    succ = [[j for j in range(spec.m) if a[i, j]] for i in range(spec.m)]
    starts = range(spec.m) if first is None else [first - 1]
    stack: list[int] = []

    def walk(options):
        for s in options:
            stack.append(s)
            if len(stack) == n:
                yield tuple(x + 1 for x in stack)
            else:
                yield from walk(succ[s])
            stack.pop()

    yield from walk(starts)


def word_array(spec: SubshiftSpec, n: int, first: int | None = None) -> np.ndarray:
    """All admissible ``n``-words as a ``(count, n)`` array of 0-based symbols.

    Rows are in lexicographic order, matching :func:`enumerate_words`.
    """
    if n < 1:
        raise InputError("word length must be >= 1")
    starts = np.arange(spec.m) if first is None else np.array([first - 1])
    words = starts[:, None].astype(np.uint8)
    for _ in range(n - 1):
        words = extend_words(spec, words)
    return words


def extend_words(spec: SubshiftSpec, words: np.ndarray) -> np.ndarray:
    """Append every allowed next symbol; lexicographic order is preserved."""
    allowed = spec.adjacency.astype(bool)[words[:, -1]]
    parent, sym = np.nonzero(allowed)
    return np.concatenate([words[parent], sym[:, None].astype(np.uint8)], axis=1)


def word_codes(words: np.ndarray, m: int) -> np.ndarray:
    """Base-``m`` integer code of each row; monotone in lexicographic order."""
    codes = np.zeros(words.shape[0], dtype=np.int64)
    for col in range(words.shape[1]):
        codes = codes * m + words[:, col]
    return codes


def bridges(spec: SubshiftSpec, i: int, j: int, r: int) -> list[Word]:
    """All ``K`` with ``1 <= |K| <= r`` such that ``iKj`` is admissible.

    Ordered by length, then lexicographically.
    """
    _check_symbols(spec, (i, j))
    if r < 1:
        raise InputError("bridge horizon r must be >= 1")
    a = spec.adjacency
    out: list[Word] = []
    for k in range(1, r + 1):
        for first in range(1, spec.m + 1):
            if not a[i - 1, first - 1]:
                continue
            for word in enumerate_words(spec, k, first=first):
                if a[word[-1] - 1, j - 1]:
                    out.append(word)
    return out


def format_word(word, m: int) -> str:
    """1-based digit string, dot-separated when ``m > 9``."""
    word = [int(s) for s in word]
    return "".join(map(str, word)) if m <= 9 else ".".join(map(str, word))


def parse_word(text: str, m: int) -> Word:
    text = text.strip()
    if not text:
        raise InputError("empty word")
    if m > 9 or "." in text:
        parts = text.split(".")
    else:
        parts = list(text)
    try:
        return tuple(int(p) for p in parts)
    except ValueError as exc:
        raise InputError(f"cannot parse word {text!r}") from exc
