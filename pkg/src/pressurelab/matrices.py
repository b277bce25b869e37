"""Non-negative matrix families attached to an SFT, and their products.

A family of depth ``k`` assigns one ``d x d`` matrix to every admissible
``k``-word; the factor at position ``t`` of a product depends on symbols
``t .. t+k-1``.  Depth 1 is the constant-per-symbol case.

Products are carried as ``exp(logscale) * normalized`` with
``norm(normalized) == 1`` (the norm is the sum of entries), so long words
do not overflow.  Vanishing products are flagged rather than encoded as
``-inf``.
"""

from __future__ import annotations

import functools
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import NamedTuple

import numpy as np

from . import parallel
from .errors import InputError, PreconditionError, SizeGuardError, UnsupportedModeError
from .sft import (
    SubshiftSpec,
    Word,
    bridges,
    enumerate_words,
    extend_words,
    is_admissible,
    word_array,
    word_codes,
    word_count,
)

# Largest number of words any single enumeration may hold in memory.
MAX_WORDS = 20_000_000


def norm(b) -> float:
    """``1^T B 1``: the sum of all entries."""
    return float(np.sum(b))


@dataclass(frozen=True, eq=False)
class MatrixFamily:
    """Matrices indexed by the admissible ``depth``-words of ``spec``.

    ``matrices[i]`` belongs to the ``i``-th admissible word in lexicographic
    order (for depth 1 that is simply symbol ``i + 1``).
    """

    spec: SubshiftSpec
    matrices: np.ndarray
    depth: int = 1

    def __post_init__(self):
        if self.depth < 1:
            raise InputError("depth must be >= 1")
        mats = np.array(self.matrices, dtype=np.float64)
        if mats.ndim != 3 or mats.shape[1] != mats.shape[2] or mats.shape[1] < 1:
            raise InputError("matrices must have shape (count, d, d)")
        keys = word_array(self.spec, self.depth)
        if mats.shape[0] != keys.shape[0]:
            raise InputError(
                f"expected {keys.shape[0]} matrices (one per admissible "
                f"{self.depth}-word), got {mats.shape[0]}"
            )
        if not np.all(np.isfinite(mats)):
            raise InputError("matrix entries must be finite")
        if np.any(mats < 0):
            raise InputError("matrix entries must be non-negative")
        zero = np.flatnonzero(mats.reshape(mats.shape[0], -1).sum(axis=1) == 0)
        if zero.size:
            raise InputError(f"matrix for word index {int(zero[0])} is entirely zero")
        lookup = np.full(self.spec.m ** self.depth, -1, dtype=np.int64)
        lookup[word_codes(keys, self.spec.m)] = np.arange(keys.shape[0])
        mats.setflags(write=False)
        keys.setflags(write=False)
        lookup.setflags(write=False)
        object.__setattr__(self, "matrices", mats)
        object.__setattr__(self, "keys", keys)
        object.__setattr__(self, "_lookup", lookup)

    @classmethod
    def from_table(cls, spec: SubshiftSpec, table: dict, depth: int) -> "MatrixFamily":
        """Build from ``{word: matrix}`` with 1-based word tuples as keys."""
        keys = [tuple(k + 1 for k in row) for row in word_array(spec, depth).tolist()]
        missing = [k for k in keys if k not in table]
        if missing:
            raise InputError(f"no matrix for admissible word {missing[0]}")
        extra = [k for k in table if tuple(k) not in set(keys)]
        if extra:
            raise InputError(f"matrix given for non-admissible word {extra[0]}")
        return cls(spec, np.array([table[k] for k in keys], dtype=np.float64), depth)

    @property
    def m(self) -> int:
        return self.spec.m

    @property
    def d(self) -> int:
        return self.matrices.shape[1]

    @property
    def positive(self) -> bool:
        return bool(np.all(self.matrices > 0))

    def matrix_for(self, word) -> np.ndarray:
        """Matrix attached to a 1-based ``depth``-word."""
        code = 0
        for s in word:
            code = code * self.m + (int(s) - 1)
        idx = self._lookup[code] if len(word) == self.depth else -1
        if idx < 0:
            raise InputError(f"{tuple(word)} is not an admissible {self.depth}-word")
        return self.matrices[idx]

    def scaled(self, c: float) -> "MatrixFamily":
        return MatrixFamily(self.spec, self.matrices * c, self.depth)

    def _key_index(self, words0: np.ndarray, start: int) -> np.ndarray:
        codes = word_codes(words0[:, start:start + self.depth], self.m)
        return self._lookup[codes]

    def __eq__(self, other):
        if not isinstance(other, MatrixFamily):
            return NotImplemented
        return (
            self.depth == other.depth
            and self.spec == other.spec
            and np.array_equal(self.matrices, other.matrices)
        )

    def __hash__(self):
        return hash((self.spec, self.depth, self.matrices.shape, self.matrices.tobytes()))

    def __repr__(self):
        return f"MatrixFamily(m={self.m}, d={self.d}, depth={self.depth})"


class WordProduct(NamedTuple):
    logscale: float
    normalized: np.ndarray
    zero: bool

    def value(self) -> np.ndarray:
        if self.zero:
            return np.zeros_like(self.normalized)
        return math.exp(self.logscale) * self.normalized

    @property
    def log_norm(self) -> float:
        return -math.inf if self.zero else self.logscale


def _multiply_factors(mats: np.ndarray):
    """Renormalized product of a sequence of matrices."""
    logscale = 0.0
    acc = None
    for factor in mats:
        acc = factor.copy() if acc is None else acc @ factor
        total = acc.sum()
        if total == 0:
            return WordProduct(0.0, np.zeros_like(factor), True)
        acc /= total
        logscale += math.log(total)
    return WordProduct(logscale, acc, False)


def word_product(family: MatrixFamily, word) -> WordProduct:
    """``M_J`` for a 1-based word ``J`` in renormalized form.

    For depth ``k > 1`` the product over the cylinder ``[J]`` depends on
    ``k - 1`` further symbols; the extension with the largest norm is used.
    """
    word = tuple(int(s) for s in word)
    if not word:
        raise InputError("word must be non-empty")
    if not is_admissible(family.spec, word):
        raise InputError(f"word {word} is not admissible")
    k = family.depth
    if k == 1:
        return _multiply_factors([family.matrix_for((s,)) for s in word])
    best = None
    a = family.spec.adjacency
    for ext in enumerate_words(family.spec, k - 1):
        if not a[word[-1] - 1, ext[0] - 1]:
            continue
        full = word + ext
        prod = _multiply_factors(
            [family.matrix_for(full[t:t + k]) for t in range(len(word))]
        )
        if best is None or prod.log_norm > best.log_norm:
            best = prod
    return best


def log_norms_of(family: MatrixFamily, words) -> tuple[np.ndarray, np.ndarray]:
    """Vectorized ``log ||M_J||`` for equal-length 1-based words.

    Returns ``(log_norm, zero)``; ``log_norm`` is 0 where ``zero`` is set.
    """
    words0 = np.asarray(words, dtype=np.int64) - 1
    if words0.ndim != 2:
        raise InputError("words must all have the same length")
    if family.depth > 1:
        prods = [word_product(family, w) for w in (words0 + 1).tolist()]
        return (
            np.array([0.0 if p.zero else p.logscale for p in prods]),
            np.array([p.zero for p in prods]),
        )
    mats = family.matrices
    acc = mats[words0[:, 0]].copy()
    logscale = np.zeros(words0.shape[0])
    zero = np.zeros(words0.shape[0], dtype=bool)
    for t in range(words0.shape[1]):
        if t:
            acc = acc @ mats[words0[:, t]]
        acc, logscale, zero = _renormalize(acc, logscale, zero)
    return logscale, zero


def _renormalize(acc, logscale, zero):
    totals = acc.sum(axis=(1, 2))
    newly_zero = totals == 0
    zero = zero | newly_zero
    safe = np.where(newly_zero, 1.0, totals)
    acc = acc / safe[:, None, None]
    logscale = logscale + np.log(safe)
    return acc, logscale, zero


class LevelNorms(NamedTuple):
    """Every admissible ``n``-word with its (supremum) log-norm."""

    words: np.ndarray  # (W, n) 0-based symbols, lexicographic order
    log_norm: np.ndarray  # (W,), 0 where zero
    zero: np.ndarray  # (W,) bool

    @property
    def n(self) -> int:
        return self.words.shape[1]

    @property
    def nonzero(self) -> np.ndarray:
        return ~self.zero


def _level_block(family: MatrixFamily, n: int, first: int) -> LevelNorms:
    spec, k = family.spec, family.depth
    length = n + k - 1
    words = np.array([[first]], dtype=np.uint8)
    while words.shape[1] < k:
        words = extend_words(spec, words)
    acc = family.matrices[family._key_index(words, 0)].copy()
    logscale = np.zeros(words.shape[0])
    zero = np.zeros(words.shape[0], dtype=bool)
    acc, logscale, zero = _renormalize(acc, logscale, zero)
    while words.shape[1] < length:
        allowed = spec.adjacency.astype(bool)[words[:, -1]]
        parent, sym = np.nonzero(allowed)
        words = np.concatenate([words[parent], sym[:, None].astype(np.uint8)], axis=1)
        factor = family.matrices[family._key_index(words, words.shape[1] - k)]
        acc = acc[parent] @ factor
        acc, logscale, zero = _renormalize(acc, logscale[parent], zero[parent])
    logscale = np.where(zero, 0.0, logscale)
    if k == 1:
        return LevelNorms(words, logscale, zero)
    # sup over the k-1 extension symbols: rows sharing an n-prefix are contiguous
    codes = word_codes(words[:, :n], spec.m)
    starts = np.flatnonzero(np.r_[True, codes[1:] != codes[:-1]])
    ranked = np.where(zero, -np.inf, logscale)
    best = np.maximum.reduceat(ranked, starts)
    out_zero = np.isneginf(best)
    return LevelNorms(words[starts, :n], np.where(out_zero, 0.0, best), out_zero)


def check_budget(family: MatrixFamily, n: int) -> int:
    count = word_count(family.spec, n + family.depth - 1)
    if count > MAX_WORDS:
        raise SizeGuardError(
            f"enumerating length {n} needs {count} words (budget {MAX_WORDS})"
        )
    return count


@functools.lru_cache(maxsize=6)
def _level_norms_cached(family: MatrixFamily, n: int) -> LevelNorms:
    blocks = parallel.ordered_map(lambda s: _level_block(family, n, s), range(family.m))
    out = LevelNorms(
        np.concatenate([b.words for b in blocks]),
        np.concatenate([b.log_norm for b in blocks]),
        np.concatenate([b.zero for b in blocks]),
    )
    for arr in out:
        arr.setflags(write=False)
    return out


def level_norms(family: MatrixFamily, n: int) -> LevelNorms:
    """Log-norms of all admissible ``n``-words (cached, read-only arrays).

    The enumeration is split by first symbol and merged in symbol order, so
    the arrays are bit-identical for every thread count.
    """
    if n < 1:
        raise InputError("word length must be >= 1")
    check_budget(family, n)
    return _level_norms_cached(family, n)


@dataclass(frozen=True)
class H2Witness:
    """Outcome of the bridged-irreducibility check.

    ``b`` is the smallest entry of the bridged sums at horizon ``r``; when
    the check fails ``r`` is the largest horizon tried.
    """

    r: int
    b: float
    satisfied: bool


def bridged_sums(family: MatrixFamily, r: int) -> np.ndarray:
    """``S[i, j] = sum_{k<=r} sum_{K: iKj admissible, |K|=k} M_K``, shape (m, m, d, d)."""
    if family.depth != 1:
        raise UnsupportedModeError("bridged irreducibility is defined for depth-1 families")
    a = family.spec.adjacency.astype(np.float64)
    mats = family.matrices
    # g[s, j]: sum of M_K over words K of the current length starting with s
    # whose last symbol may be followed by j
    g = a[:, :, None, None] * mats[:, None, :, :]
    total = np.zeros_like(g)
    for k in range(1, r + 1):
        if k > 1:
            inner = np.einsum("st,tjab->sjab", a, g)
            g = np.einsum("sab,sjbc->sjac", mats, inner)
        total = total + np.einsum("is,sjab->ijab", a, g)
    return total


def check_H2(family: MatrixFamily, r_max: int | None = None) -> H2Witness:
    """Find the least horizon ``r <= r_max`` making every bridged sum positive.

    ``r_max`` defaults to ``m * d``.
    """
    if family.depth != 1:
        raise UnsupportedModeError("H2 is stated for depth-1 (constant per symbol) families")
    if r_max is None:
        r_max = family.m * family.d
    if r_max < 1:
        raise InputError("r_max must be >= 1")
    total = None
    for r in range(1, r_max + 1):
        total = bridged_sums(family, r)
        if np.all(total > 0):
            return H2Witness(r, float(total.min()), True)
    return H2Witness(r_max, float(total.min()), False)


def gluing_ratio(family: MatrixFamily, witness: H2Witness) -> float:
    """``b / sum_{k<=r} m**k``: the per-bridge share of the bridged sum."""
    if not witness.satisfied:
        raise PreconditionError("H2 witness is not satisfied")
    return witness.b / sum(family.m ** k for k in range(1, witness.r + 1))


def gluing_constant(family: MatrixFamily, witness: H2Witness, q: float) -> float:
    """``(b / sum_{k<=r} m**k) ** q``.

    For admissible ``I``, ``J`` some bridge ``K`` with ``|K| <= r`` gives
    ``||M_{IKJ}||**q >= gluing_constant * ||M_I||**q * ||M_J||**q``.
    """
    if q < 0:
        raise PreconditionError("gluing constant requires q >= 0")
    return gluing_ratio(family, witness) ** q


def best_bridge(family: MatrixFamily, witness: H2Witness, left, right) -> tuple[Word, float]:
    """Bridge ``K`` maximizing ``||M_{IKJ}||``; returns ``(K, log_norm)``."""
    left, right = tuple(left), tuple(right)
    best = (None, -math.inf)
    for k in bridges(family.spec, left[-1], right[0], witness.r):
        value = word_product(family, left + k + right).log_norm
        if value > best[1]:
            best = (k, value)
    return best


def distortion(family: MatrixFamily, n: int) -> float:
    """Largest entrywise ratio of ``M(x) / M(y)`` over ``x, y`` in one ``n``-cylinder."""
    if not family.positive:
        raise UnsupportedModeError("distortion needs strictly positive matrices")
    if n < 1:
        raise InputError("n must be >= 1")
    if n >= family.depth:
        return 1.0
    codes = word_codes(family.keys[:, :n], family.m)
    starts = np.flatnonzero(np.r_[True, codes[1:] != codes[:-1]])
    hi = np.maximum.reduceat(family.matrices, starts, axis=0)
    lo = np.minimum.reduceat(family.matrices, starts, axis=0)
    return float(np.max(hi / lo))


def exact_norm(matrices, word) -> Fraction:
    """Norm of ``M_J`` in exact rational arithmetic.

    ``matrices`` maps 1-based symbols to nested lists of ints or Fractions.
    """
    acc = None
    for s in word:
        mat = [[Fraction(x) for x in row] for row in matrices[s]]
        if acc is None:
            acc = mat
        else:
            acc = [
                [sum(acc[i][t] * mat[t][j] for t in range(len(mat))) for j in range(len(mat))]
                for i in range(len(acc))
            ]
    return sum(sum(row) for row in acc)
