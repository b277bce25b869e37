"""Finite-level Gibbs tables, their marginals, diagnostics and exact sampling."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .errors import DegenerateSystemError, InputError
from .matrices import MatrixFamily, level_norms, log_norms_of
from .sft import format_word, word_codes


@dataclass(frozen=True, eq=False)
class GibbsTable:
    """Probability of each admissible ``n``-cylinder.

    ``words`` holds 0-based symbols in lexicographic order.  Words whose
    product vanishes carry weight 0 for ``q >= 0`` and are absent for
    ``q < 0``.
    """

    n: int
    q: float
    m: int
    words: np.ndarray
    weights: np.ndarray
    source_level: int
    P_hat: float | None = None

    @property
    def mapping(self) -> dict[str, float]:
        return {
            format_word(row, self.m): float(p)
            for row, p in zip((self.words.astype(np.int64) + 1).tolist(), self.weights)
        }

    def total(self) -> float:
        return math.fsum(self.weights.tolist())

    def codes(self) -> np.ndarray:
        return word_codes(self.words, self.m)

    def marginal(self, n: int) -> "GibbsTable":
        """Sum out trailing symbols one level at a time.

        Reducing level by level fixes the summation tree, so marginalizing
        ``N -> n -> n'`` is bit-identical to ``N -> n'``.
        """
        if not 1 <= n <= self.n:
            raise InputError(f"cannot marginalize level {self.n} onto level {n}")
        words, weights = self.words, self.weights
        for level in range(self.n - 1, n - 1, -1):
            codes = word_codes(words[:, :level], self.m)
            starts = np.flatnonzero(np.r_[True, codes[1:] != codes[:-1]])
            weights = np.add.reduceat(weights, starts)
            words = words[starts, :level]
        return GibbsTable(n, self.q, self.m, words, weights, self.source_level, self.P_hat)

    def lookup(self, words: np.ndarray) -> np.ndarray:
        """Weights of the given 0-based words (0 where the word is absent)."""
        own = self.codes()
        codes = word_codes(words, self.m)
        pos = np.clip(np.searchsorted(own, codes), 0, max(own.size - 1, 0))
        found = own[pos] == codes if own.size else np.zeros(codes.size, dtype=bool)
        return np.where(found, self.weights[pos], 0.0)


def level_weights(family: MatrixFamily, n: int, q: float, P_hat: float | None = None) -> GibbsTable:
    """``nu_{n,q}([I]) = ||M_I||**q / s_n(q)`` on every admissible ``n``-word."""
    level = level_norms(family, n)
    keep = level.nonzero
    if not keep.any():
        raise DegenerateSystemError(f"every product of length {n} vanishes")
    logs = q * level.log_norm
    shift = float(logs[keep].max())
    raw = np.where(keep, np.exp(logs - shift), 0.0)
    weights = raw / raw.sum()
    words = level.words
    if q < 0:
        words, weights = words[keep], weights[keep]
    return GibbsTable(n, float(q), family.m, words, weights, n, P_hat)


def marginal_weights(family: MatrixFamily, n: int, N: int, q: float) -> GibbsTable:
    """Level-``N`` table summed onto the ``n``-cylinders."""
    if N <= n:
        raise InputError("marginal_weights needs N > n")
    return level_weights(family, N, q).marginal(n)


class RatioDiagnostics(NamedTuple):
    context: str
    min_ratio: float
    q25: float
    median: float
    q75: float
    max_ratio: float
    count: int
    excluded: int = 0

    @property
    def spread(self) -> float:
        return self.max_ratio / self.min_ratio


def summarize(context: str, ratios: np.ndarray, excluded: int = 0) -> RatioDiagnostics:
    ratios = np.asarray(ratios, dtype=np.float64)
    if ratios.size == 0:
        nan = float("nan")
        return RatioDiagnostics(context, nan, nan, nan, nan, nan, 0, excluded)
    q25, med, q75 = np.quantile(ratios, [0.25, 0.5, 0.75])
    return RatioDiagnostics(
        context,
        float(ratios.min()),
        float(q25),
        float(med),
        float(q75),
        float(ratios.max()),
        int(ratios.size),
        excluded,
    )


def gibbs_ratio_diagnostics(
    family: MatrixFamily, n: int, N: int, q: float, P_hat: float
) -> RatioDiagnostics:
    """Extremes of ``nu_N([I]) * exp(n P_hat) / ||M_I||**q`` over ``n``-words.

    Bounded spread (max/min) as ``n`` grows is the finite-level face of the
    two-sided Gibbs inequality.
    """
    if N < n + 4:
        raise InputError("gibbs_ratio_diagnostics needs N >= n + 4")
    table = marginal_weights(family, n, N, q)
    level = level_norms(family, n)
    weights = table.lookup(level.words)
    usable = level.nonzero & (weights > 0)
    log_ratio = np.log(weights[usable]) + n * P_hat - q * level.log_norm[usable]
    excluded = int((~usable).sum())
    return summarize(f"gibbs n={n} N={N} q={q:g}", np.exp(log_ratio), excluded)


def quasi_bernoulli_diagnostics(
    family: MatrixFamily, n: int, ell: int, N: int, q: float
) -> tuple[RatioDiagnostics, RatioDiagnostics]:
    """Ratios ``nu(IJ) / (nu(I) nu(J))`` over admissible concatenations.

    Returns ``(upper, lower)``: ``upper`` summarizes ``nu(IJ)/(nu(I)nu(J))``
    (its max bounds the constant in ``nu(IJ) <= C nu(I) nu(J)``) and
    ``lower`` the reciprocal (its max bounds the reverse constant, finite
    only for positive families).
    """
    if N < n + ell + 2:
        raise InputError("quasi_bernoulli_diagnostics needs N >= n + ell + 2")
    top = level_weights(family, N, q)
    joint = top.marginal(n + ell)
    left = joint.marginal(n)
    right = top.marginal(ell)
    nu_i = left.lookup(joint.words[:, :n])
    nu_j = right.lookup(joint.words[:, n:])
    usable = (joint.weights > 0) & (nu_i > 0) & (nu_j > 0)
    ratio = joint.weights[usable] / (nu_i[usable] * nu_j[usable])
    excluded = int((~usable).sum())
    tag = f"n={n} l={ell} N={N} q={q:g}"
    return (
        summarize(f"quasi-bernoulli upper {tag}", ratio, excluded),
        summarize(f"quasi-bernoulli lower {tag}", 1.0 / ratio, excluded),
    )


def shift_invariance_defect(family: MatrixFamily, n: int, N: int, q: float) -> float:
    """``max_I |nu_N(sigma^{-1}[I]) - nu_N([I])|`` over ``n``-words."""
    if N < n + 2:
        raise InputError("shift_invariance_defect needs N >= n + 2")
    longer = level_weights(family, N, q).marginal(n + 1)
    direct = longer.marginal(n)
    pos = np.searchsorted(direct.codes(), word_codes(longer.words[:, 1:], family.m))
    pos = np.clip(pos, 0, direct.weights.size - 1)
    pulled_back = np.bincount(pos, weights=longer.weights, minlength=direct.weights.size)
    return float(np.max(np.abs(pulled_back - direct.weights)))


def sample_words(family: MatrixFamily, n: int, q: float, count: int, seed: int) -> list[tuple[int, ...]]:
    """Independent exact draws from ``nu_{n,q}`` (1-based words).

    Inverse-CDF sampling over lexicographically ordered words; the same seed
    always yields the same words.
    """
    if count < 1:
        raise InputError("count must be >= 1")
    table = level_weights(family, n, q)
    cdf = np.cumsum(table.weights)
    rng = np.random.default_rng(seed)
    draws = rng.random(count) * cdf[-1]
    idx = np.minimum(np.searchsorted(cdf, draws, side="right"), cdf.size - 1)
    return [tuple(int(s) + 1 for s in row) for row in table.words[idx]]


class LyapunovStats(NamedTuple):
    mean: float
    stddev: float
    excluded: int = 0

    def stderr(self, count: int) -> float:
        return self.stddev / math.sqrt(count)


def empirical_lyapunov(family: MatrixFamily, words) -> LyapunovStats:
    """Mean and sample standard deviation of ``log ||M_J|| / n`` over ``words``."""
    words = list(words)
    if not words:
        raise InputError("no words given")
    lengths = {len(w) for w in words}
    if len(lengths) != 1:
        raise InputError("words must all have the same length")
    n = lengths.pop()
    logs, zero = log_norms_of(family, words)
    values = logs[~zero] / n
    if values.size == 0:
        raise InputError("every sampled product vanishes")
    std = float(values.std(ddof=1)) if values.size > 1 else 0.0
    return LyapunovStats(float(values.mean()), std, int(zero.sum()))


def exact_lyapunov_mean(family: MatrixFamily, n: int, q: float) -> tuple[float, float]:
    """Exact ``nu_{n,q}`` mean and standard deviation of ``log ||M_J|| / n``."""
    table = level_weights(family, n, q)
    level = level_norms(family, n)
    logs = level.log_norm / n
    if q < 0:
        logs = logs[level.nonzero]
    mean = float(np.dot(table.weights, logs))
    var = float(np.dot(table.weights, (logs - mean) ** 2))
    return mean, math.sqrt(var)
