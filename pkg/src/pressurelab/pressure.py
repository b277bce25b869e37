"""Partition sums, pressure brackets and estimates, and the integer-q oracle."""

from __future__ import annotations

import functools
import math
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .errors import (
    ConvergenceError,
    DegenerateSystemError,
    InputError,
    PreconditionError,
    PressureLabError,
    SizeGuardError,
    UnsupportedModeError,
)
from .matrices import H2Witness, MatrixFamily, check_H2, gluing_ratio, level_norms

# Steps between the two partition sums whose log-difference estimates P(q).
DIFFERENCE_WINDOW = 2
LIFT_GUARD = 4096
ORACLE_CHECK_LEVEL = 8
ORACLE_CHECK_RTOL = 1e-9

METHODS = ("enumeration", "integer_oracle", "closed_form_demo")


def log_sum_exp(x: np.ndarray) -> float:
    """Max-shifted ``log(sum(exp(x)))``.

    ``np.sum`` uses a fixed pairwise reduction, so the result depends only
    on the order of ``x``.
    """
    x = np.asarray(x, dtype=np.float64)
    if x.size == 0:
        return -math.inf
    shift = float(np.max(x))
    return shift + math.log(float(np.sum(np.exp(x - shift))))


@dataclass(frozen=True)
class PartitionSum:
    n: int
    q: float
    log_value: float
    restricted: bool
    zero_count: int

    @property
    def value(self) -> float:
        return math.exp(self.log_value)


def partition_sum(family: MatrixFamily, n: int, q: float) -> PartitionSum:
    """``s_n(q)``: sum of ``||M_I||**q`` over admissible ``n``-words.

    Vanishing products are always skipped and counted; for ``q < 0`` this is
    the sum over the nonzero products only.
    """
    level = level_norms(family, n)
    zero_count = int(level.zero.sum())
    logs = level.log_norm[level.nonzero]
    if logs.size == 0:
        raise DegenerateSystemError(f"every product of length {n} vanishes")
    return PartitionSum(n, float(q), log_sum_exp(q * logs), q < 0, zero_count)


def pressure_upper(family: MatrixFamily, n: int, q: float) -> float:
    """``log(s_n(q)) / n``, an upper bound for ``P(q)`` when ``q > 0``.

    ``s_{n+l} <= s_n * s_l`` makes ``log s_n`` subadditive, so the limit is
    the infimum over ``n``.
    """
    if q <= 0:
        raise PreconditionError("the subadditive upper bound needs q > 0")
    return partition_sum(family, n, q).log_value / n


def pressure_lower(family: MatrixFamily, witness: H2Witness, n: int, q: float) -> float | None:
    """Certified lower bound from gluing copies of the heaviest ``n``-word.

    With ``g = b / sum_{k<=r} m**k`` and ``J*`` maximizing ``||M_J||``,
    ``N`` glued copies give a word of length at most ``N(n+r)`` and norm at
    least ``(g ||M_J*||)**N / g``.  Returns ``None`` when ``g ||M_J*|| < 1``
    (the bound would be vacuous).
    """
    if not witness.satisfied:
        raise PreconditionError("H2 witness is not satisfied")
    if q <= 0:
        raise PreconditionError("the gluing lower bound needs q > 0")
    level = level_norms(family, n)
    if not level.nonzero.any():
        raise DegenerateSystemError(f"every product of length {n} vanishes")
    growth = math.log(gluing_ratio(family, witness)) + float(level.log_norm[level.nonzero].max())
    if growth < 0:
        return None
    return q * growth / (n + witness.r)


@functools.lru_cache(maxsize=32)
def default_witness(family: MatrixFamily) -> H2Witness | None:
    """H2 witness at the default horizon, or ``None`` for depth > 1."""
    if family.depth != 1:
        return None
    return check_H2(family)


@dataclass(frozen=True)
class PressureResult:
    q: float
    estimate: float
    lower: float | None
    upper: float | None
    n_used: int
    method: str
    note: str = ""

    @property
    def certified(self) -> bool:
        return self.lower is not None or self.upper is not None


def pressure_estimate(
    family: MatrixFamily, n: int, q: float, witness: H2Witness | None = None
) -> PressureResult:
    """Estimate ``P(q)`` from ``(log s_n - log s_{n-w}) / w`` with ``w = 2``.

    The difference cancels the bounded offset in ``log s_n = nP + O(1)``.
    For ``q > 0`` the certified bracket is attached and the estimate is
    clipped into it; for ``q < 0`` the sums are restricted to nonzero
    products and the result is uncertified.
    """
    if n < 4:
        raise InputError("pressure_estimate needs n >= 4")
    w = DIFFERENCE_WINDOW
    top = partition_sum(family, n, q)
    base = partition_sum(family, n - w, q)
    estimate = (top.log_value - base.log_value) / w
    lower = upper = None
    note = ""
    if q > 0:
        upper = top.log_value / n
        if witness is None:
            witness = default_witness(family)
        if witness is not None and witness.satisfied:
            lower = pressure_lower(family, witness, n, q)
        estimate = min(estimate, upper)
        if lower is not None:
            estimate = max(estimate, lower)
    elif q < 0:
        note = "uncertified"
    return PressureResult(float(q), estimate, lower, upper, n, "enumeration", note)


def pressure_curve(family: MatrixFamily, q_grid, n: int) -> list[PressureResult]:
    """:func:`pressure_estimate` over a strictly increasing grid.

    The word norms for each length are enumerated once and shared by all
    grid points.
    """
    grid = [float(q) for q in q_grid]
    if not grid:
        raise InputError("q grid is empty")
    if any(b <= a for a, b in zip(grid, grid[1:])):
        raise InputError("q grid must be strictly increasing")
    witness = default_witness(family)
    return [pressure_estimate(family, n, q, witness) for q in grid]


def q_grid(qmin: float, qmax: float, qstep: float) -> list[float]:
    """Inclusive uniform grid, rounded to suppress accumulation drift."""
    if qstep <= 0:
        raise InputError("qstep must be positive")
    if qmax < qmin:
        raise InputError("qmax must be >= qmin")
    count = int(math.floor((qmax - qmin) / qstep + 1e-9)) + 1
    return [round(qmin + i * qstep, 12) for i in range(count)]


class Kink(NamedTuple):
    q: float
    left_slope: float
    right_slope: float

    @property
    def jump(self) -> float:
        return self.right_slope - self.left_slope


def one_sided_slopes(qs, values) -> list[Kink]:
    """Left and right difference quotients at each interior grid point."""
    out = []
    for i in range(1, len(qs) - 1):
        left = (values[i] - values[i - 1]) / (qs[i] - qs[i - 1])
        right = (values[i + 1] - values[i]) / (qs[i + 1] - qs[i])
        out.append(Kink(qs[i], left, right))
    return out


def detect_kink(curve, jump_threshold: float = 0.05) -> list[Kink]:
    """Interior grid points where the one-sided slopes differ by more than the threshold."""
    qs = [r.q for r in curve]
    if len(qs) < 5:
        raise InputError("kink detection needs at least 5 grid points")
    steps = np.diff(qs)
    if np.any(steps <= 0) or np.ptp(steps) > 1e-9 * max(1.0, float(np.max(np.abs(qs)))):
        raise InputError("kink detection needs a uniform increasing grid")
    slopes = one_sided_slopes(qs, [r.estimate for r in curve])
    return [k for k in slopes if abs(k.jump) > jump_threshold]


# -- integer q: tensor-power lift ---------------------------------------------


def lifted_transfer(family: MatrixFamily, q: int) -> tuple[np.ndarray, np.ndarray]:
    """Row vector ``u`` and transfer matrix ``T`` of the ``q``-fold tensor lift.

    ``T[(i,a),(j,b)] = A[i,j] * (M_j^{(x)q})[a,b]`` and ``u`` holds the
    lifted row sums ``(1^T M_i)^{(x)q}``, so that
    ``s_n(q) = u T^(n-1) 1``.
    """
    if family.depth != 1:
        raise UnsupportedModeError("the tensor lift is implemented for depth-1 families")
    if int(q) != q or q < 1:
        raise InputError("the integer oracle needs q in {1, 2, 3, ...}")
    q = int(q)
    m, d = family.m, family.d
    dim = d ** q
    if m * dim > LIFT_GUARD:
        raise SizeGuardError(f"lift dimension m*d^q = {m * dim} exceeds {LIFT_GUARD}")
    lifted = []
    rows = []
    for mat in family.matrices:
        power = functools.reduce(np.kron, [mat] * q)
        lifted.append(power)
        rows.append(functools.reduce(np.kron, [mat.sum(axis=0)] * q))
    a = family.spec.adjacency
    t = np.zeros((m * dim, m * dim))
    for i in range(m):
        for j in range(m):
            if a[i, j]:
                t[i * dim:(i + 1) * dim, j * dim:(j + 1) * dim] = lifted[j]
    return np.concatenate(rows), t


def lifted_log_partition(family: MatrixFamily, n: int, q: int) -> float:
    """``log s_n(q)`` through the lift, renormalizing every step."""
    u, t = lifted_transfer(family, q)
    v = u.copy()
    log_scale = 0.0
    for _ in range(n - 1):
        v = v @ t
        total = v.sum()
        if total == 0:
            return -math.inf
        v /= total
        log_scale += math.log(total)
    return log_scale + math.log(v.sum())


class PowerIteration(NamedTuple):
    radius: float
    iterations: int


def spectral_radius(t: np.ndarray, tol: float = 1e-12, max_iter: int = 100_000) -> PowerIteration:
    """Perron root of a non-negative matrix by power iteration from all-ones.

    The convergence test uses the geometric mean of two consecutive growth
    ratios, which damps period-2 oscillation of imprimitive matrices.
    """
    v = np.full(t.shape[0], 1.0 / t.shape[0])
    prev_ratio = None
    prev_mean = None
    for it in range(1, max_iter + 1):
        w = t @ v
        total = w.sum()
        if total == 0:
            return PowerIteration(0.0, it)
        ratio = total / v.sum()
        v = w / total
        if prev_ratio is not None:
            mean = math.sqrt(ratio * prev_ratio)
            if prev_mean is not None and abs(mean - prev_mean) <= tol * mean:
                return PowerIteration(mean, it)
            prev_mean = mean
        prev_ratio = ratio
    raise ConvergenceError(f"power iteration did not converge in {max_iter} steps")


def pressure_exact_integer(family: MatrixFamily, q: int) -> PressureResult:
    """``P(q) = log rho(T)`` for integer ``q``, self-checked against enumeration.

    The lifted and enumerated ``s_8(q)`` must agree to relative 1e-9.
    """
    u, t = lifted_transfer(family, q)
    power = spectral_radius(t)
    if power.radius == 0:
        raise DegenerateSystemError("the lifted transfer matrix is nilpotent")
    n = ORACLE_CHECK_LEVEL
    lifted = lifted_log_partition(family, n, q)
    enumerated = partition_sum(family, n, q).log_value
    if abs(math.expm1(lifted - enumerated)) > ORACLE_CHECK_RTOL:
        raise PressureLabError(
            f"lifted and enumerated s_{n}({q}) disagree: {lifted!r} vs {enumerated!r} (logs)"
        )
    value = math.log(power.radius)
    return PressureResult(
        float(q), value, None, None, n, "integer_oracle", f"iterations={power.iterations}"
    )
