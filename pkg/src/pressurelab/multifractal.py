"""L^q-spectrum, Lyapunov exponents and the dimension spectrum of level sets.

Functions here take a ``pressure_fn`` (any callable ``q -> P(q)``) so they
work equally with enumerated estimates, the integer oracle or a closed form.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import InputError
from .gibbs import GibbsTable
from .matrices import MatrixFamily
from .pressure import pressure_estimate

DEFAULT_STEP = 0.05
KINK_THRESHOLD = 0.05


class EstimatedPressure:
    """``q -> pressure_estimate(family, n, q).estimate`` with memoization."""

    def __init__(self, family: MatrixFamily, n: int):
        self.family = family
        self.n = n
        self._cache: dict[float, float] = {}

    def __call__(self, q: float) -> float:
        q = float(q)
        if q not in self._cache:
            self._cache[q] = pressure_estimate(self.family, self.n, q).estimate
        return self._cache[q]


def tau_formula(q: float, t: float, pressure_fn, m: int) -> float:
    """L^t-spectrum of the Gibbs measure at ``q``: ``(t P(q) - P(q t)) / log m``.

    At ``t = 1`` both terms are the same float, so the result is exactly 0.
    """
    return (t * pressure_fn(q) - pressure_fn(q * t)) / math.log(m)


def tau_empirical(table: GibbsTable, t: float, m: int | None = None) -> float:
    """``log(sum nu([I])**t) / log(m**-n)`` over the nonzero cylinder weights."""
    m = table.m if m is None else m
    w = table.weights[table.weights > 0]
    if w.size == 0:
        raise InputError("table has no positive weights")
    logs = t * np.log(w)
    shift = float(logs.max())
    total = shift + math.log(float(np.sum(np.exp(logs - shift))))
    return total / (-table.n * math.log(m))


def central_difference(fn, x: float, h: float) -> float:
    return (fn(x + h) - fn(x - h)) / (2 * h)


def pressure_derivative(pressure_fn, q: float, h: float = DEFAULT_STEP) -> float:
    """``P'(q)`` by central differences with one Richardson step.

    ``(4 D(h/2) - D(h)) / 3`` where ``D`` is the central difference.
    """
    if h <= 0:
        raise InputError("h must be positive")
    return (4 * central_difference(pressure_fn, q, h / 2) - central_difference(pressure_fn, q, h)) / 3


def one_sided_derivatives(pressure_fn, q: float, h: float = DEFAULT_STEP) -> tuple[float, float]:
    p = pressure_fn(q)
    return (p - pressure_fn(q - h)) / h, (pressure_fn(q + h) - p) / h


def tau_slope_at_one(pressure_fn, q: float, m: int, h: float = DEFAULT_STEP) -> float:
    """Derivative of ``t -> tau_formula(q, t)`` at ``t = 1`` (same scheme as P')."""
    return pressure_derivative(lambda t: tau_formula(q, t, pressure_fn, m), 1.0, h)


@dataclass(frozen=True)
class SpectrumPoint:
    """One point ``(alpha, f(alpha))`` of the level-set dimension spectrum.

    ``tau_slope_check`` is the residual of ``P'(q) = (P(q) - log m *
    tau'(1)) / q``; ``flag`` is ``"kink"`` where the one-sided derivatives
    disagree, in which case the formula is not claimed to hold.
    """

    q: float
    alpha: float
    f_alpha: float
    tau_slope_check: float
    flag: str = ""
    left_slope: float | None = None
    right_slope: float | None = None


def dimension_spectrum(
    pressure_fn,
    q_grid,
    h: float,
    m: int,
    nonnegative: bool = True,
    kink_threshold: float = KINK_THRESHOLD,
) -> list[SpectrumPoint]:
    """``alpha = P'(q)`` and ``f = (P(q) - alpha q) / log m`` per grid point.

    ``q = 0`` is rejected.  With ``nonnegative`` set (families that are not
    strictly positive) the grid is clipped to ``q > 0``.
    """
    grid = [float(q) for q in q_grid]
    if any(q == 0 for q in grid):
        raise InputError("the dimension formula excludes q = 0")
    if nonnegative:
        grid = [q for q in grid if q > 0]
    log_m = math.log(m)
    points = []
    for q in grid:
        alpha = pressure_derivative(pressure_fn, q, h)
        p = pressure_fn(q)
        slope = tau_slope_at_one(pressure_fn, q, m, h)
        residual = alpha - (p - log_m * slope) / q
        left, right = one_sided_derivatives(pressure_fn, q, h)
        flagged = abs(right - left) > kink_threshold
        points.append(
            SpectrumPoint(
                q,
                alpha,
                (p - alpha * q) / log_m,
                residual,
                "kink" if flagged else "",
                left if flagged else None,
                right if flagged else None,
            )
        )
    return points


def legendre_upper_bound(pressure_fn, alpha: float, q_grid, m: int) -> float:
    """``min_q (P(q) - alpha q) / log m`` over the grid."""
    grid = [float(q) for q in q_grid]
    if not grid:
        raise InputError("q grid is empty")
    return min((pressure_fn(q) - alpha * q) / math.log(m) for q in grid)


def alpha_range(pressure_fn, q_grid, h: float = DEFAULT_STEP) -> tuple[float, float]:
    """Range of ``P'`` over the grid; exponents outside it are not assigned a dimension."""
    values = [pressure_derivative(pressure_fn, q, h) for q in q_grid]
    return min(values), max(values)
