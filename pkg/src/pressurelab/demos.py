"""Built-in systems with known answers, and their end-to-end demo reports."""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable

import numpy as np

from . import gibbs, multifractal
from .errors import InputError
from .matrices import MatrixFamily, exact_norm
from .report import check_lines
from .pressure import (
    PressureResult,
    detect_kink,
    one_sided_slopes,
    pressure_curve,
    pressure_estimate,
    pressure_exact_integer,
    q_grid,
)
from .sft import SubshiftSpec

LOG2 = math.log(2)
GOLDEN_RATIO = (1 + math.sqrt(5)) / 2

EX36_M1 = [[1, 1], [0, 1]]
# any positive matrix works as the second generator
EX36_M2 = [[1, 1], [1, 1]]


def ex35_pressure(q: float) -> float:
    """Closed form for the diagonal pair diag(2,1), diag(2,3) (valid for q >= 0)."""
    if q < 0:
        raise InputError("the closed form is stated for q >= 0")
    return max((q + 1) * LOG2, math.log1p(3.0 ** q))


def ex36_norm_ratio(n: int) -> Fraction:
    """``||M_1^(2n)|| / ||M_1^n||**2`` in exact arithmetic."""
    mats = {1: EX36_M1}
    return exact_norm(mats, (1,) * (2 * n)) / exact_norm(mats, (1,) * n) ** 2


@dataclass(frozen=True)
class Demo:
    name: str
    description: str
    family: MatrixFamily
    closed_form: Callable[[float], float] | None = None
    n: int = 12


def _full(m):
    return SubshiftSpec.full(m)


def _build() -> dict[str, Demo]:
    demos = [
        Demo(
            "ex35",
            "diag(2,1), diag(2,3) on the full 2-shift; H2 fails and P has a corner at q=1",
            MatrixFamily(_full(2), [np.diag([2.0, 1.0]), np.diag([2.0, 3.0])]),
            ex35_pressure,
            n=20,
        ),
        Demo(
            "ex36",
            "M1=[[1,1],[0,1]] with a positive partner; the reverse quasi-Bernoulli bound fails",
            MatrixFamily(_full(2), [EX36_M1, EX36_M2]),
            None,
            n=14,
        ),
        Demo(
            "golden",
            "golden-ratio Bernoulli convolution matrices on the full 3-shift",
            MatrixFamily(
                _full(3),
                [[[1, 1], [0, 1]], [[0.5, 0.5], [0.5, 0.5]], [[1, 0], [1, 1]]],
            ),
            None,
            n=14,
        ),
        Demo(
            "scalar",
            "d=1, a=(1,1) on the full 2-shift; P(q) = log 2",
            MatrixFamily(_full(2), [[[1.0]], [[1.0]]]),
            lambda q: LOG2,
            n=12,
        ),
        Demo(
            "goldenmean_sft",
            "unit scalars on the golden-mean shift A=[[1,1],[1,0]]; P(q) = log of the golden ratio",
            MatrixFamily(SubshiftSpec(np.array([[1, 1], [1, 0]])), [[[1.0]], [[1.0]]]),
            lambda q: math.log(GOLDEN_RATIO),
            n=20,
        ),
    ]
    return {d.name: d for d in demos}


DEMOS = _build()


def get_demo(name: str) -> Demo:
    try:
        return DEMOS[name]
    except KeyError:
        raise InputError(f"unknown demo {name!r}; available: {', '.join(DEMOS)}") from None


def closed_form_curve(demo: Demo, grid) -> list[PressureResult]:
    if demo.closed_form is None:
        raise InputError(f"demo {demo.name!r} has no closed form")
    return [
        PressureResult(float(q), demo.closed_form(q), None, None, 0, "closed_form_demo")
        for q in grid
    ]


# -- demo reports ---------------------------------------------------------------


def _scalar(demo, emit, n):
    for q in (0.5, 1.0, 2.0, -1.0):
        r = pressure_estimate(demo.family, n, q)
        emit(f"P({q:g}) estimate at n={n}: {r.estimate:.12g}  (log 2 = {LOG2:.12g})")
    emit(f"P(1) integer oracle: {pressure_exact_integer(demo.family, 1).estimate:.12g}")


def _goldenmean(demo, emit, n):
    exact = math.log(GOLDEN_RATIO)
    emit(f"P(1) integer oracle: {pressure_exact_integer(demo.family, 1).estimate:.12g}"
         f"  (log golden ratio = {exact:.12g})")
    for q in (0.5, 1.0, 2.0):
        r = pressure_estimate(demo.family, n, q)
        emit(f"P({q:g}) estimate at n={n}: {r.estimate:.12g}  (error {r.estimate - exact:+.2e})")


def _ex35(demo, emit, n):
    fam = demo.family
    for q in (0.5, 1.5, 2.0, 3.0):
        r = pressure_estimate(fam, n, q)
        emit(f"P({q:g}) estimate at n={n}: {r.estimate:.12g}  closed form {ex35_pressure(q):.12g}"
             f"  (error {r.estimate - ex35_pressure(q):+.2e})")
    emit(f"P(2) vs log 10 = {math.log(10):.12g}")
    for q in (1, 2):
        emit(f"P({q}) integer oracle: {pressure_exact_integer(fam, q).estimate:.12g}")
    grid = q_grid(0.5, 2.0, 0.05)
    for kink in detect_kink(closed_form_curve(demo, grid)):
        emit(f"closed-form kink at q={kink.q:.2f}: slopes {kink.left_slope:.6f} -> "
             f"{kink.right_slope:.6f} (jump {kink.jump:.6f})")
    curve = pressure_curve(fam, grid, n)
    kinks = detect_kink(curve)
    steepest = max(one_sided_slopes(grid, [r.estimate for r in curve]), key=lambda k: abs(k.jump))
    emit(f"enumerated curve at n={n}: {len(kinks)} kink(s) above 0.05; largest slope jump "
         f"{steepest.jump:.4f} at q={steepest.q:.2f} (finite-n smoothing of the corner)")
    point = multifractal.dimension_spectrum(demo.closed_form, [2.0], 0.05, fam.m)[0]
    emit(f"closed form at q=2: alpha={point.alpha:.6f} f(alpha)={point.f_alpha:.6f}")


def _ex36(demo, emit, n):
    emit("n  ||M_1^2n|| / ||M_1^n||^2   (2n+2)/(n+2)^2")
    for k in range(1, 13):
        ratio = ex36_norm_ratio(k)
        emit(f"{k:<2} {str(ratio):<24} {str(Fraction(2 * k + 2, (k + 2) ** 2))}")
    upper, lower = gibbs.quasi_bernoulli_diagnostics(demo.family, 3, 3, 10, 1.0)
    emit(f"quasi-Bernoulli at n=l=3, N=10, q=1: max nu(IJ)/(nu(I)nu(J)) = {upper.max_ratio:.6g}, "
         f"min = {upper.min_ratio:.6g}")


def _golden(demo, emit, n):
    fam = demo.family
    for line in check_lines(fam):
        emit(line)
    est = pressure_estimate(fam, n, 1.0)
    emit(f"P(1) estimate at n={n}: {est.estimate:.12g} in [{est.lower:.6g}, {est.upper:.6g}]; "
         f"integer oracle {pressure_exact_integer(fam, 1).estimate:.12g} (log 4)")
    curve = pressure_curve(fam, q_grid(0.5, 3.0, 0.25), n)
    emit(f"kinks on q in [0.5, 3] above 0.05: {len(detect_kink(curve))}")
    spreads = {}
    for level in (4, 6):
        diag = gibbs.gibbs_ratio_diagnostics(fam, level, 12, 1.0, est.estimate)
        spreads[level] = diag.spread
        emit(f"Gibbs ratio spread n={level}, N=12, q=1: {diag.spread:.6g}")
    pfn = multifractal.EstimatedPressure(fam, n)
    alpha = multifractal.pressure_derivative(pfn, 1.0, 0.05)
    words = gibbs.sample_words(fam, n, 1.0, 10_000, 7)
    stats = gibbs.empirical_lyapunov(fam, words)
    exact_mean, _ = gibbs.exact_lyapunov_mean(fam, n, 1.0)
    emit(f"Lyapunov at q=1: P'(1)={alpha:.6f}, sample mean {stats.mean:.6f} "
         f"(stderr {stats.stderr(len(words)):.2e}), exact nu-mean {exact_mean:.6f}")


_RUNNERS = {
    "scalar": _scalar,
    "goldenmean_sft": _goldenmean,
    "ex35": _ex35,
    "ex36": _ex36,
    "golden": _golden,
}


def run_demo(name: str, emit=print, n: int | None = None) -> None:
    demo = get_demo(name)
    emit(f"demo {demo.name}: {demo.description}")
    _RUNNERS[name](demo, emit, demo.n if n is None else n)
