"""Acceptance criteria, one ``criterion`` marker per criterion.

Run ``pytest tests/test_acceptance.py`` to get one PASS/FAIL line per
criterion in the terminal summary.
"""

import io
import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from oracle import partition as brute_partition, random_family
from pressurelab import parallel
from pressurelab.cli import main, run_check
from pressurelab.demos import DEMOS, closed_form_curve, ex35_pressure, ex36_norm_ratio
from pressurelab.gibbs import (
    empirical_lyapunov,
    exact_lyapunov_mean,
    gibbs_ratio_diagnostics,
    level_weights,
    sample_words,
)
from pressurelab.matrices import MatrixFamily, check_H2, level_norms
from pressurelab.multifractal import (
    EstimatedPressure,
    dimension_spectrum,
    legendre_upper_bound,
    pressure_derivative,
    tau_formula,
)
from pressurelab.pressure import (
    detect_kink,
    lifted_log_partition,
    partition_sum,
    pressure_curve,
    pressure_estimate,
    pressure_exact_integer,
    q_grid,
)
from pressurelab.sft import SubshiftSpec

LOG2 = math.log(2)
LOG10 = math.log(10)
GOLDEN_RATIO = (1 + math.sqrt(5)) / 2

# tolerances
C1_TOL = 0.05
C1_TOL_Q2 = 0.01
C2_TOL = 1e-9
C3_STEP = 0.05
C3_Q_TOL = 0.05
C3_JUMP = 0.131
C3_JUMP_TOL = 0.03
C4_B = 0.5
C4_THRESHOLD = 0.05
C5_FACTOR = 1.5
C7_EXACT_TOL = 1e-15  # "exactly": float rounding of log differences
C7_ORACLE_TOL = 1e-6
C7_ENUM_TOL = 0.05
C8_TOL = 0.05
C8_SE = 3.0
C9_F = 0.469
C9_F_TOL = 0.02
C9_LEGENDRE_TOL = 1e-3
C10_SCALING_TOL = 1e-10
C10_NORM_TOL = 1e-12

EX35 = DEMOS["ex35"]
GOLDEN = DEMOS["golden"]


def criterion(number, title):
    return pytest.mark.criterion(number, title)


# -- 1 --------------------------------------------------------------------------

C1 = criterion(1, "closed-form pressure of the diagonal pair at n=20")


@C1
@pytest.mark.parametrize("q, tol", [(0.5, C1_TOL), (1.5, C1_TOL), (3.0, C1_TOL), (2.0, C1_TOL_Q2)])
def test_c1_closed_form(q, tol):
    estimate = pressure_estimate(EX35.family, 20, q).estimate
    print(f"q={q}: estimate {estimate:.6f} closed form {ex35_pressure(q):.6f}")
    assert abs(estimate - ex35_pressure(q)) <= tol


@C1
def test_c1_q2_is_log10():
    assert abs(pressure_estimate(EX35.family, 20, 2.0).estimate - LOG10) <= C1_TOL_Q2


# -- 2 --------------------------------------------------------------------------

C2 = criterion(2, "integer-q oracle")


@C2
@pytest.mark.parametrize("q, expected", [(1, math.log(4)), (2, LOG10)])
def test_c2_ex35_oracle(q, expected):
    assert abs(pressure_exact_integer(EX35.family, q).estimate - expected) <= C2_TOL


@C2
@pytest.mark.parametrize("seed", range(5))
def test_c2_random_lift_equals_enumeration(seed):
    mats = random_family(seed)
    fam = MatrixFamily(SubshiftSpec.full(2), mats)
    for q in (1, 2, 3):
        for n in range(1, 11):
            enumerated = partition_sum(fam, n, q).log_value
            lifted = lifted_log_partition(fam, n, q)
            assert abs(math.expm1(lifted - enumerated)) <= C2_TOL
            assert abs(math.expm1(enumerated - math.log(brute_partition(mats, np.ones((2, 2)), n, q)))) <= C2_TOL


# -- 3 --------------------------------------------------------------------------

C3 = criterion(3, "kink of the diagonal pair at q=1")


def _assert_single_kink(curve):
    kinks = detect_kink(curve)
    print("kinks:", [(k.q, round(k.jump, 4)) for k in kinks])
    assert len(kinks) == 1
    assert abs(kinks[0].q - 1.0) <= C3_Q_TOL
    assert abs(kinks[0].jump - C3_JUMP) <= C3_JUMP_TOL


@C3
def test_c3_kink_enumerated_n20():
    grid = q_grid(0.5, 2.0, C3_STEP)
    _assert_single_kink(pressure_curve(EX35.family, grid, 20))


@C3
def test_c3_kink_closed_form_demo_curve():
    grid = q_grid(0.5, 2.0, C3_STEP)
    _assert_single_kink(closed_form_curve(EX35, grid))


# -- 4 --------------------------------------------------------------------------

C4 = criterion(4, "golden-ratio system: H2 witness and smooth pressure")


@C4
def test_c4_h2_witness():
    lines = []
    assert run_check(GOLDEN.family, lines.append) == 0
    print("\n".join(lines))
    witness = check_H2(GOLDEN.family)
    assert witness.satisfied
    assert witness.r == 1
    assert witness.b == C4_B


@C4
def test_c4_no_kink():
    curve = pressure_curve(GOLDEN.family, q_grid(0.5, 3.0, 0.25), 14)
    assert detect_kink(curve, C4_THRESHOLD) == []


# -- 5 --------------------------------------------------------------------------

C5 = criterion(5, "bounded Gibbs ratio spread on the golden-ratio system")


@C5
def test_c5_gibbs_spread():
    p_hat = pressure_estimate(GOLDEN.family, 12, 1.0).estimate
    s4 = gibbs_ratio_diagnostics(GOLDEN.family, 4, 12, 1.0, p_hat).spread
    s6 = gibbs_ratio_diagnostics(GOLDEN.family, 6, 12, 1.0, p_hat).spread
    print(f"spread n=4: {s4!r}, n=6: {s6!r}")
    assert s6 <= C5_FACTOR * s4


# -- 6 --------------------------------------------------------------------------

C6 = criterion(6, "quasi-Bernoulli failure: exact norm ratio")


@C6
def test_c6_norm_ratio():
    ratios = [ex36_norm_ratio(n) for n in range(1, 13)]
    for n, ratio in enumerate(ratios, start=1):
        assert ratio == Fraction(2 * n + 2, (n + 2) ** 2)
    assert ratios[9] == Fraction(22, 144)
    assert all(b < a for a, b in zip(ratios, ratios[1:]))


# -- 7 --------------------------------------------------------------------------

C7 = criterion(7, "scalar and golden-mean baselines")


@C7
def test_c7_scalar_log2():
    fam = DEMOS["scalar"].family
    for n in range(4, 21):
        for q in (-1.0, 0.5, 1.0, 2.0):
            assert abs(pressure_estimate(fam, n, q).estimate - LOG2) <= C7_EXACT_TOL


@C7
def test_c7_golden_mean():
    fam = DEMOS["goldenmean_sft"].family
    exact = math.log(GOLDEN_RATIO)
    assert abs(pressure_exact_integer(fam, 1).estimate - exact) <= C7_ORACLE_TOL
    for q in (0.5, 1.0, 2.0):
        assert abs(pressure_estimate(fam, 20, q).estimate - exact) <= C7_ENUM_TOL


# -- 8 --------------------------------------------------------------------------

C8 = criterion(8, "Lyapunov concentration on the golden-ratio system")


@C8
def test_c8_lyapunov():
    fam = GOLDEN.family
    words = sample_words(fam, 14, 1.0, 10_000, 7)
    stats = empirical_lyapunov(fam, words)
    alpha = pressure_derivative(EstimatedPressure(fam, 14), 1.0, 0.05)
    exact_mean, _ = exact_lyapunov_mean(fam, 14, 1.0)
    se = stats.stderr(len(words))
    print(f"sample mean {stats.mean:.6f}, P'(1) {alpha:.6f}, exact mean {exact_mean:.6f}, se {se:.2e}")
    assert abs(stats.mean - alpha) <= C8_TOL
    assert abs(stats.mean - exact_mean) <= C8_SE * se


# -- 9 --------------------------------------------------------------------------

C9 = criterion(9, "spectrum identities")


@C9
@pytest.mark.parametrize("name", sorted(DEMOS))
def test_c9_tau_at_one(name):
    demo = DEMOS[name]
    pfn = EstimatedPressure(demo.family, 8)
    for q in (0.5, 1.0, 2.0):
        assert tau_formula(q, 1, pfn, demo.family.m) == 0.0
        if demo.closed_form is not None:
            assert tau_formula(q, 1, demo.closed_form, demo.family.m) == 0.0


@C9
def test_c9_ex35_smooth_branch():
    (point,) = dimension_spectrum(ex35_pressure, [2.0], 0.05, 2)
    bound = legendre_upper_bound(ex35_pressure, point.alpha, q_grid(0.1, 5.0, 0.01), 2)
    print(f"alpha {point.alpha:.6f} f {point.f_alpha:.6f} legendre {bound:.6f}")
    assert abs(point.f_alpha - C9_F) <= C9_F_TOL
    assert abs(point.f_alpha - bound) <= C9_LEGENDRE_TOL


# -- 10 -------------------------------------------------------------------------

C10 = criterion(10, "invariant suites")

small_family = st.builds(
    lambda seed, m: MatrixFamily(SubshiftSpec.full(m), random_family(seed, m=m, d=2) + 0.05),
    st.integers(0, 10_000),
    st.sampled_from([2, 3]),
)


@C10
@settings(max_examples=15, deadline=None)
@given(small_family, st.floats(0.1, 3.0))
def test_c10_submultiplicativity(fam, q):
    limit = 14 if fam.m == 2 else 9
    logs = {n: partition_sum(fam, n, q).log_value for n in range(1, limit)}
    for n in logs:
        for ell in logs:
            if n + ell < limit:
                assert logs[n + ell] <= logs[n] + logs[ell] + 1e-12


@C10
@settings(max_examples=15, deadline=None)
@given(small_family, st.floats(0.1, 3.0), st.sampled_from([4, 6, 8]))
def test_c10_bracket_validity(fam, q, n):
    r = pressure_estimate(fam, n, q)
    assert r.upper is not None
    if r.lower is not None:
        assert r.lower <= r.estimate <= r.upper
    assert r.estimate <= r.upper


@C10
@pytest.mark.parametrize("name", ["golden", "ex35", "ex36"])
@pytest.mark.parametrize("q", [0.5, 1.0, 2.0, -1.0])
def test_c10_scaling_covariance(name, q):
    fam = DEMOS[name].family
    c = 2.0
    base = pressure_estimate(fam, 10, q).estimate
    scaled = pressure_estimate(fam.scaled(c), 10, q).estimate
    assert abs(scaled - base - q * math.log(c)) <= C10_SCALING_TOL
    shift = partition_sum(fam.scaled(c), 10, q).log_value - partition_sum(fam, 10, q).log_value
    assert abs(shift - 10 * q * math.log(c)) <= C10_SCALING_TOL


@C10
@settings(max_examples=10, deadline=None)
@given(st.integers(0, 10_000), st.permutations([0, 1, 2]), st.floats(-2.0, 3.0))
def test_c10_permutation_invariance(seed, perm, q):
    a = np.array([[1, 1, 0], [0, 1, 1], [1, 1, 1]])
    mats = random_family(seed, m=3) + 0.05
    perm = np.array(perm)
    inv = np.argsort(perm)
    fam = MatrixFamily(SubshiftSpec(a), mats)
    relabeled = MatrixFamily(SubshiftSpec(a[np.ix_(inv, inv)]), mats[inv])
    for n in (1, 4, 7):
        assert partition_sum(relabeled, n, q).log_value == pytest.approx(partition_sum(fam, n, q).log_value, rel=1e-12, abs=1e-12)


@C10
@pytest.mark.parametrize("name", sorted(DEMOS))
@pytest.mark.parametrize("q", [-1.0, 0.5, 1.0, 2.5])
def test_c10_normalization(name, q):
    for n in (2, 7, 11):
        assert abs(level_weights(DEMOS[name].family, n, q).total() - 1) <= C10_NORM_TOL


@C10
@pytest.mark.parametrize("name", ["golden", "ex35", "ex36"])
def test_c10_marginal_exactness(name):
    top = level_weights(DEMOS[name].family, 11, 1.0)
    for mid, low in ((8, 3), (5, 2), (9, 1)):
        assert np.array_equal(top.marginal(mid).marginal(low).weights, top.marginal(low).weights)


@C10
@pytest.mark.parametrize(
    "argv",
    [
        ["pressure", "--demo", "golden", "--n", "9", "--qmin", "0.5", "--qmax", "3", "--qstep", "0.5"],
        ["pressure", "--demo", "ex35", "--n", "14", "--qmin", "0.5", "--qmax", "3", "--qstep", "0.5"],
        ["gibbs", "--demo", "golden", "--n", "3", "--N", "9", "--q", "1.5"],
        ["spectrum", "--demo", "golden", "--n", "8", "--qmin", "0.5", "--qmax", "2", "--qstep", "0.5"],
        ["sample", "--demo", "golden", "--n", "8", "--count", "200", "--seed", "11"],
    ],
    ids=["pressure-golden", "pressure-ex35", "gibbs", "spectrum", "sample"],
)
def test_c10_byte_stable_csv(tmp_path, argv):
    outputs = []
    for threads in (1, 2, 8):
        from pressurelab.matrices import _level_norms_cached

        _level_norms_cached.cache_clear()
        out = tmp_path / f"t{threads}.csv"
        assert main(["--threads", str(threads)] + argv + ["--out", str(out)]) == 0
        outputs.append(out.read_bytes())
    assert outputs[0] == outputs[1] == outputs[2]
