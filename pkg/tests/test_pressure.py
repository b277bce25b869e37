import math

import numpy as np
import pytest

from oracle import partition as brute_partition, random_family
from pressurelab.demos import DEMOS, ex35_pressure
from pressurelab.errors import (
    ConvergenceError,
    DegenerateSystemError,
    InputError,
    PreconditionError,
    SizeGuardError,
)
from pressurelab.matrices import MatrixFamily, check_H2
from pressurelab.pressure import (
    Kink,
    PressureResult,
    detect_kink,
    lifted_log_partition,
    partition_sum,
    pressure_curve,
    pressure_estimate,
    pressure_exact_integer,
    pressure_lower,
    pressure_upper,
    q_grid,
    spectral_radius,
)
from pressurelab.sft import SubshiftSpec

EX35 = DEMOS["ex35"].family
GOLDEN = DEMOS["golden"].family
SCALAR = DEMOS["scalar"].family
GOLDEN_MEAN = DEMOS["goldenmean_sft"].family
LOG2 = math.log(2)


def test_partition_sum_examples():
    assert math.isclose(partition_sum(EX35, 2, 1).value, 32, rel_tol=1e-14)
    assert math.isclose(partition_sum(EX35, 2, 2).value, 292, rel_tol=1e-14)
    for n in (1, 5, 11):
        for q in (-2.0, 0.5, 3.0):
            s = partition_sum(SCALAR, n, q)
            assert math.isclose(s.value, 2 ** n, rel_tol=1e-14)
            assert s.restricted == (q < 0)


def test_partition_sum_closed_forms_ex35():
    # s_n(1) = 2*4^n, s_n(2) = 3*8^n + 10^n
    for n in (3, 8, 15):
        assert math.isclose(partition_sum(EX35, n, 1).log_value, math.log(2) + n * math.log(4), rel_tol=1e-13)
        expected = math.log(3 * 8 ** n + 10 ** n)
        assert math.isclose(partition_sum(EX35, n, 2).log_value, expected, rel_tol=1e-13)


def test_partition_sum_skips_zero_products():
    fam = MatrixFamily(SubshiftSpec.full(2), [[[1, 0], [0, 0]], [[0, 0], [0, 1]]])
    s = partition_sum(fam, 3, -1.0)
    assert s.zero_count == 6 and s.restricted
    assert math.isclose(s.value, 2.0)
    assert partition_sum(fam, 3, 1.0).zero_count == 6


def test_partition_sum_all_zero_is_degenerate():
    fam = MatrixFamily(SubshiftSpec.full(2), [[[0, 1], [0, 0]], [[0, 1], [0, 0]]])
    with pytest.raises(DegenerateSystemError):
        partition_sum(fam, 2, 1.0)


def test_partition_sum_matches_brute_force():
    mats = random_family(42, m=3)
    fam = MatrixFamily(SubshiftSpec.full(3), mats)
    for n in (1, 4, 7):
        for q in (0.3, 1.0, 2.5, -1.5):
            expected = brute_partition(mats, np.ones((3, 3)), n, q)
            assert math.isclose(partition_sum(fam, n, q).value, expected, rel_tol=1e-12)


def test_pressure_upper_examples():
    assert math.isclose(pressure_upper(EX35, 10, 1), math.log(4) + LOG2 / 10, rel_tol=1e-13)
    assert math.isclose(pressure_upper(EX35, 10, 2), math.log(3 * 8 ** 10 + 10 ** 10) / 10, rel_tol=1e-13)
    assert math.isclose(pressure_upper(EX35, 10, 2), 2.3305089365, abs_tol=1e-9)
    assert math.isclose(pressure_upper(SCALAR, 7, 1.5), LOG2, rel_tol=1e-14)
    with pytest.raises(PreconditionError):
        pressure_upper(EX35, 10, 0)


def test_pressure_lower_golden_brackets():
    witness = check_H2(GOLDEN)
    lower = pressure_lower(GOLDEN, witness, 8, 1.0)
    assert lower is not None and lower <= pressure_upper(GOLDEN, 8, 1.0)
    assert lower <= math.log(4)
    with pytest.raises(PreconditionError):
        pressure_lower(EX35, check_H2(EX35), 8, 1.0)


def test_pressure_lower_scalar_two():
    fam = MatrixFamily(SubshiftSpec.full(2), [[[2.0]], [[2.0]]])
    witness = check_H2(fam)
    assert witness.b == 4 and witness.r == 1
    for n in (1, 5, 10):
        lower = pressure_lower(fam, witness, n, 1.5)
        exact = 2.5 * LOG2
        assert lower <= exact <= pressure_upper(fam, n, 1.5) + 1e-12
        assert math.isclose(lower, 1.5 * math.log(2 * 2 ** n) / (n + 1))


def test_pressure_lower_vacuous_branch():
    fam = MatrixFamily(SubshiftSpec.full(2), [[[0.1]], [[0.1]]])
    assert pressure_lower(fam, check_H2(fam), 1, 1.0) is None


def test_pressure_estimate_examples():
    r = pressure_estimate(EX35, 20, 2.0)
    assert abs(r.estimate - math.log(10)) <= 0.01
    assert r.lower is None and r.upper is not None and r.method == "enumeration"
    assert pressure_estimate(EX35, 20, 1.0).estimate == pytest.approx(math.log(4), abs=1e-12)
    for q in (-1.0, 0.5, 2.0):
        assert pressure_estimate(SCALAR, 6, q).estimate == pytest.approx(LOG2, abs=1e-14)
    neg = pressure_estimate(SCALAR, 6, -1.0)
    assert neg.note == "uncertified" and not neg.certified
    with pytest.raises(InputError):
        pressure_estimate(EX35, 3, 1.0)


def test_pressure_estimate_stays_in_bracket():
    for n in (8, 12):
        for q in (0.5, 1.0, 2.0, 3.0):
            r = pressure_estimate(GOLDEN, n, q)
            assert r.lower <= r.estimate <= r.upper


def test_bracket_shrinks_with_n():
    widths = []
    fam = MatrixFamily(SubshiftSpec.full(2), [[[1, 2], [0.5, 1]], [[2, 1], [1, 3]]])
    for n in (8, 12, 16):
        r = pressure_estimate(fam, n, 1.0)
        widths.append(r.upper - r.lower)
    assert widths[0] > widths[1] > widths[2]


def test_pressure_curve_examples():
    curve = pressure_curve(EX35, [0.5, 1, 2], 20)
    for r, expected in zip(curve, (1.039721, 1.386294, 2.302585)):
        assert abs(r.estimate - expected) <= 0.05
    assert all(r.estimate == pytest.approx(LOG2, abs=1e-14) for r in pressure_curve(SCALAR, [0.5, 1, 2, 3, 4], 8))
    golden = pressure_curve(GOLDEN, q_grid(0.25, 3, 0.25), 14)
    values = [r.estimate for r in golden]
    assert all(b >= a for a, b in zip(values, values[1:]))
    with pytest.raises(InputError):
        pressure_curve(EX35, [1, 0.5], 8)


def test_golden_norms_are_at_least_one():
    from pressurelab.matrices import level_norms

    for n in range(1, 15):
        assert level_norms(GOLDEN, n).log_norm.min() >= 0


def test_q_grid():
    assert q_grid(0.5, 1.0, 0.25) == [0.5, 0.75, 1.0]
    assert q_grid(0.5, 3.0, 0.05)[-1] == 3.0
    assert len(q_grid(0.5, 3.0, 0.05)) == 51
    with pytest.raises(InputError):
        q_grid(1, 0, 0.1)


def test_detect_kink_on_closed_form():
    grid = q_grid(0.5, 2.0, 0.05)
    curve = [PressureResult(q, ex35_pressure(q), None, None, 0, "closed_form_demo") for q in grid]
    kinks = detect_kink(curve)
    assert len(kinks) == 1
    assert abs(kinks[0].q - 1.0) <= 0.05
    # finite-difference jump at grid step 0.05 around 3 log 3/4 - log 2 = 0.1309
    assert abs(kinks[0].jump - (0.75 * math.log(3) - LOG2)) <= 0.03


def test_detect_kink_smooth_curves():
    grid = q_grid(0.5, 3.0, 0.25)
    flat = [PressureResult(q, LOG2, None, None, 0, "closed_form_demo") for q in grid]
    assert detect_kink(flat) == []
    assert detect_kink(pressure_curve(GOLDEN, grid, 12)) == []
    with pytest.raises(InputError):
        detect_kink(flat[:4])
    with pytest.raises(InputError):
        detect_kink([PressureResult(q, 0, None, None, 0, "x") for q in (0, 1, 3, 4, 5)])


def test_kink_jump_property():
    assert Kink(1.0, 0.5, 0.75).jump == 0.25


@pytest.mark.parametrize("q, expected", [(1, math.log(4)), (2, math.log(10))])
def test_integer_oracle_ex35(q, expected):
    r = pressure_exact_integer(EX35, q)
    assert abs(r.estimate - expected) <= 1e-9
    assert r.method == "integer_oracle"


def test_integer_oracle_golden_mean_and_golden():
    assert abs(pressure_exact_integer(GOLDEN_MEAN, 1).estimate - math.log((1 + 5 ** 0.5) / 2)) <= 1e-9
    assert abs(pressure_exact_integer(GOLDEN, 1).estimate - math.log(4)) <= 1e-9


@pytest.mark.parametrize("seed", range(5))
def test_lift_matches_brute_force(seed):
    mats = random_family(seed)
    fam = MatrixFamily(SubshiftSpec.full(2), mats)
    for q in (1, 2, 3):
        for n in (1, 2, 5, 10):
            expected = math.log(brute_partition(mats, np.ones((2, 2)), n, q))
            assert abs(math.expm1(lifted_log_partition(fam, n, q) - expected)) <= 1e-9


def test_lift_on_sft():
    a = np.array([[1, 1], [1, 0]])
    mats = random_family(9)
    fam = MatrixFamily(SubshiftSpec(a), mats)
    for q in (1, 2):
        for n in (2, 6):
            expected = math.log(brute_partition(mats, a, n, q))
            assert abs(math.expm1(lifted_log_partition(fam, n, q) - expected)) <= 1e-9


def test_lift_guard_and_domain():
    big = MatrixFamily(SubshiftSpec.full(2), np.ones((2, 4, 4)))
    with pytest.raises(SizeGuardError):
        pressure_exact_integer(big, 6)
    with pytest.raises(InputError):
        pressure_exact_integer(EX35, 1.5)
    with pytest.raises(InputError):
        pressure_exact_integer(EX35, 0)


def test_spectral_radius():
    assert spectral_radius(np.array([[2.0, 1.0], [1.0, 2.0]])).radius == pytest.approx(3.0, rel=1e-12)
    # period-2 matrix: the averaged ratio converges
    assert spectral_radius(np.array([[0.0, 4.0], [1.0, 0.0]])).radius == pytest.approx(2.0, rel=1e-12)
    with pytest.raises(ConvergenceError):
        spectral_radius(np.array([[1.0, 1.0], [0.0, 1.0]]), max_iter=50)
