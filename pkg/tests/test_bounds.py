"""Closed-form rate curves: frozen values, domain errors, and algebraic identities.

Reference values were computed with a 50-digit mpmath evaluation of the same
formulas and rounded to the nearest float64.
"""

import math

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from digauss.bounds import (
    LABEL_ASYMPTOTIC,
    LABEL_EXACT,
    BoundCurve,
    capacity,
    evaluate_bound,
    rate_lower_finite,
    rate_lower_single,
    rate_lower_universal,
    rr_lower,
    rr_upper,
)
from digauss.errors import DomainError, ExponentTooLarge


def test_rate_lower_single_frozen():
    assert rate_lower_single(2**16) == pytest.approx(0.125, abs=1e-15)
    assert rate_lower_single(4) == pytest.approx(0.0, abs=1e-15)
    with pytest.raises(DomainError):
        rate_lower_single(3)


def test_rate_lower_single_approaches_quarter():
    values = [rate_lower_single(2**k) for k in (4, 8, 16, 32, 64, 128)]
    assert values == sorted(values)
    assert values[-1] < 0.25
    assert 0.25 - values[-1] < 0.03
    assert all(v <= capacity() for v in values)


def _sigma_for_unit_d(t):
    # with sigma = 2/(3t) the packing distance 3*sigma*t collapses to 2,
    # which makes the rate sum exactly sum_l (n+1-l)/(n*2^(l+1))
    return 2.0 / (3.0 * t)


def test_rate_lower_finite_frozen_approach():
    cases = {
        2**10: 0.49902868270874023,
        2**20: 0.49951124703511596,
        2**40: 0.49951171874955014,
        2**80: 0.49951171875000000,
    }
    for n, want in cases.items():
        t = math.log2(n)
        got = rate_lower_finite(n, 10, 1.0, _sigma_for_unit_d(t), t)
        assert got == pytest.approx(want, abs=1e-14)


def test_rate_lower_finite_single_term():
    n, c, sigma, t = 256, 2.0, 0.25, 1.5
    d = 3 * sigma * t
    r1 = (c * n) ** 0.5
    want = (n / 2) * math.log2(2 * r1 / d) / (n * math.log2(n))
    got = rate_lower_finite(n, 1, c, sigma, t)
    # depth 1 uses dimension n+1-1 = n, so the reduction is exact
    assert got == pytest.approx(want, rel=1e-12)


def test_rate_lower_finite_infeasible_raises():
    # deep layers shrink below the packing distance: 2*r_3/d < 1 here
    with pytest.raises(DomainError):
        rate_lower_finite(2**20, 8, 1.0, 1.0, 20.0)


def test_rate_lower_finite_monotone_in_depth():
    n, c, sigma, t = 2**16, 1.0, 0.05, 2.0
    values = []
    for depth in range(1, 6):
        values.append(rate_lower_finite(n, depth, c, sigma, t))
    assert values == sorted(values)
    assert values[0] < values[-1]


def test_rate_lower_finite_validation():
    with pytest.raises(DomainError):
        rate_lower_finite(2**10, 0, 1.0, 1.0, 1.0)
    with pytest.raises(DomainError):
        rate_lower_finite(2**10, 2, -1.0, 1.0, 1.0)
    with pytest.raises(DomainError):
        rate_lower_finite(2**10, 2, 1.0, 0.0, 1.0)
    with pytest.raises(DomainError):
        rate_lower_finite(1, 2, 1.0, 1.0, 1.0)


def test_rate_lower_universal_frozen():
    got = rate_lower_universal(2**20, 3, 0.1, 2.0)
    assert got == pytest.approx(0.27487744909063442, abs=1e-14)


def test_rate_lower_universal_decreasing_in_margin():
    table = {
        0.05: 0.29675241630807979,
        0.1: 0.27487744909063442,
        0.2: 0.23112751465574367,
        0.3: 0.18737758022085293,
    }
    prev = 1.0
    for b, want in table.items():
        got = rate_lower_universal(2**20, 3, b, 2.0)
        assert got == pytest.approx(want, abs=1e-14)
        assert got < prev
        prev = got


def test_rate_lower_universal_infeasible_raises():
    # with t_abs = 20 the packing distance is 60; at n = 2^20, b = 0.1 the
    # layer-2 radius is 2^4.5 ~ 22.6, so 2r/d ~ 0.75 < 1 and the call must
    # raise instead of summing negative log terms
    with pytest.raises(DomainError):
        rate_lower_universal(2**20, 6, 0.1, 20.0)


def test_rate_lower_universal_margin_validation():
    with pytest.raises(DomainError):
        rate_lower_universal(2**10, 2, 0.0, 1.0)
    with pytest.raises(DomainError):
        rate_lower_universal(2**10, 2, 1.0, 1.0)
    with pytest.raises(DomainError):
        rate_lower_universal(2**10, 2, 0.5, -2.0)


def test_rate_lower_universal_approaches_half():
    # small margin, small absolute threshold, deep tree, huge n
    got = rate_lower_universal(2**40, 12, 0.01, 2.0 / 3.0)
    assert 0.49 < got < 0.5


def test_rr_lower_frozen():
    sigma = 1.0
    assert rr_lower(1.0, 9.0, sigma, 1) == pytest.approx(0.0, abs=1e-12)
    assert rr_lower(0.25, 18.0, sigma, 2) == pytest.approx(1.0, abs=1e-12)
    # boundary exponent is admissible and gives (1/2)log2(1/(81 L))
    e0 = 9.0 * 2.0 / 1.0
    assert rr_lower(e0, 2.0, 1.0, 1) == pytest.approx(-3.1699250014423124, abs=1e-12)


def test_rr_lower_rejects_beyond_cutoff():
    with pytest.raises(ExponentTooLarge) as err:
        rr_lower(18.1, 2.0, 1.0, 1)
    assert err.value.e0 == pytest.approx(18.0)
    with pytest.raises(DomainError):
        rr_lower(-1.0, 2.0, 1.0, 1)
    with pytest.raises(DomainError):
        rr_lower(1.0, 2.0, 1.0, 0)


def test_rr_upper_frozen():
    assert rr_upper(1.0, 1.0, 1.0) == pytest.approx(1.5, abs=1e-12)
    assert rr_upper(0.25, 1.0, 1.0) == pytest.approx(2.5, abs=1e-12)
    assert rr_upper(8.0, 1.0, 1.0) == pytest.approx(0.0, abs=1e-12)
    with pytest.raises(DomainError):
        rr_upper(0.0, 1.0, 1.0)
    with pytest.raises(DomainError):
        rr_upper(-2.0, 1.0, 1.0)


def test_rr_gap_is_half_log2_72L():
    gaps = {1: 3.0849625007211562, 2: 3.5849625007211562, 4: 4.0849625007211562}
    for depth, want in gaps.items():
        for exponent in (0.01, 0.1, 1.0, 5.0):
            power, sigma = 50.0, 1.0
            gap = rr_upper(exponent, power, sigma) - rr_lower(exponent, power, sigma, depth)
            assert gap == pytest.approx(want, abs=1e-12)


@given(
    st.floats(min_value=0.001, max_value=5.0),
    st.floats(min_value=0.5, max_value=50.0),
    st.integers(min_value=1, max_value=8),
)
@settings(max_examples=150)
def test_rr_upper_dominates_everywhere(exponent, power, depth):
    sigma = 1.0
    if exponent > 9 * power / sigma**2:
        return
    assert rr_upper(exponent, power, sigma) >= rr_lower(exponent, power, sigma, depth)


def test_capacity_exact():
    assert capacity() == 0.5


def test_evaluate_bound_labels_and_validation():
    curve = evaluate_bound("rate_lower_single", n=2**16)
    assert curve.value == pytest.approx(0.125)
    assert curve.label == LABEL_ASYMPTOTIC
    assert curve.inputs == {"n": 2**16}

    curve = evaluate_bound("rate_lower_finite", n=2**10, depth=2, radius_scale=1.0,
                           sigma=0.1, threshold=1.0)
    assert curve.label == LABEL_EXACT

    assert evaluate_bound("rr_upper", exponent=1.0, power=1.0, sigma=1.0).label == LABEL_ASYMPTOTIC
    assert evaluate_bound("capacity").value == 0.5

    with pytest.raises(DomainError):
        evaluate_bound("no_such_bound")
    with pytest.raises(DomainError):
        evaluate_bound("capacity", n=4)


def test_bound_curve_rejects_bad_label_or_value():
    with pytest.raises(DomainError):
        BoundCurve(name="x", inputs={}, value=1.0, label="guess")
    with pytest.raises(DomainError):
        BoundCurve(name="x", inputs={}, value=float("inf"), label=LABEL_EXACT)
