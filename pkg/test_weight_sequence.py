"""
Tests for weight-sequence construction and transforms
"""
import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from carleman.errors import InvalidParameterError, NormalizationError
from carleman.properties import check_lc
from carleman.weight_sequence import (
    make_gevrey, make_mab, make_qpow, make_log_product, from_log_table, from_log_quotients,
    hat, check, power, shift, interpolate, equivalent, lower_convex_minorant, Family,
)

LOG2, LOG6 = np.log(2.0), np.log(6.0)


def test_gevrey_terms():
    """M_p = p! for alpha = 1"""
    np.testing.assert_allclose(make_gevrey(1, 4).log_M, [0, 0, LOG2, LOG6], atol=1e-15)
    np.testing.assert_allclose(make_gevrey(2, 3).log_M, [0, 0, 2 * LOG2], atol=1e-15)


def test_gevrey_quotients():
    """m_p = (p+1)^alpha"""
    np.testing.assert_allclose(make_gevrey(0.5, 3).quotients, [0.0, 0.5 * LOG2], atol=1e-15)


def test_gevrey_rejects_bad_parameters():
    with pytest.raises(InvalidParameterError):
        make_gevrey(0, 10)
    with pytest.raises(InvalidParameterError):
        make_gevrey(1, 1)


def test_mab_reduces_to_gevrey():
    """beta = 0 gives the Gevrey sequence"""
    np.testing.assert_allclose(make_mab(1, 0, 5).log_M, make_gevrey(1, 5).log_M, atol=1e-14)


def test_mab_quotient_closed_form():
    seq = make_mab(1, 2, 3)
    expected = np.log(2.0) + 2 * np.log(np.log(np.e + 2))
    assert seq.log_m[1] == pytest.approx(expected, rel=1e-12)
    assert seq.quotient_rule(1) == pytest.approx(expected, rel=1e-12)


def test_mab_negative_beta_is_log_convex():
    seq = make_mab(1, -1, 50)
    assert check_lc(seq).holds


def test_mab_regularizes_strongly_negative_beta():
    """A large negative beta breaks log-convexity at the start; the minorant restores it"""
    seq = make_mab(0.2, -3, 200)
    assert seq.regularized
    assert seq.quotient_rule is None
    assert check_lc(seq).holds
    assert seq.log_M[0] == 0.0


def test_qpow_terms():
    np.testing.assert_allclose(make_qpow(2, 4).log_M, [0, LOG2, 4 * LOG2, 9 * LOG2], rtol=1e-14)
    np.testing.assert_allclose(make_qpow(1.5, 3).log_m, [np.log(1.5), 3 * np.log(1.5)], rtol=1e-14)


def test_qpow_requires_q_above_one():
    with pytest.raises(InvalidParameterError):
        make_qpow(1, 3)


def test_log_product_is_alpha_zero_member():
    seq = make_log_product(2, 6)
    assert seq.family == Family('logprod', (2.0,))
    np.testing.assert_allclose(seq.log_m, 2 * np.log(np.log(np.e + np.arange(1, 6))), rtol=1e-13)


def test_from_log_table():
    seq = from_log_table([0, 0, 0.6931])
    assert seq.n_terms == 3
    assert seq.quotient_rule is None
    with pytest.raises(NormalizationError):
        from_log_table([0.1, 1, 2])
    with pytest.raises(InvalidParameterError):
        from_log_table([0])


def test_from_log_quotients_rebuilds_cumulative_sum():
    seq = from_log_quotients([0.0, LOG2, np.log(3.0)])
    np.testing.assert_allclose(seq.log_M, make_gevrey(1, 4).log_M, atol=1e-14)


def test_log_M_is_read_only():
    seq = make_gevrey(1, 10)
    with pytest.raises(ValueError):
        seq.log_M[3] = 0.0


def test_hat_and_check():
    n = 200
    base = make_gevrey(1, n)
    np.testing.assert_allclose(hat(base).log_M, make_gevrey(2, n).log_M, rtol=1e-13)
    assert hat(base).family == Family('gevrey', (2.0,))
    np.testing.assert_allclose(check(hat(base)).log_M, base.log_M, atol=1e-9)
    np.testing.assert_allclose(hat(check(base)).log_M, base.log_M, atol=1e-9)


def test_power_and_shift_quotients():
    base = make_mab(1, 1, 100)
    assert power(make_gevrey(1, 10), 2).log_M[3] == pytest.approx(2 * LOG6)
    np.testing.assert_allclose(power(base, 3).log_m, 3 * base.log_m, rtol=1e-12)
    p = np.arange(base.n_terms - 1, dtype=float)
    np.testing.assert_allclose(shift(base, 0.5).log_m, base.log_m + 0.5 * np.log(p + 1), atol=1e-9)
    assert shift(base, 0.5).family == Family('mab', (1.5, 1.0))


def test_shift_to_log_product():
    """Removing the whole factorial part of M_{1,beta} leaves the log product"""
    assert shift(make_mab(1, 2, 20), -1).family == Family('logprod', (2.0,))


def test_interpolate_small_example():
    seq = interpolate(make_gevrey(1, 3), 2)
    np.testing.assert_allclose(seq.log_M, [0, 0, 0, 0.5 * LOG2, LOG2], atol=1e-15)


def test_interpolate_identity_and_errors():
    base = make_gevrey(1.5, 20)
    assert interpolate(base, 1) is base
    with pytest.raises(InvalidParameterError):
        interpolate(base, 0)


@given(st.integers(min_value=2, max_value=6), st.floats(min_value=0.2, max_value=4))
@settings(max_examples=30, deadline=None)
def test_interpolate_knots_and_quotients(r, alpha):
    """P_{kr} = M_k and every quotient of block k equals m_k^(1/r)"""
    base = make_mab(alpha, 1.0, 40)
    seq = interpolate(base, r)
    assert seq.n_terms == (base.n_terms - 1) * r + 1
    np.testing.assert_array_equal(seq.log_M[::r], base.log_M)
    np.testing.assert_allclose(seq.log_m, np.repeat(base.log_m / r, r), atol=1e-10)


@given(st.lists(st.floats(min_value=-5, max_value=5), min_size=3, max_size=60))
@settings(max_examples=50, deadline=None)
def test_convex_minorant_is_convex_and_below(values):
    values = np.asarray(values)
    minorant = lower_convex_minorant(values)
    assert np.all(minorant <= values + 1e-9)
    assert np.all(np.diff(minorant, 2) >= -1e-9)
    assert minorant[0] == pytest.approx(values[0])
    assert minorant[-1] == pytest.approx(values[-1])


def test_log_M_matches_cumulative_quotients():
    seq = make_mab(2, -1, 100)
    np.testing.assert_allclose(seq.log_M[1:], np.cumsum(seq.log_m), atol=1e-10)


def test_equivalence():
    n = 500
    base = make_gevrey(1, n)
    same = equivalent(base, base)
    assert same.is_equivalent
    assert same.lower == pytest.approx(1.0) and same.upper == pytest.approx(1.0)

    scaled = from_log_table(base.log_M + np.arange(n) * LOG2)
    verdict = equivalent(base, scaled)
    assert verdict.is_equivalent
    assert verdict.lower == pytest.approx(2.0) and verdict.upper == pytest.approx(2.0)

    apart = equivalent(base, make_gevrey(2, n))
    assert apart.verdict == 'unbounded-trend'
    assert not apart.is_equivalent


def test_equivalence_needs_matching_prefix():
    with pytest.raises(InvalidParameterError):
        equivalent(make_gevrey(1, 10), make_gevrey(1, 11))


def test_prefix_of_a_builtin_is_a_custom_table():
    prefix = from_log_table(make_gevrey(1.0, 100).log_M[:50])
    assert prefix.n_terms == 50
    assert prefix.family.name == 'custom'
    assert not hasattr(prefix, 'truncate')
