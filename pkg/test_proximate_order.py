"""
Tests for proximate orders, admissibility and flat-function certificates
"""
import numpy as np
import pytest

from carleman.errors import DomainError, InvalidParameterError
from carleman.proximate_order import (
    ProximateOrderSpec, parse_proximate_order, default_proximate_order, check_proximate_order,
    admits_proximate_order, check_real_part_bound, certify_flatness, FlatFunction, flat_function, V_value, log_grid,
)
from carleman.weight_sequence import make_gevrey, make_mab, make_qpow, from_log_table


def test_parse_proximate_order():
    spec = parse_proximate_order('alphabeta:1,2')
    assert spec.family == 'alphabeta'
    assert spec.params == (1.0, 2.0)
    assert spec.limit == 1.0
    assert spec.describe() == 'alphabeta:1,2'
    assert parse_proximate_order('Constant:0.5').limit == 0.5


@pytest.mark.parametrize('text', ['foo:1', 'constant:x', 'constant:1,2', 'alphabeta:0,1', 'powertail:1,-1', 'constant:-1'])
def test_parse_rejects_bad_orders(text):
    with pytest.raises(InvalidParameterError):
        parse_proximate_order(text)


def test_cutoff_radius():
    assert ProximateOrderSpec('constant', (2.0,)).R0 == 1.0
    assert ProximateOrderSpec('alphabeta', (1.0, 2.0)).R0 == pytest.approx(np.exp(3.0))
    assert not ProximateOrderSpec('constant', (2.0,)).heuristic
    assert ProximateOrderSpec('logtail', (1.0, 2.0)).heuristic


def test_default_orders_for_builtins():
    assert default_proximate_order(make_gevrey(2, 100)) == ProximateOrderSpec('constant', (0.5,))
    assert default_proximate_order(make_mab(2, 0, 100)) == ProximateOrderSpec('constant', (0.5,))
    assert default_proximate_order(make_mab(1, 2, 100)).family == 'alphabeta'
    assert default_proximate_order(make_qpow(2, 100)) is None


def test_check_proximate_order_for_alphabeta():
    result = check_proximate_order(ProximateOrderSpec('alphabeta', (1.0, 2.0)), log_grid(1e2, 1e8))
    assert result['pass']
    assert result['nonnegative']
    assert result['limit'] == 1.0


def test_check_proximate_order_rejects_short_grid():
    with pytest.raises(InvalidParameterError):
        check_proximate_order(ProximateOrderSpec('constant', (1.0,)), log_grid(10.0, 100.0))


def test_admits_proximate_order_for_builtins():
    verdict = admits_proximate_order(make_gevrey(1, 100))
    assert verdict == {'admissible': True, 'source': 'analytic', 'proximate_order': 'constant:1'}
    assert admits_proximate_order(make_qpow(2, 100))['admissible'] is None


def test_zero_order_is_never_admissible():
    verdict = admits_proximate_order(make_qpow(2, 100), ProximateOrderSpec('constant', (0.0,)))
    assert verdict['admissible'] is False
    assert verdict['source'] == 'analytic'


def test_numeric_admissibility():
    table = from_log_table(make_gevrey(1, 10000).log_M)
    good = admits_proximate_order(table, ProximateOrderSpec('constant', (1.0,)))
    assert good['admissible']
    assert good['source'] == 'numeric'
    bad = admits_proximate_order(table, ProximateOrderSpec('constant', (0.5,)))
    assert not bad['admissible']
    assert bad['trend'] == 'up'


@pytest.mark.parametrize('rho,opening', [(2.0, 0.25), (1.0, 0.5), (0.5, 1.0)])
def test_real_part_bound_for_constant_orders(rho, opening):
    result = check_real_part_bound(ProximateOrderSpec('constant', (rho,)), opening)
    assert result['pass']
    assert result['b'] == pytest.approx(np.cos(np.pi * opening * rho / 2), abs=1e-6)


def test_real_part_bound_rejects_wide_sector():
    with pytest.raises(InvalidParameterError):
        check_real_part_bound(ProximateOrderSpec('constant', (2.0,)), 0.5)


def test_V_value_domain():
    spec = ProximateOrderSpec('constant', (1.0,))
    assert V_value(spec, 2.0, 0.0) == pytest.approx(2.0)
    with pytest.raises(DomainError):
        V_value(spec, 0.5, 0.0)
    with pytest.raises(DomainError):
        V_value(spec, 2.0, np.pi)


@pytest.mark.parametrize('alpha', [0.5, 1.0, 2.0])
def test_certify_flatness_for_gevrey(alpha):
    seq = make_gevrey(alpha, 10000)
    witness = certify_flatness(seq, ProximateOrderSpec('constant', (1.0 / alpha,)), 0.9 * alpha, 0.1, (64, 64))
    assert np.isfinite(witness.log_c1)
    assert np.isfinite(witness.c2) and witness.c2 > 0
    assert witness.confident
    assert witness.log_sup_ratio <= 0.0
    assert witness.inner_radius < 0.1 * 1e-2
    assert witness.rows.shape == (2 * 64 * 64, 4)
    # G decays much faster than any power near the vertex
    assert witness.rows[:, 2].min() < -1e3
    assert set(witness.to_dict()) >= {'c1', 'c2', 'sector', 'grid', 'sup_ratio', 'confident', 'inner_radius'}


def test_certify_flatness_rejects_wide_opening():
    with pytest.raises(InvalidParameterError):
        certify_flatness(make_gevrey(1, 1000), ProximateOrderSpec('constant', (1.0,)), 1.0, 0.1)


def test_flat_function_needs_admissible_order():
    with pytest.raises(DomainError):
        FlatFunction(from_log_table(make_gevrey(1, 10000).log_M), ProximateOrderSpec('constant', (0.5,)))
    flat = flat_function(make_gevrey(1, 100), ProximateOrderSpec('constant', (1.0,)))
    assert flat.log_abs(0.5, 0.0) == pytest.approx(-2.0)
    with pytest.raises(DomainError):
        flat.log_abs(2.0, 0.0)


@pytest.mark.parametrize('alpha', [0.5, 1.0, 2.0])
def test_flat_function_is_the_classical_gevrey_one(alpha):
    flat = flat_function(make_gevrey(alpha, 200), ProximateOrderSpec('constant', (1.0 / alpha,)))
    for x in (0.5, 0.1, 0.01):
        assert flat.log_abs(x, 0.0) == pytest.approx(-x ** (-1.0 / alpha), rel=1e-12)
    # |G| = exp(-r^(-1/alpha) cos(theta/alpha)) off the axis
    assert flat.log_abs(0.1, 0.3 * alpha) == pytest.approx(-0.1 ** (-1.0 / alpha) * np.cos(0.3), rel=1e-12)


def test_flatness_is_checked_below_the_fit_rings():
    seq = make_gevrey(1.0, 10000)
    witness = certify_flatness(seq, ProximateOrderSpec('constant', (1.0,)), 0.9, 0.1, (16, 16))
    inner = witness.rows[16 * 16:]
    assert inner[:, 0].max() < 0.1 * 1e-2
    assert inner[:, 0].min() == pytest.approx(witness.inner_radius)
    assert witness.inner_radius * witness.c2 * np.exp(seq.log_m[-1]) == pytest.approx(1.01)
    # columns 2 and 3 are log|G| and log c1 - omega_M, so their difference is the log ratio
    log_ratio = (inner[:, 2] - inner[:, 3]).reshape(16, 16)
    assert log_ratio.max() == pytest.approx(witness.log_sup_ratio)
    assert log_ratio.max() <= 0.0
    # and it only decreases towards the vertex
    assert np.all(np.diff(log_ratio.max(axis=1)) > 0)


@pytest.mark.parametrize('spec', [
    ProximateOrderSpec('constant', (1.0,)), ProximateOrderSpec('alphabeta', (1.0, 1.0)),
    ProximateOrderSpec('logtail', (1.0, 2.0)), ProximateOrderSpec('powertail', (0.5, 0.5)),
], ids=lambda s: s.describe())
def test_V_is_real_positive_and_increasing_on_the_axis(spec):
    t = np.geomspace(spec.R0 * 1.01, 1e8, 200)
    log_v = spec.log_V(t, np.zeros_like(t))
    np.testing.assert_allclose(np.imag(log_v), 0.0, atol=1e-12)
    assert np.all(np.diff(np.real(log_v)) > 0)
    assert all(V_value(spec, float(x), 0.0).real > 0 for x in t[::40])


@pytest.mark.parametrize('spec', [ProximateOrderSpec('constant', (1.0,)), ProximateOrderSpec('alphabeta', (1.0, 1.0))],
                         ids=lambda s: s.describe())
def test_V_commutes_with_conjugation(spec):
    for modulus, argument in [(5.0 * spec.R0, 0.4), (1e3 * spec.R0, 1.2), (2.0 * spec.R0, 2.5)]:
        assert V_value(spec, modulus, -argument) == pytest.approx(V_value(spec, modulus, argument).conjugate(),
                                                                  rel=1e-12)


def test_real_part_bound_for_alphabeta():
    spec = ProximateOrderSpec('alphabeta', (1.0, 1.0))
    result = check_real_part_bound(spec, 0.5)
    assert result['pass']
    assert result['b'] > 0
    bounds = [check_real_part_bound(spec, a)['b'] for a in (0.2, 0.4, 0.6, 0.8)]
    assert all(later < earlier for earlier, later in zip(bounds, bounds[1:]))


@pytest.mark.parametrize('spec', [
    ProximateOrderSpec('constant', (0.5,)), ProximateOrderSpec('logtail', (1.0, 2.0)),
    ProximateOrderSpec('powertail', (1.0, 0.5)),
], ids=lambda s: s.describe())
def test_builtin_orders_are_proximate_orders(spec):
    result = check_proximate_order(spec, log_grid(1e2, 1e10))
    assert result['pass']
    assert result['limit'] == spec.limit


def test_numeric_admissibility_for_mab_table():
    table = from_log_table(make_mab(1.0, 2.0, 10000).log_M)
    verdict = admits_proximate_order(table, ProximateOrderSpec('alphabeta', (1.0, 2.0)))
    assert verdict['source'] == 'numeric'
    assert verdict['admissible']
