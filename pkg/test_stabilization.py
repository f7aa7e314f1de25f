"""
Tests for prefix drift detection
"""
import math

import pytest

from utils.stabilization import doubling_prefixes, detect_witness_drift, is_stabilized, format_drift


def test_doubling_prefixes():
    assert doubling_prefixes(1000) == [250, 500, 1000]
    assert doubling_prefixes(2) == [1, 1, 2]


def test_constant_witness_is_stable():
    drift = detect_witness_drift([250, 500, 1000], [1.0, 1.0, 1.0])
    assert is_stabilized(drift)
    assert format_drift(drift) == 'stable'


def test_doubling_witness_is_growing():
    """A constant like 2^p doubles its log every checkpoint"""
    drift = detect_witness_drift([250, 500, 1000], [250 * math.log(2), 500 * math.log(2), 1000 * math.log(2)])
    assert not is_stabilized(drift)
    assert drift['growing']
    assert format_drift(drift).startswith('growing')


def test_small_changes_within_tolerance():
    drift = detect_witness_drift([1, 2, 3], [0.0, 0.001, 0.002], rtol=0.01)
    assert is_stabilized(drift)
    assert drift['relative_change'] == pytest.approx(math.expm1(0.001))


def test_non_finite_values_count_as_drift():
    drift = detect_witness_drift([1, 2], [0.0, float('inf')])
    assert not is_stabilized(drift)
    assert math.isnan(drift['relative_change'])


def test_deeper_doubling_prefixes():
    assert doubling_prefixes(1000, depth=4) == [125, 250, 500, 1000]
    assert doubling_prefixes(1000, depth=1) == [1000]


def test_projected_drift_catches_slow_growth():
    """Steps of 1/log-type growth shrink too slowly to be summable within tolerance"""
    log_values = [math.log(math.log(k) / 4.0) for k in (1250, 2500, 5000, 10000)]
    plain = detect_witness_drift([1250, 2500, 5000, 10000], log_values, rtol=0.1)
    assert is_stabilized(plain)
    drift = detect_witness_drift([1250, 2500, 5000, 10000], log_values, rtol=0.1, projected=True)
    assert not is_stabilized(drift)
    assert drift['projected_change'] > 1.0
    assert 'projected' in format_drift(drift)


def test_projected_drift_accepts_geometric_convergence():
    log_values = [math.log(1.645 - 1.0 / k) for k in (500, 1000, 2000, 4000)]
    drift = detect_witness_drift([500, 1000, 2000, 4000], log_values, projected=True)
    assert is_stabilized(drift)
    assert drift['projected_change'] < 1e-3
    assert detect_witness_drift([1, 2, 3], [1.0, 1.0, 1.0], projected=True)['projected_change'] == 0.0
