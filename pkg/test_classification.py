"""
Tests for the injectivity and surjectivity classification
"""
import numpy as np
import pytest

from carleman.classification import (
    full_classification, classify_surjectivity, check_invariants, rationality,
    from_bound, upto, empty, everything, OPEN, CLOSED, UNKNOWN,
)
from carleman.errors import InvariantViolation
from carleman.indices import IndexEstimate, IndexMethod, omega
from carleman.properties import full_report
from carleman.weight_sequence import (
    make_gevrey, make_mab, make_qpow, make_log_product, from_log_quotients,
)
from conftest import random_lc_sequence, staircase_sequence, RANDOM_SEEDS
from utils.formatter import format_interval

TERMS = 2000

# beta -> I, Iu, Itilde, S, Su, Stilde for M_{1,beta}
MAB_ALPHA_ONE = {
    0.5: ['[1,inf)', '[1,inf)', '(1,inf)', '(0,1)', '(0,1)', '(0,1]'],
    1.5: ['[1,inf)', '(1,inf)', '(1,inf)', '(0,1)', '(0,1) or (0,1]', '(0,1]'],
    3.0: ['(1,inf)', '(1,inf)', '(1,inf)', '(0,1) or (0,1]', '(0,1) or (0,1]', '(0,1]'],
}


def _rendered(report):
    return [format_interval(v) for v in report.injectivity + report.surjectivity]


@pytest.mark.parametrize('beta', sorted(MAB_ALPHA_ONE))
def test_mab_rows_for_symbolic_parameters(beta):
    report = full_classification(make_mab(1.0, beta, TERMS), use_rationality=False)
    assert _rendered(report) == MAB_ALPHA_ONE[beta]


def test_gevrey_one():
    report = full_classification(make_gevrey(1.0, TERMS))
    assert _rendered(report) == ['[1,inf)', '[1,inf)', '(1,inf)', '(0,1)', '(0,1)', '(0,1]']
    assert report.rational_gamma is True
    assert 'rational-gamma-sharpness' in report.citations


def test_irrational_index():
    gevrey = full_classification(make_gevrey(np.sqrt(2), TERMS))
    assert gevrey.rational_gamma is False
    # closed injectivity endpoints open the matching surjectivity ones
    assert [v.endpoint for v in gevrey.surjectivity] == [OPEN, OPEN, CLOSED]
    assert 'never-bijective' in gevrey.citations

    mab = full_classification(make_mab(np.sqrt(2), 3.0, TERMS))
    assert [v.endpoint for v in mab.surjectivity] == [UNKNOWN, UNKNOWN, CLOSED]
    assert all(v.subset_proven for v in mab.surjectivity)


def test_qpow_has_no_injectivity():
    report = full_classification(make_qpow(2.0, TERMS))
    assert all(v.kind == 'empty' for v in report.injectivity)
    assert _rendered(report)[3:] == ['subset of (0,inf)'] * 3
    assert 'no-relevant-information' in report.citations


def test_logprod_is_never_surjective():
    report = full_classification(make_log_product(2.0, TERMS))
    assert all(v.kind == 'all' for v in report.injectivity)
    assert all(v.kind == 'empty' for v in report.surjectivity)


def test_degenerate_sequence():
    report = full_classification(from_log_quotients(np.ones(500)))
    assert report.properties.is_weight_sequence.refuted
    assert all(v.kind == 'all' for v in report.injectivity)
    assert all(v.kind == 'empty' for v in report.surjectivity)
    assert 'degenerate-sequence' in report.citations


def test_quotient_plateau_is_not_classified_as_degenerate():
    report = full_classification(staircase_sequence(base=3.0))
    assert not report.properties.is_weight_sequence.refuted
    assert 'degenerate-sequence' not in report.citations
    assert all(v.kind == 'from' for v in report.injectivity)


def test_gamma_below_omega_bounds_surjectivity_by_gamma():
    seq = make_mab(2.0, 0.0, 500)
    gamma_estimate = IndexEstimate(1.5, IndexMethod.ALMOST_INCREASING_BISECTION, 500)
    verdicts = classify_surjectivity(seq, full_report(seq), omega(seq), gamma_estimate,
                                     use_rationality=False)
    for verdict in verdicts:
        assert verdict.bound == 1.5
        assert verdict.subset_proven
        assert verdict.endpoint == UNKNOWN


@pytest.mark.parametrize('seq', [
    make_gevrey(0.5, TERMS), make_gevrey(2.5, TERMS), make_mab(2.0, -1.0, TERMS), make_mab(0.5, 2.0, TERMS),
    make_qpow(1.5, TERMS), make_log_product(1.0, TERMS),
], ids=lambda s: s.label)
def test_builtins_are_never_bijective(seq):
    for use_rationality in (True, False):
        report = full_classification(seq, use_rationality=use_rationality)
        check_invariants(report.injectivity, report.surjectivity)


@pytest.mark.parametrize('seed', RANDOM_SEEDS)
def test_random_sequences_are_never_bijective(seed):
    report = full_classification(random_lc_sequence(seed))
    check_invariants(report.injectivity, report.surjectivity)
    for verdict in report.surjectivity:
        if verdict.kind == 'upto':
            assert verdict.bound <= report.omega.as_float() + 1e-9


def test_overlap_raises():
    with pytest.raises(InvariantViolation):
        check_invariants([from_bound(1.0, CLOSED)] * 3, [upto(1.0, CLOSED, 'gamma', True)] * 3)
    with pytest.raises(InvariantViolation):
        check_invariants([everything()] * 3, [upto(2.0, OPEN, 'gamma', True)] * 3)


def test_superset_only_bounds_do_not_overlap():
    check_invariants([from_bound(1.0, OPEN)] * 3, [upto(2.0, CLOSED, 'floor_gamma_plus_one', False)] * 3)
    check_invariants([from_bound(1.0, UNKNOWN)] * 3, [upto(1.0, UNKNOWN, 'gamma', True)] * 3)
    check_invariants([everything()] * 3, [empty()] * 3)


def test_broken_injectivity_chain_raises():
    with pytest.raises(InvariantViolation):
        check_invariants([from_bound(1.0, OPEN), from_bound(1.0, CLOSED), from_bound(1.0, OPEN)], [empty()] * 3)


def test_rationality_is_decided_on_exact_parameters():
    assert rationality(make_mab(1.5, 1.0, 100)) is True
    assert rationality(make_gevrey(np.pi, 100)) is False
    assert rationality(random_lc_sequence(0, 200)) is None


def test_report_schema():
    data = full_classification(make_gevrey(1.0, TERMS)).to_dict()
    assert list(data) == ['sequence', 'terms', 'regularized', 'properties', 'indices', 'series',
                          'admissibility', 'rational_gamma', 'injectivity', 'surjectivity', 'citations']
    assert list(data['injectivity']) == ['A_M', 'Au_M', 'Atilde_M']
    assert list(data['surjectivity']) == ['S_M', 'Su_M', 'Stilde_M']
    assert data['surjectivity']['Stilde_M'] == {'kind': 'upto', 'bound': 1.0, 'endpoint': 'closed',
                                                'subset_proven': True}
    assert data['admissibility']['source'] == 'analytic'
