"""
Growth properties (lc), (dc), (mg), (nq), (snq) decided on a finite prefix
"""
import logging
from dataclasses import dataclass, replace
from enum import Enum
from typing import Dict, Any, Optional, List

import numpy as np

import config
from carleman.series import series_verdict, Verdict
from carleman.weight_sequence import WeightSequence
from utils.stabilization import doubling_prefixes, detect_witness_drift, is_stabilized, format_drift

logger = logging.getLogger(__name__)

PROPERTY_NAMES = ('lc', 'dc', 'mg', 'nq', 'snq')
BOUNDED_TREND = 0.1


class Status(str, Enum):
    HOLDS_ON_PREFIX = 'holds_on_prefix'
    FAILS_AT = 'fails_at'
    FAILS_ON_TREND = 'fails_on_trend'
    INCONCLUSIVE = 'inconclusive'
    ANALYTIC_YES = 'analytic_yes'
    ANALYTIC_NO = 'analytic_no'


@dataclass
class PropertyVerdict:
    """
    Verdict for one growth property

    log_witness is the log of the best constant found on the prefix
    (D for (dc), A for (mg), B for (snq)); it stays in the log domain
    because constants like 2^(p+1) overflow.
    """
    status: Status
    index: Optional[int] = None
    log_witness: Optional[float] = None
    stabilized: bool = True
    detail: str = ''

    @property
    def witness(self) -> Optional[float]:
        if self.log_witness is None or self.log_witness > 700:
            return None
        return float(np.exp(self.log_witness))

    @property
    def holds(self) -> bool:
        if self.status == Status.ANALYTIC_YES:
            return True
        return self.status == Status.HOLDS_ON_PREFIX and self.stabilized

    @property
    def refuted(self) -> bool:
        return self.status in (Status.FAILS_AT, Status.FAILS_ON_TREND, Status.ANALYTIC_NO)

    @property
    def analytic(self) -> bool:
        return self.status in (Status.ANALYTIC_YES, Status.ANALYTIC_NO)

    def to_dict(self) -> Dict[str, Any]:
        data = {
            'status': self.status.value,
            'witness': self.witness,
            'stabilized': self.stabilized,
        }
        if self.index is not None:
            data['index'] = self.index
        if self.log_witness is not None:
            data['log_witness'] = self.log_witness
        if self.detail:
            data['detail'] = self.detail
        return data


@dataclass
class PropertyReport:
    lc: PropertyVerdict
    dc: PropertyVerdict
    mg: PropertyVerdict
    nq: PropertyVerdict
    snq: PropertyVerdict
    is_weight_sequence: PropertyVerdict
    strongly_regular: PropertyVerdict

    def to_dict(self) -> Dict[str, Any]:
        return {
            name: getattr(self, name).to_dict()
            for name in PROPERTY_NAMES + ('is_weight_sequence', 'strongly_regular')
        }


def _prefix_witness(running_max: np.ndarray, offset: int, n: int) -> PropertyVerdict:
    """
    Evaluate a running maximum at the doubling checkpoints

    running_max[i] must hold the witness over indices < i + offset + 1.
    """
    prefixes = [k for k in doubling_prefixes(n) if k - offset - 1 >= 0]
    if not prefixes:
        return PropertyVerdict(Status.INCONCLUSIVE, stabilized=False, detail='prefix too short')
    values = [float(running_max[min(k - offset - 1, len(running_max) - 1)]) for k in prefixes]
    drift = detect_witness_drift(prefixes, values)
    stable = is_stabilized(drift)
    detail = '' if stable else f'fails to stabilize: {format_drift(drift)}'
    return PropertyVerdict(Status.HOLDS_ON_PREFIX, log_witness=values[-1], stabilized=stable, detail=detail)


def check_lc(seq: WeightSequence) -> PropertyVerdict:
    """Log-convexity: the quotients m_p are nondecreasing"""
    steps = np.diff(seq.log_m)
    bad = np.nonzero(steps < -config.LC_SLACK)[0]
    if len(bad):
        p = int(bad[0]) + 1
        return PropertyVerdict(Status.FAILS_AT, index=p,
                               detail=f"m_{p} < m_{p - 1}")
    return PropertyVerdict(Status.HOLDS_ON_PREFIX)


def check_dc(seq: WeightSequence) -> PropertyVerdict:
    """(dc): M_{p+1} <= D^{p+1} M_p, witness D = sup m_p^(1/(p+1))"""
    log_m = seq.log_m
    ratio = log_m / np.arange(1, len(log_m) + 1, dtype=float)
    return _prefix_witness(np.maximum.accumulate(ratio), 0, len(log_m))


def _mg_direct_scan(seq: WeightSequence) -> np.ndarray:
    """Running max over s = p+q of max_p (log M_s - log M_p - log M_{s-p}) / s"""
    n = min(seq.n_terms, config.MG_SCAN_LIMIT)
    log_M = seq.log_M[:n]
    best = np.empty(n - 1)
    for s in range(1, n):
        p = np.arange(0, s + 1)
        best[s - 1] = np.max(log_M[s] - log_M[p] - log_M[s - p]) / s
    return np.maximum.accumulate(best)


def check_mg(seq: WeightSequence, lc: Optional[PropertyVerdict] = None) -> PropertyVerdict:
    """
    (mg): M_{p+q} <= A^{p+q} M_p M_q

    For log-convex input uses sup_p m_p / M_p^(1/p); otherwise scans
    all pairs directly on a capped prefix.
    """
    lc = lc or check_lc(seq)
    if lc.status == Status.FAILS_AT:
        logger.info(f"{seq.label} is not log-convex, scanning (mg) pairs directly")
        running = _mg_direct_scan(seq)
        verdict = _prefix_witness(running, 0, len(running))
        verdict.detail = (verdict.detail + ' direct scan').strip()
        return verdict
    log_m = seq.log_m
    p = np.arange(1, len(log_m), dtype=float)
    ratio = log_m[1:] - seq.log_M[1:-1] / p
    return _prefix_witness(np.maximum.accumulate(ratio), 1, len(log_m))


def check_nq(seq: WeightSequence) -> PropertyVerdict:
    """(nq): sum M_k / ((k+1) M_{k+1}) < infinity, via the series heuristic"""
    log_m = seq.log_m
    terms = -log_m - np.log(np.arange(1, len(log_m) + 1, dtype=float))
    result = series_verdict(terms)
    if result.verdict == Verdict.CONVERGES:
        status = Status.HOLDS_ON_PREFIX
    elif result.verdict == Verdict.DIVERGES:
        status = Status.FAILS_ON_TREND
    else:
        status = Status.INCONCLUSIVE
    return PropertyVerdict(status, stabilized=status != Status.INCONCLUSIVE,
                           detail=f"{result.method.value}: {result.detail}")


def check_snq(seq: WeightSequence) -> PropertyVerdict:
    """
    (snq): sum_{q>=p} M_q / ((q+1) M_{q+1}) <= B M_p / M_{p+1}

    B_N = max_{p<=N/2} m_p * sum_{q=p}^{N} 1/((q+1) m_q), in log form.
    """
    log_m = seq.log_m
    n = len(log_m)
    log_t = -log_m - np.log(np.arange(1, n + 1, dtype=float))
    prefixes = [k for k in doubling_prefixes(n, depth=4) if k >= 2]
    if not prefixes:
        return PropertyVerdict(Status.INCONCLUSIVE, stabilized=False, detail='prefix too short')
    values = []
    for k in prefixes:
        tails = np.logaddexp.accumulate(log_t[:k][::-1])[::-1]
        half = k // 2 + 1
        values.append(float(np.max(log_m[:half] + tails[:half])))
    drift = detect_witness_drift(prefixes, values, projected=True)
    stable = is_stabilized(drift)
    return PropertyVerdict(Status.HOLDS_ON_PREFIX, log_witness=values[-1], stabilized=stable,
                           detail='' if stable else f'fails to stabilize: {format_drift(drift)}')


def is_weight_sequence(seq: WeightSequence, lc: Optional[PropertyVerdict] = None) -> PropertyVerdict:
    """Log-convex with quotients tending to infinity on the prefix trend"""
    lc = lc or check_lc(seq)
    if lc.status == Status.FAILS_AT:
        return replace(lc, detail=f"not log-convex: {lc.detail}")
    log_m = seq.log_m
    n = len(log_m)
    if n < 8:
        return PropertyVerdict(Status.INCONCLUSIVE, stabilized=False, detail='prefix too short')
    early = log_m[n // 2 - 1] - log_m[n // 4 - 1]
    late = log_m[n - 1] - log_m[n // 2 - 1]
    if late > 0 and late >= 0.75 * early:
        return PropertyVerdict(Status.HOLDS_ON_PREFIX, detail=f"quotient growth {late:.4g} per doubling")
    # a plateau only refutes m_p -> infinity when growth has faded since sqrt(N) as well
    root = max(int(np.sqrt(n)), 1)
    head = log_m[root - 1] - log_m[0]
    tail = log_m[n - 1] - log_m[root - 1]
    if tail <= BOUNDED_TREND * head:
        return PropertyVerdict(Status.FAILS_ON_TREND,
                               detail=f"quotients level off ({head:.4g} up to sqrt(N), {tail:.4g} after)")
    return PropertyVerdict(Status.INCONCLUSIVE, stabilized=False,
                           detail=f"quotient plateau ({early:.4g} then {late:.4g}) after growth {tail:.4g} since sqrt(N)")


def _analytic_facts(seq: WeightSequence) -> Dict[str, bool]:
    """Known truth values for the built-in families"""
    name = seq.family.name
    if name in ('gevrey', 'mab'):
        return {'lc': True, 'dc': True, 'mg': True, 'nq': True, 'snq': True, 'is_weight_sequence': True}
    if name == 'qpow':
        return {'lc': True, 'dc': True, 'mg': False, 'nq': True, 'snq': True, 'is_weight_sequence': True}
    if name == 'logprod':
        beta = seq.family.params[0]
        return {'lc': True, 'dc': True, 'mg': True, 'nq': beta > 1, 'snq': False, 'is_weight_sequence': True}
    return {}


def _overlay(verdict: PropertyVerdict, truth: bool) -> PropertyVerdict:
    status = Status.ANALYTIC_YES if truth else Status.ANALYTIC_NO
    return replace(verdict, status=status, index=None)


def _implied(verdict: PropertyVerdict, by: str) -> PropertyVerdict:
    return replace(verdict, status=Status.HOLDS_ON_PREFIX, index=None, stabilized=True,
                   detail=f"implied by {by}")


def _conjunction(parts: List[PropertyVerdict]) -> PropertyVerdict:
    if all(part.holds for part in parts):
        if all(part.analytic for part in parts):
            return PropertyVerdict(Status.ANALYTIC_YES)
        return PropertyVerdict(Status.HOLDS_ON_PREFIX)
    failing = [part for part in parts if part.refuted]
    if failing:
        if any(part.status == Status.ANALYTIC_NO for part in failing):
            return PropertyVerdict(Status.ANALYTIC_NO)
        return PropertyVerdict(Status.FAILS_ON_TREND)
    return PropertyVerdict(Status.INCONCLUSIVE, stabilized=False, detail='a component did not stabilize')


def full_report(seq: WeightSequence) -> PropertyReport:
    """
    Run every checker and reconcile the verdicts

    Built-in families get analytic verdicts; the implications
    (mg) => (dc) and (snq) => (nq) are then enforced on the result.
    """
    lc = check_lc(seq)
    verdicts = {
        'lc': lc,
        'dc': check_dc(seq),
        'mg': check_mg(seq, lc),
        'nq': check_nq(seq),
        'snq': check_snq(seq),
        'is_weight_sequence': is_weight_sequence(seq, lc),
    }

    for name, truth in _analytic_facts(seq).items():
        verdicts[name] = _overlay(verdicts[name], truth)

    if verdicts['mg'].holds and not verdicts['dc'].holds:
        verdicts['dc'] = _implied(verdicts['dc'], '(mg)')
    if verdicts['snq'].holds and not verdicts['nq'].holds:
        verdicts['nq'] = _implied(verdicts['nq'], '(snq)')
    for name in ('mg', 'snq'):
        if not verdicts[name].stabilized and verdicts[name].status == Status.HOLDS_ON_PREFIX:
            logger.warning(f"{seq.label}: ({name}) witness did not stabilize")

    strongly_regular = _conjunction([verdicts['lc'], verdicts['mg'], verdicts['snq']])
    logger.info(f"Property report for {seq.label}: strongly regular = {strongly_regular.status.value}")
    return PropertyReport(strongly_regular=strongly_regular, **verdicts)
