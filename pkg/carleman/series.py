"""
Convergence verdicts for the criterion series built from a quotient sequence
"""
import logging
from dataclasses import dataclass, asdict
from enum import Enum
from typing import Dict, Any, Optional, Tuple

import numpy as np

from carleman.errors import InvalidParameterError
from carleman.weight_sequence import WeightSequence

logger = logging.getLogger(__name__)

TREND_WINDOW = 0.1
PARTIAL_SUM_RATIO = 0.999
MIN_FULL_BLOCKS = 4


class Verdict(str, Enum):
    DIVERGES = 'diverges'
    CONVERGES = 'converges'
    INCONCLUSIVE = 'inconclusive'


class Method(str, Enum):
    CLOSED_FORM_RULE = 'closed_form_rule'
    CONDENSATION = 'condensation'
    PARTIAL_SUM_TREND = 'partial_sum_trend'


@dataclass
class SeriesVerdict:
    """Three-valued convergence verdict with the method that produced it"""
    verdict: Verdict
    method: Method
    partial_sum: Optional[float] = None
    detail: str = ''

    @property
    def diverges(self) -> bool:
        return self.verdict == Verdict.DIVERGES

    @property
    def converges(self) -> bool:
        return self.verdict == Verdict.CONVERGES

    def to_dict(self) -> Dict[str, Any]:
        data = asdict(self)
        data['verdict'] = self.verdict.value
        data['method'] = self.method.value
        return data


def _power_log_rule(exponent: float, log_power: float) -> Verdict:
    """sum n^-exponent * log^-log_power(n) converges iff exponent > 1, or = 1 with log_power > 1"""
    if abs(exponent - 1.0) <= 1e-12:
        return Verdict.CONVERGES if log_power > 1.0 + 1e-12 else Verdict.DIVERGES
    return Verdict.CONVERGES if exponent > 1.0 else Verdict.DIVERGES


def _closed_form(seq: WeightSequence, gamma: float, kind: str) -> Optional[Tuple[Verdict, str]]:
    """Closed-form verdict for built-in families; None when no rule applies"""
    name = seq.family.name
    if name == 'qpow':
        return Verdict.CONVERGES, "geometric decay of q^(-(2p+1)/gamma)"
    if name in ('gevrey', 'mab', 'logprod'):
        if name == 'gevrey':
            alpha, beta = seq.family.params[0], 0.0
        elif name == 'mab':
            alpha, beta = seq.family.params
        else:
            alpha, beta = 0.0, seq.family.params[0]
        if kind == 'mu':
            exponent, log_power = alpha / gamma, beta / gamma
        else:
            exponent, log_power = (alpha + 1.0) / (gamma + 1.0), beta / (gamma + 1.0)
        verdict = _power_log_rule(exponent, log_power)
        return verdict, f"terms ~ p^-{exponent:.6g} log^-{log_power:.6g} p"
    return None


def series_verdict(log_terms: np.ndarray) -> SeriesVerdict:
    """
    Heuristic verdict for a positive series given the logs of its terms

    Dyadic block sums (Cauchy condensation) decide clear cases from the
    trend of log(k * b_k) against log k; the boundary window falls back
    to the growth of partial sums against log log n.
    """
    log_terms = np.asarray(log_terms, dtype=float)
    n = len(log_terms)
    n_blocks = int(np.floor(np.log2(n + 1)))
    if n_blocks < MIN_FULL_BLOCKS:
        return SeriesVerdict(Verdict.INCONCLUSIVE, Method.CONDENSATION, None,
                             f"only {n_blocks} full dyadic blocks")

    # block k holds indices p with 2^k <= p+1 < 2^(k+1)
    block_logs = np.array([
        np.logaddexp.reduce(log_terms[2 ** k - 1:2 ** (k + 1) - 1]) for k in range(n_blocks)
    ])
    ks = np.arange(n_blocks)
    tail = ks[max(n_blocks // 2, 1):]
    tau = float(np.polyfit(np.log(tail), np.log(tail) + block_logs[tail], 1)[0])

    partial = float(np.sum(np.exp(np.minimum(log_terms, 700.0))))
    if tau >= TREND_WINDOW:
        return SeriesVerdict(Verdict.DIVERGES, Method.CONDENSATION, partial,
                             f"condensed trend {tau:.4g}")
    if tau <= -TREND_WINDOW:
        return SeriesVerdict(Verdict.CONVERGES, Method.CONDENSATION, partial,
                             f"condensed trend {tau:.4g}")

    if n < 64:
        return SeriesVerdict(Verdict.INCONCLUSIVE, Method.PARTIAL_SUM_TREND, partial,
                             f"condensed trend {tau:.4g} in the boundary window, prefix too short")
    sums = np.cumsum(np.exp(np.minimum(log_terms, 700.0)))
    x = np.log(np.log(np.arange(1, n + 1, dtype=float) + 1.0))
    a, b, c = n // 16, n // 4, n - 1
    slope_early = (sums[b] - sums[a]) / (x[b] - x[a])
    slope_late = (sums[c] - sums[b]) / (x[c] - x[b])
    if slope_early <= 0:
        return SeriesVerdict(Verdict.INCONCLUSIVE, Method.PARTIAL_SUM_TREND, partial,
                             "partial sums stopped growing")
    ratio = float(slope_late / slope_early)
    if ratio >= PARTIAL_SUM_RATIO:
        return SeriesVerdict(Verdict.DIVERGES, Method.PARTIAL_SUM_TREND, partial,
                             f"partial sums keep pace with log log n (ratio {ratio:.6g})")
    return SeriesVerdict(Verdict.INCONCLUSIVE, Method.PARTIAL_SUM_TREND, partial,
                         f"condensed trend {tau:.4g}, partial-sum ratio {ratio:.6g}")


def _validate_gamma(gamma: float):
    if not (np.isfinite(gamma) and gamma > 0):
        raise InvalidParameterError(f"Reference index must be positive and finite, got {gamma}")


def mu_series(seq: WeightSequence, gamma: float, closed_form: bool = True) -> SeriesVerdict:
    """Verdict for sum (m_p)^(-1/gamma)"""
    _validate_gamma(gamma)
    if closed_form:
        rule = _closed_form(seq, gamma, 'mu')
        if rule is not None:
            return SeriesVerdict(rule[0], Method.CLOSED_FORM_RULE, None, rule[1])
    return series_verdict(-seq.log_m / gamma)


def sigma_series(seq: WeightSequence, gamma: float, closed_form: bool = True) -> SeriesVerdict:
    """Verdict for sum ((p+1) m_p)^(-1/(gamma+1))"""
    _validate_gamma(gamma)
    if closed_form:
        rule = _closed_form(seq, gamma, 'sigma')
        if rule is not None:
            return SeriesVerdict(rule[0], Method.CLOSED_FORM_RULE, None, rule[1])
    p = np.arange(len(seq.log_m), dtype=float)
    return series_verdict(-(np.log(p + 1.0) + seq.log_m) / (gamma + 1.0))
