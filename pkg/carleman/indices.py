"""
Growth index estimators: omega(M), gamma(M) and the exponent of convergence
"""
import logging
from dataclasses import dataclass, field
from enum import Enum
from typing import Callable, Dict, Any, Optional, List, Tuple

import numpy as np

import config
from carleman.errors import InsufficientDataError, InvalidParameterError
from carleman.properties import check_lc, Status
from carleman.weight_sequence import WeightSequence
from utils.stabilization import doubling_prefixes, detect_witness_drift, is_stabilized

logger = logging.getLogger(__name__)

INFINITE_SLOPE = 1e6
SLOPE_GROWTH = 1.5


class IndexMethod(str, Enum):
    LIMINF_DIRECT = 'liminf_direct'
    EXPONENT_OF_CONVERGENCE = 'exponent_of_convergence'
    ALMOST_INCREASING_BISECTION = 'almost_increasing_bisection'
    GAMMA_BETA_BISECTION = 'gamma_beta_bisection'
    CLOSED_FORM = 'closed_form'


@dataclass
class IndexEstimate:
    """
    Estimate of a growth index

    An infinite index is a flag, never a float inf inside value.
    """
    value: Optional[float]
    method: IndexMethod
    prefix: int
    infinite: bool = False
    diagnostics: Dict[str, Any] = field(default_factory=dict)

    @property
    def is_zero(self) -> bool:
        return not self.infinite and self.value <= config.INDEX_ZERO_TOL

    def as_float(self) -> float:
        return float('inf') if self.infinite else float(self.value)

    def to_dict(self) -> Dict[str, Any]:
        return {
            'value': 'inf' if self.infinite else self.value,
            'method': self.method.value,
            'prefix': self.prefix,
            'diagnostics': self.diagnostics,
        }


def _closed_form_index(seq: WeightSequence) -> Optional[IndexEstimate]:
    """omega and gamma coincide in closed form for every built-in family"""
    name = seq.family.name
    if name in ('gevrey', 'mab'):
        return IndexEstimate(seq.family.params[0], IndexMethod.CLOSED_FORM, seq.n_terms)
    if name == 'qpow':
        return IndexEstimate(None, IndexMethod.CLOSED_FORM, seq.n_terms, infinite=True)
    if name == 'logprod':
        return IndexEstimate(0.0, IndexMethod.CLOSED_FORM, seq.n_terms)
    return None


def _require_terms(n: int):
    if n < config.MIN_TERMS:
        raise InsufficientDataError(f"Need at least {config.MIN_TERMS} terms, got {n}")


def _tail_infima(log_values: np.ndarray) -> Tuple[List[float], List[int]]:
    """Infimum of log c_p / log(p+1) over [k/2, k] for k = N/4, N/2, N, with the p+1 attaining it"""
    n = len(log_values)
    ratios = log_values[1:] / np.log(np.arange(2, n + 1, dtype=float))
    infima, where = [], []
    for k in doubling_prefixes(n):
        window = ratios[k // 2 - 1:k - 1]
        i = int(np.argmin(window))
        infima.append(float(window[i]))
        where.append(k // 2 + 1 + i)
    return infima, where


def _order_on_prefix(log_values: np.ndarray) -> Tuple[Optional[float], bool, List[float], List[float]]:
    """
    Order liminf log c_p / log(p+1), read from running tail infima

    The value is the infimum of the ratio over [N/2, N]. Secant slopes of
    log c against x = log(p+1) over the windows ending at N/4, N/2 and N,
    extrapolated in h = dlog(x)/dx, can only lower it, and only when the
    slopes are positive and agree within SLOPE_GROWTH; plateaus and jumps
    leave the tail infimum alone. When the tail infima climb at every
    checkpoint the ratio is still approaching its limit from below; the
    infima are then extrapolated in log(x)/x and the result is kept between
    the last infimum and the secant value.

    Returns:
        (value, infinite, slopes, tail infima)
    """
    n = len(log_values)
    marks = np.array([n // 8, n // 4, n // 2, n])
    x = np.log(marks.astype(float))
    y = log_values[marks - 1]
    slopes = np.diff(y) / np.diff(x)
    h = np.diff(np.log(x)) / np.diff(x)
    infima, where = _tail_infima(log_values)
    climbing = all(b > a for a, b in zip(infima, infima[1:]))
    slope_list = [float(s) for s in slopes]

    if climbing and (slopes[-1] > INFINITE_SLOPE or (
            slopes[0] > 0 and slopes[1] >= SLOPE_GROWTH * slopes[0] and slopes[2] >= SLOPE_GROWTH * slopes[1])):
        return None, True, slope_list, infima

    secant = float((slopes[2] * h[1] - slopes[1] * h[2]) / (h[1] - h[2]))
    tail = infima[-1]
    smooth = bool(np.all(slopes > 0)) and slopes.max() <= SLOPE_GROWTH * slopes.min()
    if not smooth:
        value = tail
    elif not climbing:
        value = min(secant, tail)
    else:
        log_q = np.log(np.array(where[-2:], dtype=float))
        u = np.log(log_q) / log_q
        fitted = secant
        if u[0] > u[1]:
            fitted = float((infima[-1] * u[0] - infima[-2] * u[1]) / (u[0] - u[1]))
        value = max(tail, min(secant, fitted))
    return max(value, 0.0), False, slope_list, infima


def _order_estimate(log_values: np.ndarray) -> Tuple[Optional[float], bool, Dict[str, Any]]:
    """Order on the full prefix plus the same estimate on N/4 and N/2"""
    n = len(log_values)
    value, infinite, slopes, infima = _order_on_prefix(log_values)
    partial = []
    for k in doubling_prefixes(n):
        if k < config.MIN_TERMS:
            continue
        v, inf, _, _ = _order_on_prefix(log_values[:k])
        partial.append('inf' if inf else v)
    diagnostics = {'partial_estimates': partial, 'window_slopes': slopes, 'tail_infimum': infima}
    if len(partial) >= 2 and not isinstance(partial[-1], str) and not isinstance(partial[-2], str):
        diagnostics['spread'] = abs(partial[-1] - partial[-2])
    return value, infinite, diagnostics


def omega(seq: WeightSequence, closed_form: bool = True) -> IndexEstimate:
    """
    Growth index omega(M) = liminf log m_p / log p

    Args:
        seq: sequence, expected log-convex
        closed_form: use the exact value for built-in families

    Returns:
        IndexEstimate, possibly flagged infinite
    """
    if closed_form:
        exact = _closed_form_index(seq)
        if exact is not None:
            return exact
    log_m = seq.log_m
    _require_terms(len(log_m))
    if check_lc(seq).status == Status.FAILS_AT:
        logger.warning(f"{seq.label} is not log-convex, omega estimate may be meaningless")
    value, infinite, diagnostics = _order_estimate(log_m)
    logger.info(f"omega({seq.label}) ~ {'inf' if infinite else f'{value:.4f}'}")
    return IndexEstimate(value, IndexMethod.LIMINF_DIRECT, seq.n_terms, infinite, diagnostics)


def exponent_of_convergence(c, is_log: bool = False) -> IndexEstimate:
    """
    Exponent of convergence limsup log p / log c_p of a nondecreasing sequence

    Args:
        c: positive nondecreasing values, or their logs when is_log is set
        is_log: whether c already holds log c_p

    Returns:
        IndexEstimate; zero when c grows faster than any power, infinite
        when it does not grow polynomially at all
    """
    values = np.asarray(c, dtype=float)
    log_c = values if is_log else np.log(values)
    if not np.all(np.isfinite(log_c)):
        raise InvalidParameterError("Sequence must be positive and finite")
    if np.any(np.diff(log_c) < -config.LC_SLACK):
        raise InvalidParameterError("Sequence must be nondecreasing")
    _require_terms(len(log_c))
    order, infinite, diagnostics = _order_estimate(log_c)
    if infinite:
        return IndexEstimate(0.0, IndexMethod.EXPONENT_OF_CONVERGENCE, len(log_c), False, diagnostics)
    if order <= 0:
        return IndexEstimate(None, IndexMethod.EXPONENT_OF_CONVERGENCE, len(log_c), True, diagnostics)
    return IndexEstimate(1.0 / order, IndexMethod.EXPONENT_OF_CONVERGENCE, len(log_c), False, diagnostics)


def _largest_accepted(accept: Callable[[float], bool]) -> Tuple[Optional[float], bool, List[float]]:
    """Doubling search then bisection for the largest accepted parameter"""
    trail = []
    lo, hi = 0.0, 1.0
    while accept(hi):
        trail.append(hi)
        lo, hi = hi, 2.0 * hi
        if hi > config.GAMMA_SEARCH_CAP:
            return None, True, trail
    while hi - lo > config.BISECTION_TOL:
        mid = 0.5 * (lo + hi)
        if accept(mid):
            lo = mid
        else:
            hi = mid
    trail.append(lo)
    return lo, False, trail


def _max_drawdown(f: np.ndarray, prefixes: List[int]) -> List[float]:
    """max_{p<=q<k} f(p) - f(q) for each prefix k, i.e. log a_k"""
    drawdown = np.maximum.accumulate(np.maximum.accumulate(f) - f)
    return [float(drawdown[k - 1]) for k in prefixes]


def gamma_almost_increasing(seq: WeightSequence, closed_form: bool = False) -> IndexEstimate:
    """
    gamma(M) as the sup of gamma with m_p / (p+1)^gamma almost increasing

    A candidate is accepted when the almost-increasing constant a_N(gamma)
    stops growing across the prefixes N/4, N/2, N.
    """
    if closed_form:
        exact = _closed_form_index(seq)
        if exact is not None:
            return exact
    log_m = seq.log_m
    _require_terms(len(log_m))
    if check_lc(seq).status == Status.FAILS_AT:
        logger.warning(f"{seq.label} is not log-convex, gamma estimate may be meaningless")
    x = np.log(np.arange(1, len(log_m) + 1, dtype=float))
    prefixes = doubling_prefixes(len(log_m))

    def accept(gamma: float) -> bool:
        return is_stabilized(detect_witness_drift(prefixes, _max_drawdown(log_m - gamma * x, prefixes)))

    value, infinite, trail = _largest_accepted(accept)
    diagnostics = {'search_trail': trail}
    if not infinite:
        diagnostics['log_constant'] = _max_drawdown(log_m - value * x, prefixes)
    return IndexEstimate(value, IndexMethod.ALMOST_INCREASING_BISECTION, seq.n_terms, infinite, diagnostics)


def _gamma_beta_constant(log_m: np.ndarray, beta: float, k: int) -> Optional[float]:
    """log A_k(beta), with the tail past k completed by the integral test; None if the tail diverges"""
    log_t = -log_m[:k] / beta
    local = -(log_t[k - 1] - log_t[k // 2 - 1]) / np.log(k / (k // 2))
    if local <= 1.0:
        return None
    remainder = log_t[k - 1] + np.log(k) - np.log(local - 1.0)
    tails = np.logaddexp(np.logaddexp.accumulate(log_t[::-1])[::-1], remainder)
    half = k // 2 + 1
    p = np.arange(half, dtype=float)
    return float(np.max(log_m[:half] / beta - np.log(p + 1.0) + tails[:half]))


def gamma_via_gamma_beta(seq: WeightSequence, closed_form: bool = False) -> IndexEstimate:
    """gamma(M) as the sup of beta for which the quotients satisfy (gamma_beta)"""
    if closed_form:
        exact = _closed_form_index(seq)
        if exact is not None:
            return exact
    log_m = seq.log_m
    _require_terms(len(log_m))
    prefixes = doubling_prefixes(len(log_m))

    def accept(beta: float) -> bool:
        values = [_gamma_beta_constant(log_m, beta, k) for k in prefixes]
        if any(v is None for v in values):
            return False
        return is_stabilized(detect_witness_drift(prefixes, values))

    value, infinite, trail = _largest_accepted(accept)
    return IndexEstimate(value, IndexMethod.GAMMA_BETA_BISECTION, seq.n_terms, infinite,
                         {'search_trail': trail})


def gamma(seq: WeightSequence, closed_form: bool = True,
          omega_estimate: Optional[IndexEstimate] = None) -> IndexEstimate:
    """
    Authoritative gamma(M) estimate

    Uses the almost-increasing estimator and caps it by the omega
    estimate, since gamma(M) <= omega(M) always holds.
    """
    if closed_form:
        exact = _closed_form_index(seq)
        if exact is not None:
            return exact
    estimate = gamma_almost_increasing(seq)
    bound = omega_estimate or omega(seq, closed_form=False)
    if not bound.infinite and (estimate.infinite or estimate.value > bound.value):
        estimate.diagnostics['uncapped'] = 'inf' if estimate.infinite else estimate.value
        estimate.diagnostics['capped_by_omega'] = True
        estimate.value, estimate.infinite = bound.value, False
    return estimate
