"""
Weight sequences stored in the logarithmic domain
"""
import logging
from dataclasses import dataclass, field
from typing import Callable, Dict, Any, Optional, Tuple

import numpy as np

import config
from carleman.errors import InvalidParameterError, NormalizationError

logger = logging.getLogger(__name__)

BUILTIN_FAMILIES = ('gevrey', 'mab', 'qpow', 'logprod')


@dataclass(frozen=True)
class Family:
    """Family tag with its exact parameters"""
    name: str = 'custom'
    params: Tuple[float, ...] = ()

    @property
    def is_builtin(self) -> bool:
        return self.name in BUILTIN_FAMILIES

    def describe(self) -> str:
        if not self.params:
            return self.name
        return f"{self.name}:{','.join(format(p, 'g') for p in self.params)}"


CUSTOM = Family()


def log_factorials(n_terms: int) -> np.ndarray:
    """Return log(p!) for p = 0..n_terms-1"""
    out = np.zeros(n_terms)
    if n_terms > 1:
        out[1:] = np.cumsum(np.log(np.arange(1, n_terms, dtype=float)))
    return out


def _loglog_e_plus(n_terms: int) -> np.ndarray:
    """Cumulative sums of log log(e+m) for m = 0..n_terms-1"""
    return np.cumsum(np.log(np.log(np.e + np.arange(n_terms, dtype=float))))


def _family_quotient_rule(family: Family) -> Optional[Callable[[int], float]]:
    """Closed-form p -> log m_p for built-in families"""
    if family.name == 'gevrey':
        alpha, = family.params
        return lambda p: alpha * np.log(p + 1.0)
    if family.name == 'mab':
        alpha, beta = family.params
        return lambda p: alpha * np.log(p + 1.0) + beta * np.log(np.log(np.e + p + 1.0))
    if family.name == 'qpow':
        q, = family.params
        return lambda p: (2 * p + 1) * np.log(q)
    if family.name == 'logprod':
        beta, = family.params
        return lambda p: beta * np.log(np.log(np.e + p + 1.0))
    return None


@dataclass(frozen=True, eq=False)
class WeightSequence:
    """
    Sequence (M_p) kept as log M_p with M_0 = 1

    The quotient view log m_p = log M_{p+1} - log M_p is always derived
    from log_M and never stored on its own.
    """
    log_M: np.ndarray
    family: Family = CUSTOM
    label: str = 'custom'
    regularized: bool = False
    quotient_rule: Optional[Callable[[int], float]] = field(default=None, repr=False)

    def __post_init__(self):
        values = np.array(self.log_M, dtype=float)
        values.flags.writeable = False
        object.__setattr__(self, 'log_M', values)

    @property
    def n_terms(self) -> int:
        return len(self.log_M)

    @property
    def log_m(self) -> np.ndarray:
        return np.diff(self.log_M)

    quotients = log_m

    def to_dict(self) -> Dict[str, Any]:
        return {
            'sequence': self.label,
            'family': self.family.describe(),
            'terms': self.n_terms,
            'regularized': self.regularized,
        }


def _check_terms(n_terms: int):
    if int(n_terms) != n_terms or n_terms < 2:
        raise InvalidParameterError(f"n_terms must be an integer >= 2, got {n_terms}")


def _builtin(log_M: np.ndarray, family: Family, label: str, regularized: bool = False) -> WeightSequence:
    rule = None if regularized else _family_quotient_rule(family)
    return WeightSequence(log_M, family, label, regularized, rule)


def lower_convex_minorant(values: np.ndarray) -> np.ndarray:
    """
    Greatest convex minorant of p -> values[p] on {0, ..., N-1}

    Monotone-chain lower hull followed by linear interpolation between
    the hull vertices.
    """
    n = len(values)
    hull = []
    for p in range(n):
        while len(hull) >= 2:
            a, b = hull[-2], hull[-1]
            # drop b if it lies on or above the chord a -> p
            if (values[b] - values[a]) * (p - a) >= (values[p] - values[a]) * (b - a):
                hull.pop()
            else:
                break
        hull.append(p)
    return np.interp(np.arange(n), hull, values[hull])


def make_gevrey(alpha: float, n_terms: int) -> WeightSequence:
    """
    Gevrey sequence M_p = (p!)^alpha

    Args:
        alpha: Gevrey order, positive
        n_terms: number of terms, at least 2

    Returns:
        WeightSequence tagged gevrey:alpha
    """
    if not alpha > 0:
        raise InvalidParameterError(f"Gevrey order must be positive, got {alpha}")
    _check_terms(n_terms)
    return _builtin(alpha * log_factorials(int(n_terms)), Family('gevrey', (float(alpha),)),
                    f"gevrey:{alpha:g}")


def make_mab(alpha: float, beta: float, n_terms: int) -> WeightSequence:
    """
    Sequence M_p = (p!)^alpha * prod_{m<=p} log^beta(e+m)

    When beta < 0 the raw terms may fail log-convexity for small p; the
    result is then replaced by its greatest log-convex minorant and
    flagged as regularized.
    """
    if not alpha > 0:
        raise InvalidParameterError(f"alpha must be positive, got {alpha}")
    if not np.isfinite(beta):
        raise InvalidParameterError(f"beta must be finite, got {beta}")
    _check_terms(n_terms)
    n = int(n_terms)
    raw = alpha * log_factorials(n) + beta * _loglog_e_plus(n)
    family = Family('mab', (float(alpha), float(beta)))
    label = f"mab:{alpha:g},{beta:g}"
    if np.any(np.diff(raw, 2) < -config.LC_SLACK):
        logger.info(f"{label} is not log-convex on its first terms, using convex minorant")
        return _builtin(lower_convex_minorant(raw), family, label, regularized=True)
    return _builtin(raw, family, label)


def make_qpow(q: float, n_terms: int) -> WeightSequence:
    """Sequence M_p = q^(p^2), q > 1"""
    if not q > 1:
        raise InvalidParameterError(f"q must be greater than 1, got {q}")
    _check_terms(n_terms)
    p = np.arange(int(n_terms), dtype=float)
    return _builtin(p * p * np.log(q), Family('qpow', (float(q),)), f"qpow:{q:g}")


def make_log_product(beta: float, n_terms: int) -> WeightSequence:
    """Sequence M_p = prod_{m<=p} log^beta(e+m), beta > 0"""
    if not beta > 0:
        raise InvalidParameterError(f"beta must be positive, got {beta}")
    _check_terms(n_terms)
    return _builtin(beta * _loglog_e_plus(int(n_terms)), Family('logprod', (float(beta),)),
                    f"logprod:{beta:g}")


def from_log_table(values, label: str = 'custom') -> WeightSequence:
    """Custom sequence from a table of log M_p with log M_0 = 0"""
    table = np.asarray(values, dtype=float).ravel()
    if len(table) < 2:
        raise InvalidParameterError(f"A sequence needs at least 2 terms, got {len(table)}")
    if not np.all(np.isfinite(table)):
        raise InvalidParameterError("Log table contains non-finite values")
    if abs(table[0]) > 1e-12:
        raise NormalizationError(f"First log-term must be 0 (M_0 = 1), got {table[0]}")
    table = table.copy()
    table[0] = 0.0
    return WeightSequence(table, CUSTOM, label)


def from_log_quotients(values, label: str = 'custom') -> WeightSequence:
    """Custom sequence from log m_p; log M_p is rebuilt by cumulative sum"""
    quotients = np.asarray(values, dtype=float).ravel()
    if len(quotients) < 1:
        raise InvalidParameterError("A sequence needs at least one quotient")
    return from_log_table(np.concatenate(([0.0], np.cumsum(quotients))), label)


def _shift_family(family: Family, s: float) -> Family:
    """Family of (p!)^s M_p when it stays inside a built-in family"""
    if family.name == 'gevrey':
        alpha = family.params[0] + s
        return Family('gevrey', (alpha,)) if alpha > 0 else CUSTOM
    if family.name == 'mab':
        alpha = family.params[0] + s
        if alpha > 0:
            return Family('gevrey', (alpha,)) if family.params[1] == 0 else Family('mab', (alpha, family.params[1]))
        if alpha == 0 and family.params[1] > 0:
            return Family('logprod', (family.params[1],))
        return CUSTOM
    if family.name == 'logprod' and s > 0:
        return Family('mab', (float(s), family.params[0]))
    return CUSTOM


def _power_family(family: Family, s: float) -> Family:
    if family.name == 'gevrey':
        return Family('gevrey', (s * family.params[0],))
    if family.name == 'mab':
        return Family('mab', (s * family.params[0], s * family.params[1]))
    if family.name == 'qpow':
        return Family('qpow', (family.params[0] ** s,))
    if family.name == 'logprod':
        return Family('logprod', (s * family.params[0],))
    return CUSTOM


def _derived(seq: WeightSequence, log_M: np.ndarray, family: Family, label: str) -> WeightSequence:
    rule = None if seq.regularized else _family_quotient_rule(family)
    return WeightSequence(log_M, family, label, seq.regularized, rule)


def shift(seq: WeightSequence, s: float) -> WeightSequence:
    """(p!)^s M_p; s may be negative"""
    if not np.isfinite(s):
        raise InvalidParameterError(f"shift must be finite, got {s}")
    log_M = seq.log_M + s * log_factorials(seq.n_terms)
    return _derived(seq, log_M, _shift_family(seq.family, s), f"shift({seq.label},{s:g})")


def hat(seq: WeightSequence) -> WeightSequence:
    """p! M_p"""
    log_M = seq.log_M + log_factorials(seq.n_terms)
    return _derived(seq, log_M, _shift_family(seq.family, 1.0), f"hat({seq.label})")


def check(seq: WeightSequence) -> WeightSequence:
    """M_p / p!"""
    log_M = seq.log_M - log_factorials(seq.n_terms)
    return _derived(seq, log_M, _shift_family(seq.family, -1.0), f"check({seq.label})")


def power(seq: WeightSequence, s: float) -> WeightSequence:
    """M_p^s, s > 0"""
    if not s > 0:
        raise InvalidParameterError(f"power must be positive, got {s}")
    return _derived(seq, s * seq.log_M, _power_family(seq.family, s), f"power({seq.label},{s:g})")


def interpolate(seq: WeightSequence, r: int) -> WeightSequence:
    """
    r-interpolating sequence P_{kr+j} = (M_k^{r-j} M_{k+1}^j)^{1/r}

    Args:
        seq: base sequence
        r: interpolation factor, integer >= 1

    Returns:
        Sequence of length (N-1)*r + 1 with P_{kr} = M_k
    """
    if int(r) != r or r < 1:
        raise InvalidParameterError(f"r must be an integer >= 1, got {r}")
    r = int(r)
    if r == 1:
        return seq
    k = np.arange(seq.n_terms - 1)
    j = np.arange(r)
    lower = seq.log_M[:-1][:, None]
    upper = seq.log_M[1:][:, None]
    body = ((r - j)[None, :] * lower + j[None, :] * upper) / r
    log_P = np.concatenate((body.ravel(), seq.log_M[-1:]))
    # exact on the original knots
    log_P[k * r] = seq.log_M[:-1]
    return WeightSequence(log_P, CUSTOM, f"interpolate({seq.label},{r})", seq.regularized)


@dataclass
class EquivalenceVerdict:
    """Outcome of comparing two sequences term by term on a common prefix"""
    verdict: str
    lower: Optional[float]
    upper: Optional[float]
    prefix: int
    detail: str = ''

    @property
    def is_equivalent(self) -> bool:
        return self.verdict == 'yes'


def equivalent(seq_a: WeightSequence, seq_b: WeightSequence) -> EquivalenceVerdict:
    """
    Check whether L^p M_p <= M'_p <= H^p M_p on the shared prefix

    e_p = (log M'_p - log M_p)/p; equivalence is reported when the running
    extremes of e_p stop moving over the last half of the prefix.
    """
    if seq_a.n_terms != seq_b.n_terms:
        raise InvalidParameterError(
            f"Sequences must share a prefix length, got {seq_a.n_terms} and {seq_b.n_terms}")
    n = seq_a.n_terms
    p = np.arange(1, n, dtype=float)
    e = (seq_b.log_M[1:] - seq_a.log_M[1:]) / p
    run_min = np.minimum.accumulate(e)
    run_max = np.maximum.accumulate(e)
    half = (len(e) - 1) // 2
    min_drift = run_min[half] - run_min[-1]
    max_drift = run_max[-1] - run_max[half]

    if min_drift < config.EQUIVALENCE_TOL and max_drift < config.EQUIVALENCE_TOL:
        return EquivalenceVerdict('yes', float(np.exp(run_min[-1])), float(np.exp(run_max[-1])), n)

    direction = 'up' if max_drift >= min_drift else 'down'
    logger.info(f"No equivalence on prefix {n}: e_p trends {direction}")
    return EquivalenceVerdict(
        'unbounded-trend', None, None, n,
        f"e_p drifts {direction} over the last half (max {max_drift:.3g}, min {min_drift:.3g})")
