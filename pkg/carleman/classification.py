"""
Injectivity and surjectivity intervals of the asymptotic Borel map
"""
import logging
import math
from dataclasses import dataclass, field, replace
from fractions import Fraction
from typing import Dict, Any, List, Optional, Tuple

from carleman.errors import CarlemanError, InvariantViolation
from carleman.indices import IndexEstimate, omega, gamma
from carleman.properties import PropertyReport, full_report, Status
from carleman.proximate_order import ProximateOrderSpec, admits_proximate_order
from carleman.series import SeriesVerdict, Verdict, Method, mu_series, sigma_series
from carleman.weight_sequence import WeightSequence

logger = logging.getLogger(__name__)

OPEN, CLOSED, UNKNOWN = 'open', 'closed', 'unknown'
INJECTIVITY_KEYS = ('A_M', 'Au_M', 'Atilde_M')
SURJECTIVITY_KEYS = ('S_M', 'Su_M', 'Stilde_M')
RATIONAL_MAX_DENOMINATOR = 64


@dataclass
class IntervalVerdict:
    """
    One injectivity (from-shaped) or surjectivity (upto-shaped) interval

    subset_proven=False means only a superset is known: the interval is
    contained in the one described.
    """
    kind: str
    bound: Optional[float] = None
    endpoint: str = OPEN
    bound_source: Optional[str] = None
    subset_proven: bool = True
    citations: List[str] = field(default_factory=list)
    notes: List[str] = field(default_factory=list)

    @property
    def may_contain_bound(self) -> bool:
        return self.endpoint != OPEN

    def to_dict(self) -> Dict[str, Any]:
        if self.kind == 'all':
            bound = 'inf'
        elif self.kind == 'empty':
            bound = None
        else:
            bound = self.bound
        return {'kind': self.kind, 'bound': bound, 'endpoint': self.endpoint, 'subset_proven': self.subset_proven}


def empty(*citations: str) -> IntervalVerdict:
    return IntervalVerdict('empty', citations=list(citations))


def everything(*citations: str, subset_proven: bool = True) -> IntervalVerdict:
    return IntervalVerdict('all', subset_proven=subset_proven, citations=list(citations))


def from_bound(bound: float, endpoint: str, *citations: str) -> IntervalVerdict:
    return IntervalVerdict('from', bound, endpoint, 'omega', True, list(citations))


def upto(bound: float, endpoint: str, source: str, proven: bool, *citations: str) -> IntervalVerdict:
    return IntervalVerdict('upto', bound, endpoint, source, proven, list(citations))


def _same(a: float, b: float) -> bool:
    return abs(a - b) <= 1e-12 * max(1.0, abs(a), abs(b))


def _endpoint_from_series(verdict: Optional[SeriesVerdict]) -> str:
    if verdict is None or verdict.verdict == Verdict.INCONCLUSIVE:
        return UNKNOWN
    return CLOSED if verdict.diverges else OPEN


def _exact_index(seq: WeightSequence) -> Optional[float]:
    """Exact gamma(M) = omega(M) parameter of a built-in family"""
    if seq.family.name in ('gevrey', 'mab'):
        return seq.family.params[0]
    return None


def rationality(seq: WeightSequence) -> Optional[bool]:
    """
    Whether gamma(M) is rational, decided only on exact family parameters

    Floats from numeric estimates cannot settle this, so custom
    sequences get None.
    """
    exact = _exact_index(seq)
    if exact is None:
        return None
    approx = Fraction(exact).limit_denominator(RATIONAL_MAX_DENOMINATOR)
    return abs(float(approx) - exact) <= 1e-9


def _is_integer(value: float, exact: bool) -> bool:
    return float(value).is_integer() if exact else abs(value - round(value)) <= 1e-9


def _intersect_upto(bound: float, endpoint: str, cap: float) -> Tuple[float, str]:
    """(0, bound) or (0, bound] intersected with (0, cap]"""
    if math.isinf(cap) or bound < cap and not _same(bound, cap):
        return bound, endpoint
    if _same(bound, cap):
        return cap, endpoint
    return cap, CLOSED


def classify_injectivity(seq: WeightSequence, omega_estimate: IndexEstimate,
                         mu: Optional[SeriesVerdict], sigma: Optional[SeriesVerdict],
                         degenerate: bool = False) -> List[IntervalVerdict]:
    """
    Intervals I_M, Iu_M, Itilde_M in that order

    Args:
        seq: sequence under study
        omega_estimate: omega(M)
        mu: verdict for sum m_p^(-1/omega) or None
        sigma: verdict for sum ((p+1) m_p)^(-1/(omega+1)) or None
        degenerate: the sequence is not a weight sequence

    Returns:
        three IntervalVerdicts
    """
    if degenerate:
        return [everything('degenerate-sequence') for _ in range(3)]
    if omega_estimate.infinite:
        return [empty('rodriguez-salinas-criterion', 'index-extremes') for _ in range(3)]
    if omega_estimate.is_zero:
        return [everything('watson-lemma', 'index-extremes') for _ in range(3)]

    if sigma is not None and mu is not None and sigma.converges and not mu.converges:
        # convergence of the sigma-series forces convergence of the mu-series
        if sigma.method == Method.CLOSED_FORM_RULE and mu.method == Method.CLOSED_FORM_RULE:
            raise InvariantViolation(
                f"{seq.label}: sigma-series converges while mu-series is {mu.verdict.value}")
        logger.warning(f"{seq.label}: numeric series verdicts disagree, leaving both endpoints unknown")
        mu = sigma = None

    w = omega_estimate.value
    return [
        from_bound(w, _endpoint_from_series(sigma), 'rodriguez-salinas-criterion'),
        from_bound(w, _endpoint_from_series(mu), 'mandelbrojt-criterion'),
        from_bound(w, OPEN, 'watson-lemma', 'flat-function-construction'),
    ]


def classify_surjectivity(seq: WeightSequence, props: PropertyReport, omega_estimate: IndexEstimate,
                          gamma_estimate: IndexEstimate, admissible: Optional[bool] = None,
                          use_rationality: bool = True, degenerate: bool = False) -> List[IntervalVerdict]:
    """
    Intervals S_M, Su_M, Stilde_M in that order

    The most specific applicable rule wins: bare weight sequences only get
    superset bounds, (dc) sharpens the uniform ones, strong regularity
    proves (0, gamma) and admissibility of a proximate order closes the
    nonuniform interval at gamma.

    With use_rationality=False the exact index is treated as a generic
    real: neither its integrality nor its rationality sharpens anything,
    which reproduces the family tables for symbolic parameters.
    """
    if degenerate:
        return [empty('degenerate-sequence') for _ in range(3)]
    if gamma_estimate.is_zero or props.snq.status == Status.ANALYTIC_NO:
        return [empty('surjectivity-requires-snq') for _ in range(3)]
    if gamma_estimate.infinite:
        verdict = everything('nonuniform-surjectivity-bound', subset_proven=False)
        verdict.notes.append('no-relevant-information')
        return [replace(verdict, citations=list(verdict.citations), notes=list(verdict.notes)) for _ in range(3)]

    exact = _exact_index(seq) is not None
    g = gamma_estimate.value
    w = omega_estimate.as_float()
    integer = use_rationality and _is_integer(g, exact)

    if integer:
        bound, endpoint = g + 1.0, OPEN
    else:
        bound, endpoint = math.floor(g) + 1.0, CLOSED
    bound, endpoint = _intersect_upto(bound, endpoint, w)
    nonuniform = upto(bound, endpoint, 'floor_gamma_plus_one', False, 'nonuniform-surjectivity-bound')
    verdicts = [replace(nonuniform, citations=list(nonuniform.citations)) for _ in range(3)]

    if props.dc.holds:
        if integer:
            u_bound, u_endpoint, source = g, OPEN, 'gamma'
        else:
            u_bound, u_endpoint = _intersect_upto(math.floor(g) + 1.0, OPEN, w)
            source = 'floor_gamma_plus_one'
        for i in (0, 1):
            verdicts[i] = upto(u_bound, u_endpoint, source, False, 'uniform-surjectivity-bound-dc')

    strongly_regular = props.strongly_regular.holds or admissible is True
    if strongly_regular:
        for i in range(3):
            known = verdicts[i]
            endpoint = OPEN if _same(known.bound, g) and known.endpoint == OPEN else UNKNOWN
            verdicts[i] = upto(g, endpoint, 'gamma', True, 'thilliez-surjectivity', 'strongly-regular-sandwich')
        if use_rationality and rationality(seq):
            for i in (0, 1):
                verdicts[i] = upto(g, OPEN, 'gamma', True, 'rational-gamma-sharpness')

    if admissible is True:
        verdicts[2] = upto(g, CLOSED, 'gamma', True, 'admissible-proximate-order',
                           'generalized-borel-ritt-gevrey')

    if gamma_estimate.diagnostics.get('capped_by_omega') or gamma_estimate.diagnostics.get('raised_to_omega'):
        for verdict in verdicts:
            verdict.citations.append('gamma-le-omega')
    return verdicts


def _tighten_never_bijective(injectivity: List[IntervalVerdict], surjectivity: List[IntervalVerdict]):
    """Open a surjectivity endpoint where the same-class injectivity interval contains it, and vice versa"""
    for inj, surj in zip(injectivity, surjectivity):
        if inj.kind != 'from' or surj.kind != 'upto' or not _same(inj.bound, surj.bound):
            continue
        if inj.endpoint == CLOSED and surj.endpoint != OPEN:
            surj.endpoint = OPEN
            surj.citations.append('never-bijective')
        elif surj.endpoint == CLOSED and surj.subset_proven and inj.endpoint == UNKNOWN:
            inj.endpoint = OPEN
            inj.citations.append('never-bijective')


def _propagate_containment(surjectivity: List[IntervalVerdict]):
    """S ⊆ Su ⊆ Stilde: an open proven endpoint flows down to smaller classes at the same bound"""
    for bigger, smaller in ((surjectivity[2], surjectivity[1]), (surjectivity[1], surjectivity[0])):
        if bigger.kind == smaller.kind == 'upto' and bigger.subset_proven and smaller.subset_proven \
                and _same(bigger.bound, smaller.bound) and bigger.endpoint == OPEN and smaller.endpoint == UNKNOWN:
            smaller.endpoint = OPEN
            smaller.citations.append('containment')


def _may_overlap(inj: IntervalVerdict, surj: IntervalVerdict) -> bool:
    if inj.kind == 'empty' or surj.kind == 'empty':
        return False
    if inj.kind == 'all':
        return surj.subset_proven
    if surj.kind == 'all':
        return surj.subset_proven
    if surj.bound > inj.bound and not _same(surj.bound, inj.bound):
        return surj.subset_proven
    if _same(surj.bound, inj.bound):
        if surj.subset_proven:
            # both unknown is consistent: the bijective resolution is the one ruled out
            return (inj.endpoint == CLOSED and surj.may_contain_bound) or \
                (surj.endpoint == CLOSED and inj.may_contain_bound)
        return inj.endpoint == CLOSED and surj.may_contain_bound
    return False


def _contains_from(outer: IntervalVerdict, inner: IntervalVerdict) -> bool:
    if inner.kind == 'empty' or outer.kind == 'all':
        return True
    if outer.kind == 'empty' or inner.kind == 'all':
        return False
    if outer.bound > inner.bound and not _same(outer.bound, inner.bound):
        return False
    return not (_same(outer.bound, inner.bound) and outer.endpoint == OPEN and inner.endpoint == CLOSED)


def _contained_upto(inner: IntervalVerdict, outer: IntervalVerdict) -> bool:
    if not (inner.subset_proven and outer.subset_proven):
        return True
    if inner.kind == 'empty' or outer.kind == 'all':
        return True
    if outer.kind == 'empty' or inner.kind == 'all':
        return False
    if inner.bound > outer.bound and not _same(inner.bound, outer.bound):
        return False
    return not (_same(inner.bound, outer.bound) and inner.endpoint == CLOSED and outer.endpoint == OPEN)


def check_invariants(injectivity: List[IntervalVerdict], surjectivity: List[IntervalVerdict]):
    """Raise InvariantViolation if the intervals break never-bijectivity or the containment chains"""
    for key, surj_key, inj, surj in zip(INJECTIVITY_KEYS, SURJECTIVITY_KEYS, injectivity, surjectivity):
        if _may_overlap(inj, surj):
            raise InvariantViolation(
                f"{key}/{surj_key}: injectivity {inj.to_dict()} and surjectivity {surj.to_dict()} overlap")
    for outer, inner in ((injectivity[0], injectivity[1]), (injectivity[1], injectivity[2])):
        if not _contains_from(outer, inner):
            raise InvariantViolation(f"Injectivity chain broken: {outer.to_dict()} does not contain {inner.to_dict()}")
    for inner, outer in ((surjectivity[0], surjectivity[1]), (surjectivity[1], surjectivity[2])):
        if not _contained_upto(inner, outer):
            raise InvariantViolation(f"Surjectivity chain broken: {inner.to_dict()} not inside {outer.to_dict()}")


@dataclass
class ClassificationReport:
    """All six intervals with the inputs they were derived from"""
    sequence: WeightSequence
    properties: PropertyReport
    omega: IndexEstimate
    gamma: IndexEstimate
    mu_at_omega: Optional[SeriesVerdict]
    sigma_at_omega: Optional[SeriesVerdict]
    admissibility: Dict[str, Any]
    rational_gamma: Optional[bool]
    injectivity: List[IntervalVerdict]
    surjectivity: List[IntervalVerdict]

    @property
    def citations(self) -> List[str]:
        seen = []
        for verdict in self.injectivity + self.surjectivity:
            for tag in verdict.citations + verdict.notes:
                if tag not in seen:
                    seen.append(tag)
        return seen

    def to_dict(self) -> Dict[str, Any]:
        return {
            'sequence': self.sequence.label,
            'terms': self.sequence.n_terms,
            'regularized': self.sequence.regularized,
            'properties': self.properties.to_dict(),
            'indices': {'omega': self.omega.to_dict(), 'gamma': self.gamma.to_dict()},
            'series': {
                'mu_at_omega': self.mu_at_omega.to_dict() if self.mu_at_omega else None,
                'sigma_at_omega': self.sigma_at_omega.to_dict() if self.sigma_at_omega else None,
            },
            'admissibility': self.admissibility,
            'rational_gamma': self.rational_gamma,
            'injectivity': dict(zip(INJECTIVITY_KEYS, (v.to_dict() for v in self.injectivity))),
            'surjectivity': dict(zip(SURJECTIVITY_KEYS, (v.to_dict() for v in self.surjectivity))),
            'citations': self.citations,
        }


def full_classification(seq: WeightSequence, spec: Optional[ProximateOrderSpec] = None,
                        closed_form: bool = True, use_rationality: bool = True) -> ClassificationReport:
    """
    Run both classifiers and enforce the never-bijective and containment rules

    Args:
        seq: sequence under study
        spec: optional proximate order to test for admissibility
        closed_form: use exact family values where available
        use_rationality: apply the rational-gamma sharpening

    Returns:
        ClassificationReport
    """
    props = full_report(seq)
    degenerate = props.is_weight_sequence.refuted
    omega_estimate = omega(seq, closed_form=closed_form)
    gamma_estimate = gamma(seq, closed_form=closed_form, omega_estimate=omega_estimate)

    mu = sigma = None
    if not degenerate and not omega_estimate.infinite and not omega_estimate.is_zero:
        mu = mu_series(seq, omega_estimate.value, closed_form=closed_form)
        sigma = sigma_series(seq, omega_estimate.value, closed_form=closed_form)

    admissibility = {'admissible': None, 'source': 'none', 'proximate_order': None}
    if not degenerate and not gamma_estimate.infinite and not gamma_estimate.is_zero:
        try:
            admissibility = admits_proximate_order(seq, spec)
        except CarlemanError as e:
            logger.warning(f"Admissibility check for {seq.label} failed: {e}")
            admissibility = {'admissible': None, 'source': 'error', 'proximate_order': spec.describe() if spec else None,
                             'detail': str(e)}

    admissible = admissibility.get('admissible')
    if admissible is True and not gamma_estimate.infinite and not omega_estimate.infinite \
            and gamma_estimate.value < omega_estimate.value:
        # an admissible proximate order forces gamma(M) = omega(M)
        gamma_estimate.diagnostics['raised_to_omega'] = gamma_estimate.value
        gamma_estimate.value = omega_estimate.value

    injectivity = classify_injectivity(seq, omega_estimate, mu, sigma, degenerate)
    surjectivity = classify_surjectivity(seq, props, omega_estimate, gamma_estimate, admissible,
                                         use_rationality, degenerate)
    _tighten_never_bijective(injectivity, surjectivity)
    _propagate_containment(surjectivity)
    check_invariants(injectivity, surjectivity)

    logger.info(f"Classified {seq.label}: omega={omega_estimate.to_dict()['value']}, "
                f"gamma={gamma_estimate.to_dict()['value']}")
    return ClassificationReport(seq, props, omega_estimate, gamma_estimate, mu, sigma, admissibility,
                                rationality(seq), injectivity, surjectivity)
