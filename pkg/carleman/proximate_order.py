"""
Proximate orders, their V functions, admissibility and flat-function certificates
"""
import logging
from dataclasses import dataclass, field
from typing import Dict, Any, Optional, Tuple

import numpy as np

import config
from carleman.associated import AssociatedFunctions
from carleman.errors import DomainError, InvalidParameterError, InsufficientDataError, RangeError
from carleman.indices import omega
from carleman.weight_sequence import WeightSequence

logger = logging.getLogger(__name__)

PO_FAMILIES = ('constant', 'alphabeta', 'powertail', 'logtail')
LIMIT_RTOL = 1e-3
DERIVATIVE_TOL = 1e-2
RING_SPREAD_TOL = 0.05
# keeps the innermost vertex ring strictly inside the omega_M range
COVERAGE_MARGIN = 1.01


@dataclass(frozen=True)
class ProximateOrderSpec:
    """
    Closed-form proximate order candidate

    constant:      rho(t) = rho
    alphabeta:     rho(t) = 1/alpha - (beta/alpha) log log t / log t
    powertail:     rho(t) = rho + t^-gamma
    logtail:       rho(t) = rho + log^-gamma t
    """
    family: str
    params: Tuple[float, ...]
    R0: float = field(init=False, default=1.0)

    def __post_init__(self):
        if self.family not in PO_FAMILIES:
            raise InvalidParameterError(f"Unknown proximate order family: {self.family}")
        expected = 1 if self.family == 'constant' else 2
        if len(self.params) != expected:
            raise InvalidParameterError(f"{self.family} takes {expected} parameter(s), got {len(self.params)}")
        if self.family == 'constant' and not self.params[0] >= 0:
            raise InvalidParameterError(f"constant order must be >= 0, got {self.params[0]}")
        if self.family == 'alphabeta' and not self.params[0] > 0:
            raise InvalidParameterError(f"alpha must be positive, got {self.params[0]}")
        if self.family in ('powertail', 'logtail') and not (self.params[0] >= 0 and self.params[1] > 0):
            raise InvalidParameterError(f"{self.family} needs rho >= 0 and gamma > 0, got {self.params}")
        object.__setattr__(self, 'R0', self._cutoff())

    @property
    def limit(self) -> float:
        if self.family == 'alphabeta':
            return 1.0 / self.params[0]
        return float(self.params[0])

    @property
    def heuristic(self) -> bool:
        """Tail families use exp(rho(|z|) Log z), which is not analytic in z"""
        return self.family in ('powertail', 'logtail')

    def describe(self) -> str:
        return f"{self.family}:{','.join(format(p, 'g') for p in self.params)}"

    def rho(self, t):
        t = np.asarray(t, dtype=float)
        if self.family == 'constant':
            return np.full_like(t, self.params[0])
        if self.family == 'alphabeta':
            alpha, beta = self.params
            log_t = np.log(t)
            return 1.0 / alpha - (beta / alpha) * np.log(log_t) / log_t
        rho, gamma = self.params
        if self.family == 'powertail':
            return rho + t ** -gamma
        return rho + np.log(t) ** -gamma

    def rho_prime(self, t):
        t = np.asarray(t, dtype=float)
        if self.family == 'constant':
            return np.zeros_like(t)
        if self.family == 'alphabeta':
            alpha, beta = self.params
            log_t = np.log(t)
            return -(beta / alpha) * (1.0 - np.log(log_t)) / (t * log_t ** 2)
        rho, gamma = self.params
        if self.family == 'powertail':
            return -gamma * t ** (-gamma - 1.0)
        return -gamma * np.log(t) ** (-gamma - 1.0) / t

    def log_V(self, modulus, argument):
        """Principal-branch log V(z) for z = modulus * exp(i argument), vectorized"""
        modulus = np.asarray(modulus, dtype=float)
        argument = np.asarray(argument, dtype=float)
        log_z = np.log(modulus) + 1j * argument
        if self.family == 'constant':
            return self.params[0] * log_z
        if self.family == 'alphabeta':
            alpha, beta = self.params
            return log_z / alpha - (beta / alpha) * np.log(log_z)
        return self.rho(modulus) * log_z

    def _cutoff(self) -> float:
        """Smallest modulus past which V is increasing on the positive axis"""
        if self.family == 'constant':
            return 1.0
        if self.family == 'alphabeta':
            alpha, beta = self.params
            return float(np.exp(max(abs(beta) / alpha, abs(beta)) + 1.0))
        t = np.geomspace(np.e, 1e12, 4001)
        log_v = self.rho(t) * np.log(t)
        bad = np.nonzero(np.diff(log_v) <= 0)[0]
        return float(t[bad[-1] + 1]) if len(bad) else float(np.e)


def parse_proximate_order(text: str) -> ProximateOrderSpec:
    """Parse 'constant:<rho>', 'alphabeta:<a>,<b>', 'powertail:<rho>,<g>' or 'logtail:<rho>,<g>'"""
    name, _, rest = text.partition(':')
    try:
        params = tuple(float(v) for v in rest.split(',')) if rest else ()
    except ValueError as e:
        raise InvalidParameterError(f"Bad proximate order parameters in '{text}'") from e
    return ProximateOrderSpec(name.strip().lower(), params)


def default_proximate_order(seq: WeightSequence) -> Optional[ProximateOrderSpec]:
    """The proximate order known to be admissible for a built-in family"""
    if seq.family.name == 'gevrey':
        return ProximateOrderSpec('constant', (1.0 / seq.family.params[0],))
    if seq.family.name == 'mab':
        alpha, beta = seq.family.params
        if beta == 0:
            return ProximateOrderSpec('constant', (1.0 / alpha,))
        return ProximateOrderSpec('alphabeta', (alpha, beta))
    return None


def log_grid(t_min: float, t_max: float, points: int = 400) -> np.ndarray:
    return np.geomspace(t_min, t_max, points)


def _nonincreasing(values: np.ndarray) -> bool:
    return bool(np.all(np.diff(values) <= 1e-15 * np.maximum(1.0, np.abs(values[:-1]))))


def check_proximate_order(spec: ProximateOrderSpec, grid: np.ndarray) -> Dict[str, Any]:
    """
    Numeric check of the proximate-order conditions on a log-spaced grid

    Args:
        spec: candidate
        grid: increasing t values, t_min > e^2, spanning at least two decades

    Returns:
        dict with pass flag and per-condition diagnostics
    """
    grid = np.asarray(grid, dtype=float)
    if len(grid) < 16 or grid[0] <= np.e ** 2 or grid[-1] < 100 * grid[0]:
        raise InvalidParameterError("Grid needs 16+ points on [t_min, t_max] with t_min > e^2 and two decades")

    rho = spec.rho(grid)
    deviation = np.abs(rho - spec.limit)
    drift = np.abs(grid * spec.rho_prime(grid) * np.log(grid))
    half = len(grid) // 2
    last_decade = rho[grid >= grid[-1] / 10]

    nonnegative = bool(np.all(rho >= 0))
    spread = float(np.max(last_decade) - np.min(last_decade))
    limit_ok = spread < LIMIT_RTOL * max(spec.limit, 1.0) or _nonincreasing(deviation[half:])
    derivative_ok = drift[-1] < DERIVATIVE_TOL or _nonincreasing(drift[half:])

    return {
        'pass': nonnegative and limit_ok and derivative_ok,
        'limit': spec.limit,
        'nonnegative': nonnegative,
        'limit_converges': bool(limit_ok),
        'last_decade_spread': spread,
        'derivative_vanishes': bool(derivative_ok),
        'last_t_rho_prime_log_t': float(drift[-1]),
    }


def _default_admissibility_grid(ev: AssociatedFunctions, spec: ProximateOrderSpec) -> np.ndarray:
    t_lo = max(spec.R0, np.e ** 2, float(np.exp(ev.log_m[0])) * 1.01)
    t_hi = ev.omega_upper * 0.999
    if t_hi < 100 * t_lo:
        raise InsufficientDataError(
            f"Prefix covers omega_M only up to {ev.omega_upper:.4g}; admissibility needs two decades above {t_lo:.4g}")
    return log_grid(t_lo, t_hi)


def _decade_drift(g: np.ndarray, grid: np.ndarray, top: float) -> Tuple[float, float]:
    """Growth of the running max and decay of the running min of g over (top/10, top]"""
    inside = (grid > top / 10) & (grid <= top)
    before = grid <= top / 10
    if not np.any(inside) or not np.any(before):
        return 0.0, 0.0
    run_max = np.maximum.accumulate(g)
    run_min = np.minimum.accumulate(g)
    start = np.nonzero(before)[0][-1]
    end = np.nonzero(inside)[0][-1]
    return float(run_max[end] - run_max[start]), float(run_min[start] - run_min[end])


def admissibility(seq: WeightSequence, spec: ProximateOrderSpec, grid: Optional[np.ndarray] = None) -> Dict[str, Any]:
    """
    Check that log t (d_M(t) - rho(t)) stays bounded

    Passes with C = min g, D = max g when the running extremes of g stop
    drifting over the last decade of the grid.
    """
    ev = AssociatedFunctions(seq)
    grid = _default_admissibility_grid(ev, spec) if grid is None else np.asarray(grid, dtype=float)
    if grid[-1] < 100 * grid[0]:
        raise InsufficientDataError("Admissibility grid must span at least two decades")

    log_t = np.log(grid)
    g = log_t * (ev.d_from_log(log_t) - spec.rho(grid))

    top = grid[-1]
    up_last, down_last = _decade_drift(g, grid, top)
    up_prev, down_prev = _decade_drift(g, grid, top / 10)
    up_ok = up_last <= max(0.05, 0.9 * up_prev)
    down_ok = down_last <= max(0.05, 0.9 * down_prev)

    result = {
        'pass': bool(up_ok and down_ok),
        'C': float(np.min(g)),
        'D': float(np.max(g)),
        'trend': None,
        'drift': {'up_last': up_last, 'up_previous': up_prev,
                  'down_last': down_last, 'down_previous': down_prev},
        'grid': [float(grid[0]), float(grid[-1]), len(grid)],
    }
    if not result['pass']:
        result['trend'] = 'up' if up_last - max(0.05, 0.9 * up_prev) >= down_last - max(0.05, 0.9 * down_prev) else 'down'
        logger.info(f"{spec.describe()} not admissible for {seq.label}: g(t) trends {result['trend']}")
    return result


def admits_proximate_order(seq: WeightSequence, spec: Optional[ProximateOrderSpec] = None) -> Dict[str, Any]:
    """
    Decide whether seq admits a nonzero proximate order

    Built-in Gevrey and M_{alpha,beta} sequences admit their family order
    analytically; any other combination is tested numerically.
    """
    known = default_proximate_order(seq)
    if known is not None and (spec is None or spec == known):
        return {'admissible': True, 'source': 'analytic', 'proximate_order': known.describe()}
    if spec is None:
        return {'admissible': None, 'source': 'none', 'proximate_order': None}
    if spec.limit <= 0:
        return {'admissible': False, 'source': 'analytic', 'proximate_order': spec.describe(),
                'detail': 'proximate order has limit 0'}
    result = admissibility(seq, spec)
    return {'admissible': result['pass'], 'source': 'numeric', 'proximate_order': spec.describe(),
            'C': result['C'], 'D': result['D'], 'trend': result['trend']}


def V_value(spec: ProximateOrderSpec, modulus: float, argument: float) -> complex:
    """V(z) on the principal branch, z = modulus * exp(i argument)"""
    if modulus < spec.R0:
        raise DomainError(f"V needs |z| >= {spec.R0:.6g}, got {modulus}")
    if not abs(argument) < np.pi:
        raise DomainError(f"Argument must lie in (-pi, pi), got {argument}")
    return complex(np.exp(spec.log_V(modulus, argument)))


def check_real_part_bound(spec: ProximateOrderSpec, opening: float,
                          grid: Tuple[int, int] = config.FLAT_GRID, r_max: float = 1e6) -> Dict[str, Any]:
    """
    Empirical b with Re V(z) >= b V(|z|) on the sector |arg z| <= opening*pi/2

    Args:
        spec: nonzero proximate order
        opening: fraction a in (0, 1/rho)
        grid: (moduli, arguments); the argument grid includes both edges
        r_max: largest modulus

    Returns:
        dict with pass flag, b, R0 and the spread of ring minima
    """
    rho = spec.limit
    if rho <= 0:
        raise InvalidParameterError("Real-part bound needs a nonzero proximate order")
    if not 0 < opening < 1.0 / rho:
        raise InvalidParameterError(f"Opening must lie in (0, {1.0 / rho:.6g}), got {opening}")
    n_mod, n_arg = grid
    moduli = np.geomspace(spec.R0, r_max, n_mod)
    arguments = np.linspace(-opening * np.pi / 2, opening * np.pi / 2, n_arg)
    r, theta = np.meshgrid(moduli, arguments, indexing='ij')

    log_v = spec.log_V(r, theta)
    log_v_abs = np.real(spec.log_V(r, np.zeros_like(theta)))
    ratio = np.exp(np.real(log_v) - log_v_abs) * np.cos(np.imag(log_v))
    ring_minima = np.min(ratio, axis=1)
    b = float(np.min(ring_minima))

    outer = ring_minima[-max(n_mod // 4, 1):]
    spread = float((np.max(outer) - np.min(outer)) / max(abs(np.max(outer)), 1e-300))
    return {
        'pass': bool(b > 0 and spread <= RING_SPREAD_TOL),
        'b': b,
        'R0': spec.R0,
        'ring_minima_spread': spread,
        'heuristic': spec.heuristic,
    }


class FlatFunction:
    """
    G(z) = exp(-V(1/z)) on the sector, valid for |z| <= 1/R0

    Only log|G| = -Re V(1/z) is exposed since G underflows near the vertex.
    """

    def __init__(self, seq: WeightSequence, spec: ProximateOrderSpec, require_admissible: bool = True):
        if spec.limit <= 0:
            raise InvalidParameterError("Flat functions need a nonzero proximate order")
        if require_admissible:
            verdict = admits_proximate_order(seq, spec)
            if not verdict['admissible']:
                raise DomainError(f"{seq.label} does not admit {spec.describe()}")
        self.seq = seq
        self.spec = spec
        self.max_modulus = 1.0 / spec.R0

    def log_abs(self, modulus, argument):
        modulus = np.asarray(modulus, dtype=float)
        if np.any(modulus <= 0) or np.any(modulus > self.max_modulus * (1 + 1e-12)):
            raise DomainError(f"G is defined for 0 < |z| <= {self.max_modulus:.6g}")
        log_v = self.spec.log_V(1.0 / modulus, -np.asarray(argument, dtype=float))
        # Re V = |V| cos(arg V), kept apart so |V| never overflows through exp(log V)
        value = -np.exp(np.real(log_v)) * np.cos(np.imag(log_v))
        return float(value) if np.ndim(value) == 0 else value


def flat_function(seq: WeightSequence, spec: ProximateOrderSpec) -> FlatFunction:
    return FlatFunction(seq, spec)


@dataclass
class FlatWitness:
    """
    Constants c1, c2 with |G(z)| <= c1 h_M(c2 |z|) on the sampled sector

    c1 and c2 are fitted on the outer rings; log_sup_ratio is measured on
    the vertex rings below them, down to inner_radius, and is not used in
    the fit.
    """
    log_c1: float
    c2: float
    opening: float
    radius: float
    grid: Tuple[int, int]
    log_sup_ratio: float
    confident: bool
    skipped_c2: int = 0
    inner_radius: Optional[float] = None
    rows: Optional[np.ndarray] = field(default=None, repr=False)

    @property
    def c1(self) -> float:
        return float(np.exp(self.log_c1))

    @property
    def sup_ratio(self) -> float:
        return float(np.exp(self.log_sup_ratio))

    def to_dict(self) -> Dict[str, Any]:
        return {
            'c1': self.c1,
            'log_c1': self.log_c1,
            'c2': self.c2,
            'sector': {'opening': self.opening, 'radius': self.radius},
            'grid': list(self.grid),
            'inner_radius': self.inner_radius,
            'sup_ratio': self.sup_ratio,
            'log_sup_ratio': self.log_sup_ratio,
            'confident': self.confident,
            'skipped_c2': self.skipped_c2,
        }


def certify_flatness(seq: WeightSequence, spec: ProximateOrderSpec, opening: float, radius: float,
                     grid: Tuple[int, int] = config.FLAT_GRID) -> FlatWitness:
    """
    Find c1, c2 with log|G(z)| + omega_M(1/(c2|z|)) <= log c1 on a polar grid

    The fit rings are geometric on [radius/100, radius] and arguments span
    the closed sector. c2 runs over 2^-8..2^8, values whose omega_M range the
    prefix cannot cover are skipped, and c1 is the best sup over c2. The
    chosen pair is then checked on as many vertex rings, geometric from
    the last modulus omega_M still covers, 1/(c2 m_{N-2}), up to radius/100.

    Returns:
        FlatWitness; rows hold (modulus, argument, log|G|, log c1 - omega_M)
        for the fit rings followed by the vertex rings
    """
    if not opening > 0:
        raise InvalidParameterError(f"Sector opening must be positive, got {opening}")
    index = omega(seq)
    if not index.infinite and opening >= index.value:
        raise InvalidParameterError(f"Opening {opening} must be below omega(M) = {index.value:.6g}")
    flat = FlatFunction(seq, spec)
    if not 0 < radius <= flat.max_modulus:
        raise DomainError(f"Radius must lie in (0, {flat.max_modulus:.6g}]")

    n_mod, n_arg = grid
    fit_min = radius * 1e-2
    moduli = np.array([radius]) if n_mod == 1 else np.geomspace(fit_min, radius, n_mod)
    arguments = np.array([0.0]) if n_arg == 1 else np.linspace(-opening * np.pi / 2, opening * np.pi / 2, n_arg)
    r, theta = np.meshgrid(moduli, arguments, indexing='ij')
    log_g = flat.log_abs(r, theta)
    ring_max = np.max(log_g, axis=1)

    ev = AssociatedFunctions(seq)
    best = None
    skipped = 0
    for k in range(-config.C2_EXPONENT_RANGE, config.C2_EXPONENT_RANGE + 1):
        c2 = 2.0 ** k
        try:
            bound = ev.omega_from_log(-np.log(c2 * moduli))
        except RangeError:
            skipped += 1
            continue
        totals = ring_max + bound
        s = float(np.max(totals))
        if best is None or s < best[0]:
            best = (s, c2, totals, bound)

    if best is None:
        raise RangeError(
            f"omega_M range exhausted for every c2; use a longer prefix than {seq.n_terms} terms",
            covered_bound=ev.omega_upper)

    log_c1, c2, totals, bound = best
    innermost = n_mod > 1 and int(np.argmax(totals)) == 0

    inner_radius = COVERAGE_MARGIN / (c2 * ev.omega_upper)
    if n_mod > 1 and inner_radius < moduli[0]:
        vertex = np.geomspace(inner_radius, moduli[0], n_mod + 1)[:-1]
        v_r, v_theta = np.meshgrid(vertex, arguments, indexing='ij')
        v_log_g = flat.log_abs(v_r, v_theta)
        v_bound = ev.omega_from_log(-np.log(c2 * vertex))
        log_sup = float(np.max(v_log_g + v_bound[:, None]) - log_c1)
        r = np.concatenate((r, v_r))
        theta = np.concatenate((theta, v_theta))
        log_g = np.concatenate((log_g, v_log_g))
        bound = np.concatenate((bound, v_bound))
    else:
        logger.warning(f"omega_M coverage of {seq.label} does not reach below the fit rings for c2 = {c2:g}")
        inner_radius = None
        log_sup = float(np.max(log_g + bound[:, None]) - log_c1)

    confident = n_arg > 1 and inner_radius is not None and not innermost and log_sup <= 0.0
    if not confident:
        logger.warning(f"Flatness witness for {seq.label} is low-confidence")
    logger.debug(f"Flatness of {seq.label}: c2={c2:g}, log c1={log_c1:.6g}, vertex log ratio={log_sup:.6g}")
    rows = np.column_stack([r.ravel(), theta.ravel(), log_g.ravel(),
                            (log_c1 - np.repeat(bound, n_arg))])
    return FlatWitness(log_c1, c2, opening, radius, (n_mod, n_arg), log_sup, confident, skipped,
                       inner_radius, rows)
