"""
Associated functions h_M, omega_M and d_M evaluated piecewise
"""
import logging
from typing import Union

import numpy as np

from carleman.errors import DomainError, RangeError
from carleman.properties import check_lc, Status
from carleman.weight_sequence import WeightSequence

logger = logging.getLogger(__name__)

ArrayLike = Union[float, np.ndarray]


class AssociatedFunctions:
    """
    Piecewise evaluator of the associated functions of a log-convex sequence

    omega_M(t) = p log t - log M_p for m_{p-1} <= t < m_p, located by
    binary search over the log-quotients. Arguments beyond the last stored
    quotient are rejected rather than extrapolated.
    """

    def __init__(self, seq: WeightSequence):
        lc = check_lc(seq)
        if lc.status == Status.FAILS_AT:
            raise DomainError(f"Associated functions need a log-convex sequence: {lc.detail}")
        self.seq = seq
        self.log_m = seq.log_m
        self.log_M = seq.log_M
        self.log_upper = float(self.log_m[-1])

    @property
    def omega_upper(self) -> float:
        """omega_M is certified on (0, m_{N-2})"""
        return float(np.exp(self.log_upper))

    @property
    def h_lower(self) -> float:
        """h_M is certified on (1/m_{N-2}, infinity)"""
        return float(np.exp(-self.log_upper))

    def omega_from_log(self, log_t: ArrayLike) -> ArrayLike:
        """omega_M evaluated at t = exp(log_t), vectorized"""
        log_t = np.asarray(log_t, dtype=float)
        p = np.searchsorted(self.log_m, log_t, side='right')
        if np.any(p >= len(self.log_m)):
            raise RangeError(
                f"t beyond the stored prefix (covered up to m_{len(self.log_m) - 1} = {self.omega_upper:.6g})",
                covered_bound=self.omega_upper)
        value = p * log_t - self.log_M[p]
        return float(value) if value.ndim == 0 else value

    def omega_M(self, t: float) -> float:
        """omega_M(t) = sup_p log(t^p / M_p)"""
        if not t > 0:
            raise DomainError(f"omega_M needs t > 0, got {t}")
        return self.omega_from_log(np.log(t))

    def log_h_M(self, t: float) -> float:
        """log h_M(t) = log inf_p M_p t^p = -omega_M(1/t)"""
        if not t > 0:
            raise DomainError(f"h_M needs t > 0, got {t}")
        try:
            return -self.omega_from_log(-np.log(t))
        except RangeError as e:
            raise RangeError(f"t below the stored prefix (covered down to {self.h_lower:.6g})",
                             covered_bound=self.h_lower) from e

    def h_M(self, t: float) -> float:
        return float(np.exp(self.log_h_M(t)))

    def d_M(self, t: float) -> float:
        """d_M(t) = log omega_M(t) / log t"""
        if not t > 1:
            raise DomainError(f"d_M needs t > 1, got {t}")
        value = self.omega_M(t)
        if value <= 0:
            raise DomainError(f"omega_M({t}) = 0, d_M undefined")
        return float(np.log(value) / np.log(t))

    def d_from_log(self, log_t: np.ndarray) -> np.ndarray:
        """Vectorized d_M for log t > 0 with omega_M > 0"""
        log_t = np.asarray(log_t, dtype=float)
        values = np.asarray(self.omega_from_log(log_t))
        if np.any(log_t <= 0) or np.any(values <= 0):
            raise DomainError("d_M undefined where t <= 1 or omega_M(t) = 0")
        return np.log(values) / log_t
