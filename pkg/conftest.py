"""
Shared test helpers
"""
import numpy as np

from carleman.weight_sequence import WeightSequence, from_log_quotients

RANDOM_SEEDS = range(200)


def random_lc_sequence(seed: int, n_terms: int = 4096) -> WeightSequence:
    """
    Random log-convex sequence with super-logarithmic quotient growth

    log m_p = alpha log(p+1) + kappa log log(e+p+1) plus a bounded bump that
    saturates within the first few dozen terms, made nondecreasing.
    """
    rng = np.random.default_rng(seed)
    alpha = rng.uniform(0.3, 3.0)
    kappa = rng.uniform(-1.0, 0.0)
    p = np.arange(n_terms - 1, dtype=float)
    bump = rng.uniform(-0.5, 0.5) * (1.0 - np.exp(-p / rng.uniform(2.0, 20.0)))
    noise = np.zeros_like(p)
    noise[:32] = rng.normal(0.0, 0.05, 32)
    log_m = alpha * np.log(p + 1.0) + kappa * np.log(np.log(np.e + p + 1.0)) + bump + noise
    return from_log_quotients(np.maximum.accumulate(log_m), label=f"random:{seed}")


def staircase_sequence(n_terms: int = 100_000, base: float = 2.0) -> WeightSequence:
    """
    Log-convex sequence whose quotients sit on long plateaus

    log m_p = 2 log p_k on [p_k, p_k^2) for the tower p_0 = base, p_{k+1} = p_k^2,
    so m_p tends to infinity while log m_p / log(p+1) keeps dropping back to 1.
    """
    tower = [base]
    while tower[-1] < n_terms:
        tower.append(tower[-1] ** 2)
    tower = np.array(tower)
    p = np.arange(n_terms - 1, dtype=float)
    level = tower[np.searchsorted(tower, np.maximum(p, base), side='right') - 1]
    return from_log_quotients(2.0 * np.log(level), label=f"staircase:{base:g}")
