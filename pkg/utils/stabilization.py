"""
Drift detection for witness constants measured on growing prefixes
"""
from typing import Dict, List, Any, Sequence

import numpy as np

import config

# log-domain steps below this are rounding noise
NOISE_FLOOR = 1e-12


def doubling_prefixes(n: int, depth: int = 3) -> List[int]:
    """Checkpoints N/2^(depth-1), ..., N/4, N/2, N used by the stabilization tests"""
    return [max(n >> k, 1) for k in range(depth - 1, -1, -1)]


def _projected_drift(steps: np.ndarray) -> float:
    """
    Relative drift still to come past the last checkpoint

    Assumes the increments keep shrinking at the slowest rate seen so far,
    so slow log-type growth shows up even when each single step is small.
    """
    sizes = np.where(np.abs(steps) < NOISE_FLOOR, 0.0, np.abs(steps))
    if sizes[-1] == 0.0:
        return 0.0
    if len(sizes) < 2 or np.any(sizes[:-1] == 0.0):
        return float('inf')
    rate = float(np.max(sizes[1:] / sizes[:-1]))
    if rate >= 1.0:
        return float('inf')
    return float(np.expm1(sizes[-1] * rate / (1.0 - rate)))


def detect_witness_drift(prefixes: Sequence[int], log_values: Sequence[float],
                         rtol: float = None, projected: bool = False) -> Dict[str, Any]:
    """
    Detect whether a witness constant is still moving across prefixes

    Values are compared in the log domain so constants like 2^p never
    overflow; the relative change of the constant itself is expm1 of the
    log difference.

    Args:
        prefixes: checkpoint lengths
        log_values: log of the witness at each checkpoint
        rtol: relative tolerance, STABILITY_RTOL by default
        projected: also require the drift extrapolated past the last
            checkpoint to stay within rtol

    Returns:
        dict with prefixes, log values, relative_change, growing, has_changes
        and, when projected is set, projected_change
    """
    rtol = config.STABILITY_RTOL if rtol is None else rtol
    values = np.asarray(log_values, dtype=float)

    if len(values) < 2 or not np.all(np.isfinite(values)):
        return {
            'prefixes': list(prefixes),
            'log_values': [float(v) for v in values],
            'relative_change': float('nan') if len(values) >= 2 else 0.0,
            'growing': False,
            'has_changes': len(values) >= 2,
        }

    steps = np.diff(values)
    relative = float(np.max(np.expm1(np.abs(steps))))
    changes = {
        'prefixes': list(prefixes),
        'log_values': [float(v) for v in values],
        'relative_change': relative,
        'growing': bool(steps[-1] > 0),
        'has_changes': relative > rtol,
    }
    if projected:
        changes['projected_change'] = _projected_drift(steps)
        changes['has_changes'] = relative > rtol or changes['projected_change'] > rtol
    return changes


def is_stabilized(changes: Dict[str, Any]) -> bool:
    return not changes.get('has_changes', True)


def format_drift(changes: Dict[str, Any]) -> str:
    """One-line description of a drift dict for text reports"""
    if not changes.get('has_changes'):
        return "stable"
    direction = "growing" if changes.get('growing') else "shrinking"
    rel = changes.get('relative_change')
    text = f"{direction} ({rel:.3g} relative over prefixes {changes.get('prefixes')}"
    if 'projected_change' in changes:
        text += f", {changes['projected_change']:.3g} projected"
    return text + ")"
