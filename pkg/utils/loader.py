"""
Sequence-spec parsing and file input/output
"""
import logging
import os
import sys
from typing import List, Optional, Tuple

import numpy as np

from carleman.errors import SequenceSpecError, InvalidParameterError
from carleman.weight_sequence import (
    WeightSequence, make_gevrey, make_mab, make_qpow, make_log_product,
    from_log_table, from_log_quotients,
)

logger = logging.getLogger(__name__)

SPEC_KINDS = ('gevrey', 'mab', 'qpow', 'logprod', 'file', 'quot')
PARAM_COUNTS = {'gevrey': 1, 'mab': 2, 'qpow': 1, 'logprod': 1}


def parse_float_list(text: str, what: str = 'value') -> List[float]:
    """Parse a comma-separated list of decimals"""
    items = [item.strip() for item in text.split(',') if item.strip()]
    if not items:
        raise SequenceSpecError(f"Empty {what} list")
    try:
        return [float(item) for item in items]
    except ValueError as e:
        raise SequenceSpecError(f"Malformed {what} list '{text}'") from e


def parse_range(text: str) -> np.ndarray:
    """'<lo>:<hi>:<points>' as a geometric grid"""
    parts = text.split(':')
    if len(parts) != 3:
        raise SequenceSpecError(f"Range must look like lo:hi:points, got '{text}'")
    try:
        lo, hi, points = float(parts[0]), float(parts[1]), int(parts[2])
    except ValueError as e:
        raise SequenceSpecError(f"Malformed range '{text}'") from e
    if not (0 < lo < hi) or points < 2:
        raise SequenceSpecError(f"Range needs 0 < lo < hi and at least 2 points, got '{text}'")
    return np.geomspace(lo, hi, points)


def parse_grid(text: str) -> Tuple[int, int]:
    """'<n>x<m>' grid size"""
    try:
        n, m = (int(part) for part in text.lower().split('x'))
    except ValueError as e:
        raise SequenceSpecError(f"Grid must look like 64x64, got '{text}'") from e
    if n < 1 or m < 1:
        raise SequenceSpecError(f"Grid dimensions must be positive, got '{text}'")
    return n, m


def read_log_values(path: str) -> np.ndarray:
    """
    Read one decimal per line

    Blank lines and lines starting with '#' are skipped.
    """
    if not os.path.exists(path):
        raise SequenceSpecError(f"Sequence file not found: {path}")
    values = []
    try:
        with open(path, 'r', encoding='utf-8') as f:
            for number, line in enumerate(f, start=1):
                line = line.strip()
                if not line or line.startswith('#'):
                    continue
                try:
                    values.append(float(line))
                except ValueError as e:
                    raise SequenceSpecError(f"{path}:{number}: not a number: '{line}'") from e
    except (OSError, UnicodeDecodeError) as e:
        logger.error(f"Error reading {path}: {e}")
        raise SequenceSpecError(f"Cannot read {path}: {e}") from e
    logger.info(f"Loaded {len(values)} values from {path}")
    return np.array(values, dtype=float)


def parse_sequence_spec(text: str, n_terms: int) -> WeightSequence:
    """
    Build a sequence from its spec string

    Args:
        text: gevrey:<a>, mab:<a>,<b>, qpow:<q>, logprod:<b>, file:<path> or quot:<path>
        n_terms: prefix length for built-in families; file tables keep their own length

    Returns:
        WeightSequence
    """
    kind, sep, rest = text.partition(':')
    kind = kind.strip().lower()
    if not sep or kind not in SPEC_KINDS:
        raise SequenceSpecError(f"Unknown sequence spec '{text}', expected one of {', '.join(SPEC_KINDS)}")
    if not rest.strip():
        raise SequenceSpecError(f"Sequence spec '{text}' has no argument")

    if kind == 'file':
        return from_log_table(read_log_values(rest.strip()), label=text)
    if kind == 'quot':
        return from_log_quotients(read_log_values(rest.strip()), label=text)

    params = parse_float_list(rest, 'parameter')
    if len(params) != PARAM_COUNTS[kind]:
        raise SequenceSpecError(f"{kind} takes {PARAM_COUNTS[kind]} parameter(s), got {len(params)}")
    if kind == 'gevrey':
        return make_gevrey(params[0], n_terms)
    if kind == 'mab':
        return make_mab(params[0], params[1], n_terms)
    if kind == 'qpow':
        return make_qpow(params[0], n_terms)
    return make_log_product(params[0], n_terms)


def write_output(text: str, path: Optional[str] = None):
    """Write a report to path, or to standard output when path is None"""
    if path is None:
        sys.stdout.write(text)
        return
    try:
        with open(path, 'w', encoding='utf-8') as f:
            f.write(text)
    except OSError as e:
        logger.error(f"Error saving to {path}: {e}")
        raise InvalidParameterError(f"Cannot write {path}: {e}") from e
    logger.info(f"Wrote {path}")
