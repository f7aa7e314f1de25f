"""
Report formatting: intervals, numbers, JSON, CSV and text tables
"""
import csv
import io
import json
import math
from typing import Dict, Any, List, Sequence

import numpy as np

from carleman.classification import IntervalVerdict, CLOSED, OPEN

TABLE_COLUMNS = ('beta', 'I_M', 'Iu_M', 'Itilde_M', 'S_M', 'Su_M', 'Stilde_M')


def format_number(value: float) -> str:
    """Integral values without a fraction, everything else as the shortest round-trip repr"""
    value = float(value)
    if math.isinf(value):
        return 'inf'
    if value.is_integer() and abs(value) < 1e15:
        return str(int(value))
    return repr(value)


def format_eval_value(value: float) -> str:
    """17 significant digits, always with a decimal point or exponent"""
    text = format(float(value), '.17g')
    if not any(c in text for c in '.ein'):
        text += '.0'
    return text


def format_interval(verdict: IntervalVerdict) -> str:
    """
    Render an interval the way the family tables do

    "(a,inf)", "[a,inf)", "(0,b]", an undecided endpoint as both options,
    and a superset-only verdict prefixed with "subset of".
    """
    if verdict.kind == 'empty':
        text = 'empty'
    elif verdict.kind == 'all':
        text = '(0,inf)'
    elif verdict.kind == 'from':
        a = format_number(verdict.bound)
        options = {OPEN: [f'({a},inf)'], CLOSED: [f'[{a},inf)']}.get(verdict.endpoint,
                                                                      [f'({a},inf)', f'[{a},inf)'])
        text = ' or '.join(options)
    else:
        b = format_number(verdict.bound)
        options = {OPEN: [f'(0,{b})'], CLOSED: [f'(0,{b}]']}.get(verdict.endpoint,
                                                                  [f'(0,{b})', f'(0,{b}]'])
        text = ' or '.join(options)
    if not verdict.subset_proven:
        text = f'subset of {text}'
    return text


def to_plain(data: Any) -> Any:
    """Convert numpy scalars, tuples and non-finite floats into plain JSON values"""
    if isinstance(data, dict):
        return {str(k): to_plain(v) for k, v in data.items()}
    if isinstance(data, (list, tuple)):
        return [to_plain(v) for v in data]
    if isinstance(data, np.ndarray):
        return [to_plain(v) for v in data.tolist()]
    if isinstance(data, (bool, np.bool_)):
        return bool(data)
    if isinstance(data, (int, np.integer)):
        return int(data)
    if isinstance(data, (float, np.floating)):
        value = float(data)
        if math.isnan(value):
            return None
        if math.isinf(value):
            return 'inf' if value > 0 else '-inf'
        return value
    if hasattr(data, 'value') and isinstance(getattr(data, 'value'), str):
        return data.value
    return data


def to_json(data: Dict[str, Any]) -> str:
    """Deterministic JSON: insertion order kept, two-space indent, trailing newline"""
    return json.dumps(to_plain(data), indent=2, ensure_ascii=False, allow_nan=False) + '\n'


def to_csv(rows: Sequence[Sequence[Any]], header: Sequence[str]) -> str:
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator='\n')
    writer.writerow(header)
    for row in rows:
        writer.writerow(row)
    return buffer.getvalue()


def to_text_table(rows: Sequence[Sequence[str]], header: Sequence[str]) -> str:
    """Left-aligned columns separated by two spaces"""
    table = [list(header)] + [[str(cell) for cell in row] for row in rows]
    widths = [max(len(row[i]) for row in table) for i in range(len(header))]
    lines = ['  '.join(cell.ljust(width) for cell, width in zip(row, widths)).rstrip() for row in table]
    return '\n'.join(lines) + '\n'


def table_rows(reports: Sequence[Dict[str, Any]]) -> List[List[str]]:
    """One row per MAB sequence: beta and the six rendered intervals"""
    rows = []
    for entry in reports:
        report = entry['report']
        cells = [format_number(entry['beta'])]
        cells += [format_interval(v) for v in report.injectivity]
        cells += [format_interval(v) for v in report.surjectivity]
        rows.append(cells)
    return rows


def table_json(alpha: float, reports: Sequence[Dict[str, Any]]) -> str:
    rows = []
    for entry, cells in zip(reports, table_rows(reports)):
        rows.append({column: cell for column, cell in zip(TABLE_COLUMNS, cells)})
    return to_json({'family': 'mab', 'alpha': format_number(alpha), 'rows': rows})


def format_report_text(report) -> str:
    """Human-readable summary of a ClassificationReport"""
    data = report.to_dict()
    lines = [f"Sequence: {data['sequence']} ({data['terms']} terms)"]
    if data['regularized']:
        lines.append("  regularized to its log-convex minorant")
    lines.append(f"omega(M) = {data['indices']['omega']['value']}  gamma(M) = {data['indices']['gamma']['value']}")
    lines.append("Properties:")
    for name, verdict in data['properties'].items():
        lines.append(f"  {name}: {verdict['status']}")
    lines.append("Injectivity:")
    for key, verdict in zip(('I_M', 'Iu_M', 'Itilde_M'), report.injectivity):
        lines.append(f"  {key} = {format_interval(verdict)}")
    lines.append("Surjectivity:")
    for key, verdict in zip(('S_M', 'Su_M', 'Stilde_M'), report.surjectivity):
        lines.append(f"  {key} = {format_interval(verdict)}")
    if data['citations']:
        lines.append(f"Citations: {', '.join(data['citations'])}")
    return '\n'.join(lines) + '\n'


def format_error_message(source: str, error: str) -> str:
    return f"Error in {source}: {error}"
