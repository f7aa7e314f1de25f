"""
Command-line analyzer for weight sequences and the asymptotic Borel map
"""
import argparse
import logging
import sys
from typing import Dict, Any, List, Optional

import numpy as np

import config
from carleman.associated import AssociatedFunctions
from carleman.classification import full_classification
from carleman.errors import (
    CarlemanError, InvalidParameterError, SequenceSpecError, InsufficientDataError,
    DomainError, RangeError, InvariantViolation,
)
from carleman.indices import omega, gamma, gamma_via_gamma_beta, exponent_of_convergence
from carleman.properties import full_report
from carleman.proximate_order import (
    parse_proximate_order, default_proximate_order, certify_flatness,
    check_real_part_bound, check_proximate_order, log_grid,
)
from carleman.weight_sequence import WeightSequence, make_mab
from utils.formatter import (
    format_interval, format_eval_value, format_report_text, format_number,
    to_json, to_csv, to_text_table, table_rows, table_json, format_error_message, TABLE_COLUMNS,
)
from utils.loader import parse_sequence_spec, parse_float_list, parse_range, parse_grid, write_output

logger = logging.getLogger(__name__)

EXIT_OK, EXIT_INTERNAL, EXIT_USAGE, EXIT_DATA = 0, 1, 2, 3
EVAL_FUNCTIONS = ('hM', 'omegaM', 'dM')
INJECTIVITY_NAMES = ('I_M', 'Iu_M', 'Itilde_M')
SURJECTIVITY_NAMES = ('S_M', 'Su_M', 'Stilde_M')


def setup_logging(level: str, log_file: Optional[str] = None):
    """Log to stderr, plus a file when configured; stdout carries reports only"""
    handlers = [logging.StreamHandler(sys.stderr)]
    if log_file:
        handlers.append(logging.FileHandler(log_file))
    logging.basicConfig(
        level=getattr(logging, level.upper(), logging.WARNING),
        format='%(asctime)s - %(name)s - %(levelname)s - %(message)s',
        handlers=handlers,
        force=True,
    )


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument('--seq', help='gevrey:<a> | mab:<a>,<b> | qpow:<q> | logprod:<b> | file:<path> | quot:<path>')
    common.add_argument('--terms', type=int, default=config.DEFAULT_TERMS, help='prefix length for built-in families')
    common.add_argument('--format', choices=('json', 'csv', 'text'), default=None,
                        help='json by default, csv for eval')
    common.add_argument('--out', default=None, help='write the report here instead of stdout')
    common.add_argument('--log-level', default=config.LOG_LEVEL)
    common.add_argument('--numeric', action='store_true', help='ignore closed forms of built-in families')

    parser = argparse.ArgumentParser(prog='borel_cli.py', description=__doc__.strip())
    sub = parser.add_subparsers(dest='command', required=True)
    for name in ('analyze', 'classify'):
        cmd = sub.add_parser(name, parents=[common])
        cmd.add_argument('--po', default=None, help='proximate order to test for admissibility')
    sub.add_parser('props', parents=[common])
    sub.add_parser('indices', parents=[common])

    cmd = sub.add_parser('eval', parents=[common])
    cmd.add_argument('--fn', choices=EVAL_FUNCTIONS, required=True)
    group = cmd.add_mutually_exclusive_group(required=True)
    group.add_argument('--at', help='comma-separated t values')
    group.add_argument('--range', help='lo:hi:points, geometric')

    cmd = sub.add_parser('flat', parents=[common])
    cmd.add_argument('--sector-opening', type=float, required=True, help='opening as a fraction of pi')
    cmd.add_argument('--radius', type=float, default=0.1)
    cmd.add_argument('--grid', default=f'{config.FLAT_GRID[0]}x{config.FLAT_GRID[1]}')
    cmd.add_argument('--po', default=None)
    cmd.add_argument('--csv-out', default=None, help='dump the sampled grid as CSV')

    cmd = sub.add_parser('table', parents=[common])
    cmd.add_argument('--alpha', type=float, required=True)
    cmd.add_argument('--betas', required=True, help='comma-separated beta values')
    return parser


class BorelAnalyzer:
    """Runs one CLI command and renders its report"""

    def __init__(self, args: argparse.Namespace):
        config.validate_config()
        if args.terms < config.MIN_TERMS:
            raise InvalidParameterError(f"--terms must be at least {config.MIN_TERMS}, got {args.terms}")
        self.args = args
        self.closed_form = not args.numeric
        self.format = args.format or ('csv' if args.command == 'eval' else 'json')
        self.exit_code = EXIT_OK

    def load_sequence(self) -> WeightSequence:
        if not self.args.seq:
            raise SequenceSpecError(f"{self.args.command} needs --seq")
        seq = parse_sequence_spec(self.args.seq, self.args.terms)
        if seq.regularized:
            logger.warning(f"{seq.label} was replaced by its log-convex minorant")
        return seq

    def _proximate_order(self, seq: Optional[WeightSequence] = None):
        """--po when given, else the default order of seq (required when seq is passed)"""
        if self.args.po:
            return parse_proximate_order(self.args.po)
        if seq is not None:
            spec = default_proximate_order(seq)
            if spec is None:
                raise SequenceSpecError(f"{self.args.seq} has no default proximate order, pass --po")
            return spec
        return None

    def run(self) -> str:
        handler = getattr(self, f"cmd_{self.args.command}")
        return handler()

    def _render(self, data: Dict[str, Any], rows: List[List[Any]], header: List[str], text: str) -> str:
        if self.format == 'json':
            return to_json(data)
        if self.format == 'csv':
            return to_csv(rows, header)
        return text

    @staticmethod
    def _interval_rows(report) -> List[List[Any]]:
        rows = []
        for group, names, verdicts in (('injectivity', INJECTIVITY_NAMES, report.injectivity),
                                       ('surjectivity', SURJECTIVITY_NAMES, report.surjectivity)):
            for name, verdict in zip(names, verdicts):
                encoded = verdict.to_dict()
                bound = encoded['bound']
                rows.append([group, name, encoded['kind'],
                             format_number(bound) if isinstance(bound, float) else (bound or ''),
                             encoded['endpoint'], str(encoded['subset_proven']).lower(),
                             format_interval(verdict)])
        return rows

    def cmd_analyze(self) -> str:
        seq = self.load_sequence()
        report = full_classification(seq, self._proximate_order(), closed_form=self.closed_form)
        return self._render(report.to_dict(), self._interval_rows(report),
                            ['class', 'set', 'kind', 'bound', 'endpoint', 'subset_proven', 'interval'],
                            format_report_text(report))

    def cmd_classify(self) -> str:
        seq = self.load_sequence()
        report = full_classification(seq, self._proximate_order(), closed_form=self.closed_form)
        full = report.to_dict()
        data = {key: full[key] for key in ('sequence', 'injectivity', 'surjectivity', 'citations')}
        text = ''.join(f"{name} = {format_interval(v)}\n" for name, v in
                       zip(INJECTIVITY_NAMES + SURJECTIVITY_NAMES, report.injectivity + report.surjectivity))
        return self._render(data, self._interval_rows(report),
                            ['class', 'set', 'kind', 'bound', 'endpoint', 'subset_proven', 'interval'], text)

    def cmd_props(self) -> str:
        seq = self.load_sequence()
        report = full_report(seq)
        data = {'sequence': seq.label, 'terms': seq.n_terms, 'regularized': seq.regularized,
                'properties': report.to_dict()}
        rows = []
        for name, verdict in report.to_dict().items():
            witness = verdict.get('witness')
            rows.append([name, verdict['status'], '' if witness is None else format_eval_value(witness),
                         str(verdict['stabilized']).lower()])
        text = ''.join(f"{row[0]}: {row[1]}{' (witness ' + row[2] + ')' if row[2] else ''}\n" for row in rows)
        return self._render(data, rows, ['property', 'status', 'witness', 'stabilized'], text)

    def _exponent(self, log_values: np.ndarray) -> Optional[Dict[str, Any]]:
        try:
            return exponent_of_convergence(log_values, is_log=True).to_dict()
        except InvalidParameterError as e:
            logger.warning(f"Exponent of convergence skipped: {e}")
            return None

    def cmd_indices(self) -> str:
        seq = self.load_sequence()
        omega_estimate = omega(seq, closed_form=self.closed_form)
        gamma_estimate = gamma(seq, closed_form=self.closed_form, omega_estimate=omega_estimate)
        log_m = seq.log_m
        shifted = log_m + np.log(np.arange(1, len(log_m) + 1, dtype=float))
        data = {
            'sequence': seq.label,
            'omega': omega_estimate.to_dict(),
            'gamma': gamma_estimate.to_dict(),
            'gamma_beta': gamma_via_gamma_beta(seq, closed_form=self.closed_form).to_dict(),
            'exponent_of_convergence': {
                'quotients': self._exponent(log_m),
                'shifted_quotients': self._exponent(shifted),
            },
        }
        rows = [[name, entry['value'] if entry else ''] for name, entry in
                (('omega', data['omega']), ('gamma', data['gamma']), ('gamma_beta', data['gamma_beta']),
                 ('exponent_quotients', data['exponent_of_convergence']['quotients']),
                 ('exponent_shifted_quotients', data['exponent_of_convergence']['shifted_quotients']))]
        rows = [[name, value if isinstance(value, str) else format_eval_value(value)] for name, value in rows]
        text = ''.join(f"{name} = {value}\n" for name, value in rows)
        return self._render(data, rows, ['index', 'value'], text)

    def cmd_eval(self) -> str:
        seq = self.load_sequence()
        ev = AssociatedFunctions(seq)
        if self.args.at is not None:
            values = parse_float_list(self.args.at, 't')
            tokens = [item.strip() for item in self.args.at.split(',') if item.strip()]
            points = list(zip(tokens, values))
        else:
            points = [(format_eval_value(t), float(t)) for t in parse_range(self.args.range)]

        evaluate = {'hM': ev.h_M, 'omegaM': ev.omega_M, 'dM': ev.d_M}[self.args.fn]
        results = []
        for label, t in points:
            try:
                results.append((label, t, evaluate(t)))
            except DomainError as e:
                logger.info(f"{self.args.fn}({label}) out of range: {e}")
                results.append((label, t, None))
        if not any(value is not None for _, _, value in results):
            logger.error(f"No t value lies in the range of {self.args.fn} for {seq.label}")
            self.exit_code = EXIT_DATA

        if self.format == 'json':
            return to_json({'sequence': seq.label, 'function': self.args.fn,
                            'values': [{'t': t, 'value': value, 'error': None if value is not None else 'range'}
                                       for _, t, value in results]})
        return ''.join(f"{label},{'ERR:range' if value is None else format_eval_value(value)}\n"
                       for label, _, value in results)

    def cmd_flat(self) -> str:
        seq = self.load_sequence()
        spec = self._proximate_order(seq)
        grid = parse_grid(self.args.grid)
        witness = certify_flatness(seq, spec, self.args.sector_opening, self.args.radius, grid)
        data = {'sequence': seq.label, 'proximate_order': spec.describe(), 'witness': witness.to_dict()}
        try:
            data['real_part_bound'] = check_real_part_bound(spec, self.args.sector_opening, grid)
        except InvalidParameterError as e:
            data['real_part_bound'] = {'pass': False, 'detail': str(e)}
        data['proximate_order_check'] = check_proximate_order(
            spec, log_grid(max(spec.R0, np.e ** 2) * 1.01, 1e12))

        if self.args.csv_out:
            write_output(to_csv([[format_eval_value(v) for v in row] for row in witness.rows],
                                ['modulus', 'argument', 'log_abs_G', 'log_bound']), self.args.csv_out)
        rows = [[key, format_eval_value(value) if isinstance(value, float) else value]
                for key, value in witness.to_dict().items() if not isinstance(value, (dict, list))]
        text = ''.join(f"{key} = {value}\n" for key, value in rows)
        return self._render(data, rows, ['field', 'value'], text)

    def cmd_table(self) -> str:
        alpha = self.args.alpha
        betas = parse_float_list(self.args.betas, 'beta')
        reports = []
        for beta in betas:
            seq = make_mab(alpha, beta, self.args.terms)
            reports.append({'beta': beta, 'report': full_classification(seq, use_rationality=False)})
        rows = table_rows(reports)
        if self.format == 'json':
            return table_json(alpha, reports)
        if self.format == 'csv':
            return to_csv(rows, TABLE_COLUMNS)
        return to_text_table(rows, TABLE_COLUMNS)


def main(argv: Optional[List[str]] = None) -> int:
    """Main entry point; returns the process exit code"""
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return EXIT_USAGE if e.code else EXIT_OK
    setup_logging(args.log_level, config.LOG_FILE)

    try:
        analyzer = BorelAnalyzer(args)
        write_output(analyzer.run(), args.out)
        return analyzer.exit_code
    except (InsufficientDataError, RangeError) as e:
        logger.error(format_error_message(args.command, str(e)))
        return EXIT_DATA
    except InvariantViolation as e:
        logger.error(format_error_message(args.command, f"internal invariant violated: {e}"))
        return EXIT_INTERNAL
    except (CarlemanError, ValueError) as e:
        logger.error(format_error_message(args.command, str(e)))
        return EXIT_USAGE


if __name__ == '__main__':
    sys.exit(main())
