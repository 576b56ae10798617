#!/usr/bin/env python3
# -*- coding: utf-8 -*-

"""
Performance analysis of joint TRAS/STBC and TAS/STBC with feedback errors
over Nakagami-m fading: analytic SNR sweeps, Monte Carlo simulation,
high-SNR asymptotes, the published figures, comparison reports and the
acceptance checks.

Exit codes: 0 on success, 1 for configuration errors, 2 for numerical
errors and 3 if an acceptance check failed.
"""

from argparse import ArgumentParser
import logging
import os
from pathlib import Path
import sys

from multiprocessing_logging import install_mp_handler

from tras_stbc.acceptance import CHECKS, CheckOptions, run_checks
from tras_stbc.config import ConfigurationError, load_config
from tras_stbc.performance import asymptotic_table, exact_leading_term
from tras_stbc.presets import PRESETS, figure_preset
from tras_stbc.report import MissingColumnsError, compare_report
from tras_stbc.schemas import RunConfig
from tras_stbc.sweep import ENGINE_ERRORS, read_csv, run_sweep, write_csv
from tras_stbc.utils import grid_type


def add_run_arguments(parser: ArgumentParser):
    """The flags that override the values of the configuration file."""
    parser.add_argument('--config', '-c', type=Path,
                        help='the configuration file (YAML or key = value).')
    parser.add_argument('--scheme', choices=['joint', 'tas'],
                        help='joint TRAS/STBC or TAS/STBC.')
    parser.add_argument('--nt', help='the number of transmit antennas '
                                     '(comma-separated list).')
    parser.add_argument('--ns', type=int,
                        help='the number of selected transmit antennas.')
    parser.add_argument('--nr', help='the number of receive antennas '
                                     '(comma-separated list).')
    parser.add_argument('--m', help='the Nakagami parameter (e.g. 1/2).')
    parser.add_argument('--code', choices=['g2', 'g3'],
                        help='the orthogonal STBC.')
    parser.add_argument('--code-rate',
                        help='overrides the rate of the code (e.g. 1/2).')
    parser.add_argument('--mod', help='the modulation for error rates: '
                                      'bpsk, cbfsk, ncbfsk, dbpsk, qpsk, '
                                      'mpsk:M, mpam:M or mqam:M.')
    parser.add_argument('--rate', type=float,
                        help='the target rate of the outage probability.')
    parser.add_argument('--pe', type=float, action='append',
                        help='a feedback bit error probability; can be '
                             'specified more than once.')
    parser.add_argument('--snr', type=grid_type,
                        help='the SNR grid in dB (start:step:stop).')
    parser.add_argument('--snr-axis', choices=['es', 'eb'],
                        help='whether the grid is E_s/N_0 or E_b/N_0.')
    parser.add_argument('--trials', help='the number of Monte Carlo trials.')
    parser.add_argument('--seed', type=int,
                        help='the seed of the simulation.')
    parser.add_argument('--feedback-mode', choices=['uniform', 'bit-exact'],
                        help='how the simulated feedback link picks the '
                             'activated TASC.')
    parser.add_argument('--receive-mode', choices=['model', 'physical'],
                        help='whether the simulated receiver combines the '
                             'analytic model or the physical channel.')
    parser.add_argument('--mapping',
                        help='the TASC to codeword mapping: natural or '
                             'perm=<comma-separated codeword list>.')
    parser.add_argument('--reference', action='store_true', default=None,
                        help='adds the curves of the variants without '
                             'antenna selection (n_T = n_S, p_e = 0).')
    parser.add_argument('--out', '-o', type=Path, required=True,
                        help='the output CSV file (.gz and .bz2 are '
                             'compressed).')


def parse_arguments():
    parser = ArgumentParser(description=__doc__)
    parser.add_argument('--processes', '-P', type=int, default=1,
                        help='number of worker processes to use (max is the '
                             'num of cores, default: 1).')
    parser.add_argument('--log-level', '-L', type=str, default='info',
                        choices=['debug', 'info', 'warning',
                                 'error', 'critical'],
                        help='the logging level.')
    subparsers = parser.add_subparsers(
        required=True, help='Choose the task to perform.')

    parser_analyze = subparsers.add_parser(
        'analyze', help='Computes the analytic curves.')
    parser_analyze.set_defaults(command='analyze')
    add_run_arguments(parser_analyze)

    parser_simulate = subparsers.add_parser(
        'simulate', help='Adds the Monte Carlo columns to the curves.')
    parser_simulate.set_defaults(command='simulate')
    add_run_arguments(parser_simulate)

    parser_asymptote = subparsers.add_parser(
        'asymptote', help='Adds the high-SNR asymptote to the curves and '
                          'logs the asymptotic parameters.')
    parser_asymptote.set_defaults(command='asymptote')
    add_run_arguments(parser_asymptote)

    parser_figure = subparsers.add_parser(
        'figure', help='Computes the curves of a published figure.')
    parser_figure.set_defaults(command='figure')
    parser_figure.add_argument('name', choices=sorted(PRESETS),
                               help='the figure preset.')
    add_run_arguments(parser_figure)

    parser_compare = subparsers.add_parser(
        'compare', help='Compares the analytic and simulated values of a '
                        'CSV file.')
    parser_compare.set_defaults(command='compare')
    parser_compare.add_argument('input_file', type=Path,
                                help='the CSV file written by simulate.')
    parser_compare.add_argument('--level', type=float, action='append',
                                help='the metric level(s) at which the SNR '
                                     'gaps are reported (1e-5).')

    parser_check = subparsers.add_parser(
        'check', help='Runs the acceptance checks.')
    parser_check.set_defaults(command='check')
    parser_check.add_argument('checks', nargs='*',
                              help='the checks to run (all): ' +
                                   ', '.join(CHECKS) + '.')
    parser_check.add_argument('--trials', type=int, default=10 ** 6,
                              help='the number of Monte Carlo trials (1e6).')
    parser_check.add_argument('--seed', type=int, default=42,
                              help='the seed of the random checks.')

    args = parser.parse_args()
    num_procs = len(os.sched_getaffinity(0))
    if args.processes < 1 or args.processes > num_procs:
        parser.error('Number of processes must be between 1 and {}'.format(
            num_procs))
    if getattr(args, 'mapping', None) not in (None, 'natural') and \
            not args.mapping.startswith('perm='):
        parser.error('--mapping must be natural or perm=<codewords>')
    unknown = set(getattr(args, 'checks', [])) - set(CHECKS)
    if unknown:
        parser.error(f'Unknown checks: {", ".join(sorted(unknown))}')
    return args


def overrides_from(args) -> dict:
    """The configuration values given on the command line."""
    overrides = {
        key: getattr(args, key) for key in [
            'scheme', 'nt', 'ns', 'nr', 'm', 'code', 'code_rate', 'mod',
            'rate', 'pe', 'snr', 'snr_axis', 'trials', 'seed',
            'feedback_mode', 'receive_mode', 'reference'
        ]
    }
    if args.mapping == 'natural':
        overrides['mapping'] = 'natural'
    elif args.mapping:
        overrides['mapping'] = 'permutation'
        overrides['permutation'] = args.mapping.removeprefix('perm=')
    return overrides


def load_run(args) -> RunConfig:
    if args.command == 'figure':
        if args.config:
            logging.warning('The configuration file is ignored for figures.')
        return figure_preset(args.name, overrides_from(args))
    return load_config(args.config, overrides_from(args))


def log_asymptotes(run: RunConfig):
    """Logs the union bound and the exact leading term of every TASC."""
    for cfg in run.variants():
        for tasc, params in asymptotic_table(cfg).items():
            exact = exact_leading_term(cfg, tasc)
            logging.info(f'{cfg} {tasc}: a = {params.a:.6g}, t = {params.t}, '
                         f'ADO = {params.ado}; exact leading term: '
                         f'{exact.a:.6g} x^{exact.t}')


def sweep(args) -> int:
    run = load_run(args)
    logging.info(f'Running {args.command} on {len(run.variants())} '
                 f'variant(s)...')
    simulate = args.command == 'simulate' or (
        args.command == 'figure' and run.trials is not None)
    if simulate and run.trials is None:
        raise ConfigurationError(['simulation needs the number of trials'])
    if args.command == 'asymptote':
        log_asymptotes(run)
    rows = run_sweep(run, args.processes, simulate=simulate,
                     asymptote=args.command == 'asymptote',
                     progress=True)
    write_csv(rows, args.out)
    logging.info(f'Wrote {len(rows)} rows to {args.out}.')
    return 0


def compare(args) -> int:
    rows = read_csv(args.input_file)
    print(compare_report(rows, args.level or (1e-5,)), end='')
    return 0


def check(args) -> int:
    opts = CheckOptions(processes=args.processes, trials=args.trials,
                        seed=args.seed)
    results = run_checks(args.checks or None, opts)
    for result in results:
        print(f'{result.name}: {"PASSED" if result.passed else "FAILED"}')
        for detail in result.details:
            print(f'    {detail}')
    return 0 if all(result.passed for result in results) else 3


def main() -> int:
    args = parse_arguments()

    logging.basicConfig(
        level=getattr(logging, args.log_level.upper()),
        format='%(asctime)s - %(process)s - %(levelname)s - %(message)s'
    )
    install_mp_handler()

    try:
        if args.command == 'compare':
            return compare(args)
        elif args.command == 'check':
            return check(args)
        else:
            return sweep(args)
    except ConfigurationError as ce:
        for error in ce.errors:
            logging.error(error)
        return 1
    except MissingColumnsError as mce:
        logging.error(str(mce))
        return 1
    except ENGINE_ERRORS as e:
        logging.error(f'Numerical error: {e}')
        return 2


if __name__ == '__main__':
    sys.exit(main())
