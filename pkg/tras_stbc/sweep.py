#!/usr/bin/env python3
# -*- coding: utf-8 -*-

"""
SNR sweeps: evaluates the analytic (and optionally the simulated and the
asymptotic) metric of every system variant and feedback error probability
on the SNR grid, and reads / writes the resulting rows as CSV.
"""

import csv
from dataclasses import astuple, dataclass, fields
from functools import partial
import logging
from multiprocessing import Pool
from pathlib import Path
from typing import Iterable, Optional, Union

from tras_stbc.feedback import mix_metric
from tras_stbc.modulation import ModulationSpec
from tras_stbc.montecarlo import (
    FeedbackMode, PartialResultError, ReceiveMode, TrialPlan,
    estimate_error_rate, estimate_outage
)
from tras_stbc.performance import Target, averaged_asymptote, per_tasc_metrics
from tras_stbc.schemas import RunConfig
from tras_stbc.snr_model import ExpansionTooLargeError, SchemeConfig
from tras_stbc.specfun import DomainError, EvaluationError
from tras_stbc.utils import db_to_linear, openall, otqdm

# Errors that are re-raised with the context of the row
ENGINE_ERRORS = (DomainError, EvaluationError, ExpansionTooLargeError,
                 PartialResultError)


@dataclass(frozen=True)
class SweepRow:
    """A point of a curve. The optional columns are ``None`` if not asked."""
    scheme: str
    n_t: int
    n_s: int
    n_r: int
    m: str
    code: str
    target: str
    p_e: float
    snr_db: float
    analytic: float
    mc_mean: Optional[float] = None
    mc_stderr: Optional[float] = None
    asymptotic: Optional[float] = None
    approximate: bool = False

    @property
    def curve(self) -> tuple:
        """The key of the curve the row belongs to."""
        return astuple(self)[:8]

    @property
    def is_reference(self) -> bool:
        return self.n_t == self.n_s


class MissingColumnsError(ValueError):
    """Raised if a CSV file lacks some of the columns needed."""


FIELDS = [f.name for f in fields(SweepRow)]
INT_FIELDS = {'n_t', 'n_s', 'n_r'}
FLOAT_FIELDS = {'p_e', 'snr_db', 'analytic', 'mc_mean', 'mc_stderr',
                'asymptotic'}
BOOL_FIELDS = {'approximate'}
# Columns that files written before their introduction may lack
OPTIONAL_FIELDS = {'approximate'}


def target_name(target: Target) -> str:
    if isinstance(target, ModulationSpec):
        return target.name
    return f'outage:{target:g}'


def gamma_bar_at(cfg: SchemeConfig, target: Target, snr_db: float,
                 snr_axis: str = 'es') -> float:
    """
    The average branch SNR at *snr_db*, which is E_s/N_0 or E_b/N_0
    (E_s = E_b log2 M).
    """
    es_n0 = db_to_linear(snr_db)
    if snr_axis == 'eb' and isinstance(target, ModulationSpec):
        es_n0 *= target.bits_per_symbol
    return cfg.gamma_bar(es_n0)


@dataclass(frozen=True)
class SweepTask:
    variant: int
    cfg: SchemeConfig
    pes: tuple[float, ...]
    snr_db: float


def _add_context(error: Exception, context: str) -> Exception:
    error.args = (f'{context}: {error.args[0]}',) + error.args[1:]
    return error


def evaluate_point(task: SweepTask, run: RunConfig, simulate: bool = False,
                   asymptote: bool = False) -> list[SweepRow]:
    """Computes the rows of all p_e values at a single SNR point."""
    cfg = task.cfg
    target = run.target()
    gamma_bar = gamma_bar_at(cfg, target, task.snr_db, run.snr_axis)
    rows = []
    per_tasc = None
    approximate = getattr(target, 'approximate', False)
    for p_e in task.pes:
        context = f'{cfg}, p_e={p_e}, SNR={task.snr_db} dB'
        try:
            if per_tasc is None:
                per_tasc = per_tasc_metrics(cfg, target, gamma_bar,
                                            run.precision)
            fm = run.feedback_model(cfg, p_e)
            analytic = mix_metric(per_tasc, fm)
            mc_mean = mc_stderr = asymptotic = None
            if simulate:
                plan = TrialPlan(
                    cfg, fm, target, gamma_bar, run.trials, run.seed,
                    FeedbackMode(run.feedback_mode),
                    ReceiveMode(run.receive_mode), run.block_size,
                    run.time_limit
                )
                if isinstance(target, ModulationSpec):
                    estimate = estimate_error_rate(plan)
                else:
                    estimate = estimate_outage(plan)
                mc_mean, mc_stderr = estimate.mean, estimate.std_error
            if asymptote:
                asymptotic = averaged_asymptote(cfg, target, fm, gamma_bar)
        except ENGINE_ERRORS as e:
            raise _add_context(e, context)
        rows.append(SweepRow(cfg.scheme.value, cfg.n_t, cfg.n_s, cfg.n_r,
                             str(cfg.m), run.code, target_name(target), p_e,
                             task.snr_db, analytic, mc_mean, mc_stderr,
                             asymptotic, approximate))
    return rows


def sweep_tasks(run: RunConfig, reference: bool = False) -> list[SweepTask]:
    """
    The tasks of a run: one per (variant, SNR point). With *reference*, the
    curves of the variants without transmit antenna selection (n_T = n_S)
    are added with p_e = 0.
    """
    variants = run.variants()
    pes = tuple(run.pe)
    groups = [(cfg, pes) for cfg in variants]
    if reference:
        seen = set()
        for cfg in variants:
            pure = cfg.pure_stbc()
            if pure not in seen and pure not in variants:
                seen.add(pure)
                groups.append((pure, (0.0,)))
    return [SweepTask(index, cfg, group_pes, snr_db)
            for index, (cfg, group_pes) in enumerate(groups)
            for snr_db in run.snr_grid()]


def run_sweep(run: RunConfig, processes: int = 1, simulate: bool = False,
              asymptote: bool = False, reference: bool = False,
              progress: bool = False) -> list[SweepRow]:
    """
    Runs the sweep. The rows are ordered by (variant, p_e, SNR) regardless
    of the order in which the points are finished.
    """
    if simulate and run.trials is None:
        raise ValueError('Simulation requires the number of trials')
    target = run.target()
    if getattr(target, 'approximate', False):
        logging.warning(f'The {target} error rates use the approximate '
                        f'CEP of M-PSK; the rows are flagged.')
    tasks = sweep_tasks(run, reference or run.reference)
    logging.info(f'Sweeping {len(tasks)} points with {processes} '
                 f'process(es)...')
    fn = partial(evaluate_point, run=run, simulate=simulate,
                 asymptote=asymptote or run.asymptote)
    if processes > 1:
        with Pool(processes) as pool:
            results = pool.imap(fn, tasks)
            if progress:
                results = otqdm(results, total=len(tasks),
                                desc='Sweeping SNR points...')
            results = list(results)
    else:
        results = map(fn, tasks)
        if progress:
            results = otqdm(results, total=len(tasks),
                            desc='Sweeping SNR points...')
        results = list(results)

    keyed = []
    for task, rows in zip(tasks, results):
        for pe_index, row in enumerate(rows):
            keyed.append(((task.variant, pe_index, task.snr_db), row))
    keyed.sort(key=lambda kr: kr[0])
    logging.info(f'Sweep done; {len(keyed)} rows.')
    return [row for _, row in keyed]


def _format(value) -> str:
    if value is None:
        return ''
    if isinstance(value, float):
        return repr(value)
    return str(value)


def write_csv(rows: Iterable[SweepRow], output_file: Union[str, Path]):
    """Writes the rows; ``.gz`` and ``.bz2`` files are compressed."""
    with openall(output_file, 'wt', newline='') as outf:
        writer = csv.writer(outf, lineterminator='\n')
        writer.writerow(FIELDS)
        for row in rows:
            writer.writerow([_format(v) for v in astuple(row)])


def _parse_value(name: str, value: str):
    if name in INT_FIELDS:
        return int(value)
    if name in BOOL_FIELDS:
        return value == 'True'
    if name in FLOAT_FIELDS:
        return float(value) if value != '' else None
    return value


def read_csv(input_file: Union[str, Path]) -> list[SweepRow]:
    """Reads the rows written by :func:`write_csv`."""
    with openall(input_file, 'rt', newline='') as inf:
        reader = csv.DictReader(inf)
        present = set(reader.fieldnames or [])
        missing = set(FIELDS) - OPTIONAL_FIELDS - present
        if missing:
            raise MissingColumnsError(
                f'{input_file} lacks the columns {sorted(missing)}')
        return [SweepRow(**{name: _parse_value(name, record[name])
                            for name in FIELDS if name in present})
                for record in reader]
