#!/usr/bin/env python3
# -*- coding: utf-8 -*-

import pytest

from tras_stbc.config import build_config
from tras_stbc.modulation import ModulationSpec
from tras_stbc.performance import error_rate
from tras_stbc.snr_model import SchemeConfig, Tasc
from tras_stbc.specfun import EvaluationError
from tras_stbc.sweep import (
    MissingColumnsError, SweepRow, gamma_bar_at, read_csv, run_sweep,
    sweep_tasks, target_name, write_csv
)
import tras_stbc.sweep as sweep


@pytest.fixture
def small_run():
    return build_config({'scheme': 'tas', 'nt': 2, 'ns': 1, 'nr': 1,
                         'mod': 'bpsk', 'pe': [0, 0.1], 'snr': '0:5:10'})


def test_target_name():
    assert target_name(ModulationSpec.parse('mqam:16')) == 'mqam:16'
    assert target_name(2.0) == 'outage:2'


def test_gamma_bar_at():
    cfg = SchemeConfig('tas', 3, 2, 1, 1)
    qpsk = ModulationSpec.parse('qpsk')
    assert gamma_bar_at(cfg, qpsk, 10.0) == pytest.approx(5.0)
    assert gamma_bar_at(cfg, qpsk, 10.0, 'eb') == pytest.approx(10.0)
    # The rate does not have bits per symbol
    assert gamma_bar_at(cfg, 2.0, 10.0, 'eb') == pytest.approx(5.0)


def test_run_sweep(small_run):
    rows = run_sweep(small_run)
    assert len(rows) == 6
    assert [(r.p_e, r.snr_db) for r in rows] == [
        (0.0, 0.0), (0.0, 5.0), (0.0, 10.0),
        (0.1, 0.0), (0.1, 5.0), (0.1, 10.0)]
    cfg = SchemeConfig('tas', 2, 1, 1, 1)
    assert rows[1].analytic == pytest.approx(
        error_rate(cfg, Tasc((1,)), ModulationSpec.parse('bpsk'),
                   cfg.gamma_bar(10 ** 0.5)))
    assert all(r.mc_mean is None and r.asymptotic is None for r in rows)
    # Feedback errors hurt
    assert rows[5].analytic > rows[2].analytic


def test_reference_rows(small_run):
    tasks = sweep_tasks(small_run, reference=True)
    pure = [t for t in tasks if t.cfg.n_t == t.cfg.n_s]
    assert len(pure) == 3
    assert all(t.pes == (0.0,) for t in pure)
    rows = run_sweep(small_run, reference=True)
    assert sum(r.is_reference for r in rows) == 3


def test_simulate_and_asymptote(small_run):
    with pytest.raises(ValueError):
        run_sweep(small_run, simulate=True)
    run = small_run.model_copy(update={'trials': 20_000, 'block_size': 5000})
    rows = run_sweep(run, simulate=True, asymptote=True)
    for row in rows:
        assert row.mc_stderr > 0
        assert abs(row.mc_mean - row.analytic) < 5 * row.mc_stderr
        assert row.asymptotic > 0


def test_error_context(small_run, monkeypatch):
    def fail(*args, **kwargs):
        raise EvaluationError('did not converge')
    monkeypatch.setattr(sweep, 'per_tasc_metrics', fail)
    with pytest.raises(EvaluationError, match=r'n_T=2.*SNR=0.0 dB: did not'):
        run_sweep(small_run)


@pytest.mark.parametrize('name', ['rows.csv', 'rows.csv.gz', 'rows.csv.bz2'])
def test_csv_round_trip(tmp_path, name):
    rows = [
        SweepRow('tas', 3, 2, 1, '1/2', 'g2', 'bpsk', 0.01, 2.5,
                 1.2345678901234567e-05),
        SweepRow('joint', 3, 2, 1, '1', 'g3', 'outage:2', 0.0, 30.0,
                 0.1, 0.11, 0.001, 0.09),
    ]
    write_csv(rows, tmp_path / name)
    assert read_csv(tmp_path / name) == rows


def test_csv_header(tmp_path):
    output = tmp_path / 'rows.csv'
    write_csv([SweepRow('tas', 2, 1, 1, '1', 'g2', 'bpsk', 0.0, 0.0, 0.5)],
              output)
    lines = output.read_text().splitlines()
    assert lines[0] == ('scheme,n_t,n_s,n_r,m,code,target,p_e,snr_db,'
                        'analytic,mc_mean,mc_stderr,asymptotic,approximate')
    assert lines[1] == 'tas,2,1,1,1,g2,bpsk,0.0,0.0,0.5,,,,False'


def test_missing_columns(tmp_path):
    bad = tmp_path / 'bad.csv'
    bad.write_text('scheme,n_t\ntas,3\n')
    with pytest.raises(MissingColumnsError):
        read_csv(bad)


def test_approximate_rows_are_flagged(small_run, tmp_path, caplog):
    run = small_run.model_copy(update={'mod': 'mpsk:8'})
    with caplog.at_level('WARNING'):
        rows = run_sweep(run)
    assert 'approximate' in caplog.text
    assert rows and all(r.approximate for r in rows)
    write_csv(rows, tmp_path / 'rows.csv')
    assert all(r.approximate for r in read_csv(tmp_path / 'rows.csv'))

    caplog.clear()
    with caplog.at_level('WARNING'):
        exact = run_sweep(small_run.model_copy(update={'mod': 'mpsk:4'}))
    assert 'approximate' not in caplog.text
    assert not any(r.approximate for r in exact)


def test_read_csv_without_approximate(tmp_path):
    old = tmp_path / 'old.csv'
    old.write_text('scheme,n_t,n_s,n_r,m,code,target,p_e,snr_db,analytic,'
                   'mc_mean,mc_stderr,asymptotic\n'
                   'tas,2,1,1,1,g2,mpsk:8,0.0,0.0,0.5,,,\n')
    row, = read_csv(old)
    assert row.analytic == 0.5
    assert row.approximate is False


def test_parallel_sweep_matches_serial(small_run):
    assert run_sweep(small_run, processes=2) == run_sweep(small_run)
