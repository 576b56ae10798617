#!/usr/bin/env python3
# -*- coding: utf-8 -*-

import pytest

from tras_stbc.config import ConfigurationError
from tras_stbc.modulation import ModulationSpec
from tras_stbc.presets import DEFAULT_GRID, PRESETS, figure_preset
from tras_stbc.sweep import run_sweep


@pytest.mark.parametrize('name', sorted(PRESETS))
def test_presets_are_valid(name):
    run = figure_preset(name)
    assert run.snr == DEFAULT_GRID
    assert run.variants()


def test_preset_contents():
    fig2 = figure_preset('fig2')
    assert fig2.target() == 2.0
    assert fig2.code == 'g3'
    assert len(fig2.variants()) == 4
    fig7 = figure_preset('FIG7')
    assert fig7.target() == ModulationSpec.parse('bpsk')
    assert fig7.snr_axis == 'eb'
    assert fig7.nr == [1, 2, 3]


def test_overrides():
    run = figure_preset('fig3', {'snr': '0:1:10', 'trials': 1000,
                                 'pe': None})
    assert run.snr == '0:1:10'
    assert run.trials == 1000
    assert run.pe == [0.0, 0.01, 0.2, 0.5]


def test_reference_is_opt_in():
    assert not figure_preset('fig3').reference
    run = figure_preset('fig3', {'reference': True, 'snr': '0:10:10',
                                 'pe': [0.0]})
    assert run.reference
    rows = run_sweep(run)
    assert {(r.n_t, r.n_s) for r in rows if r.is_reference} == {(2, 2)}
    plain = run_sweep(run.model_copy(update={'reference': False}))
    assert not any(r.is_reference for r in plain)


def test_unknown_preset():
    with pytest.raises(ConfigurationError, match='fig9'):
        figure_preset('fig9')
