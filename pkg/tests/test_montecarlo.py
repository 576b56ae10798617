#!/usr/bin/env python3
# -*- coding: utf-8 -*-

import numpy as np
import pytest

from tras_stbc.feedback import (
    FeedbackModel, bit_exact_transition_matrix, build_codebook
)
from tras_stbc.modulation import ModulationSpec
from tras_stbc.montecarlo import (
    BlockResult, FeedbackMode, FeedbackSampler, PartialResultError,
    ReceiveMode, TrialPlan, draw_feedback, estimate_error_rate,
    estimate_outage, output_snr, run_selection, sample_channel_powers
)
from tras_stbc.performance import error_rate, outage
from tras_stbc.snr_model import SchemeConfig, Tasc, all_tascs


def plan_for(cfg, p_e=0.0, target='bpsk', gamma_bar=2.0, trials=200_000,
             **kwargs):
    if isinstance(target, str):
        target = ModulationSpec.parse(target)
    fm = FeedbackModel(p_e, build_codebook(cfg))
    return TrialPlan(cfg, fm, target, gamma_bar, trials, **kwargs)


def test_block_merge():
    rng = np.random.default_rng(1)
    values = rng.random(1000)
    merged = BlockResult.from_values(values[:300]).merge(
        BlockResult.from_values(values[300:]))
    whole = BlockResult.from_values(values)
    assert merged.n == whole.n
    assert merged.mean == pytest.approx(whole.mean)
    assert merged.m2 == pytest.approx(whole.m2)
    estimate = whole.estimate()
    assert estimate.std_error == pytest.approx(
        np.std(values, ddof=1) / np.sqrt(1000))


def test_run_selection():
    cfg = SchemeConfig('tas', 2, 1, 2, 1)
    gains = [[1.0, 2.0], [0.0, 1.0]]
    assert run_selection(gains, cfg, Tasc((1,))) == 3.0
    assert run_selection(gains, cfg, Tasc((2,))) == 1.0


def test_joint_selection_modes():
    cfg = SchemeConfig('joint', 3, 2, 2, 1)
    # The receive antenna is picked for the best pair (row 1), not for the
    # activated ranks
    gains = [[2.0, 2.0, 0.0], [5.0, 0.0, 0.0]]
    assert run_selection(gains, cfg, Tasc((1, 2))) == 5.0
    assert run_selection(gains, cfg, Tasc((2, 3))) == 2.0
    assert run_selection(gains, cfg, Tasc((2, 3)),
                         ReceiveMode.PHYSICAL) == 0.0


def test_channel_powers():
    cfg = SchemeConfig('joint', 3, 2, 2, 2, omega=3.0)
    powers = sample_channel_powers(cfg, np.random.default_rng(0), 100_000)
    assert powers.shape == (100_000, 2, 3)
    assert powers.mean() == pytest.approx(3.0, rel=0.01)


def test_output_snr_tascs():
    cfg = SchemeConfig('tas', 3, 2, 1, 1)
    snr = np.array([[[1.0, 3.0, 2.0]]] * 3)
    assert list(output_snr(snr, cfg, np.arange(3))) == [5.0, 4.0, 3.0]


def test_plan_validation():
    with pytest.raises(ValueError):
        plan_for(SchemeConfig('tas', 3, 2, 1, 1),
                 receive_mode=ReceiveMode.PHYSICAL)
    with pytest.raises(ValueError):
        plan_for(SchemeConfig('tas', 3, 2, 1, 1), trials=0)
    plan = plan_for(SchemeConfig('tas', 3, 2, 1, 1), trials=250,
                    block_size=100)
    assert plan.blocks == 3
    assert [plan.block_trials(b) for b in range(3)] == [100, 100, 50]


@pytest.mark.parametrize('mode', list(FeedbackMode))
def test_feedback_sampler(codebook_3_2, mode):
    fm = FeedbackModel(0.2, codebook_3_2)
    draws = FeedbackSampler(fm, mode).draw(np.random.default_rng(7), 200_000)
    frequencies = np.bincount(draws, minlength=3) / len(draws)
    expected = fm.weights() if mode is FeedbackMode.UNIFORM \
        else bit_exact_transition_matrix(0.2, codebook_3_2)
    assert frequencies == pytest.approx(expected, abs=0.005)


def test_draw_feedback(codebook_3_2):
    cfg = SchemeConfig('tas', 3, 2, 1, 1)
    fm = FeedbackModel(0.0, codebook_3_2)
    assert draw_feedback(cfg, fm, np.random.default_rng(0)) == Tasc((1, 2))


def test_error_rate_estimate(selection_of_two, c1):
    plan = plan_for(selection_of_two)
    estimate = estimate_error_rate(plan)
    expected = error_rate(selection_of_two, c1, plan.target, plan.gamma_bar)
    assert estimate.trials == plan.trials
    assert abs(estimate.mean - expected) < 5 * estimate.std_error


def test_estimate_with_feedback_errors():
    cfg = SchemeConfig('joint', 3, 2, 1, 1)
    plan = plan_for(cfg, p_e=0.2, target='qpsk', gamma_bar=3.0)
    estimate = estimate_error_rate(plan)
    values = [error_rate(cfg, t, plan.target, 3.0) for t in all_tascs(cfg)]
    expected = sum(w * v for w, v in zip(plan.fm.weights(), values))
    assert abs(estimate.mean - expected) < 5 * estimate.std_error


def test_outage_estimate(selection_of_two, c1):
    plan = plan_for(selection_of_two, target=1.0, gamma_bar=1.0)
    estimate = estimate_outage(plan)
    expected = outage(selection_of_two, c1, 1.0, 1.0)
    assert abs(estimate.mean - expected) < 5 * estimate.std_error
    other = estimate_outage(plan, rate=2.0)
    assert other.mean > estimate.mean
    with pytest.raises(ValueError):
        estimate_error_rate(plan)


def test_same_result_for_same_seed(selection_of_two):
    plan = plan_for(selection_of_two, trials=10_000, block_size=1000)
    assert estimate_error_rate(plan) == estimate_error_rate(plan)


@pytest.mark.slow
def test_independent_of_processes(selection_of_two):
    plan = plan_for(selection_of_two, trials=40_000, block_size=5000)
    assert estimate_error_rate(plan, processes=2) == \
        estimate_error_rate(plan, processes=1)


def test_time_limit(selection_of_two):
    plan = plan_for(selection_of_two, trials=5000, block_size=500,
                    time_limit=0.0)
    with pytest.raises(PartialResultError) as pre:
        estimate_error_rate(plan)
    assert pre.value.completed == 500
    assert pre.value.estimate.trials == 500
