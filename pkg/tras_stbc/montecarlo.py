#!/usr/bin/env python3
# -*- coding: utf-8 -*-

"""
Semi-analytic Monte Carlo simulation of the system: the channel power gains
are sampled, the antennas are selected, the feedback is sent over the BSC
and the exact conditional error probability (or the outage indicator) of
the resulting output SNR is averaged.

Trials are run in blocks of a fixed size. The random stream of block ``b``
is seeded with ``(seed, b)``, so the result only depends on the plan, not on
the number of worker processes.
"""

from dataclasses import dataclass, field, replace
from enum import Enum
from functools import partial
import logging
import math
from multiprocessing import Pool
import time
from typing import Optional, Union

import numpy as np

from tras_stbc.feedback import FeedbackModel, overlap_classes
from tras_stbc.modulation import ModulationSpec
from tras_stbc.performance import outage_threshold
from tras_stbc.snr_model import Scheme, SchemeConfig, Tasc, all_tascs
from tras_stbc.utils import otqdm

DEFAULT_BLOCK_SIZE = 100_000


class FeedbackMode(Enum):
    UNIFORM = 'uniform'
    BIT_EXACT = 'bit-exact'


class ReceiveMode(Enum):
    MODEL = 'model'
    PHYSICAL = 'physical'


@dataclass(frozen=True)
class Estimate:
    mean: float
    std_error: float
    trials: int


class PartialResultError(RuntimeError):
    """
    Raised when the time limit is exceeded. :attr:`estimate` is the estimate
    from the :attr:`completed` trials.
    """
    def __init__(self, message: str, estimate: Optional[Estimate],
                 completed: int):
        super().__init__(message)
        self.estimate = estimate
        self.completed = completed


@dataclass(frozen=True)
class TrialPlan:
    cfg: SchemeConfig
    fm: FeedbackModel
    target: Union[ModulationSpec, float]
    gamma_bar: float
    trials: int
    seed: int = 42
    feedback_mode: FeedbackMode = FeedbackMode.UNIFORM
    receive_mode: ReceiveMode = ReceiveMode.MODEL
    block_size: int = DEFAULT_BLOCK_SIZE
    time_limit: Optional[float] = field(default=None, compare=False)

    def __post_init__(self):
        object.__setattr__(self, 'feedback_mode',
                           FeedbackMode(self.feedback_mode))
        object.__setattr__(self, 'receive_mode',
                           ReceiveMode(self.receive_mode))
        if self.trials < 1:
            raise ValueError(f'trials must be positive, got {self.trials}')
        if self.block_size < 1:
            raise ValueError('block_size must be positive')
        if not self.gamma_bar > 0:
            raise ValueError('gamma_bar must be positive')
        if (self.receive_mode is ReceiveMode.PHYSICAL and
                self.cfg.scheme is not Scheme.JOINT):
            raise ValueError('The physical receive mode only applies to '
                             'joint TRAS/STBC')

    @property
    def blocks(self) -> int:
        return math.ceil(self.trials / self.block_size)

    def block_trials(self, block: int) -> int:
        return min(self.block_size, self.trials - block * self.block_size)


@dataclass(frozen=True)
class BlockResult:
    """Running statistics of a block: count, mean and sum of squares."""
    n: int
    mean: float
    m2: float

    @classmethod
    def from_values(cls, values: np.ndarray) -> 'BlockResult':
        values = np.asarray(values, dtype=float)
        mean = float(np.mean(values)) if len(values) else 0.0
        return cls(len(values), mean, float(np.sum((values - mean) ** 2)))

    def merge(self, other: 'BlockResult') -> 'BlockResult':
        n = self.n + other.n
        if n == 0:
            return self
        delta = other.mean - self.mean
        mean = self.mean + delta * other.n / n
        m2 = self.m2 + other.m2 + delta ** 2 * self.n * other.n / n
        return BlockResult(n, mean, m2)

    def estimate(self) -> Estimate:
        if self.n == 0:
            return Estimate(float('nan'), float('nan'), 0)
        std = math.sqrt(self.m2 / (self.n - 1)) if self.n > 1 else 0.0
        return Estimate(self.mean, std / math.sqrt(self.n), self.n)


def sample_channel_powers(cfg: SchemeConfig, rng: np.random.Generator,
                          size: Optional[int] = None) -> np.ndarray:
    """
    Samples the n_R x n_T power gains |h|^2: Gamma distributed with shape m
    and mean omega. With *size*, an array of *size* matrices is returned.
    """
    m = float(cfg.m)
    shape = (cfg.n_r, cfg.n_t) if size is None else (size, cfg.n_r, cfg.n_t)
    return rng.gamma(m, cfg.omega / m, shape)


def rank_masks(cfg: SchemeConfig) -> np.ndarray:
    """K x n_T boolean masks of the rank positions of the TASCs."""
    tascs = all_tascs(cfg)
    masks = np.zeros((len(tascs), cfg.n_t), dtype=bool)
    for k, tasc in enumerate(tascs):
        masks[k, [r - 1 for r in tasc.ranks]] = True
    return masks


def output_snr(snr: np.ndarray, cfg: SchemeConfig, end: np.ndarray,
               receive_mode: ReceiveMode = ReceiveMode.MODEL) -> np.ndarray:
    """
    The output SNR of a batch of trials.

    :param snr: the (trials, n_R, n_T) instantaneous branch SNRs.
    :param end: the index of the activated TASC for each trial.
    """
    masks = rank_masks(cfg)[end]
    if cfg.scheme is Scheme.TAS:
        ordered = -np.sort(-snr.sum(axis=1), axis=1)
        return (ordered * masks).sum(axis=1)
    ordered = -np.sort(-snr, axis=2)
    sums = (ordered * masks[:, None, :]).sum(axis=2)
    if ReceiveMode(receive_mode) is ReceiveMode.MODEL:
        return sums.max(axis=1)
    best_row = ordered[:, :, :cfg.n_s].sum(axis=2).argmax(axis=1)
    return sums[np.arange(len(sums)), best_row]


def run_selection(gains: np.ndarray, cfg: SchemeConfig, end_tasc: Tasc,
                  receive_mode: ReceiveMode = ReceiveMode.MODEL) -> float:
    """The output SNR for a single n_R x n_T SNR matrix."""
    end_tasc.check(cfg)
    index = all_tascs(cfg).index(end_tasc)
    snr = np.asarray(gains, dtype=float)[None, :, :]
    return float(output_snr(snr, cfg, np.array([index]), receive_mode)[0])


class FeedbackSampler:
    """Draws the index of the activated TASC for a batch of trials."""
    def __init__(self, fm: FeedbackModel, feedback_mode: FeedbackMode):
        self.fm = fm
        self.mode = FeedbackMode(feedback_mode)
        cb = fm.codebook
        self.codewords = np.array(cb.proper, dtype=np.int64)
        self.lookup = np.full(cb.L, -1, dtype=np.int64)
        self.lookup[self.codewords] = np.arange(cb.K)
        subsets = [set(t.ranks) for t in cb.tasc_order]
        self.overlap = np.array([[len(a & b) for b in subsets]
                                 for a in subsets], dtype=np.int64)
        classes = overlap_classes(cb)
        width = max(len(v) for v in classes.values())
        self.class_size = np.zeros(cb.n_s + 1, dtype=np.int64)
        self.class_table = np.zeros((cb.n_s + 1, width), dtype=np.int64)
        for j, members in classes.items():
            self.class_size[j] = len(members)
            self.class_table[j, :len(members)] = members

    def draw(self, rng: np.random.Generator, size: int) -> np.ndarray:
        cb = self.fm.codebook
        if cb.K == 1:
            return np.zeros(size, dtype=np.int64)
        if self.mode is FeedbackMode.UNIFORM:
            correct = rng.random(size) < self.fm.p_cf
            wrong = rng.integers(1, cb.K, size)
            return np.where(correct, 0, wrong)

        sent = rng.integers(0, cb.K, size)
        flips = rng.random((size, cb.eta)) < self.fm.p_e
        pattern = (flips * (1 << np.arange(cb.eta))).sum(axis=1)
        end = self.lookup[self.codewords[sent] ^ pattern]
        failed = end < 0
        end[failed] = rng.integers(0, cb.K, int(failed.sum()))
        overlap = self.overlap[sent, end]
        pick = (rng.random(size) * self.class_size[overlap]).astype(np.int64)
        return self.class_table[overlap, pick]


def draw_feedback(
    cfg: SchemeConfig, fm: FeedbackModel, rng: np.random.Generator,
    feedback_mode: FeedbackMode = FeedbackMode.UNIFORM
) -> Tasc:
    """Draws the TASC activated after a single feedback transmission."""
    index = FeedbackSampler(fm, feedback_mode).draw(rng, 1)[0]
    return all_tascs(cfg)[index]


def run_block(plan: TrialPlan, block: int) -> BlockResult:
    """Runs the trials of a single block."""
    rng = np.random.default_rng([plan.seed, block])
    size = plan.block_trials(block)
    cfg = plan.cfg
    snr = sample_channel_powers(cfg, rng, size) * (plan.gamma_bar / cfg.omega)
    end = FeedbackSampler(plan.fm, plan.feedback_mode).draw(rng, size)
    out = output_snr(snr, cfg, end, plan.receive_mode)
    if isinstance(plan.target, ModulationSpec):
        values = plan.target.cep(out)
    else:
        values = (out <= outage_threshold(plan.target)).astype(float)
    return BlockResult.from_values(values)


def _estimate(plan: TrialPlan, processes: int = 1,
              progress: bool = False) -> Estimate:
    start = time.monotonic()
    total = BlockResult(0, 0.0, 0.0)
    fn = partial(run_block, plan)
    blocks = range(plan.blocks)
    logging.debug(f'Simulating {plan.trials} trials of {plan.cfg} in '
                  f'{plan.blocks} blocks...')
    pool = Pool(processes) if processes > 1 else None
    try:
        results = pool.imap(fn, blocks) if pool else map(fn, blocks)
        if progress:
            results = otqdm(results, total=plan.blocks,
                            desc='Simulating blocks...')
        # Blocks are merged in order, whatever the completion order
        for result in results:
            total = total.merge(result)
            if (plan.time_limit is not None and total.n < plan.trials and
                    time.monotonic() - start > plan.time_limit):
                logging.warning(f'Time limit of {plan.time_limit} s exceeded '
                                f'after {total.n} trials.')
                raise PartialResultError(
                    f'The time limit of {plan.time_limit} s was exceeded '
                    f'after {total.n} of {plan.trials} trials.',
                    total.estimate(), total.n
                )
    finally:
        if pool:
            pool.terminate()
            pool.join()
    return total.estimate()


def estimate_error_rate(plan: TrialPlan, processes: int = 1,
                        progress: bool = False) -> Estimate:
    """Estimates the error rate by averaging the CEP over the trials."""
    if not isinstance(plan.target, ModulationSpec):
        raise ValueError('The plan does not have a modulation target')
    return _estimate(plan, processes, progress)


def estimate_outage(plan: TrialPlan, rate: Optional[float] = None,
                    processes: int = 1, progress: bool = False) -> Estimate:
    """Estimates the outage probability at *rate* (default: the plan's)."""
    if rate is not None:
        plan = replace(plan, target=float(rate))
    if isinstance(plan.target, ModulationSpec) or not plan.target > 0:
        raise ValueError('The outage target rate must be positive')
    return _estimate(plan, processes, progress)
