#!/usr/bin/env python3
# -*- coding: utf-8 -*-

"""
The feedback link: the TASC codebook sent back over a binary symmetric
channel (BSC) and the probabilities of correct and erroneous feedback.

When the received word is improper (not assigned to any TASC), the
transmitter activates one of the proper TASCs at random. Erroneous feedback
is then accounted for by mixing the per-TASC metrics, either with the
uniform wrong-TASC weights or with the exact distribution of the TASC that
ends up being activated.
"""

from dataclasses import dataclass
from enum import Enum
import logging
import math
from typing import Optional, Sequence

from tras_stbc.snr_model import SchemeConfig, Tasc, all_tascs


class CodebookError(ValueError):
    """Raised if a codeword assignment is not a valid codebook."""


class Mapping(Enum):
    NATURAL = 'natural'
    PERMUTATION = 'permutation'


class Mixing(Enum):
    UNIFORM = 'uniform'
    BIT_EXACT = 'bit-exact'


def hamming(a: int, b: int) -> int:
    return bin(a ^ b).count('1')


@dataclass(frozen=True)
class Codebook:
    """
    The eta-bit codewords of the K TASCs. The first K :attr:`codewords`
    belong to :attr:`tasc_order` (lexicographic, so c_1 comes first); the
    remaining L - K words are improper.
    """
    n_t: int
    n_s: int
    codewords: tuple[int, ...]
    tasc_order: tuple[Tasc, ...]

    @property
    def K(self) -> int:
        return len(self.tasc_order)

    @property
    def L(self) -> int:
        return len(self.codewords)

    @property
    def eta(self) -> int:
        return self.L.bit_length() - 1

    @property
    def proper(self) -> tuple[int, ...]:
        return self.codewords[:self.K]

    @property
    def improper(self) -> tuple[int, ...]:
        return self.codewords[self.K:]

    def hamming_table(self) -> list[list[int]]:
        """The K x L table of Hamming distances d(x_i, x_j)."""
        return [[hamming(xi, xj) for xj in self.codewords]
                for xi in self.proper]

    def decode(self, word: int) -> Optional[int]:
        """The index of the TASC *word* is assigned to; ``None`` if improper."""
        try:
            index = self.codewords.index(word)
        except ValueError:
            raise CodebookError(f'{word} is not an {self.eta}-bit word')
        return index if index < self.K else None


def build_codebook(cfg: SchemeConfig, mapping: Mapping = Mapping.NATURAL,
                   permutation: Optional[Sequence[int]] = None) -> Codebook:
    """
    Assigns codewords to the TASCs. With :attr:`Mapping.NATURAL`, the k-th
    TASC gets the binary representation of k - 1; with
    :attr:`Mapping.PERMUTATION`, the k-th TASC gets ``permutation[k - 1]``.
    """
    tascs = tuple(all_tascs(cfg))
    K, L = len(tascs), cfg.L
    mapping = Mapping(mapping)
    if mapping is Mapping.NATURAL:
        proper = list(range(K))
    else:
        if permutation is None:
            raise CodebookError('The permutation mapping needs a permutation')
        proper = [int(word) for word in permutation]
        if len(proper) != K:
            raise CodebookError(f'The permutation must have K = {K} '
                                f'codewords, not {len(proper)}')
        if len(set(proper)) != K:
            raise CodebookError(f'Duplicate codewords in {proper}')
        if any(not 0 <= word < L for word in proper):
            raise CodebookError(f'Codewords must be between 0 and {L - 1}, '
                                f'got {proper}')
    improper = sorted(set(range(L)) - set(proper))
    return Codebook(cfg.n_t, cfg.n_s, tuple(proper + improper), tascs)


def error_pattern_probability(p_e: float, eta: int, distance: int) -> float:
    return p_e ** distance * (1 - p_e) ** (eta - distance)


def prob_correct_feedback(p_e: float, cb: Codebook) -> float:
    """
    The a priori probability of correct feedback: the sent word arrives
    intact, or it arrives as an improper word and the random pick hits the
    right TASC.
    """
    if not 0 <= p_e <= 1:
        raise ValueError(f'p_e must be a probability, got {p_e}')
    p_cf = (1 - p_e) ** cb.eta
    if cb.L > cb.K:
        p_cf += math.fsum(
            error_pattern_probability(p_e, cb.eta, hamming(xi, xj))
            for xi in cb.proper for xj in cb.improper
        ) / cb.K ** 2
    return p_cf


def physical_transition_matrix(p_e: float, cb: Codebook) -> list[list[float]]:
    """
    ``P[i][k]``: the probability that the subset with codeword i is fed back
    and the subset with codeword k is activated, by exhaustive enumeration of
    the 2^eta error patterns.
    """
    matrix = [[0.0] * cb.K for _ in range(cb.K)]
    for i, sent in enumerate(cb.proper):
        for pattern in range(cb.L):
            prob = error_pattern_probability(p_e, cb.eta, hamming(pattern, 0))
            end = cb.decode(sent ^ pattern)
            if end is None:
                for k in range(cb.K):
                    matrix[i][k] += prob / cb.K
            else:
                matrix[i][end] += prob
    return matrix


def overlap_classes(cb: Codebook) -> dict[int, list[int]]:
    """
    Groups the rank TASCs by the number of their ranks among the best n_S.
    """
    best = set(cb.tasc_order[0].ranks)
    classes = {}
    for index, tasc in enumerate(cb.tasc_order):
        classes.setdefault(len(best & set(tasc.ranks)), []).append(index)
    return classes


def bit_exact_transition_matrix(p_e: float, cb: Codebook) -> list[float]:
    """
    The distribution of the activated TASC in rank space, averaged over the
    sent codewords.

    The codebook indexes physical antenna subsets. If subset i is the best
    one and subset k is activated, the antennas in both occupy the best n_S
    ranks and the rest are spread over the others, so k lands on every rank
    TASC with the same overlap with c_1 with equal probability.
    """
    if not 0 <= p_e <= 1:
        raise ValueError(f'p_e must be a probability, got {p_e}')
    physical = physical_transition_matrix(p_e, cb)
    classes = overlap_classes(cb)
    subsets = [set(t.ranks) for t in cb.tasc_order]
    vector = [0.0] * cb.K
    for i in range(cb.K):
        for k in range(cb.K):
            ranks = classes[len(subsets[i] & subsets[k])]
            for r in ranks:
                vector[r] += physical[i][k] / (cb.K * len(ranks))
    return vector


@dataclass(frozen=True)
class FeedbackModel:
    p_e: float
    codebook: Codebook
    mixing: Mixing = Mixing.UNIFORM

    def __post_init__(self):
        if not 0 <= self.p_e <= 1:
            raise ValueError(f'p_e must be a probability, got {self.p_e}')
        object.__setattr__(self, 'mixing', Mixing(self.mixing))

    @property
    def p_cf(self) -> float:
        return prob_correct_feedback(self.p_e, self.codebook)

    @property
    def p_ef(self) -> float:
        return 1 - self.p_cf

    @property
    def wrong_weights(self) -> list[float]:
        """The uniform weights of the K - 1 wrong TASCs."""
        K = self.codebook.K
        return [1 / (K - 1)] * (K - 1)

    def weights(self) -> list[float]:
        """The weights of all K TASCs, c_1 first, per :attr:`mixing`."""
        if self.codebook.K == 1:
            return [1.0]
        if self.mixing is Mixing.BIT_EXACT:
            return bit_exact_transition_matrix(self.p_e, self.codebook)
        p_ef = self.p_ef
        return [self.p_cf] + [p_ef * w for w in self.wrong_weights]


def mix_metric(per_tasc_values: Sequence[float], fm: FeedbackModel) -> float:
    """
    Averages the per-TASC metric values (c_1 first) over the feedback
    outcomes.
    """
    if len(per_tasc_values) != fm.codebook.K:
        raise ValueError(f'Expected {fm.codebook.K} per-TASC values, got '
                         f'{len(per_tasc_values)}')
    weights = fm.weights()
    logging.debug(f'Feedback weights for p_e={fm.p_e}: {weights}')
    return math.fsum(w * v for w, v in zip(weights, per_tasc_values))
