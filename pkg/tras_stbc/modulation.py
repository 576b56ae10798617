#!/usr/bin/env python3
# -*- coding: utf-8 -*-

"""
Modulation schemes: their parameters, conditional error probabilities (CEP)
and high-SNR asymptotic forms.

Binary schemes and M-PSK share the CEP
``lambda_3 / (2 Gamma(lambda_1)) Gamma(lambda_1, lambda_2 gamma)``; QPSK and
square M-QAM use ``lambda_5 Q(sqrt(lambda_4 gamma)) - lambda_6 Q^2(...)``.
"""

from dataclasses import dataclass
from enum import Enum
import math
from typing import Optional

import numpy as np
from scipy import special

from tras_stbc.specfun import gaussian_q


class ModulationKind(Enum):
    BPSK = 'bpsk'
    CBFSK = 'cbfsk'
    NCBFSK = 'ncbfsk'
    DBPSK = 'dbpsk'
    MPSK = 'mpsk'
    QPSK = 'qpsk'
    MPAM = 'mpam'
    MQAM = 'mqam'


class Family(Enum):
    """Which identity the error rate is computed with."""
    GAMMA = 'gamma'
    PAM = 'pam'
    QAM = 'qam'


BINARY = {ModulationKind.BPSK, ModulationKind.CBFSK,
          ModulationKind.NCBFSK, ModulationKind.DBPSK}
EXPONENTIAL = {ModulationKind.NCBFSK, ModulationKind.DBPSK}
SIZED = {ModulationKind.MPSK, ModulationKind.MPAM, ModulationKind.MQAM}

FIXED_PARAMS = {
    ModulationKind.BPSK: (0.5, 1.0, 1.0),
    ModulationKind.CBFSK: (0.5, 0.5, 1.0),
    ModulationKind.NCBFSK: (1.0, 0.5, 1.0),
    ModulationKind.DBPSK: (1.0, 1.0, 1.0),
    ModulationKind.QPSK: (1.0, 2.0, 1.0),
}


@dataclass(frozen=True)
class AsymptoticForm:
    """
    The leading high-SNR behaviour of the CEP: ``multiplier Q(sqrt(k gamma))``
    or, if :attr:`exponential`, ``multiplier e^(-k gamma)``.
    """
    multiplier: float
    k: float
    exponential: bool = False


@dataclass(frozen=True)
class ModulationSpec:
    kind: ModulationKind
    M: int = 2

    def __post_init__(self):
        kind = ModulationKind(self.kind)
        object.__setattr__(self, 'kind', kind)
        if kind in BINARY and self.M != 2:
            raise ValueError(f'{kind.value} is binary, M must be 2')
        if kind is ModulationKind.QPSK and self.M != 4:
            raise ValueError('QPSK has M = 4')
        if kind in SIZED:
            if self.M < 2 or self.M & (self.M - 1):
                raise ValueError(f'M must be a power of 2, got {self.M}')
            if kind is ModulationKind.MPSK and self.M < 4:
                raise ValueError('M-PSK needs M >= 4; use bpsk for M = 2')
            if kind is ModulationKind.MQAM and (
                    self.M < 4 or math.isqrt(self.M) ** 2 != self.M):
                raise ValueError(f'M-QAM needs a square constellation, got '
                                 f'M = {self.M}')

    @classmethod
    def parse(cls, name: str) -> 'ModulationSpec':
        """Parses names such as ``bpsk``, ``qpsk`` or ``mqam:16``."""
        kind, _, size = name.strip().lower().partition(':')
        try:
            kind = ModulationKind(kind)
        except ValueError:
            raise ValueError(f'Unknown modulation {name!r}')
        if kind in SIZED:
            if not size:
                raise ValueError(f'{kind.value} needs a size, e.g. '
                                 f'{kind.value}:16')
            return cls(kind, int(size))
        if size:
            raise ValueError(f'{kind.value} does not take a size')
        return cls(kind, 4 if kind is ModulationKind.QPSK else 2)

    @property
    def name(self) -> str:
        return (f'{self.kind.value}:{self.M}' if self.kind in SIZED
                else self.kind.value)

    def __str__(self):
        return self.name

    @property
    def family(self) -> Family:
        if self.kind is ModulationKind.MPAM:
            return Family.PAM
        if self.kind is ModulationKind.MQAM or self.is_qpsk:
            return Family.QAM
        return Family.GAMMA

    @property
    def params(self) -> Optional[tuple[float, float, float]]:
        """(lambda_1, lambda_2, lambda_3) or (lambda_4, lambda_5, lambda_6)."""
        if self.is_qpsk:
            return FIXED_PARAMS[ModulationKind.QPSK]
        elif self.kind in FIXED_PARAMS:
            return FIXED_PARAMS[self.kind]
        elif self.kind is ModulationKind.MPSK:
            return 0.5, math.sin(math.pi / self.M) ** 2, 2.0
        elif self.kind is ModulationKind.MQAM:
            root = math.sqrt(self.M)
            return 3 / (self.M - 1), 4 - 4 / root, (2 - 2 / root) ** 2
        else:
            return None

    @property
    def bits_per_symbol(self) -> int:
        return int(math.log2(self.M))

    @property
    def is_qpsk(self) -> bool:
        """4-PSK is QPSK, with the exact CEP of the latter."""
        return self.kind is ModulationKind.QPSK or (
            self.kind is ModulationKind.MPSK and self.M == 4)

    @property
    def approximate(self) -> bool:
        """The CEP of M-PSK with M >= 8 is the high-SNR approximation."""
        return self.kind is ModulationKind.MPSK and self.M >= 8

    @property
    def metric_name(self) -> str:
        return 'ber' if self.kind in BINARY else 'ser'

    def cep(self, gamma):
        """The conditional error probability at the instantaneous SNR(s)."""
        gamma = np.asarray(gamma, dtype=float)
        if self.family is Family.GAMMA:
            l1, l2, l3 = self.params
            result = l3 / 2 * special.gammaincc(l1, l2 * gamma)
        elif self.family is Family.PAM:
            M = self.M
            result = 2 * (M - 1) / M * gaussian_q(
                np.sqrt(6 * gamma / (M ** 2 - 1)))
        else:
            l4, l5, l6 = self.params
            q = gaussian_q(np.sqrt(l4 * gamma))
            result = l5 * q - l6 * q ** 2
        return float(result) if np.ndim(result) == 0 else result

    def asymptotic_form(self) -> AsymptoticForm:
        if self.family is Family.GAMMA:
            l1, l2, l3 = self.params
            if self.kind in EXPONENTIAL:
                return AsymptoticForm(l3 / 2, l2, exponential=True)
            # Gamma(1/2, x) / Gamma(1/2) = 2 Q(sqrt(2x))
            return AsymptoticForm(l3, 2 * l2)
        elif self.family is Family.PAM:
            M = self.M
            return AsymptoticForm(2 * (M - 1) / M, 6 / (M ** 2 - 1))
        else:
            l4, l5, _ = self.params
            return AsymptoticForm(l5, l4)
