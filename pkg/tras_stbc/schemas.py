#!/usr/bin/env python3
# -*- coding: utf-8 -*-

"""
Definitions of pydantic models.

A :class:`RunConfig` describes a complete run: the system variants, the
metric, the feedback link, the SNR grid and the simulation parameters. It is
validated as a whole, so that every problem is reported at once.
"""

from fractions import Fraction
from itertools import product
from typing import Literal, Optional, Union

from pydantic import BaseModel, ConfigDict, field_validator, model_validator

from tras_stbc.feedback import (
    CodebookError, FeedbackModel, Mapping, build_codebook
)
from tras_stbc.modulation import ModulationSpec
from tras_stbc.snr_model import SchemeConfig
from tras_stbc.utils import float_list, int_list, parse_grid

# The code rates of the orthogonal STBCs
CODE_RATES = {'g2': Fraction(1), 'g3': Fraction(1, 2)}


class RunConfig(BaseModel):
    """The fields of a run; see ``config_example.yaml`` for their meaning."""
    model_config = ConfigDict(extra='forbid', arbitrary_types_allowed=True,
                              frozen=True)

    scheme: Literal['joint', 'tas'] = 'tas'
    nt: list[int] = [3]
    ns: int = 2
    nr: list[int] = [1]
    m: Fraction = Fraction(1)
    omega: float = 1.0
    code: Literal['g2', 'g3'] = 'g2'
    code_rate: Optional[Fraction] = None
    mod: Optional[str] = None
    rate: Optional[float] = None
    pe: list[float] = [0.0]
    mapping: Literal['natural', 'permutation'] = 'natural'
    permutation: Optional[list[int]] = None
    mixing: Literal['uniform', 'bit-exact'] = 'uniform'
    snr: str = '0:2:30'
    snr_axis: Literal['es', 'eb'] = 'es'
    trials: Optional[int] = None
    seed: int = 42
    feedback_mode: Literal['uniform', 'bit-exact'] = 'uniform'
    receive_mode: Literal['model', 'physical'] = 'model'
    block_size: int = 100_000
    time_limit: Optional[float] = None
    precision: int = 50
    asymptote: bool = False
    reference: bool = False

    @field_validator('nt', 'nr', 'permutation', mode='before')
    @classmethod
    def split_ints(cls, value):
        return None if value is None else int_list(value)

    @field_validator('pe', mode='before')
    @classmethod
    def split_floats(cls, value):
        return float_list(value)

    @field_validator('m', 'code_rate', mode='before')
    @classmethod
    def to_fraction(cls, value):
        if value is None or isinstance(value, Fraction):
            return value
        try:
            return Fraction(str(value).strip())
        except (ValueError, ZeroDivisionError):
            raise ValueError(f'{value!r} is not a rational number')

    @field_validator('trials', mode='before')
    @classmethod
    def scientific_trials(cls, value):
        """Accepts trial counts such as ``1e6``."""
        if isinstance(value, str):
            number = float(value)
            if not number.is_integer():
                raise ValueError(f'trials must be an integer, got {value}')
            return int(number)
        return value

    @model_validator(mode='after')
    def check_run(self) -> 'RunConfig':
        errors = []
        for n_t, n_r in product(self.nt, self.nr):
            try:
                cfg = self.scheme_config(n_t, n_r)
            except ValueError as ve:
                errors.append(f'n_T={n_t}, n_R={n_r}: {ve}')
                continue
            if self.mapping == 'permutation':
                try:
                    build_codebook(cfg, Mapping.PERMUTATION, self.permutation)
                except CodebookError as ce:
                    errors.append(f'n_T={n_t}: {ce}')
        if (self.mod is None) == (self.rate is None):
            errors.append('exactly one of mod (error rate) and rate '
                          '(outage) must be given')
        if self.mod is not None:
            try:
                ModulationSpec.parse(self.mod)
            except ValueError as ve:
                errors.append(str(ve))
        if self.rate is not None and not self.rate > 0:
            errors.append(f'rate = {self.rate} must be positive')
        if any(not 0 <= p_e <= 1 for p_e in self.pe):
            errors.append(f'pe values must be probabilities, got {self.pe}')
        try:
            parse_grid(self.snr)
        except ValueError as ve:
            errors.append(str(ve))
        if self.trials is not None and self.trials < 1:
            errors.append(f'trials = {self.trials} must be positive')
        if self.receive_mode == 'physical' and self.scheme != 'joint':
            errors.append('receive_mode = physical requires scheme = joint')
        if self.block_size < 1:
            errors.append('block_size must be positive')
        if self.precision < 15:
            errors.append(f'precision = {self.precision} must be at least 15')
        if errors:
            raise ValueError('; '.join(errors))
        return self

    @property
    def effective_code_rate(self) -> Fraction:
        return self.code_rate if self.code_rate is not None \
            else CODE_RATES[self.code]

    def scheme_config(self, n_t: int, n_r: int) -> SchemeConfig:
        return SchemeConfig(self.scheme, n_t, self.ns, n_r, self.m,
                            self.omega, self.effective_code_rate)

    def variants(self) -> list[SchemeConfig]:
        """The system variants: the cartesian product of nt and nr."""
        return [self.scheme_config(n_t, n_r)
                for n_t, n_r in product(self.nt, self.nr)]

    def target(self) -> Union[ModulationSpec, float]:
        return ModulationSpec.parse(self.mod) if self.mod else self.rate

    def snr_grid(self) -> list[float]:
        return parse_grid(self.snr)

    def feedback_model(self, cfg: SchemeConfig, p_e: float) -> FeedbackModel:
        codebook = build_codebook(cfg, Mapping(self.mapping),
                                  self.permutation)
        return FeedbackModel(p_e, codebook, self.mixing)
