#!/usr/bin/env python3
# -*- coding: utf-8 -*-

"""
Exponential-polynomial ("gamma mixture") functions

    sum_i w_i y^p_i e^(-r_i y)

with exact rational weights and rates. All distributions of the output SNR
are represented this way, in the normalized variable ``y = x m / gamma_bar``.
A mixture is either a :attr:`Kind.DENSITY` or a
:attr:`Kind.CDF_COMPLEMENT`; the value of the latter is ``1 + sum(...)``.

Evaluation is done in extended precision with :mod:`mpmath`, because the
terms alternate and are large compared to their sum. The precision is
raised until the cancellation leaves at least :data:`GUARD_DIGITS` digits.
"""

from collections import defaultdict
from dataclasses import dataclass
from enum import Enum
from fractions import Fraction
import logging
import math
from typing import Callable, Iterable

import mpmath
import numpy as np

from tras_stbc.specfun import EvaluationError

DEFAULT_PRECISION = 50
GUARD_DIGITS = 20
MAX_PRECISION = 2000


class Kind(Enum):
    DENSITY = 'density'
    CDF_COMPLEMENT = 'cdf_complement'


@dataclass(frozen=True)
class Term:
    """A single ``weight * y^power * e^(-rate * y)`` term."""
    weight: Fraction
    power: int
    rate: Fraction


def to_mpf(value: Fraction) -> mpmath.mpf:
    """Converts a fraction exactly (up to the working precision)."""
    return mpmath.mpf(value.numerator) / value.denominator


def lost_digits(terms: list, total) -> float:
    """The decimal digits lost to cancellation when *terms* add to *total*."""
    magnitude = mpmath.fsum(abs(t) for t in terms)
    if magnitude == 0:
        return 0.0
    if total == 0:
        return math.inf
    return float(mpmath.log10(magnitude / abs(total)))


def stable_fsum(make_terms: Callable[[], Iterable], precision: int,
                verify: bool = False) -> float:
    """
    Sums the terms produced by *make_terms* (called again at every working
    precision tried), starting at *precision* decimal digits and raising
    it until :data:`GUARD_DIGITS` digits survive the cancellation. With
    *verify*, the sum must also agree to ``GUARD_DIGITS // 2`` digits with
    the one computed at ``GUARD_DIGITS`` more digits, which catches terms
    that are themselves inexact.
    """
    dps = min(precision, MAX_PRECISION)
    previous = None
    while True:
        with mpmath.workdps(dps):
            terms = list(make_terms())
            total = mpmath.fsum(terms)
            lost = lost_digits(terms, total)
            if dps - lost >= GUARD_DIGITS:
                if not verify:
                    return float(total)
                if previous is not None and abs(total - previous) <= \
                        mpmath.mpf(10) ** -(GUARD_DIGITS // 2) * abs(total):
                    return float(total)
                if dps >= MAX_PRECISION:
                    break
                previous = total
                dps = min(dps + GUARD_DIGITS, MAX_PRECISION)
                continue
        logging.debug(f'{lost:.1f} digits lost at {dps} digits; raising the '
                      f'precision.')
        if dps >= MAX_PRECISION:
            break
        previous = None
        wanted = 2 * dps if math.isinf(lost) else \
            math.ceil(lost) + 2 * GUARD_DIGITS
        dps = min(max(dps + GUARD_DIGITS, wanted), MAX_PRECISION)
    raise EvaluationError(f'The sum needs more than {MAX_PRECISION} digits',
                          precision=dps)


def collect(terms: Iterable[tuple[Fraction, int, Fraction]]) -> tuple[Term, ...]:
    """
    Merges the terms with the same (power, rate) and drops the ones that
    cancelled exactly. The result is sorted by rate, then power.
    """
    merged = defaultdict(Fraction)
    for weight, power, rate in terms:
        merged[power, rate] += weight
    return tuple(Term(weight, power, rate)
                 for (power, rate), weight in sorted(
                     merged.items(), key=lambda kv: (kv[0][1], kv[0][0]))
                 if weight != 0)


@dataclass(frozen=True)
class GammaMixture:
    terms: tuple[Term, ...]
    kind: Kind

    @classmethod
    def from_terms(cls, terms: Iterable[tuple[Fraction, int, Fraction]],
                   kind: Kind) -> 'GammaMixture':
        return cls(collect(terms), kind)

    def __len__(self):
        return len(self.terms)

    def evaluate(self, y, precision: int = DEFAULT_PRECISION) -> float:
        """
        The value of the mixture at the normalized argument *y*, starting
        at *precision* digits.
        """
        if y == 0:
            constant = 1 if self.kind is Kind.CDF_COMPLEMENT else 0
            return float(constant + sum((t.weight for t in self.terms
                                         if t.power == 0), Fraction(0)))

        def terms():
            x = mpmath.mpf(y)
            if self.kind is Kind.CDF_COMPLEMENT:
                yield mpmath.mpf(1)
            for t in self.terms:
                yield (to_mpf(t.weight) * x ** t.power *
                       mpmath.exp(-to_mpf(t.rate) * x))

        return stable_fsum(terms, precision)

    __call__ = evaluate

    def evaluate_many(self, ys: Iterable[float],
                      precision: int = DEFAULT_PRECISION) -> list[float]:
        return [self.evaluate(y, precision) for y in ys]

    def evaluate_array(self, ys) -> np.ndarray:
        """
        Evaluates the mixture in double precision over an array. Fast, but
        only accurate where the terms do not cancel (i.e. not near 0).
        """
        ys = np.asarray(ys, dtype=float)
        total = np.ones_like(ys) if self.kind is Kind.CDF_COMPLEMENT \
            else np.zeros_like(ys)
        for t in self.terms:
            total += float(t.weight) * ys ** t.power * np.exp(-float(t.rate) * ys)
        return total

    def total_mass(self) -> Fraction:
        """The exact integral of a density over [0, inf)."""
        self._require(Kind.DENSITY)
        return sum((t.weight * math.factorial(t.power) / t.rate ** (t.power + 1)
                    for t in self.terms), Fraction(0))

    def cdf(self) -> 'GammaMixture':
        """
        Integrates a density into its CDF. Since the integral of
        ``y^p e^(-ry)`` from 0 is ``p! / r^(p+1) * (1 - e^(-ry) sum_{k<=p}
        (ry)^k / k!)``, the CDF is ``mass + sum(...)``; for a proper density
        the mass is 1 and the result is a CDF complement.
        """
        self._require(Kind.DENSITY)
        mass = self.total_mass()
        if mass != 1:
            raise ValueError(f'The density integrates to {mass}, not 1')
        complement = []
        for t in self.terms:
            scale = t.weight * math.factorial(t.power) / t.rate ** (t.power + 1)
            for k in range(t.power + 1):
                complement.append(
                    (-scale * t.rate ** k / math.factorial(k), k, t.rate))
        return GammaMixture.from_terms(complement, Kind.CDF_COMPLEMENT)

    def derivative(self) -> 'GammaMixture':
        """The derivative of a CDF complement, i.e. the density."""
        self._require(Kind.CDF_COMPLEMENT)
        derived = []
        for t in self.terms:
            if t.power > 0:
                derived.append((t.weight * t.power, t.power - 1, t.rate))
            derived.append((-t.weight * t.rate, t.power, t.rate))
        return GammaMixture.from_terms(derived, Kind.DENSITY)

    def power(self, n: int) -> 'GammaMixture':
        """
        Raises a CDF complement ``1 + G`` to the *n*-th power, expanding it
        as ``1 + sum_{k=1}^n C(n, k) G^k``.
        """
        self._require(Kind.CDF_COMPLEMENT)
        if n < 1:
            raise ValueError(f'The exponent must be positive, got {n}')
        result = []
        g_power = ((Fraction(1), 0, Fraction(0)),)
        for k in range(1, n + 1):
            g_power = tuple((t.weight, t.power, t.rate) for t in collect(
                (w * t.weight, p + t.power, r + t.rate)
                for w, p, r in g_power for t in self.terms
            ))
            binom = math.comb(n, k)
            result.extend((binom * w, p, r) for w, p, r in g_power)
        return GammaMixture.from_terms(result, Kind.CDF_COMPLEMENT)

    def taylor_leading(self) -> tuple[Fraction, int]:
        """
        The lowest-order nonzero Taylor coefficient of the function at y=0,
        as ``(coefficient, order)``. The constant of a CDF complement is
        included.
        """
        order = 0
        while True:
            coeff = Fraction(1) if (order == 0 and
                                    self.kind is Kind.CDF_COMPLEMENT) else Fraction(0)
            for t in self.terms:
                if t.power <= order:
                    j = order - t.power
                    coeff += t.weight * (-t.rate) ** j / math.factorial(j)
            if coeff != 0:
                return coeff, order
            order += 1
            if order > 10_000:
                raise ValueError('The mixture vanishes identically')

    def _require(self, kind: Kind):
        if self.kind is not kind:
            raise ValueError(f'Operation requires a {kind.value} mixture, '
                             f'not a {self.kind.value}')
