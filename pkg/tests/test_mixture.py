#!/usr/bin/env python3
# -*- coding: utf-8 -*-

from fractions import Fraction
import math

import mpmath
import pytest

from tras_stbc.mixture import (
    GammaMixture, Kind, collect, lost_digits, stable_fsum
)
from tras_stbc.specfun import EvaluationError

F = Fraction


@pytest.fixture
def exponential():
    """The density e^-y."""
    return GammaMixture.from_terms([(F(1), 0, F(1))], Kind.DENSITY)


def test_collect_merges_and_drops():
    terms = collect([(F(1), 0, F(1)), (F(2), 0, F(1)), (F(1), 1, F(2)),
                     (F(-1), 1, F(2))])
    assert len(terms) == 1
    assert terms[0].weight == 3


def test_total_mass(exponential):
    assert exponential.total_mass() == 1
    erlang = GammaMixture.from_terms([(F(1), 1, F(1))], Kind.DENSITY)
    assert erlang.total_mass() == 1


def test_cdf(exponential):
    cdf = exponential.cdf()
    assert cdf.kind is Kind.CDF_COMPLEMENT
    assert cdf(1.0) == pytest.approx(1 - math.exp(-1))
    assert cdf(0.0) == pytest.approx(0.0)


def test_cdf_of_improper_density():
    half = GammaMixture.from_terms([(F(1, 2), 0, F(1))], Kind.DENSITY)
    with pytest.raises(ValueError):
        half.cdf()


def test_power_and_derivative(exponential):
    squared = exponential.cdf().power(2)
    assert squared(1.0) == pytest.approx(0.39957640089)
    density = squared.derivative()
    assert density(1.0) == pytest.approx(
        2 * math.exp(-1) * (1 - math.exp(-1)))
    assert density.total_mass() == 1


def test_evaluate_array(exponential):
    cdf = exponential.cdf().power(2)
    values = cdf.evaluate_array([0.5, 1.0, 2.0])
    assert list(values) == pytest.approx(cdf.evaluate_many([0.5, 1.0, 2.0]))


def test_taylor_leading(exponential):
    squared = exponential.cdf().power(2)
    # (1 - e^-y)^2 ~ y^2
    assert squared.taylor_leading() == (1, 2)
    assert squared.derivative().taylor_leading() == (2, 1)


def test_kind_checks(exponential):
    with pytest.raises(ValueError):
        exponential.power(2)
    with pytest.raises(ValueError):
        exponential.cdf().total_mass()
    with pytest.raises(ValueError):
        exponential.cdf().power(0)


def test_lost_digits():
    assert lost_digits([mpmath.mpf(1), mpmath.mpf(2)], 3) == pytest.approx(0)
    assert lost_digits([mpmath.mpf(10) ** 6, -mpmath.mpf(10) ** 6 + 1],
                       1) == pytest.approx(6.30103, rel=1e-5)
    assert lost_digits([mpmath.mpf(1), mpmath.mpf(-1)], 0) == math.inf
    assert lost_digits([], 0) == 0


def test_stable_fsum_raises_precision():
    # At 15 digits, 1/3 vanishes next to 10^30
    def terms():
        big = mpmath.mpf(10) ** 30
        yield big + mpmath.mpf(1) / 3
        yield -big
    assert stable_fsum(terms, 15) == pytest.approx(1 / 3, rel=1e-15)
    assert stable_fsum(terms, 15, verify=True) == pytest.approx(1 / 3,
                                                                rel=1e-15)


def test_stable_fsum_gives_up():
    with pytest.raises(EvaluationError):
        stable_fsum(lambda: iter([mpmath.mpf(1), mpmath.mpf(-1)]), 50)
    # Terms that depend on the working precision never verify
    with pytest.raises(EvaluationError):
        stable_fsum(lambda: iter([1 + mpmath.mpf(1) / mpmath.mp.dps]), 1900,
                    verify=True)


def test_evaluate_with_cancellation():
    # (1 - e^-y)^8 near 0 cancels about 8 log10(1 / y) digits
    cdf = GammaMixture.from_terms([(F(-1), 0, F(1))],
                                  Kind.CDF_COMPLEMENT).power(8)
    for y in [1e-3, 1e-6, 1e-9]:
        assert cdf(y, precision=15) == pytest.approx(-math.expm1(-y) ** 8,
                                                     rel=1e-12)
