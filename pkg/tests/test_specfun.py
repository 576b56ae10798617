#!/usr/bin/env python3
# -*- coding: utf-8 -*-

from fractions import Fraction
import math

import mpmath
import numpy as np
import pytest

from tras_stbc.specfun import (
    LAGUERRE_MAX_ORDER, DomainError, EvaluationError, appell_f2, gauss_2f1,
    gauss_laguerre_rule, gaussian_q, kummer_1f1, lauricella_fa,
    lauricella_fa_mp, lauricella_series, ln_gamma, multinomial_coeffs,
    reg_lower_gamma
)


def test_ln_gamma():
    assert ln_gamma(5) == pytest.approx(math.log(24))
    assert ln_gamma(0.5) == pytest.approx(0.5 * math.log(math.pi))
    with pytest.raises(DomainError):
        ln_gamma(0)


def test_reg_lower_gamma():
    assert reg_lower_gamma(1, 2) == pytest.approx(1 - math.exp(-2))
    assert reg_lower_gamma(2, 1) == pytest.approx(1 - 2 * math.exp(-1))
    assert reg_lower_gamma(3, 0) == 0
    with pytest.raises(DomainError):
        reg_lower_gamma(1, -1)
    with pytest.raises(DomainError):
        reg_lower_gamma(0, 1)


def test_kummer_1f1():
    assert kummer_1f1(1, 1, 0.7) == pytest.approx(math.exp(0.7))
    # 1F1(1/2; 3/2; -x^2) = sqrt(pi) erf(x) / (2x)
    assert kummer_1f1(0.5, 1.5, -4) == pytest.approx(
        math.sqrt(math.pi) * math.erf(2) / 4)
    with pytest.raises(DomainError):
        kummer_1f1(1, -2, 0.5)


def test_gauss_2f1():
    # 2F1(1, 1; 2; x) = -ln(1 - x) / x
    assert gauss_2f1(1, 1, 2, 0.5) == pytest.approx(2 * math.log(2))
    with pytest.raises(DomainError):
        gauss_2f1(1, 1, 2, 1.0)


def _rising(a, n):
    """(a)_k for k < n."""
    values = [1.0]
    for k in range(n - 1):
        values.append(values[-1] * (a + k))
    return values


def _factors(b, c, x, n):
    """(b)_k x^k / ((c)_k k!) for k < n."""
    values = [1.0]
    for k in range(n - 1):
        values.append(values[-1] * (b + k) * x / ((c + k) * (k + 1)))
    return values


def test_appell_f2():
    # With y = 0, F2 reduces to 2F1(a, b1; c1; x)
    assert appell_f2(1.5, 1, 1, 2, 3, 0.3, 0) == pytest.approx(
        gauss_2f1(1.5, 1, 2, 0.3))
    with pytest.raises(DomainError):
        appell_f2(1, 1, 1, 2, 2, 0.6, 0.5)
    # Against the double series
    a = _rising(2, 150)
    u, v = _factors(1, 1.5, 0.3, 150), _factors(1, 3, 0.4, 150)
    expected = math.fsum(a[i + j] * u[i] * v[j]
                         for i in range(150) for j in range(150 - i))
    assert appell_f2(2, 1, 1, 1.5, 3, 0.3, 0.4) == pytest.approx(expected,
                                                                 rel=1e-12)


def test_gauss_laguerre_rule():
    rule = gauss_laguerre_rule(20)
    assert sum(rule.weights) == pytest.approx(1)
    # int_0^inf x^3 e^-x = 3!
    assert rule.integrate(np.asarray(rule.nodes) ** 3) == pytest.approx(6)
    generalized = gauss_laguerre_rule(20, 1.5)
    assert sum(generalized.weights) == pytest.approx(1)
    # E[x] for the Gamma(2.5) weight
    assert generalized.integrate(generalized.nodes) == pytest.approx(2.5)
    with pytest.raises(DomainError):
        gauss_laguerre_rule(0)
    with pytest.raises(DomainError):
        gauss_laguerre_rule(10, -1)


@pytest.mark.parametrize('alpha', [0.0, 0.5, 2.5])
def test_gauss_laguerre_rule_max_order(alpha):
    rule = gauss_laguerre_rule(LAGUERRE_MAX_ORDER, alpha)
    nodes = np.asarray(rule.nodes)
    weights = np.asarray(rule.weights)
    log_weights = np.asarray(rule.log_weights)
    assert len(nodes) == LAGUERRE_MAX_ORDER
    assert np.all(np.diff(nodes) > 0) and nodes[0] > 0
    assert np.all(np.isfinite(log_weights))
    assert np.all(np.isfinite(weights)) and np.all(weights >= 0)
    # The largest nodes have underflowing weights
    assert weights[-1] == 0
    np.testing.assert_allclose(weights, np.exp(log_weights))
    assert math.fsum(weights) == pytest.approx(1, rel=1e-10)
    assert rule.integrate(nodes) == pytest.approx(alpha + 1, rel=1e-10)
    # int x^alpha e^-x cos(x) / Gamma(alpha + 1) = cos((alpha + 1) pi / 4)
    # / 2^((alpha + 1) / 2)
    assert rule.integrate(np.cos(nodes)) == pytest.approx(
        math.cos((alpha + 1) * math.pi / 4) / 2 ** ((alpha + 1) / 2),
        abs=1e-10)


def test_lauricella_reductions():
    assert lauricella_fa(2, [1], [3], [0.4]) == pytest.approx(
        gauss_2f1(2, 1, 3, 0.4), rel=1e-8)
    assert lauricella_fa(2.5, [1, 1], [2, 3], [0.3, 0.2]) == pytest.approx(
        appell_f2(2.5, 1, 1, 2, 3, 0.3, 0.2), rel=1e-8)
    assert lauricella_fa(3, [1, 1, 1], [2, 2, 2], [0, 0, 0]) == 1.0


def test_lauricella_domain():
    with pytest.raises(DomainError):
        lauricella_fa(2, [1, 1], [2, 2], [0.5, 0.5])
    with pytest.raises(DomainError):
        lauricella_fa(2, [1, 1], [2, 2], [0.5, -0.5])
    with pytest.raises(DomainError):
        lauricella_fa(2, [1, 1], [2], [0.1, 0.1])
    with pytest.raises(DomainError):
        lauricella_fa(2, [1], [-1], [0.1])


def test_lauricella_negative_arguments():
    assert lauricella_fa(2, [1], [3], [-0.4]) == pytest.approx(
        float(mpmath.hyp2f1(2, 1, 3, -0.4)), rel=1e-8)
    for x, y in [(0.3, -0.2), (-0.45, 0.3), (-0.3, -0.4)]:
        assert lauricella_fa(2.5, [1, 1.5], [2, 3], [x, y]) == pytest.approx(
            float(mpmath.appellf2(2.5, 1, 1.5, 2, 3, x, y)), rel=1e-8)


def test_lauricella_non_positive_a():
    # (-1)_k vanishes for k > 1
    assert lauricella_fa(-1, [1, 2], [2, 3], [0.3, -0.2]) == pytest.approx(
        1 - 0.3 / 2 + 2 * 0.2 / 3)
    assert lauricella_fa(-0.5, [1, 1], [2, 3], [0.3, 0.2]) == pytest.approx(
        float(mpmath.appellf2(-0.5, 1, 1, 2, 3, 0.3, 0.2)), rel=1e-10)


def _fa_triple_series(a, b, c, x, max_degree):
    rising = _rising(a, max_degree + 1)
    u, v, w = (_factors(bn, cn, xn, max_degree + 1)
               for bn, cn, xn in zip(b, c, x))
    return math.fsum(rising[i + j + k] * u[i] * v[j] * w[k]
                     for i in range(max_degree + 1)
                     for j in range(max_degree + 1 - i)
                     for k in range(max_degree + 1 - i - j))


def test_lauricella_three_variables():
    a, b, c, x = 4, [1, 1, 1], [2, 3, 2], [0.2, 0.1, 0.3]
    expected = _fa_triple_series(a, b, c, x, 90)
    assert lauricella_fa(a, b, c, x) == pytest.approx(expected, rel=1e-8)
    with mpmath.workdps(30):
        assert float(lauricella_series(a, b, c, x)) == pytest.approx(
            expected, rel=1e-12)
        assert float(lauricella_fa_mp(a, b, c, x)) == pytest.approx(
            expected, rel=1e-12)


def test_lauricella_mp_matches_series():
    a, b, c, x = 3.5, [1, 2, 0.5], [2, 3, 1.5], [0.25, -0.3, 0.1]
    with mpmath.workdps(40):
        series = lauricella_series(a, b, c, x)
        integral = lauricella_fa_mp(a, b, c, x)
        assert abs(integral - series) <= mpmath.mpf(10) ** -25 * abs(series)
    assert lauricella_fa(a, b, c, x) == pytest.approx(float(series),
                                                      rel=1e-8)


def test_lauricella_series_divergence():
    with mpmath.workdps(30):
        with pytest.raises(EvaluationError):
            lauricella_series(40, [1, 1], [1, 1], [0.49, 0.5], max_degree=64)


def test_evaluation_error_diagnostics():
    error = EvaluationError('no convergence', order=5, estimate=1.0)
    assert error.diagnostics == {'order': 5, 'estimate': 1.0}
    assert 'no convergence' in str(error)


def test_multinomial_coeffs():
    table = multinomial_coeffs(2, 3)
    assert table.coeffs == (1, 2, 2, 1, Fraction(1, 4))
    assert table.evaluate(Fraction(1)) == Fraction(25, 4)
    assert multinomial_coeffs(0, 4).coeffs == (1,)
    # mg = 1: (1)^t
    assert multinomial_coeffs(5, 1).coeffs == (1,)
    with pytest.raises(DomainError):
        multinomial_coeffs(-1, 2)


def test_gaussian_q():
    assert gaussian_q(0) == pytest.approx(0.5)
    assert gaussian_q(1.0) == pytest.approx(0.15865525393145707)
    values = gaussian_q(np.array([0.0, 3.0]))
    assert values.shape == (2,)
    assert values[1] == pytest.approx(0.0013498980316301)
