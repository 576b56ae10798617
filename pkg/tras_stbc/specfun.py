#!/usr/bin/env python3
# -*- coding: utf-8 -*-

"""
The special function kernel: gamma family, confluent / Gauss / Appell /
Lauricella hypergeometric functions, Gauss-Laguerre rules and the
multinomial coefficients of truncated exponential series.

Scalar functions return floats and are backed by :mod:`scipy.special`. The
Appell function is evaluated by :mod:`mpmath`; the Lauricella function of
the second kind (F_A) is evaluated by Gauss-Laguerre quadrature of its
Laplace-type integral representation. :func:`lauricella_fa_mp` and
:func:`lauricella_series` work at the working precision of :mod:`mpmath`.
"""

from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
import logging
import math
from typing import Sequence

import mpmath
import numpy as np
from scipy import linalg, special


class DomainError(ValueError):
    """Raised if an argument is outside the domain of a function."""


class EvaluationError(ArithmeticError):
    """
    Raised if a numerical evaluation did not converge. The diagnostics are
    kept in :attr:`diagnostics`.
    """
    def __init__(self, message: str, **diagnostics):
        super().__init__(message)
        self.diagnostics = diagnostics


LAGUERRE_MAX_ORDER = 512
LAURICELLA_ORDER = 128
LAURICELLA_RTOL = 1e-8
LAURICELLA_MAX_DEGREE = 1024
LAURICELLA_SERIES_PRECISION = 30
NEWTON_STEPS = 2


@dataclass(frozen=True)
class QuadratureRule:
    """
    A Gauss-Laguerre rule for integrals of the form
    ``1 / Gamma(alpha + 1) * int_0^inf x^alpha e^-x f(x) dx``, i.e. with
    the weights normalized to sum to 1. ``alpha = 0`` is the classical rule.
    """
    order: int
    nodes: tuple[float, ...]
    weights: tuple[float, ...]
    alpha: float = 0.0
    log_weights: tuple[float, ...] = ()

    def integrate(self, values: np.ndarray) -> float:
        """
        Applies the rule to the function values at :attr:`nodes`. Nodes
        whose weight underflowed are skipped.
        """
        weights = np.asarray(self.weights)
        used = weights > 0
        return math.fsum(weights[used] * np.asarray(values, dtype=float)[used])


@dataclass(frozen=True)
class MultinomialTable:
    """
    The exact coefficients of ``(sum_{k<mg} x^k / k!)^t``, in increasing
    order of the power of x.
    """
    t: int
    mg: int
    coeffs: tuple[Fraction, ...]

    def evaluate(self, x: Fraction | float) -> Fraction | float:
        result = 0
        for coeff in reversed(self.coeffs):
            result = result * x + coeff
        return result


def ln_gamma(x: float) -> float:
    """ln Gamma(x) for positive x."""
    if not x > 0:
        raise DomainError(f'ln_gamma is only defined for x > 0, got {x}')
    return float(special.gammaln(x))


def reg_lower_gamma(s: float, x: float) -> float:
    """The regularized lower incomplete gamma function P(s, x)."""
    if not s > 0:
        raise DomainError(f'reg_lower_gamma requires s > 0, got {s}')
    if x < 0:
        raise DomainError(f'reg_lower_gamma requires x >= 0, got {x}')
    return float(special.gammainc(s, x))


def _check_b(name: str, b: float):
    if b <= 0 and float(b).is_integer():
        raise DomainError(f'{name}: the lower parameter cannot be a '
                          f'non-positive integer, got {b}')


def kummer_1f1(a: float, b: float, x: float) -> float:
    """The confluent hypergeometric function 1F1(a; b; x)."""
    _check_b('kummer_1f1', b)
    value = float(special.hyp1f1(a, b, x))
    if not math.isfinite(value):
        raise EvaluationError(f'1F1({a}; {b}; {x}) did not converge',
                              a=a, b=b, x=x, value=value)
    return value


def gauss_2f1(a: float, b: float, c: float, x: float) -> float:
    """The Gauss hypergeometric function 2F1(a, b; c; x) for |x| < 1."""
    if abs(x) >= 1:
        raise DomainError(f'gauss_2f1 requires |x| < 1, got {x}')
    _check_b('gauss_2f1', c)
    value = float(special.hyp2f1(a, b, c, x))
    if not math.isfinite(value):
        raise EvaluationError(f'2F1({a}, {b}; {c}; {x}) did not converge',
                              a=a, b=b, c=c, x=x, value=value)
    return value


def appell_f2(a: float, b1: float, b2: float, c1: float, c2: float,
              x: float, y: float) -> float:
    """The Appell function of the second kind F2, for |x| + |y| < 1."""
    if abs(x) + abs(y) >= 1:
        raise DomainError(f'appell_f2 requires |x| + |y| < 1, got '
                          f'x={x}, y={y}')
    return float(mpmath.appellf2(a, b1, b2, c1, c2, x, y))


def _scaled_laguerre(n: int, alpha: float, x: np.ndarray):
    """
    ``L_n^(alpha)(x)`` and ``L_(n-1)^(alpha)(x)`` by the three-term
    recurrence, both divided by ``e^log_scale`` to stay in range.
    """
    x = np.asarray(x, dtype=float)
    previous = np.ones_like(x)
    value = 1 + alpha - x
    log_scale = np.zeros_like(x)
    for k in range(1, n):
        previous, value = value, ((2 * k + 1 + alpha - x) * value -
                                  (k + alpha) * previous) / (k + 1)
        factor = np.where(np.abs(value) > 1e100, np.abs(value), 1.0)
        value, previous = value / factor, previous / factor
        log_scale += np.log(factor)
    return value, previous, log_scale


@lru_cache(maxsize=64)
def _laguerre_rule(n: int, alpha: float) -> QuadratureRule:
    if n == 1:
        nodes = np.array([alpha + 1])
    else:
        # Eigenvalues of the Jacobi matrix, polished by Newton iteration
        k = np.arange(1, n)
        nodes = linalg.eigh_tridiagonal(2 * np.arange(n) + alpha + 1,
                                        np.sqrt(k * (k + alpha)),
                                        eigvals_only=True)
        for _ in range(NEWTON_STEPS):
            value, previous, _ = _scaled_laguerre(n, alpha, nodes)
            nodes = nodes - nodes * value / (n * value -
                                             (n + alpha) * previous)
    _, previous, log_scale = _scaled_laguerre(n, alpha, nodes)
    # w_i = Gamma(n + alpha + 1) x_i / (n! (n + alpha)^2 L_(n-1)(x_i)^2),
    # normalized by Gamma(alpha + 1)
    log_weights = (special.gammaln(n + alpha + 1) - special.gammaln(n + 1) -
                   special.gammaln(alpha + 1) + np.log(nodes) -
                   2 * np.log(n + alpha) -
                   2 * (np.log(np.abs(previous)) + log_scale))
    return QuadratureRule(n, tuple(float(v) for v in nodes),
                          tuple(float(w) for w in np.exp(log_weights)),
                          float(alpha),
                          tuple(float(lw) for lw in log_weights))


def gauss_laguerre_rule(n: int, alpha: float = 0.0) -> QuadratureRule:
    """
    Returns the ``n``-point (generalized) Gauss-Laguerre rule. The nodes are
    the roots of the degree-n Laguerre polynomial L_n^(alpha). The weights
    of the largest nodes underflow to 0 for big ``n``; their logarithms in
    :attr:`QuadratureRule.log_weights` do not.
    """
    if not 1 <= n <= LAGUERRE_MAX_ORDER:
        raise DomainError(f'The order of the Gauss-Laguerre rule must be '
                          f'between 1 and {LAGUERRE_MAX_ORDER}, got {n}')
    if alpha <= -1:
        raise DomainError(f'alpha must be greater than -1, got {alpha}')
    return _laguerre_rule(int(n), float(alpha))


def _check_lauricella(b: Sequence[float], c: Sequence[float],
                      x: Sequence[float]):
    if not len(b) == len(c) == len(x):
        raise DomainError('lauricella_fa: b, c and x must have the same '
                          'length')
    if sum(abs(xi) for xi in x) >= 1:
        raise DomainError(f'lauricella_fa requires sum |x_i| < 1, got {x}')
    for ci in c:
        _check_b('lauricella_fa', ci)


def _lauricella_quadrature(a: float, b: Sequence[float], c: Sequence[float],
                           x: Sequence[float], order: int) -> float:
    """
    F_A by the Laplace-type integral, with the Kummer transformation applied
    to the factors of the positive arguments:

        (1 - s)^-a / Gamma(a) int_0^inf e^-t t^(a-1)
            prod_(x_i > 0) 1F1(c_i - b_i; c_i; -x_i t / (1 - s))
            prod_(x_i < 0) 1F1(b_i; c_i; x_i t / (1 - s)) dt,

    where ``s`` is the sum of the positive arguments. Every 1F1 has a
    non-positive argument, so the integrand decays like e^-t.
    """
    rest = 1 - math.fsum(xi for xi in x if xi > 0)
    rule = gauss_laguerre_rule(order, a - 1)
    nodes = np.asarray(rule.nodes)
    values = np.ones_like(nodes)
    for bi, ci, xi in zip(b, c, x):
        if xi > 0:
            values *= special.hyp1f1(ci - bi, ci, -xi * nodes / rest)
        elif xi < 0:
            values *= special.hyp1f1(bi, ci, xi * nodes / rest)
    return rest ** -a * rule.integrate(values)


def lauricella_fa(a: float, b: Sequence[float], c: Sequence[float],
                  x: Sequence[float], order: int = LAURICELLA_ORDER,
                  rtol: float = LAURICELLA_RTOL) -> float:
    """
    The Lauricella function F_A of n variables, for sum |x_i| < 1.

    Evaluated with the Gauss-Laguerre rule of *order* and verified against
    the rule of twice that order; the latter is returned. The integral
    needs ``a > 0``; other values of ``a`` are summed as a series.
    """
    _check_lauricella(b, c, x)
    if all(xi == 0 for xi in x):
        return 1.0
    if a <= 0:
        with mpmath.workdps(LAURICELLA_SERIES_PRECISION):
            return float(lauricella_series(a, b, c, x))

    fine_order = min(2 * order, LAGUERRE_MAX_ORDER)
    coarse = _lauricella_quadrature(a, b, c, x, order)
    fine = _lauricella_quadrature(a, b, c, x, fine_order)
    if not math.isfinite(fine) or abs(fine - coarse) > rtol * abs(fine):
        logging.warning(f'Lauricella quadrature disagreement: {coarse} vs '
                        f'{fine} for a={a}, b={b}, c={c}, x={x}')
        raise EvaluationError(
            'Gauss-Laguerre rules of order {} and {} disagree for F_A'.format(
                order, fine_order),
            a=a, b=tuple(b), c=tuple(c), x=tuple(x), coarse=coarse, fine=fine
        )
    return fine


def lauricella_series(a, b: Sequence, c: Sequence, x: Sequence,
                      max_degree: int = LAURICELLA_MAX_DEGREE) -> mpmath.mpf:
    """
    F_A by its defining series at the working precision of :mod:`mpmath`.
    The terms of total degree k are the convolution of the one-variable
    sequences ``(b_i)_j x_i^j / ((c_i)_j j!)``, times ``(a)_k``.
    """
    _check_lauricella(b, c, x)
    a = mpmath.mpf(a)
    eps = mpmath.mp.eps * 2 ** 4
    degree = 64
    while True:
        sums = [mpmath.mpf(1)] + [mpmath.mpf(0)] * degree
        for bi, ci, xi in zip(b, c, x):
            bi, ci, xi = mpmath.mpf(bi), mpmath.mpf(ci), mpmath.mpf(xi)
            single = [mpmath.mpf(1)]
            for j in range(degree):
                single.append(single[-1] * (bi + j) * xi / ((ci + j) * (j + 1)))
            sums = [mpmath.fsum(sums[i] * single[k - i] for i in range(k + 1))
                    for k in range(degree + 1)]
        terms = [mpmath.rf(a, k) * sums[k] for k in range(degree + 1)]
        total = mpmath.fsum(terms)
        if all(abs(t) <= eps * abs(total) for t in terms[-3:]):
            return total
        if degree >= max_degree:
            raise EvaluationError(
                f'The F_A series did not converge in {degree} degrees',
                a=a, b=tuple(b), c=tuple(c), x=tuple(x), estimate=total)
        degree = min(2 * degree, max_degree)


def lauricella_fa_mp(a, b: Sequence, c: Sequence,
                     x: Sequence) -> mpmath.mpf:
    """
    F_A at the working precision of :mod:`mpmath`: the integral of
    :func:`lauricella_fa` by adaptive (tanh-sinh) quadrature, ``2F1`` for a
    single variable and the series if ``a <= 0``.
    """
    _check_lauricella(b, c, x)
    if all(xi == 0 for xi in x):
        return mpmath.mpf(1)
    if a <= 0:
        return lauricella_series(a, b, c, x)
    if len(x) == 1:
        return mpmath.hyp2f1(a, b[0], c[0], x[0])
    a = mpmath.mpf(a)
    rest = 1 - mpmath.fsum(mpmath.mpf(xi) for xi in x if xi > 0)
    factors = [(mpmath.mpf(ci) - bi, ci, -mpmath.mpf(xi) / rest) if xi > 0
               else (bi, ci, mpmath.mpf(xi) / rest)
               for bi, ci, xi in zip(b, c, x) if xi != 0]

    def integrand(t):
        value = mpmath.exp(-t) * t ** (a - 1)
        for p, q, z in factors:
            value *= mpmath.hyp1f1(p, q, z * t)
        return value

    integral = mpmath.quad(integrand, [0, a, mpmath.inf])
    return rest ** -a * integral / mpmath.gamma(a)


@lru_cache(maxsize=1024)
def multinomial_coeffs(t: int, mg: int) -> MultinomialTable:
    """
    The coefficients beta_r(t, mg) of ``(sum_{k=0}^{mg-1} x^k / k!)^t``,
    computed by repeated polynomial multiplication in exact arithmetic.
    """
    if t < 0 or mg < 1:
        raise DomainError(f'multinomial_coeffs requires t >= 0 and mg >= 1, '
                          f'got t={t}, mg={mg}')
    base = [Fraction(1, math.factorial(k)) for k in range(mg)]
    coeffs = [Fraction(1)]
    for _ in range(t):
        product = [Fraction(0)] * (len(coeffs) + mg - 1)
        for i, ci in enumerate(coeffs):
            for j, bj in enumerate(base):
                product[i + j] += ci * bj
        coeffs = product
    return MultinomialTable(t, mg, tuple(coeffs))


def gaussian_q(x):
    """The Gaussian tail function Q(x). Works on scalars and arrays alike."""
    result = special.ndtr(np.negative(x))
    return float(result) if np.ndim(result) == 0 else result
