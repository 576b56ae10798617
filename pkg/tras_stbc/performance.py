#!/usr/bin/env python3
# -*- coding: utf-8 -*-

"""
Performance metrics of the unified system: the unified integrals

    J(theta, eps, phi)  = theta int_0^inf x^eps e^(-phi x) F(x) dx
    J^(theta, phi)      = theta int_0^inf e^(-phi x) 1F1(1; 3/2; phi x / 2)
                                F(x) dx,

where F is the CDF of the output SNR, and the MGF, error rates, outage
probability and asymptotic (high-SNR) behaviour expressed through them.

Both integrals have two evaluators. The *expansion* evaluator integrates
the exponential-polynomial form of F term by term in extended precision;
the *closed form* evaluator writes F as a power of a sum of incomplete gamma
functions and reduces each product to a Lauricella (Gauss for one factor,
Appell for two) hypergeometric function. Both sum their terms with
:func:`~tras_stbc.mixture.stable_fsum`, so the precision follows the
cancellation, which grows with the SNR.
"""

from collections import Counter
from dataclasses import dataclass
from enum import Enum
from fractions import Fraction
from itertools import combinations_with_replacement
import logging
import math
from typing import Union

import mpmath

from tras_stbc.feedback import FeedbackModel, mix_metric
from tras_stbc.mixture import DEFAULT_PRECISION, stable_fsum, to_mpf
from tras_stbc.modulation import Family, ModulationSpec
from tras_stbc.snr_model import SchemeConfig, SnrModel, Tasc, all_tascs, get_model
from tras_stbc.specfun import lauricella_fa_mp

# A metric is either an error rate (modulation) or outage (target rate)
Target = Union[ModulationSpec, float]

# Above this sum of arguments, F2 is integrated rather than summed
APPELL_SERIES_LIMIT = 0.5


class Method(Enum):
    EXPANSION = 'expansion'
    CLOSED_FORM = 'closed_form'


@dataclass(frozen=True)
class AsymptoticParams:
    """The output SNR density behaves as ``a x^t`` near 0 (at gamma_bar=1)."""
    tasc: Tasc
    a: float
    t: int

    @property
    def ado(self) -> int:
        return self.t + 1


def _check_phi(phi: float):
    if not phi > 0:
        raise ValueError(f'phi must be positive, got {phi}')


def _scale(cfg: SchemeConfig, gamma_bar: float) -> mpmath.mpf:
    """m / gamma_bar, the unit of the pole locations."""
    if not gamma_bar > 0:
        raise ValueError(f'gamma_bar must be positive, got {gamma_bar}')
    return to_mpf(cfg.m) / mpmath.mpf(gamma_bar)


def _j_expansion(model: SnrModel, theta: float, eps: float, phi: float,
                 gamma_bar: float, precision: int) -> float:
    def terms():
        scale = _scale(model.cfg, gamma_bar)
        e, p = mpmath.mpf(eps), mpmath.mpf(phi)
        yield mpmath.gamma(e + 1) / p ** (e + 1)
        for t in model.output_cdf.terms:
            yield (to_mpf(t.weight) * scale ** t.power *
                   mpmath.gamma(t.power + e + 1) /
                   (p + to_mpf(t.rate) * scale) ** (t.power + e + 1))

    return theta * stable_fsum(terms, precision)


def _j_hat_expansion(model: SnrModel, theta: float, phi: float,
                     gamma_bar: float, precision: int) -> float:
    def terms():
        scale = _scale(model.cfg, gamma_bar)
        p = mpmath.mpf(phi)

        def integral(power, beta):
            return (mpmath.factorial(power) / beta ** (power + 1) *
                    mpmath.hyp2f1(1, power + 1, 1.5, p / (2 * beta)))

        yield integral(0, p)
        for t in model.output_cdf.terms:
            yield (to_mpf(t.weight) * scale ** t.power *
                   integral(t.power, p + to_mpf(t.rate) * scale))

    return theta * stable_fsum(terms, precision)


def _cdf_components(model: SnrModel) -> list[tuple[Fraction, int, Fraction]]:
    """
    The branch CDF as ``sum_i c_i y^n_i e^(-r_i y) 1F1(1; n_i + 1; r_i y)``,
    i.e. a sum of lower incomplete gamma functions.
    """
    return [(t.weight / (t.power + 1), t.power + 1, t.rate)
            for t in model.branch_pdf.terms]


def _closed_form_terms(model: SnrModel, eps: float, phi: float,
                       gamma_bar: float, hat: bool):
    """
    Expands ``F = (sum_i c_i ...)^N`` over the multisets of N components;
    each product integrates to ``Gamma(a) / S^a F_A(a; 1, ...; n + 1, ...;
    r / S)``. J^ adds the variable ``phi / (2 S)`` with ``c = 3/2``. The
    terms are computed at the working precision.
    """
    components = _cdf_components(model)
    scale = _scale(model.cfg, gamma_bar)
    phi = mpmath.mpf(phi)
    N = model.cfg.N
    for combo in combinations_with_replacement(range(len(components)), N):
        counts = Counter(combo)
        multiplicity = math.factorial(N) // math.prod(
            math.factorial(c) for c in counts.values())
        coeff = multiplicity * math.prod(components[i][0] for i in combo)
        if coeff == 0:
            continue
        powers = [components[i][1] for i in combo]
        rates = [to_mpf(components[i][2]) * scale for i in combo]
        a = sum(powers) + (0 if hat else mpmath.mpf(eps)) + 1
        total_rate = phi + mpmath.fsum(rates)
        x = [r / total_rate for r in rates]
        b = [1] * N
        c = [n + 1 for n in powers]
        if hat:
            x.insert(0, phi / (2 * total_rate))
            b.insert(0, 1)
            c.insert(0, mpmath.mpf(1.5))
        assert mpmath.fsum(x) < 1, f'Lauricella arguments out of domain: {x}'
        if len(x) == 2 and mpmath.fsum(x) <= APPELL_SERIES_LIMIT:
            fa = mpmath.appellf2(a, b[0], b[1], c[0], c[1], x[0], x[1])
        else:
            fa = lauricella_fa_mp(a, b, c, x)
        yield (to_mpf(coeff) * mpmath.gamma(a) / total_rate ** a *
               scale ** sum(powers) * fa)


def _closed_form(model: SnrModel, theta: float, eps: float, phi: float,
                 gamma_bar: float, hat: bool, precision: int) -> float:
    return theta * stable_fsum(
        lambda: _closed_form_terms(model, eps, phi, gamma_bar, hat),
        precision, verify=True)


def unified_j(cfg: SchemeConfig, tasc: Tasc, theta: float, eps: float,
              phi: float, gamma_bar: float, method: Method = Method.EXPANSION,
              precision: int = DEFAULT_PRECISION) -> float:
    """``theta int_0^inf x^eps e^(-phi x) F(x) dx``."""
    if not eps > -1:
        raise ValueError(f'eps must be greater than -1, got {eps}')
    _check_phi(phi)
    if theta == 0:
        return 0.0
    model = get_model(cfg, tasc)
    if Method(method) is Method.CLOSED_FORM:
        return _closed_form(model, theta, eps, phi, gamma_bar, False,
                            precision)
    return _j_expansion(model, theta, eps, phi, gamma_bar, precision)


def unified_j_hat(cfg: SchemeConfig, tasc: Tasc, theta: float, phi: float,
                  gamma_bar: float, method: Method = Method.EXPANSION,
                  precision: int = DEFAULT_PRECISION) -> float:
    """``theta int_0^inf e^(-phi x) 1F1(1; 3/2; phi x / 2) F(x) dx``."""
    _check_phi(phi)
    if theta == 0:
        return 0.0
    model = get_model(cfg, tasc)
    if Method(method) is Method.CLOSED_FORM:
        return _closed_form(model, theta, 0, phi, gamma_bar, True, precision)
    return _j_hat_expansion(model, theta, phi, gamma_bar, precision)


def mgf(cfg: SchemeConfig, tasc: Tasc, s: float, gamma_bar: float,
        method: Method = Method.EXPANSION,
        precision: int = DEFAULT_PRECISION) -> float:
    """The MGF ``E[e^(-s gamma)]`` of the output SNR, i.e. J(s, 0, s)."""
    if not s > 0:
        raise ValueError(f's must be positive, got {s}')
    return unified_j(cfg, tasc, s, 0, s, gamma_bar, method, precision)


def error_rate(cfg: SchemeConfig, tasc: Tasc, mod: ModulationSpec,
               gamma_bar: float, method: Method = Method.EXPANSION,
               precision: int = DEFAULT_PRECISION) -> float:
    """
    The BER (binary modulations) or SER of *mod* when *tasc* is activated.
    The values of M-PSK with M >= 8 are approximate.
    """
    if mod.family is Family.GAMMA:
        l1, l2, l3 = mod.params
        theta = l3 * l2 ** l1 / (2 * math.gamma(l1))
        return unified_j(cfg, tasc, theta, l1 - 1, l2, gamma_bar,
                         method, precision)
    elif mod.family is Family.PAM:
        M = mod.M
        theta = math.sqrt(3 * (M - 1) / (math.pi * M ** 2 * (M + 1)))
        return unified_j(cfg, tasc, theta, -0.5, 3 / (M ** 2 - 1), gamma_bar,
                         method, precision)
    elif mod.family is Family.QAM:
        l4, l5, l6 = mod.params
        return (
            unified_j(cfg, tasc, math.sqrt(l4 / (8 * math.pi)) * (l5 - l6),
                      -0.5, l4 / 2, gamma_bar, method, precision) +
            unified_j_hat(cfg, tasc, l4 * l6 / (2 * math.pi), l4, gamma_bar,
                          method, precision)
        )
    else:
        raise ValueError(f'Unsupported modulation {mod}')


def outage_threshold(rate: float) -> float:
    return 2 ** rate - 1


def outage(cfg: SchemeConfig, tasc: Tasc, rate: float,
           gamma_bar: float) -> float:
    """The probability that the capacity falls below *rate* bit/s/Hz."""
    if not rate > 0:
        raise ValueError(f'The target rate must be positive, got {rate}')
    return get_model(cfg, tasc).cdf(outage_threshold(rate), gamma_bar)


def tasc_metric(cfg: SchemeConfig, tasc: Tasc, target: Target,
                gamma_bar: float, precision: int = DEFAULT_PRECISION) -> float:
    if isinstance(target, ModulationSpec):
        return error_rate(cfg, tasc, target, gamma_bar, precision=precision)
    return outage(cfg, tasc, target, gamma_bar)


def per_tasc_metrics(cfg: SchemeConfig, target: Target, gamma_bar: float,
                     precision: int = DEFAULT_PRECISION) -> list[float]:
    """The metric for all K TASCs, c_1 first."""
    return [tasc_metric(cfg, tasc, target, gamma_bar, precision)
            for tasc in all_tascs(cfg)]


def averaged_metric(cfg: SchemeConfig, target: Target, fm: FeedbackModel,
                    gamma_bar: float,
                    precision: int = DEFAULT_PRECISION) -> float:
    """The metric averaged over the feedback outcomes."""
    return mix_metric(per_tasc_metrics(cfg, target, gamma_bar, precision), fm)


def asymptotic_params(cfg: SchemeConfig, tasc: Tasc) -> AsymptoticParams:
    """
    The union bound of the output SNR density near 0. The selected sum is
    small only if the n_min-th best branch is, so
    ``F^(v)(y) ~ B y^(mg j)`` with ``j = n_T - n_min + 1`` and
    ``B = C(n_T, j) / Gamma(mg + 1)^j``.
    """
    tasc.check(cfg)
    mg, N = cfg.mg, cfg.N
    j = cfg.n_t - tasc.n_min + 1
    b = Fraction(math.comb(cfg.n_t, j), math.factorial(mg) ** j)
    t = mg * N * j - 1
    a = b ** N * mg * N * j * cfg.m ** (t + 1)
    return AsymptoticParams(tasc, float(a), t)


def asymptotic_table(cfg: SchemeConfig) -> dict[Tasc, AsymptoticParams]:
    return {tasc: asymptotic_params(cfg, tasc) for tasc in all_tascs(cfg)}


def exact_leading_term(cfg: SchemeConfig, tasc: Tasc) -> AsymptoticParams:
    """
    The exact ``a x^t`` behaviour of the output SNR density near 0, from the
    Taylor expansion of the exponential-polynomial density.
    """
    coeff, order = get_model(cfg, tasc).output_pdf.taylor_leading()
    return AsymptoticParams(tasc, float(coeff * cfg.m ** (order + 1)), order)


def asymptotic_error(cfg: SchemeConfig, tasc: Tasc, mod_k: float,
                     gamma_bar: float) -> float:
    """
    The high-SNR approximation of ``E[Q(sqrt(k gamma))]``:
    ``2^t a Gamma(t + 3/2) / (sqrt(pi) (t + 1)) (k gamma_bar)^-(t + 1)``.
    """
    if not mod_k > 0 or not gamma_bar > 0:
        raise ValueError('k and gamma_bar must be positive')
    params = asymptotic_params(cfg, tasc)
    t = params.t
    return math.exp(t * math.log(2) + math.log(params.a) +
                    math.lgamma(t + 1.5) - 0.5 * math.log(math.pi) -
                    math.log(t + 1) - (t + 1) * math.log(mod_k * gamma_bar))


def asymptotic_metric(cfg: SchemeConfig, tasc: Tasc, target: Target,
                      gamma_bar: float) -> float:
    """The high-SNR approximation of the metric of *tasc*."""
    params = asymptotic_params(cfg, tasc)
    t = params.t
    if isinstance(target, ModulationSpec):
        form = target.asymptotic_form()
        if form.exponential:
            return form.multiplier * math.exp(
                math.log(params.a) + math.lgamma(t + 1) -
                (t + 1) * math.log(form.k * gamma_bar))
        return form.multiplier * asymptotic_error(cfg, tasc, form.k,
                                                  gamma_bar)
    x = outage_threshold(target)
    return params.a / (t + 1) * (x / gamma_bar) ** (t + 1)


def averaged_asymptote(cfg: SchemeConfig, target: Target, fm: FeedbackModel,
                       gamma_bar: float) -> float:
    """The feedback-averaged high-SNR approximation."""
    values = [asymptotic_metric(cfg, tasc, target, gamma_bar)
              for tasc in all_tascs(cfg)]
    logging.debug(f'Per-TASC asymptotes of {cfg} at {gamma_bar}: {values}')
    return mix_metric(values, fm)
