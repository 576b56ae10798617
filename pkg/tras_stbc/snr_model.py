#!/usr/bin/env python3
# -*- coding: utf-8 -*-

"""
The exact distribution of the output SNR of the unified joint TRAS/STBC and
TAS/STBC system for a given transmit antenna subset combination (TASC).

The selected diversity branch is the sum of the branch SNRs at the rank
positions of the TASC. Its joint order-statistics density is expanded into
a finite multi-index sum, Laplace transformed term by term, reduced to a
product of powers of ``1 / (s + a_k)``, and inverted through exact partial
fractions. All pole locations and weights are exact fractions in units of
``m / gamma_bar``, so the model is built once per (configuration, TASC) and
rescaled for every average SNR.
"""

from collections import defaultdict
from dataclasses import dataclass, field
from enum import Enum
from fractions import Fraction
from functools import lru_cache
from itertools import combinations, product
import logging
import math
import threading
from typing import Iterator, Sequence

from tras_stbc.mixture import GammaMixture, Kind
from tras_stbc.specfun import multinomial_coeffs, reg_lower_gamma

MAX_TERMS = 10 ** 7


class ExpansionTooLargeError(ValueError):
    """Raised if the expansion of a configuration would be too large."""


class ResidueError(RuntimeError):
    """Raised if partial fractions are attempted over unmerged poles."""


class Scheme(Enum):
    JOINT = 'joint'
    TAS = 'tas'


@dataclass(frozen=True)
class SchemeConfig:
    """
    The unified system description. ``m`` and ``code_rate`` are kept as
    fractions; ``g`` and ``N`` map the scheme onto the unified model:
    (g, N) = (1, n_R) for joint TRAS/STBC and (n_R, 1) for TAS/STBC.
    """
    scheme: Scheme
    n_t: int
    n_s: int
    n_r: int
    m: Fraction
    omega: float = 1.0
    code_rate: Fraction = Fraction(1)

    def __post_init__(self):
        object.__setattr__(self, 'scheme', Scheme(self.scheme))
        object.__setattr__(self, 'm', Fraction(self.m))
        object.__setattr__(self, 'code_rate', Fraction(self.code_rate))
        errors = self.validation_errors()
        if errors:
            raise ValueError('; '.join(errors))

    def validation_errors(self) -> list[str]:
        errors = []
        if self.n_t < 1 or self.n_s < 1 or self.n_r < 1:
            errors.append('n_T, n_S and n_R must be positive')
        if self.n_s > self.n_t:
            errors.append(f'n_S = {self.n_s} cannot exceed n_T = {self.n_t}')
        if self.m < Fraction(1, 2):
            errors.append(f'm = {self.m} must be at least 1/2')
        if self.scheme is Scheme.JOINT and self.m.denominator != 1:
            errors.append(f'the joint scheme requires an integer m, '
                          f'got m = {self.m}')
        if (self.m * self.g).denominator != 1:
            errors.append(f'm*g = {self.m * self.g} must be an integer '
                          f'(m = {self.m}, g = {self.g})')
        if self.omega <= 0:
            errors.append(f'omega = {self.omega} must be positive')
        if self.code_rate <= 0:
            errors.append(f'code_rate = {self.code_rate} must be positive')
        return errors

    @property
    def g(self) -> int:
        return 1 if self.scheme is Scheme.JOINT else self.n_r

    @property
    def N(self) -> int:
        return self.n_r if self.scheme is Scheme.JOINT else 1

    @property
    def mg(self) -> int:
        return int(self.m * self.g)

    @property
    def K(self) -> int:
        return math.comb(self.n_t, self.n_s)

    @property
    def eta(self) -> int:
        return max(1, math.ceil(math.log2(self.K))) if self.K > 1 else 0

    @property
    def L(self) -> int:
        return 2 ** self.eta

    def gamma_bar(self, es_n0: float) -> float:
        """The average SNR per branch, E_s Omega / (n_S N_0 R_s)."""
        return es_n0 * self.omega / (self.n_s * float(self.code_rate))

    def pure_stbc(self) -> 'SchemeConfig':
        """The same system without transmit antenna selection."""
        return SchemeConfig(self.scheme, self.n_s, self.n_s, self.n_r, self.m,
                            self.omega, self.code_rate)

    def __str__(self):
        return (f'{self.scheme.value}(n_T={self.n_t}, n_S={self.n_s}, '
                f'n_R={self.n_r}, m={self.m})')


@dataclass(frozen=True, order=True)
class Tasc:
    """The rank positions of the selected transmit antennas (1 = best)."""
    ranks: tuple[int, ...]

    def __post_init__(self):
        ranks = tuple(int(r) for r in self.ranks)
        object.__setattr__(self, 'ranks', ranks)
        if not ranks or ranks[0] < 1 or any(
                b <= a for a, b in zip(ranks, ranks[1:])):
            raise ValueError(f'TASC ranks must be strictly increasing '
                             f'positive integers, got {ranks}')

    @property
    def n_min(self) -> int:
        return self.ranks[0]

    def check(self, cfg: SchemeConfig):
        if len(self.ranks) != cfg.n_s or self.ranks[-1] > cfg.n_t:
            raise ValueError(f'TASC {self.ranks} does not fit {cfg}')

    def __str__(self):
        return '(' + ','.join(map(str, self.ranks)) + ')'


def all_tascs(cfg: SchemeConfig) -> list[Tasc]:
    """All K TASCs in lexicographic order; the first one is c_1."""
    return [Tasc(c) for c in combinations(range(1, cfg.n_t + 1), cfg.n_s)]


@dataclass(frozen=True, order=True)
class RatePole:
    """A pole at ``s = -q`` (q in units of m / gamma_bar) of order ``u``."""
    q: Fraction
    u: int


@dataclass(frozen=True)
class ExpansionTerm:
    """
    One (P, T, R) index tuple of the multi-index expansion of the joint
    order-statistics density: ``coeff * prod_k y_k^(mu_k - 1)
    e^(-(1 + t_k) y_k)``.
    """
    p: tuple[int, ...]
    t: tuple[int, ...]
    r: tuple[int, ...]
    mu: tuple[int, ...]
    coeff: Fraction


@dataclass(frozen=True)
class LaplaceProduct:
    """``weight * prod_k (s + a_k)^-u_k`` for one L index tuple."""
    weight: Fraction
    poles: tuple[RatePole, ...]
    l: tuple[int, ...] = field(default=())

    def transform(self, s: float) -> float:
        value = float(self.weight)
        for pole in self.poles:
            value *= (s + float(pole.q)) ** -pole.u
        return value


def branch_cdf_unified(cfg: SchemeConfig, x: float, gamma_bar: float) -> float:
    """
    The CDF of a single (combined) branch SNR, ``P(mg, x m / gamma_bar)``.
    """
    if x < 0 or gamma_bar <= 0:
        raise ValueError('x must be non-negative and gamma_bar positive')
    return reg_lower_gamma(cfg.mg, x * float(cfg.m) / gamma_bar)


def branch_cdf_finite_sum(cfg: SchemeConfig, x: float,
                          gamma_bar: float) -> float:
    """The same CDF by the finite sum that holds for integer mg."""
    y = x * float(cfg.m) / gamma_bar
    return 1 - math.exp(-y) * math.fsum(
        y ** k / math.factorial(k) for k in range(cfg.mg))


def _gaps(cfg: SchemeConfig, tasc: Tasc) -> tuple[int, ...]:
    """The exponents n_k - n_(k-1) - 1 for k = 1 .. n_S + 1."""
    ranks = (0,) + tasc.ranks + (cfg.n_t + 1,)
    return tuple(b - a - 1 for a, b in zip(ranks, ranks[1:]))


def _exponents(gaps: Sequence[int], p: Sequence[int]) -> tuple[int, ...]:
    """The powers d_k of F(y_k) once the binomials are expanded."""
    n_s = len(p)
    return tuple(gaps[k] - p[k] + (p[k + 1] if k + 1 < n_s else gaps[n_s])
                 for k in range(n_s))


def expansion_size(cfg: SchemeConfig, tasc: Tasc) -> int:
    """The number of (P, T, R) tuples :func:`enumerate_expansion` yields."""
    gaps = _gaps(cfg, tasc)
    total = 0
    for p in product(*(range(e + 1) for e in gaps[:-1])):
        size = 1
        for d in _exponents(gaps, p):
            size *= sum(t * (cfg.mg - 1) + 1 for t in range(d + 1))
        total += size
    return total


def enumerate_expansion(cfg: SchemeConfig,
                        tasc: Tasc) -> Iterator[ExpansionTerm]:
    """
    Enumerates the terms of the expanded joint density of the selected
    order statistics (in the normalized variable y):

        c_0 / Gamma(mg)^n_S  prod_k c_(p,k) c_(tr,k) y_k^(mg + r_k - 1)
                                    e^(-(1 + t_k) y_k)

    The joint density holds on y_1 >= y_2 >= ... >= y_(n_S) >= 0.
    """
    tasc.check(cfg)
    mg, n_s = cfg.mg, cfg.n_s
    gaps = _gaps(cfg, tasc)
    c0 = Fraction(math.factorial(cfg.n_t),
                  math.prod(math.factorial(e) for e in gaps))
    c0 /= math.factorial(mg - 1) ** n_s

    for p in product(*(range(e + 1) for e in gaps[:n_s])):
        c_p = math.prod((-1) ** (e - pk) * math.comb(e, pk)
                        for e, pk in zip(gaps, p))
        d = _exponents(gaps, p)
        per_k = []
        for dk in d:
            choices = []
            for t in range(dk + 1):
                table = multinomial_coeffs(t, mg)
                c_t = (-1) ** t * math.comb(dk, t)
                for r, beta in enumerate(table.coeffs):
                    if beta:
                        choices.append((t, r, c_t * beta))
            per_k.append(choices)
        for combo in product(*per_k):
            t = tuple(c[0] for c in combo)
            r = tuple(c[1] for c in combo)
            coeff = c0 * c_p * math.prod(c[2] for c in combo)
            yield ExpansionTerm(p, t, r, tuple(mg + rk for rk in r), coeff)


def laplace_form(cfg: SchemeConfig, tasc: Tasc,
                 term: ExpansionTerm) -> list[LaplaceProduct]:
    """
    The Laplace transform (in s, conjugate to y) of one expansion term
    integrated over the ordered region. Integrating y_1, y_2, ... in turn
    over ``[y_(k+1), inf)`` gives, with ``M_1 = mu_1``,
    ``M_k = mu_k + l_(k-1)`` and ``B_k = k s + sum_(j<=k) (1 + t_j)``:

        prod_(k<n_S) Gamma(M_k) / l_k! B_k^-(M_k - l_k)
            * Gamma(M_(n_S)) B_(n_S)^-M_(n_S)

    summed over 0 <= l_k < M_k. Since B_k = k (s + a_k) with
    ``a_k = sum_(j<=k) (1 + t_j) / k``, every L tuple is a product of powers
    of ``1 / (s + a_k)``.
    """
    n_s = len(term.mu)
    poles_at = [Fraction(sum(1 + tj for tj in term.t[:k + 1]), k + 1)
                for k in range(n_s)]
    results = []

    def descend(k: int, carry: int, weight: Fraction, poles: tuple, ls: tuple):
        big_m = term.mu[k] + carry
        if k == n_s - 1:
            u = big_m
            results.append(LaplaceProduct(
                weight * math.factorial(big_m - 1) / Fraction(k + 1) ** u,
                poles + (RatePole(poles_at[k], u),), ls))
            return
        for lk in range(big_m):
            u = big_m - lk
            descend(k + 1, lk,
                    weight * Fraction(math.factorial(big_m - 1),
                                      math.factorial(lk)) / Fraction(k + 1) ** u,
                    poles + (RatePole(poles_at[k], u),), ls + (lk,))

    descend(0, 0, term.coeff, (), ())
    return results


def laplace_transform(cfg: SchemeConfig, tasc: Tasc, s: float) -> float:
    """
    H(s), the Laplace transform of the branch density in the normalized
    variable, summed from :func:`laplace_form` over the whole expansion.
    """
    return math.fsum(lp.transform(s)
                     for term in enumerate_expansion(cfg, tasc)
                     for lp in laplace_form(cfg, tasc, term))


def merge_poles(poles: Sequence[RatePole]) -> tuple[RatePole, ...]:
    """Merges the poles at equal locations by adding their orders."""
    merged = defaultdict(int)
    for pole in poles:
        merged[pole.q] += pole.u
    return tuple(RatePole(q, u) for q, u in sorted(merged.items()))


@lru_cache(maxsize=100_000)
def partial_fraction_residues(
        poles: tuple[RatePole, ...]) -> dict[tuple[Fraction, int], Fraction]:
    """
    The exact partial fraction decomposition

        prod_d (s + q_d)^-u_d = sum_d sum_(j=1..u_d) R_dj (s + q_d)^-j,

    returned as ``{(q_d, j): R_dj}``. For a pole d, ``R_dj`` is the Taylor
    coefficient of order ``u_d - j`` at ``s = -q_d`` of the co-factor
    ``G(s) = prod_(e != d) (s + q_e)^-u_e``; these follow from
    ``G' = G h`` with ``h = -sum_e u_e / (s + q_e)``.
    """
    locations = [p.q for p in poles]
    if len(set(locations)) != len(locations):
        raise ResidueError(f'Duplicate pole locations in {poles}; '
                           'merge_poles() must be called first.')
    residues = {}
    for d, pole in enumerate(poles):
        others = [p for e, p in enumerate(poles) if e != d]
        s0 = -pole.q
        g = [Fraction(1)]
        for other in others:
            g[0] /= (s0 + other.q) ** other.u
        h = [sum((-other.u * Fraction((-1) ** k) / (s0 + other.q) ** (k + 1)
                  for other in others), Fraction(0))
             for k in range(pole.u)]
        for j in range(pole.u - 1):
            g.append(sum((g[i] * h[j - i] for i in range(j + 1)),
                         Fraction(0)) / (j + 1))
        for j in range(1, pole.u + 1):
            residues[pole.q, j] = g[pole.u - j]
    return residues


def joint_order_density(cfg: SchemeConfig, tasc: Tasc,
                        ys: Sequence[float]) -> float:
    """
    The joint density of the selected order statistics at ``y_1 >= ... >=
    y_(n_S)``, straight from the order statistics definition.
    """
    if any(b > a for a, b in zip(ys, ys[1:])):
        return 0.0
    mg = cfg.mg
    gaps = _gaps(cfg, tasc)

    def pdf(y):
        return math.exp((mg - 1) * math.log(y) - y - math.lgamma(mg)) \
            if y > 0 else float(mg == 1)

    def cdf(y):
        return reg_lower_gamma(mg, y)

    value = float(math.factorial(cfg.n_t))
    bounds = [1.0] + [cdf(y) for y in ys] + [0.0]
    for y in ys:
        value *= pdf(y)
    for k, e in enumerate(gaps):
        value *= (bounds[k] - bounds[k + 1]) ** e / math.factorial(e)
    return value


@dataclass(frozen=True)
class SnrModel:
    """
    The distribution of the output SNR for one (configuration, TASC). All
    mixtures are in the normalized variable ``y = x m / gamma_bar``.
    """
    cfg: SchemeConfig
    tasc: Tasc
    branch_pdf: GammaMixture
    branch_cdf: GammaMixture
    output_cdf: GammaMixture
    output_pdf: GammaMixture

    def normalize(self, x: float, gamma_bar: float) -> float:
        return x * float(self.cfg.m) / gamma_bar

    def cdf(self, x: float, gamma_bar: float) -> float:
        if x <= 0:
            return 0.0
        return min(1.0, max(0.0, self.output_cdf(self.normalize(x, gamma_bar))))

    def pdf(self, x: float, gamma_bar: float) -> float:
        scale = float(self.cfg.m) / gamma_bar
        return max(0.0, scale * self.output_pdf(self.normalize(x, gamma_bar)))

    def branch_cdf_incomplete_gamma(self, y: float) -> float:
        """
        The branch CDF as a sum of regularized incomplete gamma functions,
        ``sum_j w_j p_j! / r_j^(p_j + 1) P(p_j + 1, r_j y)``.
        """
        return math.fsum(
            float(t.weight * math.factorial(t.power) /
                  t.rate ** (t.power + 1)) *
            reg_lower_gamma(t.power + 1, float(t.rate) * y)
            for t in self.branch_pdf.terms
        )


def branch_distribution(cfg: SchemeConfig,
                        tasc: Tasc) -> tuple[GammaMixture, GammaMixture]:
    """
    Builds the exact density and CDF of one diversity branch (the sum of
    the selected order statistics) in the normalized variable.
    """
    tasc.check(cfg)
    size = expansion_size(cfg, tasc)
    if size > MAX_TERMS:
        logging.warning(f'Refusing to expand {cfg}, TASC {tasc}: {size} terms')
        raise ExpansionTooLargeError(
            f'The expansion for n_T={cfg.n_t}, n_S={cfg.n_s}, mg={cfg.mg} '
            f'(TASC {tasc}) has {size} terms, more than {MAX_TERMS}.')
    logging.debug(f'Expanding {cfg}, TASC {tasc}: {size} terms...')

    # Terms with the same exponents share their Laplace form
    grouped = defaultdict(Fraction)
    for term in enumerate_expansion(cfg, tasc):
        grouped[term.t, term.mu] += term.coeff

    density = defaultdict(Fraction)
    for (t, mu), coeff in grouped.items():
        if coeff == 0:
            continue
        term = ExpansionTerm((), t, (), mu, coeff)
        for lp in laplace_form(cfg, tasc, term):
            residues = partial_fraction_residues(merge_poles(lp.poles))
            for (q, j), residue in residues.items():
                if residue:
                    density[j - 1, q] += lp.weight * residue / math.factorial(j - 1)
    pdf = GammaMixture.from_terms(
        ((w, p, r) for (p, r), w in density.items()), Kind.DENSITY)
    logging.debug(f'Branch density of {cfg}, TASC {tasc}: {len(pdf)} terms.')
    return pdf, pdf.cdf()


def build_model(cfg: SchemeConfig, tasc: Tasc) -> SnrModel:
    pdf, cdf = branch_distribution(cfg, tasc)
    output_cdf = cdf.power(cfg.N) if cfg.N > 1 else cdf
    output_pdf = output_cdf.derivative() if cfg.N > 1 else pdf
    return SnrModel(cfg, tasc, pdf, cdf, output_cdf, output_pdf)


class ModelCache:
    """
    A thread-safe cache of :class:`SnrModel` objects. Lookups are lock-free;
    models are built under a lock, so each one is built only once.
    """
    def __init__(self):
        self._models = {}
        self._lock = threading.Lock()

    def get(self, cfg: SchemeConfig, tasc: Tasc) -> SnrModel:
        key = (cfg, tasc)
        model = self._models.get(key)
        if model is None:
            with self._lock:
                model = self._models.get(key)
                if model is None:
                    model = build_model(cfg, tasc)
                    self._models[key] = model
        return model

    def __len__(self):
        return len(self._models)

    def clear(self):
        with self._lock:
            self._models.clear()


models = ModelCache()


def get_model(cfg: SchemeConfig, tasc: Tasc) -> SnrModel:
    """Returns the (cached) model of the output SNR."""
    return models.get(cfg, tasc)


def output_cdf(cfg: SchemeConfig, tasc: Tasc, x: float,
               gamma_bar: float) -> float:
    """The CDF of the output SNR, ``[F^(v)(x)]^N``."""
    return get_model(cfg, tasc).cdf(x, gamma_bar)


def output_pdf(cfg: SchemeConfig, tasc: Tasc, x: float,
               gamma_bar: float) -> float:
    """The PDF of the output SNR, ``N f^(v)(x) [F^(v)(x)]^(N-1)``."""
    return get_model(cfg, tasc).pdf(x, gamma_bar)
