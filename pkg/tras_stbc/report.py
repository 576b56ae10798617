#!/usr/bin/env python3
# -*- coding: utf-8 -*-

"""
Comparison reports of sweep results: analytic vs. simulated values, high-SNR
slopes vs. the asymptotic diversity order (ADO), and the SNR gaps between
the curves with and without feedback errors.
"""

from collections import defaultdict
from dataclasses import dataclass
from fractions import Fraction
from io import StringIO
import math
from typing import Iterable, Optional, Sequence

from tras_stbc.sweep import MissingColumnsError, SweepRow

__all__ = ['MissingColumnsError', 'compare_report']

Points = Sequence[tuple[float, float]]


@dataclass(frozen=True)
class CurveStats:
    curve: tuple
    points: int
    max_deviation: Optional[float]
    outside: int
    slope: Optional[float]
    ado: int


@dataclass(frozen=True)
class Gap:
    variant: tuple
    p_e: float
    level: float
    gap_db: Optional[float]


def group_curves(rows: Iterable[SweepRow]) -> dict[tuple, list[SweepRow]]:
    """Groups the rows by curve, each sorted by SNR."""
    curves = defaultdict(list)
    for row in rows:
        curves[row.curve].append(row)
    return {curve: sorted(points, key=lambda r: r.snr_db)
            for curve, points in curves.items()}


def expected_ado(row: SweepRow) -> int:
    """
    m n_R n_T with perfect feedback; m n_R n_S once wrong TASCs can be
    activated.
    """
    antennas = row.n_t if row.p_e == 0 else row.n_s
    return int(Fraction(row.m) * row.n_r * antennas)


def snr_at_level(points: Points, level: float) -> Optional[float]:
    """
    The SNR at which a decreasing curve crosses *level*, interpolated
    linearly in log(metric). ``None`` if the curve never crosses it.
    """
    for (snr1, v1), (snr2, v2) in zip(points, points[1:]):
        if v1 >= level >= v2 and v1 > 0 and v2 > 0:
            if v1 == v2:
                return snr1
            ratio = (math.log(v1) - math.log(level)) / (
                math.log(v1) - math.log(v2))
            return snr1 + ratio * (snr2 - snr1)
    return None


def slope_between_levels(points: Points, upper: float,
                         lower: float) -> Optional[float]:
    """
    The magnitude of the log-log slope (metric vs. linear SNR) between the
    points where the curve crosses *upper* and *lower*.
    """
    snr1, snr2 = snr_at_level(points, upper), snr_at_level(points, lower)
    if snr1 is None or snr2 is None or snr2 == snr1:
        return None
    return math.log10(upper / lower) / ((snr2 - snr1) / 10)


def high_snr_slope(points: Points) -> Optional[float]:
    """The log-log slope magnitude between the last two positive points."""
    positive = [(s, v) for s, v in points if v > 0]
    if len(positive) < 2:
        return None
    (snr1, v1), (snr2, v2) = positive[-2:]
    return math.log10(v1 / v2) / ((snr2 - snr1) / 10)


def curve_stats(curve: tuple, rows: list[SweepRow]) -> CurveStats:
    deviations, outside = [], 0
    for row in rows:
        if row.mc_mean is None:
            continue
        if row.mc_mean > 0:
            deviations.append(abs(row.analytic - row.mc_mean) / row.mc_mean)
        if abs(row.analytic - row.mc_mean) > 3 * (row.mc_stderr or 0):
            outside += 1
    slope = high_snr_slope([(r.snr_db, r.analytic) for r in rows])
    return CurveStats(curve, len(rows), max(deviations, default=None),
                      outside, slope, expected_ado(rows[0]))


def curve_gaps(rows: Iterable[SweepRow], level: float) -> list[Gap]:
    """
    The SNR gaps at *level* between every curve with p_e > 0 and the curve
    of the same variant with p_e = 0.
    """
    variants = defaultdict(dict)
    for curve, points in group_curves(rows).items():
        variant, p_e = curve[:7], curve[7]
        variants[variant][p_e] = [(r.snr_db, r.analytic) for r in points]
    gaps = []
    for variant, curves in variants.items():
        if 0.0 not in curves:
            continue
        ideal = snr_at_level(curves[0.0], level)
        for p_e, points in sorted(curves.items()):
            if p_e == 0.0:
                continue
            snr = snr_at_level(points, level)
            gap = snr - ideal if snr is not None and ideal is not None \
                else None
            gaps.append(Gap(variant, p_e, level, gap))
    return gaps


def _variant_name(variant: tuple) -> str:
    scheme, n_t, n_s, n_r, m, code, target = variant[:7]
    return (f'{scheme}/{code.upper()} n_T={n_t} n_S={n_s} n_R={n_r} m={m} '
            f'{target}')


def _fmt(value: Optional[float], spec: str) -> str:
    return 'n/a' if value is None else format(value, spec)


def compare_report(rows: Sequence[SweepRow],
                   levels: Sequence[float] = (1e-5,),
                   require_mc: bool = True) -> str:
    """
    Writes the comparison report: per curve the maximum relative deviation
    of the analytic values from the simulated ones, the number of points
    more than 3 standard errors away, the high-SNR slope and the ADO; then
    the SNR gaps at the metric *levels*.
    """
    rows = list(rows)
    if require_mc and not any(r.mc_mean is not None for r in rows):
        raise MissingColumnsError('The rows have no Monte Carlo values '
                                  '(mc_mean, mc_stderr).')
    out = StringIO()
    print('Curves', file=out)
    print('======', file=out)
    for curve, points in group_curves(rows).items():
        stats = curve_stats(curve, points)
        print(f'{_variant_name(curve)} p_e={curve[7]:g}: '
              f'{stats.points} points, '
              f'max rel. dev. {_fmt(stats.max_deviation, ".4%")}, '
              f'{stats.outside} outside 3 std. err., '
              f'slope {_fmt(stats.slope, ".2f")} (ADO {stats.ado})',
              file=out)
    for level in levels:
        gaps = curve_gaps(rows, level)
        if not gaps:
            continue
        print(file=out)
        print(f'SNR gaps at {level:g}', file=out)
        print('=' * len(f'SNR gaps at {level:g}'), file=out)
        for gap in gaps:
            print(f'{_variant_name(gap.variant)} p_e={gap.p_e:g}: '
                  f'{_fmt(gap.gap_db, ".2f")} dB', file=out)
    return out.getvalue()
