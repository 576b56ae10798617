#!/usr/bin/env python3
# -*- coding: utf-8 -*-

import pytest

from tras_stbc.report import (
    MissingColumnsError, compare_report, curve_gaps, expected_ado,
    group_curves, high_snr_slope, slope_between_levels, snr_at_level
)
from tras_stbc.sweep import SweepRow


def curve(p_e, shift=0.0, slope=2, mc=True, n_t=3, n_r=2):
    """A synthetic curve 10^(-slope * SNR / 10), shifted by *shift* dB."""
    rows = []
    for snr_db in range(0, 42, 2):
        value = 10 ** (-slope * (snr_db - shift) / 10)
        rows.append(SweepRow('tas', n_t, 2, n_r, '1', 'g2', 'qpsk', p_e,
                             float(snr_db), value,
                             value if mc else None, value / 100 if mc else None))
    return rows


def test_snr_at_level():
    points = [(0.0, 1e-1), (10.0, 1e-3)]
    assert snr_at_level(points, 1e-2) == pytest.approx(5.0)
    assert snr_at_level(points, 1e-5) is None


def test_slopes():
    points = [(r.snr_db, r.analytic) for r in curve(0.0, slope=3)]
    assert slope_between_levels(points, 1e-3, 1e-6) == pytest.approx(3)
    assert high_snr_slope(points) == pytest.approx(3)
    assert high_snr_slope(points[:1]) is None


def test_expected_ado():
    row = SweepRow('joint', 4, 3, 2, '2', 'g3', 'cbfsk', 0.0, 0.0, 0.1)
    assert expected_ado(row) == 16
    assert expected_ado(SweepRow('joint', 4, 3, 2, '2', 'g3', 'cbfsk', 0.01,
                                 0.0, 0.1)) == 12


def test_group_curves():
    rows = curve(0.0) + curve(0.2)
    curves = group_curves(reversed(rows))
    assert len(curves) == 2
    for points in curves.values():
        assert [r.snr_db for r in points] == sorted(r.snr_db for r in points)


def test_gaps():
    rows = curve(0.0) + curve(0.01, shift=1.5) + curve(0.2, shift=4.0)
    gaps = curve_gaps(rows, 1e-5)
    assert [g.p_e for g in gaps] == [0.01, 0.2]
    assert [g.gap_db for g in gaps] == pytest.approx([1.5, 4.0])


def test_gaps_invariant_to_shift():
    rows = curve(0.0) + curve(0.01, shift=1.5)
    shifted = curve(0.0, shift=3.0) + curve(0.01, shift=4.5)
    assert curve_gaps(rows, 1e-5)[0].gap_db == pytest.approx(
        curve_gaps(shifted, 1e-5)[0].gap_db)


def test_perfect_agreement():
    report = compare_report(curve(0.0) + curve(0.01, shift=0.14))
    assert 'max rel. dev. 0.0000%' in report
    assert '0 outside 3 std. err.' in report
    assert 'slope 2.00 (ADO 6)' in report
    assert 'p_e=0.01: 0.14 dB' in report


def test_report_flags_deviations():
    rows = curve(0.0)
    rows[3] = SweepRow(*rows[3].curve, rows[3].snr_db, rows[3].analytic,
                       rows[3].analytic * 1.5, rows[3].analytic / 100)
    report = compare_report(rows)
    assert '1 outside 3 std. err.' in report
    assert 'max rel. dev. 33.3333%' in report


def test_missing_mc_columns():
    with pytest.raises(MissingColumnsError):
        compare_report(curve(0.0, mc=False))
    assert 'n/a' in compare_report(curve(0.0, mc=False), require_mc=False)
