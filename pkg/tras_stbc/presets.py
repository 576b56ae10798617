#!/usr/bin/env python3
# -*- coding: utf-8 -*-

"""
The runs behind the published performance curves. Values the curves do not
state are preset defaults: the n_T values of the outage figure and the SNR
grid (0:2:30 dB).
"""

from typing import Any, Dict, Optional

from tras_stbc.config import ConfigurationError, build_config
from tras_stbc.schemas import RunConfig

DEFAULT_GRID = '0:2:30'
FE_LEVELS = [0.0, 0.01, 0.2, 0.5]

PRESETS: Dict[str, Dict[str, Any]] = {
    # Outage of joint TRAS/G3
    'fig2': dict(scheme='joint', code='g3', nt=[4, 5], ns=3, nr=[1, 2], m=2,
                 rate=2, pe=[0.05, 0.2]),
    # SER of TAS/G2, QPSK, Rayleigh
    'fig3': dict(scheme='tas', code='g2', nt=[3, 4], ns=2, nr=[3], m=1,
                 mod='qpsk', pe=FE_LEVELS),
    # SER of TAS/G3, 16-QAM, one-sided Gaussian
    'fig4': dict(scheme='tas', code='g3', nt=[4, 5], ns=3, nr=[2], m='1/2',
                 mod='mqam:16', pe=FE_LEVELS),
    # SER of joint TRAS/G2, QPSK, Rayleigh
    'fig5': dict(scheme='joint', code='g2', nt=[3, 4], ns=2, nr=[3], m=1,
                 mod='qpsk', pe=FE_LEVELS),
    # BER of joint TRAS/G3, CBFSK, per bit
    'fig6': dict(scheme='joint', code='g3', nt=[4, 5], ns=3, nr=[2], m=2,
                 mod='cbfsk', pe=FE_LEVELS, snr_axis='eb'),
    # BER of joint TRAS/G2, BPSK, per bit, for several n_R
    'fig7': dict(scheme='joint', code='g2', nt=[3], ns=2, nr=[1, 2, 3], m=1,
                 mod='bpsk', pe=[0.01, 0.1], snr_axis='eb'),
}


def figure_preset(name: str,
                  overrides: Optional[Dict[str, Any]] = None) -> RunConfig:
    """Returns the run of the figure *name* (``fig2`` .. ``fig7``)."""
    try:
        values = dict(PRESETS[name.lower()])
    except KeyError:
        raise ConfigurationError([f'Unknown preset {name!r}; choose from '
                                  f'{", ".join(PRESETS)}'])
    values.setdefault('snr', DEFAULT_GRID)
    values.update({k: v for k, v in (overrides or {}).items()
                   if v is not None})
    return build_config(values)
