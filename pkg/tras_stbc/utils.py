#!/usr/bin/env python3
# -*- coding: utf-8 -*-

"""Utility functions."""

from argparse import ArgumentTypeError
import bz2
from functools import partial
import gzip
import math
from pathlib import Path
import sys
from typing import Union

from tqdm import tqdm


def openall(
    filename: Union[Path, str], mode='rt', encoding=None, errors=None,
    newline=None, buffering=-1, closefd=True, opener=None,  # for open()
    compresslevel=5,  # faster default compression
):
    """
    Opens plain, gzip and bz2 files alike, based on the file extension. There
    are some differences from the stock functions:
    - the default mode is 'rt'
    - the default compresslevel is 5, because e.g. gzip does not benefit a lot
      from higher values, only becomes slower.
    """
    filename = str(filename)
    if filename.endswith('.gz'):
        return gzip.open(filename, mode, compresslevel,
                         encoding, errors, newline)
    elif filename.endswith('.bz2'):
        return bz2.open(filename, mode, compresslevel,
                        encoding, errors, newline)
    else:
        return open(filename, mode, buffering, encoding, errors, newline,
                    closefd, opener)


def parse_grid(value: str) -> list[float]:
    """
    Parses a ``start:step:stop`` grid (both ends inclusive) or a single
    number. Values are rounded to 10 decimals so that e.g. ``0:0.1:1`` does
    not accumulate floating point drift.
    """
    parts = value.split(':')
    try:
        numbers = [float(part) for part in parts]
    except ValueError:
        raise ValueError(f'Invalid grid {value!r}: must be start:step:stop '
                         'or a single number.')
    if len(numbers) == 1:
        return numbers
    if len(numbers) != 3:
        raise ValueError(f'Invalid grid {value!r}: must be start:step:stop.')
    start, step, stop = numbers
    if step <= 0 or stop < start:
        raise ValueError(f'Invalid grid {value!r}: step must be positive '
                         'and stop >= start.')
    count = int(math.floor((stop - start) / step + 1e-9)) + 1
    return [round(start + i * step, 10) for i in range(count)]


def grid_type(value: str) -> str:
    """Implements an argument type for argparse that is a dB grid."""
    try:
        parse_grid(value)
    except ValueError as ve:
        raise ArgumentTypeError(str(ve))
    return value


def int_list(value: Union[str, int, list]) -> list[int]:
    """Converts a comma-separated string (or a scalar) to a list of ints."""
    if isinstance(value, (list, tuple)):
        return [int(v) for v in value]
    return [int(v) for v in str(value).split(',') if v.strip()]


def float_list(value: Union[str, float, list]) -> list[float]:
    """Converts a comma-separated string (or a scalar) to a list of floats."""
    if isinstance(value, (list, tuple)):
        return [float(v) for v in value]
    return [float(v) for v in str(value).split(',') if v.strip()]


def db_to_linear(db: float) -> float:
    return 10 ** (db / 10)


# tqdm to print the progress bar to stdout. This helps keeping the log clean.
otqdm = partial(tqdm, file=sys.stdout)
