#!/usr/bin/env python3
# -*- coding: utf-8 -*-

"""Shared fixtures."""

import pytest

from tras_stbc.feedback import build_codebook
from tras_stbc.snr_model import SchemeConfig, Tasc


@pytest.fixture
def selection_of_two():
    """Rayleigh, the best of two antennas: F(y) = (1 - e^-y)^2."""
    return SchemeConfig('tas', 2, 1, 1, 1)


@pytest.fixture
def single_antenna():
    """Rayleigh, no diversity: F(y) = 1 - e^-y."""
    return SchemeConfig('tas', 1, 1, 1, 1)


@pytest.fixture
def joint_3_2():
    return SchemeConfig('joint', 3, 2, 2, 1)


@pytest.fixture
def c1():
    return Tasc((1,))


@pytest.fixture
def codebook_3_2():
    """K = 3 TASCs on 2 bits; the word 3 is improper."""
    return build_codebook(SchemeConfig('tas', 3, 2, 1, 1))
