"""
Channel Tests

Responsibilities:
- Path loss values and domain
- Interferer gain law
- Fading samplers against the fading kernel
"""

import math
import sys
from dataclasses import replace
from pathlib import Path

import numpy as np
import pytest

sys.path.insert(0, str(Path(__file__).resolve().parent.parent))

from utils.channel import (
    ChannelDomainError,
    LinkMark,
    fading_kernel,
    fading_mean,
    is_los_mark,
    path_loss,
    sample_fading_power,
    sample_interferer_gain,
    serving_gain,
)
from utils.params import Nakagami, NoFading, Rayleigh, reference_defaults
from utils.streams import stream


PARAMS = reference_defaults()

MODELS = [Nakagami(3.0, 2.0), Rayleigh(1.0), NoFading()]


# --------------------------------------------------
# Path Loss
# --------------------------------------------------

def test_path_loss_reference_values():
    assert path_loss(10.0, True, PARAMS) == pytest.approx(1e-9)
    assert path_loss(10.0, False, PARAMS) == pytest.approx(1e-11)
    assert path_loss(1.0, True, PARAMS) == pytest.approx(1e-7)
    assert path_loss(1.0, False, PARAMS) == pytest.approx(1e-7)


def test_path_loss_vectorised_by_mark():
    loss = path_loss(np.array([10.0, 10.0]), np.array([True, False]), PARAMS)

    assert loss == pytest.approx([1e-9, 1e-11])


def test_path_loss_strictly_decreasing():
    r = np.linspace(0.5, 300, 100)

    for los in (True, False):
        assert np.all(np.diff(path_loss(r, los, PARAMS)) < 0)


def test_path_loss_rejects_zero_distance():
    with pytest.raises(ChannelDomainError):
        path_loss(0.0, True, PARAMS)


# --------------------------------------------------
# Antenna Gains
# --------------------------------------------------

def test_serving_gain_is_main_lobe():
    assert serving_gain(PARAMS) == PARAMS.main_gain


def test_interferer_gain_frequency():
    gains = sample_interferer_gain(PARAMS, stream(1), size=1_000_000)

    p = PARAMS.main_lobe_probability
    observed = np.mean(gains == PARAMS.main_gain)

    assert p == pytest.approx(0.02778, rel=1e-3)
    assert abs(observed - p) < 4 * math.sqrt(p * (1 - p) / gains.size)
    assert set(np.unique(gains)) == {PARAMS.main_gain, PARAMS.side_gain}


def test_omnidirectional_beam_always_main_gain():
    params = replace(PARAMS, beamwidth=2 * math.pi)

    gains = sample_interferer_gain(params, stream(2), size=1000)

    assert np.all(gains == params.main_gain)


def test_scalar_gain_draw():
    assert isinstance(sample_interferer_gain(PARAMS, stream(3)), float)


# --------------------------------------------------
# Fading
# --------------------------------------------------

def test_no_fading_power_is_one():
    assert np.all(sample_fading_power(NoFading(), np.ones(10, dtype=bool), stream(4)) == 1.0)


def test_nakagami_moments():
    power = sample_fading_power(Nakagami(3.0, 2.0), np.ones(1_000_000, dtype=bool), stream(5))

    assert power.mean() == pytest.approx(1.0, abs=3e-3)
    assert power.var() == pytest.approx(1 / 3, rel=1e-2)


def test_nakagami_uses_nlos_shape_for_nlos_links():
    power = sample_fading_power(Nakagami(3.0, 2.0), np.zeros(1_000_000, dtype=bool), stream(6))

    assert power.var() == pytest.approx(1 / 2, rel=1e-2)


def test_rayleigh_mean_is_mu():
    power = sample_fading_power(Rayleigh(2.0), np.ones(500_000, dtype=bool), stream(7))

    assert fading_mean(Rayleigh(2.0)) == 2.0
    assert power.mean() == pytest.approx(2.0, rel=1e-2)


@pytest.mark.oracle
def test_rayleigh_laplace_transform():
    power = sample_fading_power(Rayleigh(1.0), np.ones(500_000, dtype=bool), stream(8))

    for s in (0.5, 1.0, 2.0):
        samples = np.exp(-s * power)
        se = samples.std() / math.sqrt(samples.size)
        assert abs(samples.mean() - 1 / (1 + s)) < 3 * se


# --------------------------------------------------
# Fading Kernel
# --------------------------------------------------

def test_kernel_known_values():
    assert fading_kernel(Nakagami(3.0, 3.0), True, 3.0) == pytest.approx(0.875)
    assert fading_kernel(Rayleigh(1.0), True, 1.0) == pytest.approx(0.5)
    assert fading_kernel(NoFading(), True, 1.0) == pytest.approx(1 - math.exp(-1))


def test_kernel_nakagami_one_equals_rayleigh_one():
    for x in (0.1, 1.0, 10.0):
        assert fading_kernel(Nakagami(1.0, 1.0), True, x) == fading_kernel(Rayleigh(1.0), True, x)


def test_kernel_hardening_limit():
    value = fading_kernel(Nakagami(2.0 ** 10, 2.0 ** 10), True, 1.0)

    assert abs(value - (1 - math.exp(-1))) < 1e-3


def test_kernel_zero_and_bounds():
    x = np.logspace(-6, 6, 200)

    for model in MODELS:
        assert fading_kernel(model, False, 0.0) == 0.0

        values = fading_kernel(model, False, x)
        assert np.all(np.diff(values) >= 0)
        assert np.all(values <= 1.0)


def test_kernel_small_argument_is_accurate():
    # 1 - (1 + x/N)^-N ~ x for tiny x
    assert fading_kernel(Nakagami(3.0, 3.0), True, 1e-14) == pytest.approx(1e-14, rel=1e-6)


def test_kernel_rejects_negative_argument():
    with pytest.raises(ChannelDomainError):
        fading_kernel(Rayleigh(1.0), True, -1.0)


@pytest.mark.oracle
def test_kernel_matches_sampled_fading():
    marks = np.ones(400_000, dtype=bool)

    for index, model in enumerate(MODELS):
        power = sample_fading_power(model, marks, stream(30, index))

        for x in (0.1, 1.0, 10.0):
            samples = 1 - np.exp(-x * power)
            se = samples.std() / math.sqrt(samples.size)
            assert abs(samples.mean() - fading_kernel(model, True, x)) <= 3 * se + 1e-12


# --------------------------------------------------
# Link Marks
# --------------------------------------------------

def test_link_mark_forms():
    assert is_los_mark(LinkMark.LOS)
    assert not is_los_mark("nlos")
    assert is_los_mark(True)

    with pytest.raises(ChannelDomainError):
        is_los_mark("partial")
