"""
Monte Carlo Simulator Tests

Responsibilities:
- Realization invariants and SINR on fixed geometry
- Capacity estimates, trace output and failure reporting
- LOS-serving probability
"""

import math
import sys
from dataclasses import replace
from pathlib import Path

import numpy as np
import pandas as pd
import pytest

sys.path.insert(0, str(Path(__file__).resolve().parent.parent))

import utils.montecarlo as montecarlo
from utils.geometry import Deployment
from utils.montecarlo import (
    SimMode,
    UnderPopulatedError,
    draw_realization,
    estimate_capacity,
    estimate_serving_los_probability,
    sample_conditional_capacity,
    simulate_sinr,
)
from utils.params import INFINITE, Nakagami, NoFading, Rayleigh, reference_defaults
from utils.streams import stream


PARAMS = reference_defaults()

SINGLE = replace(PARAMS, k_serving=1)

REFERENCE_SNR = PARAMS.main_gain * PARAMS.c_los * 10.0 ** -PARAMS.alpha_los / PARAMS.noise_power


@pytest.fixture
def lone_ap(monkeypatch):
    """Every deployment is a single AP at 10 m."""

    def fake_ppp(lam, radius, rng):
        return Deployment(r=np.array([10.0]), theta=np.zeros(1))

    monkeypatch.setattr(montecarlo, "sample_ppp", fake_ppp)


# --------------------------------------------------
# Realizations
# --------------------------------------------------

def test_realization_invariants():
    realization = draw_realization(PARAMS, Nakagami(3.0, 2.0), SimMode.ASSUMPTION, stream(1))

    k = realization.k

    assert k == 2
    assert np.all(np.diff(realization.deployment.r) >= 0)
    assert np.all(realization.gains[:k] == PARAMS.main_gain)
    assert np.all(realization.link_los[:k])
    assert np.all(realization.fading >= 0)
    assert realization.serving_distances.k == 2
    assert len(realization.aps) == len(realization.deployment)
    assert list(realization.serving) == [0, 1]


def test_faithful_mode_keeps_drawn_marks():
    realization = draw_realization(PARAMS, NoFading(), SimMode.FAITHFUL, stream(2))

    assert np.array_equal(realization.link_los, realization.deployment.is_los)


def test_single_ap_sinr(lone_ap):
    gamma = simulate_sinr(SINGLE, NoFading(), SimMode.ASSUMPTION, stream(3))

    assert REFERENCE_SNR == pytest.approx(792.4, rel=1e-3)
    assert gamma == pytest.approx(REFERENCE_SNR, rel=1e-12)


def test_overwhelming_noise_drives_sinr_to_zero():
    params = replace(SINGLE, noise_power=1e6)

    assert simulate_sinr(params, Rayleigh(1.0), SimMode.ASSUMPTION, stream(4)) < 1e-9


def test_simulator_needs_finite_region():
    with pytest.raises(ValueError):
        draw_realization(PARAMS.with_region(INFINITE), NoFading(), SimMode.ASSUMPTION, stream(5))


# --------------------------------------------------
# Capacity Estimates
# --------------------------------------------------

def test_fixed_geometry_has_zero_variance(lone_ap):
    estimate = estimate_capacity(SINGLE, NoFading(), n_trials=200, seed=6)

    assert estimate.bits_per_hz == pytest.approx(math.log2(1 + REFERENCE_SNR), rel=1e-12)
    assert estimate.half_width == 0.0
    assert estimate.n == 200
    assert estimate.method == "montecarlo"


def test_too_few_trials_are_rejected():
    with pytest.raises(ValueError):
        estimate_capacity(PARAMS, NoFading(), n_trials=99)


def test_under_populated_error_names_expected_count():
    params = replace(PARAMS, lam=1e-7)

    with pytest.raises(UnderPopulatedError) as error:
        estimate_capacity(params, NoFading(), n_trials=100)

    assert "lambda*pi*R^2" in str(error.value)
    assert error.value.partial is not None
    assert error.value.partial.n == 0


def test_estimate_is_reproducible_and_worker_independent():
    serial = estimate_capacity(PARAMS, Rayleigh(1.0), n_trials=200, seed=7)
    again = estimate_capacity(PARAMS, Rayleigh(1.0), n_trials=200, seed=7)
    pooled = estimate_capacity(PARAMS, Rayleigh(1.0), n_trials=200, seed=7, workers=2)

    assert serial == again
    assert serial.bits_per_hz == pooled.bits_per_hz
    assert serial.half_width > 0


def test_assumption_mode_dominates_faithful_mode():
    assumed = estimate_capacity(PARAMS, NoFading(), SimMode.ASSUMPTION, n_trials=500, seed=8)
    faithful = estimate_capacity(PARAMS, NoFading(), SimMode.FAITHFUL, n_trials=500, seed=8)

    assert assumed.bits_per_hz >= faithful.bits_per_hz


def test_trace_csv(tmp_path):
    path = tmp_path / "trace.csv"

    estimate_capacity(PARAMS, Nakagami(3.0, 2.0), n_trials=100, seed=9, trace_path=path)

    frame = pd.read_csv(path)

    assert list(frame.columns) == ["trial", "K", "r_1", "r_2", "sinr_db", "capacity"]
    assert len(frame) == 100
    assert (frame["r_1"] <= frame["r_2"]).all()


def test_conditional_sampler_without_interferers():
    params = SINGLE.with_region(10.0)

    estimate = sample_conditional_capacity((10.0,), params, NoFading(), 1000, stream(10))

    assert estimate.bits_per_hz == pytest.approx(math.log2(1 + REFERENCE_SNR), rel=1e-12)
    assert estimate.half_width == 0.0


# --------------------------------------------------
# LOS-Serving Probability
# --------------------------------------------------

def test_no_blockage_means_always_los():
    params = replace(PARAMS, beta=0.0)

    estimate = estimate_serving_los_probability(params, 3, 500, seed=11)

    assert estimate.probability == 1.0
    assert estimate.successes == 500
    assert estimate.ci_high == pytest.approx(1.0)
    assert estimate.ci_low < 1.0


def test_probability_nonincreasing_in_k():
    values = [
        estimate_serving_los_probability(PARAMS, k, 2000, seed=12).probability
        for k in (1, 2, 3, 4)
    ]

    assert all(b <= a for a, b in zip(values, values[1:]))


def test_dense_network_serving_link_is_los():
    params = replace(PARAMS, lam=0.01)

    estimate = estimate_serving_los_probability(params, 1, 10_000, seed=13)

    assert estimate.probability > 0.95
    assert estimate.ci_low <= estimate.probability <= estimate.ci_high


def test_los_probability_rejects_bad_k():
    with pytest.raises(ValueError):
        estimate_serving_los_probability(PARAMS, 0, 100)
