"""
Quadrature Tests

Responsibilities:
- Adaptive Gauss-Kronrod engine on finite and semi-infinite ranges
- Ordered-distance density and expectations over it
"""

import math
import sys
from pathlib import Path

import numpy as np
import pytest

sys.path.insert(0, str(Path(__file__).resolve().parent.parent))

from utils.geometry import OrderedDistances
from utils.quadrature import (
    NODES,
    WEIGHTS_GAUSS,
    WEIGHTS_KRONROD,
    NonFiniteSampleError,
    QuadSpec,
    expect_over_ordered_domain,
    integrate_finite,
    integrate_nested_ordered,
    integrate_semi_infinite,
    ordered_distance_density,
)
from utils.streams import stream


TIGHT = QuadSpec(rel_tol=1e-10, abs_tol=1e-14)


# --------------------------------------------------
# Rule
# --------------------------------------------------

def test_rule_weights_sum_to_two():
    assert WEIGHTS_KRONROD.sum() == pytest.approx(2.0, abs=1e-14)
    assert WEIGHTS_GAUSS.sum() == pytest.approx(2.0, abs=1e-14)
    assert np.all(np.diff(NODES) > 0)


# --------------------------------------------------
# Finite Intervals
# --------------------------------------------------

def test_polynomial_is_exact():
    result = integrate_finite(lambda x: x ** 5 - 2 * x, 0.0, 2.0)

    assert result.converged
    assert result.value == pytest.approx(64 / 6 - 4, abs=1e-12)


def test_reversed_and_empty_intervals():
    forward = integrate_finite(np.exp, 0.0, 1.0)
    backward = integrate_finite(np.exp, 1.0, 0.0)

    assert backward.value == pytest.approx(-forward.value)
    assert integrate_finite(np.exp, 3.0, 3.0).value == 0.0


def test_batch_integrand():
    result = integrate_finite(
        lambda x: np.column_stack([x, x ** 2, np.cos(x)]),
        0.0,
        1.0
    )

    assert result.value == pytest.approx([0.5, 1 / 3, math.sin(1.0)])
    assert result.converged


def test_unconverged_result_is_flagged_not_raised():
    spec = QuadSpec(rel_tol=1e-14, abs_tol=1e-16, max_depth=2)

    result = integrate_finite(lambda x: 1 / np.sqrt(x), 0.0, 1.0, spec)

    assert not result.converged
    assert result.status == "tolerance not met"
    assert result.value == pytest.approx(2.0, rel=0.1)
    assert result.error > 0


def test_endpoint_singularity_converges_with_depth():
    result = integrate_finite(lambda x: 1 / np.sqrt(x), 0.0, 1.0, QuadSpec(rel_tol=1e-5))

    assert result.converged
    assert result.value == pytest.approx(2.0, rel=1e-4)


def test_quad_spec_validation():
    with pytest.raises(ValueError):
        QuadSpec(rel_tol=0.0)

    with pytest.raises(ValueError):
        QuadSpec(tail_transform="logistic")


# --------------------------------------------------
# Semi-Infinite Intervals
# --------------------------------------------------

@pytest.mark.parametrize("transform", ["rational", "exponential"])
def test_exponential_tail(transform):
    spec = QuadSpec(rel_tol=1e-10, abs_tol=1e-14, tail_transform=transform)

    result = integrate_semi_infinite(lambda x: np.exp(-x), 0.0, spec)

    assert result.converged
    assert result.value == pytest.approx(1.0, abs=1e-10)


def test_power_law_tail():
    result = integrate_semi_infinite(lambda x: x ** -2.0, 10.0, TIGHT, scale=10.0)

    assert result.value == pytest.approx(0.1, rel=1e-9)


def test_log_one_plus_x_identity():
    # ln(1 + x) = int_0^inf (1 - e^{-xz}) e^{-z} / z dz
    for x in (1e-3, 0.5, 1.0, 10.0, 1e3):
        result = integrate_semi_infinite(
            lambda z, x=x: -np.expm1(-x * z) * np.exp(-z) / z,
            0.0,
            TIGHT
        )
        assert result.value == pytest.approx(math.log1p(x), rel=1e-8)


def test_scale_must_be_positive():
    with pytest.raises(ValueError):
        integrate_semi_infinite(np.exp, 0.0, scale=0.0)


# --------------------------------------------------
# Ordered-Distance Domain
# --------------------------------------------------

def test_density_value():
    lam = 0.0025
    r = OrderedDistances((5.0, 10.0))

    expected = (2 * math.pi * lam) ** 2 * 50.0 * math.exp(-math.pi * lam * 100.0)

    assert ordered_distance_density(r, lam) == pytest.approx(expected)


@pytest.mark.parametrize("lam", [1e-4, 2.5e-3, 1e-2])
@pytest.mark.parametrize("k", [1, 2])
def test_density_is_normalised(lam, k):
    result = integrate_nested_ordered(lambda r: 1.0, lam, k, QuadSpec(rel_tol=1e-8))

    assert result.converged
    assert result.value == pytest.approx(1.0, abs=1e-6)


def test_nested_expectation_of_void_probability():
    lam = 0.0025

    result = integrate_nested_ordered(
        lambda r: math.exp(-math.pi * lam * r.values[0] ** 2),
        lam,
        1,
        QuadSpec(rel_tol=1e-8)
    )

    assert result.value == pytest.approx(0.5, abs=1e-6)


@pytest.mark.parametrize("k", [1, 2])
def test_nested_flags_unconverged_samples(k):
    result = integrate_nested_ordered(
        lambda r: (1.0, r.values[-1] < 20.0), 0.0025, k, QuadSpec(rel_tol=1e-8)
    )

    assert result.value == pytest.approx(1.0, abs=1e-6)
    assert not result.converged


def test_nested_rejects_three_distances():
    with pytest.raises(ValueError):
        integrate_nested_ordered(lambda r: 1.0, 0.0025, 3)


def test_sampled_constant_has_zero_error():
    mean = expect_over_ordered_domain(lambda r: 1.0, 0.0025, 2, 100, stream(1))

    assert mean.value == 1.0
    assert mean.standard_error == 0.0
    assert mean.n == 100


def test_sampled_second_moment():
    lam = 0.0025

    mean = expect_over_ordered_domain(
        lambda r: r.values[0] ** 2, lam, 1, 20_000, stream(2)
    )

    assert abs(mean.value - 1 / (math.pi * lam)) < 4 * mean.standard_error


def test_sampled_error_shrinks_with_samples():
    g = lambda r: r.values[-1]

    small = expect_over_ordered_domain(g, 0.0025, 2, 2000, stream(3))
    large = expect_over_ordered_domain(g, 0.0025, 2, 8000, stream(4))

    assert large.standard_error / small.standard_error == pytest.approx(0.5, rel=0.15)


def test_sampled_non_finite_is_reported():
    with pytest.raises(NonFiniteSampleError) as error:
        expect_over_ordered_domain(lambda r: math.inf, 0.0025, 1, 10, stream(5))

    assert "distances" in str(error.value)


def test_sampled_carries_sample_convergence():
    passed = expect_over_ordered_domain(lambda r: (2.0, True), 0.0025, 1, 10, stream(7))
    failed = expect_over_ordered_domain(
        lambda r: (2.0, r.values[0] > 5.0), 0.0025, 1, 200, stream(7)
    )

    assert passed.converged
    assert passed.value == 2.0
    assert not failed.converged
    assert failed.value == 2.0


def test_plain_float_samples_count_as_converged():
    assert expect_over_ordered_domain(lambda r: 1.0, 0.0025, 1, 10, stream(8)).converged


def test_sampled_requires_two_draws():
    with pytest.raises(ValueError):
        expect_over_ordered_domain(lambda r: 1.0, 0.0025, 1, 1, stream(6))
