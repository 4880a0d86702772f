"""
Parameter Tests

Responsibilities:
- Unit conversions and the normalized noise power
- Validation diagnostics
- JSON configuration loading
"""

import json
import math
import sys
from dataclasses import replace
from pathlib import Path

import numpy as np
import pytest

sys.path.insert(0, str(Path(__file__).resolve().parent.parent))

from utils.params import (
    INFINITE,
    Nakagami,
    NoFading,
    ParameterError,
    Rayleigh,
    collect_violations,
    db_to_linear,
    fading_model_from_dict,
    fading_model_to_dict,
    linear_to_db,
    load_config,
    normalized_noise_power,
    reference_defaults,
    params_from_dict,
    parse_fading_model,
    validate,
)


CONFIG_DIR = Path(__file__).resolve().parent.parent / "config"


# --------------------------------------------------
# Conversions
# --------------------------------------------------

def test_db_to_linear_reference_gains():
    assert db_to_linear(18) == pytest.approx(63.0957, rel=1e-5)
    assert db_to_linear(0) == 1.0
    assert db_to_linear(-2) == pytest.approx(0.63096, rel=1e-4)


def test_db_round_trip_over_forty_decades():
    for x in np.logspace(-20, 20, 81):
        assert db_to_linear(linear_to_db(x)) == pytest.approx(x, rel=1e-12)


def test_linear_to_db_rejects_nonpositive():
    with pytest.raises(ParameterError):
        linear_to_db(0.0)


def test_normalized_noise_power_reference_link():
    assert normalized_noise_power(2e9, 30, 10) == pytest.approx(7.963e-11, rel=1e-3)
    assert normalized_noise_power(1.0, 0, 0) == pytest.approx(3.981e-18, rel=1e-3)
    assert normalized_noise_power(2e9, 30, 0) == pytest.approx(7.963e-12, rel=1e-3)


def test_normalized_noise_power_rejects_zero_bandwidth():
    with pytest.raises(ParameterError):
        normalized_noise_power(0.0, 30)


# --------------------------------------------------
# Defaults
# --------------------------------------------------

def test_reference_parameter_set_is_valid():
    params = reference_defaults()

    assert validate(params) == (params, None)
    assert params.lam == 0.0025
    assert params.main_gain == pytest.approx(63.0957, rel=1e-5)
    assert params.side_gain == pytest.approx(0.63096, rel=1e-4)
    assert params.beamwidth == pytest.approx(math.radians(10))
    assert params.main_lobe_probability == pytest.approx(10 / 360)
    assert params.noise_power == pytest.approx(7.963e-11, rel=1e-3)
    assert params.k_serving == 2
    assert params.region_radius == 100.0


def test_gain_mixture_probabilities_sum_to_one():
    (a1, b1), (a2, b2) = reference_defaults().gain_mixture

    assert a1 > a2
    assert b1 + b2 == pytest.approx(1.0)


def test_to_dict_uses_config_keys():
    data = reference_defaults().with_region(INFINITE).to_dict()

    assert data["lambda"] == 0.0025
    assert data["region_radius"] == "infinite"
    assert "lam" not in data


# --------------------------------------------------
# Validation
# --------------------------------------------------

def test_lambda_zero_is_named():
    params = replace(reference_defaults(), lam=0.0)

    with pytest.raises(ParameterError) as error:
        validate(params)

    assert "lambda > 0 required" in error.value.violations


def test_all_violations_are_reported_together():
    params = replace(reference_defaults(), lam=-1.0, beta=-0.1, noise_power=0.0)

    violations = collect_violations(params)

    assert "lambda > 0 required" in violations
    assert "beta >= 0 required" in violations
    assert "noise_power > 0 required" in violations


def test_divergent_nlos_field_is_rejected_only_when_infinite():
    params = replace(reference_defaults(), alpha_nlos=2.0)

    assert collect_violations(params) == []

    violations = collect_violations(params.with_region(INFINITE))

    assert any("alpha_nlos must exceed 2" in v for v in violations)


def test_divergent_los_field_without_blockage_is_rejected():
    params = replace(reference_defaults(), beta=0.0).with_region(INFINITE)

    violations = collect_violations(params)

    assert any("alpha_los must exceed 2" in v for v in violations)


def test_gain_and_beamwidth_bounds():
    params = replace(
        reference_defaults(),
        main_gain=0.5,
        beamwidth=7.0,
        k_serving=0
    )

    violations = collect_violations(params)

    assert "main_gain >= side_gain required" in violations
    assert "0 < beamwidth <= 2*pi required" in violations
    assert "k_serving must be an integer >= 1" in violations


def test_fading_model_bounds():
    params = reference_defaults()

    assert collect_violations(params, Nakagami(0.5, 2.0)) == ["n_los >= 1 required"]
    assert collect_violations(params, Rayleigh(0.0)) == ["mu > 0 required"]
    assert collect_violations(params, NoFading()) == []


def test_validate_is_idempotent():
    params = reference_defaults()
    model = Nakagami(3.0, 2.0)

    assert validate(*validate(params, model)) == (params, model)


# --------------------------------------------------
# Fading Models
# --------------------------------------------------

def test_parse_fading_model_variants():
    assert parse_fading_model("nakagami:3,2") == Nakagami(3.0, 2.0)
    assert parse_fading_model("Rayleigh:1") == Rayleigh(1.0)
    assert parse_fading_model("nofading") == NoFading()


def test_unknown_fading_model_is_rejected():
    with pytest.raises(ParameterError):
        parse_fading_model("rician:4")


def test_model_labels():
    assert Nakagami(3.0, 2.0).label == "nakagami(3,2)"
    assert Rayleigh(1.0).label == "rayleigh(1)"
    assert NoFading().label == "nofading"


def test_fading_model_dict_form():
    model = Nakagami(3.0, 2.0)

    assert fading_model_from_dict(fading_model_to_dict(model)) == model


# --------------------------------------------------
# Configuration Loading
# --------------------------------------------------

def test_params_from_dict_converts_db_and_degrees():
    params = params_from_dict({"main_gain_db": 20, "beamwidth_deg": 30})

    assert params.main_gain == pytest.approx(100.0)
    assert params.beamwidth == pytest.approx(math.pi / 6)


def test_params_from_dict_rejects_unknown_and_duplicate_keys():
    with pytest.raises(ParameterError) as error:
        params_from_dict({"lambda_typo": 1, "main_gain": 10, "main_gain_db": 10})

    violations = error.value.violations

    assert any("unknown configuration key: lambda_typo" in v for v in violations)
    assert any("more than once" in v for v in violations)


def test_params_from_dict_rejects_fractional_k():
    with pytest.raises(ParameterError):
        params_from_dict({"k_serving": 1.5})


def test_load_config_with_model(tmp_path):
    path = tmp_path / "run.json"
    path.write_text(json.dumps({
        "lambda": 0.001,
        "region_radius": "infinite",
        "fading": {"model": "rayleigh", "mu": 2}
    }))

    params, model = load_config(path)

    assert params.lam == 0.001
    assert params.is_infinite
    assert model == Rayleigh(2.0)


def test_shipped_low_density_config():
    params, model = load_config(CONFIG_DIR / "low_density_k1.json")

    assert params.k_serving == 1
    assert params.is_infinite
    assert model == Nakagami(3.0, 2.0)


def test_missing_config_file(tmp_path):
    with pytest.raises(FileNotFoundError):
        load_config(tmp_path / "missing.json")
