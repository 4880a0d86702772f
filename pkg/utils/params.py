"""
VC Capacity Toolkit
System Parameters

Responsibilities:
- Hold every physical / deployment constant (SystemParams)
- Hold the small-scale fading model choice (Nakagami, Rayleigh, NoFading)
- dB <-> linear conversions and the normalized noise power
- Validation with a complete list of violations
- Loading flat JSON configuration files

No:
- Integration
- Sampling
- Capacity formulas

All gains and powers are stored linear. dB values only appear at the
configuration boundary (keys suffixed "_db").
"""

import json
import math
from dataclasses import dataclass, fields, replace
from pathlib import Path
from typing import Any, Dict, List, Mapping, Optional, Tuple, Union


BASE_DIR = Path(__file__).resolve().parent.parent

DEFAULTS_PATH = (
    BASE_DIR
    / "config"
    / "reference_defaults.json"
)

INFINITE = math.inf

DEFAULT_NOISE_FIGURE_DB = 10.0


class ParameterError(ValueError):
    """
    Invalid system parameters or fading model.

    `violations` always holds the complete list of diagnostics,
    not only the first one found.
    """

    def __init__(self, violations: List[str]):
        self.violations = list(violations)
        super().__init__("; ".join(self.violations))


# --------------------------------------------------
# Fading Models
# --------------------------------------------------

@dataclass(frozen=True)
class Nakagami:
    """|xi|^2 ~ Gamma(N, 1/N), N picked by the link's LOS mark."""

    n_los: float
    n_nlos: float

    @property
    def label(self) -> str:
        return f"nakagami({self.n_los:g},{self.n_nlos:g})"


@dataclass(frozen=True)
class Rayleigh:
    """|xi|^2 exponential with mean mu (Laplace transform 1/(1 + mu s))."""

    mu: float

    @property
    def label(self) -> str:
        return f"rayleigh({self.mu:g})"


@dataclass(frozen=True)
class NoFading:
    """|xi|^2 = 1."""

    @property
    def label(self) -> str:
        return "nofading"


FadingModel = Union[Nakagami, Rayleigh, NoFading]


def parse_fading_model(text: str) -> FadingModel:
    """
    Parses the compact model syntax used on the command line.

    Examples:
        nakagami:3,2
        rayleigh:1
        nofading
    """

    if not isinstance(text, str) or not text.strip():
        raise ParameterError(["fading model must be a non-empty string"])

    name, _, arguments = text.strip().lower().partition(":")

    try:
        values = [
            float(value)
            for value in arguments.split(",")
            if value.strip()
        ]
    except ValueError:
        raise ParameterError(
            [f"fading model arguments must be numbers: {text!r}"]
        )

    if name == "nakagami":
        if len(values) == 1:
            values = values * 2
        if len(values) != 2:
            raise ParameterError(
                ["nakagami expects n_los,n_nlos (e.g. nakagami:3,2)"]
            )
        return Nakagami(n_los=values[0], n_nlos=values[1])

    if name == "rayleigh":
        if len(values) > 1:
            raise ParameterError(["rayleigh expects a single mu"])
        return Rayleigh(mu=values[0] if values else 1.0)

    if name in ("nofading", "none", "no-fading"):
        return NoFading()

    raise ParameterError([f"unknown fading model: {name!r}"])


def fading_model_from_dict(data: Mapping[str, Any]) -> FadingModel:
    """
    Builds a fading model from its JSON object form,
    e.g. {"model": "nakagami", "n_los": 3, "n_nlos": 2}.
    """

    name = str(data.get("model", "")).lower()

    if name == "nakagami":
        return Nakagami(
            n_los=float(data.get("n_los", 3.0)),
            n_nlos=float(data.get("n_nlos", 2.0))
        )

    if name == "rayleigh":
        return Rayleigh(mu=float(data.get("mu", 1.0)))

    if name in ("nofading", "none"):
        return NoFading()

    raise ParameterError([f"unknown fading model: {name!r}"])


def fading_model_to_dict(model: FadingModel) -> Dict[str, Any]:

    if isinstance(model, Nakagami):
        return {"model": "nakagami", "n_los": model.n_los, "n_nlos": model.n_nlos}

    if isinstance(model, Rayleigh):
        return {"model": "rayleigh", "mu": model.mu}

    return {"model": "nofading"}


def reference_models() -> List[FadingModel]:
    """Nakagami(3, 2), Rayleigh(1) and no fading: the reference model set."""

    return [
        Nakagami(n_los=3.0, n_nlos=2.0),
        Rayleigh(mu=1.0),
        NoFading()
    ]


# --------------------------------------------------
# System Parameters
# --------------------------------------------------

@dataclass(frozen=True)
class SystemParams:
    """
    Physical and deployment constants.

    `lam` is the AP density in APs per square meter (config key
    "lambda"). `region_radius` is the deployment disk radius R in
    meters, or math.inf for an unbounded interference field.
    """

    lam: float
    beta: float
    alpha_los: float
    alpha_nlos: float
    c_los: float
    c_nlos: float
    main_gain: float
    side_gain: float
    beamwidth: float
    noise_power: float
    k_serving: int
    region_radius: float = INFINITE

    @property
    def is_infinite(self) -> bool:
        return math.isinf(self.region_radius)

    @property
    def main_lobe_probability(self) -> float:
        """b_1 = theta_b / 2 pi."""
        return self.beamwidth / (2.0 * math.pi)

    @property
    def gain_mixture(self) -> Tuple[Tuple[float, float], Tuple[float, float]]:
        """((a_1, b_1), (a_2, b_2)) of the interferer gain distribution."""

        b1 = self.main_lobe_probability

        return (
            (self.main_gain, b1),
            (self.side_gain, 1.0 - b1)
        )

    def with_region(self, radius: float) -> "SystemParams":
        return replace(self, region_radius=float(radius))

    def interference_field(self, finite: bool) -> "SystemParams":
        """
        Copy whose interference extent U is the deployment disk
        (finite=True) or the whole plane (finite=False).
        """

        if finite:
            return self

        return replace(self, region_radius=INFINITE)

    def to_dict(self) -> Dict[str, Any]:

        data = {}

        for field in fields(self):
            key = "lambda" if field.name == "lam" else field.name
            value = getattr(self, field.name)

            if field.name == "region_radius" and math.isinf(value):
                value = "infinite"

            data[key] = value

        return data


# --------------------------------------------------
# Unit Conversions
# --------------------------------------------------

def db_to_linear(x_db: float) -> float:
    """
    Formula:
        linear = 10^(x_db / 10)
    """

    return 10.0 ** (x_db / 10.0)


def linear_to_db(x: float) -> float:

    if x <= 0:
        raise ParameterError(
            [f"linear value must be positive to convert to dB, got {x}"]
        )

    return 10.0 * math.log10(x)


def normalized_noise_power(
    bandwidth_hz: float,
    tx_power_dbm: float,
    noise_figure_db: float = DEFAULT_NOISE_FIGURE_DB
) -> float:
    """
    Noise power normalized by the AP transmit power.

    Formula:
        sigma^2 (dB) = -174 + 10 log10(B) + NF - P_t

    Args:
        bandwidth_hz: System bandwidth B in Hz
        tx_power_dbm: AP transmit power P_t in dBm
        noise_figure_db: Receiver noise figure (10 dB in the
            reference deployment)

    Returns:
        Linear, dimensionless noise power
    """

    if not bandwidth_hz > 0:
        raise ParameterError(
            [f"bandwidth_hz > 0 required, got {bandwidth_hz}"]
        )

    noise_db = (
        -174.0
        + 10.0 * math.log10(bandwidth_hz)
        + noise_figure_db
        - tx_power_dbm
    )

    return db_to_linear(noise_db)


# --------------------------------------------------
# Validation
# --------------------------------------------------

def _is_number(value: Any) -> bool:
    return (
        isinstance(value, (int, float))
        and not isinstance(value, bool)
        and not math.isnan(value)
    )


def collect_violations(
    params: SystemParams,
    model: Optional[FadingModel] = None
) -> List[str]:
    """
    Returns every violated invariant as a named diagnostic.
    An empty list means the pair is valid.
    """

    violations = []

    numeric_fields = [
        field.name
        for field in fields(params)
    ]

    for name in numeric_fields:
        if not _is_number(getattr(params, name)):
            key = "lambda" if name == "lam" else name
            violations.append(f"{key} must be a number")

    if violations:
        return violations

    if not params.lam > 0:
        violations.append("lambda > 0 required")

    if not params.beta >= 0:
        violations.append("beta >= 0 required")

    if not params.alpha_los >= 2:
        violations.append("alpha_los >= 2 required")

    if params.is_infinite and not params.alpha_nlos > 2:
        violations.append(
            "alpha_nlos must exceed 2 for infinite interference field "
            "(the NLOS interference integral diverges)"
        )

    if (
        params.is_infinite
        and params.beta == 0
        and params.alpha_los <= 2
    ):
        violations.append(
            "alpha_los must exceed 2 for infinite interference field "
            "when beta = 0 (the LOS interference integral diverges)"
        )

    if not params.c_los > 0:
        violations.append("c_los > 0 required")

    if not params.c_nlos > 0:
        violations.append("c_nlos > 0 required")

    if not 0 < params.beamwidth <= 2 * math.pi:
        violations.append("0 < beamwidth <= 2*pi required")

    if not params.side_gain > 0:
        violations.append("side_gain > 0 required")

    if not params.main_gain >= params.side_gain:
        violations.append("main_gain >= side_gain required")

    if (
        isinstance(params.k_serving, float)
        and not params.k_serving.is_integer()
    ) or not params.k_serving >= 1:
        violations.append("k_serving must be an integer >= 1")

    if not params.noise_power > 0:
        violations.append("noise_power > 0 required")

    if not params.region_radius > 0:
        violations.append("region_radius > 0 required")

    if model is not None:
        violations.extend(
            _model_violations(model)
        )

    return violations


def _model_violations(model: FadingModel) -> List[str]:

    if isinstance(model, Nakagami):
        problems = []

        if not (_is_number(model.n_los) and model.n_los >= 1):
            problems.append("n_los >= 1 required")

        if not (_is_number(model.n_nlos) and model.n_nlos >= 1):
            problems.append("n_nlos >= 1 required")

        return problems

    if isinstance(model, Rayleigh):
        if not (_is_number(model.mu) and model.mu > 0):
            return ["mu > 0 required"]
        return []

    if isinstance(model, NoFading):
        return []

    return [f"unknown fading model type: {type(model).__name__}"]


def validate(
    params: SystemParams,
    model: Optional[FadingModel] = None
) -> Tuple[SystemParams, Optional[FadingModel]]:
    """
    Returns the pair unchanged when every invariant holds.

    Raises:
        ParameterError carrying the complete violation list
    """

    violations = collect_violations(params, model)

    if violations:
        raise ParameterError(violations)

    return params, model


# --------------------------------------------------
# Configuration Loading
# --------------------------------------------------

_FIELD_KEYS = {
    "lambda": "lam",
    "beta": "beta",
    "alpha_los": "alpha_los",
    "alpha_nlos": "alpha_nlos",
    "c_los": "c_los",
    "c_nlos": "c_nlos",
    "main_gain": "main_gain",
    "side_gain": "side_gain",
    "beamwidth": "beamwidth",
    "noise_power": "noise_power",
    "k_serving": "k_serving",
    "region_radius": "region_radius",
}

_NOISE_INPUT_KEYS = (
    "bandwidth_hz",
    "tx_power_dbm",
    "noise_figure_db"
)


def _parse_radius(value: Any) -> float:

    if isinstance(value, str):
        if value.strip().lower() in ("infinite", "inf", "infinity"):
            return INFINITE
        raise ParameterError(
            [f"region_radius must be a number or 'infinite', got {value!r}"]
        )

    return float(value)


def params_from_dict(
    data: Mapping[str, Any],
    base: Optional[SystemParams] = None
) -> SystemParams:
    """
    Builds SystemParams from a flat key-value mapping.

    Accepted keys:
        the field names ("lambda", "beta", ...)
        the same names suffixed "_db" for dB-valued inputs
        "beamwidth_deg"
        "bandwidth_hz", "tx_power_dbm", "noise_figure_db"
            (noise power derived with normalized_noise_power)

    Missing fields are taken from `base` (the reference parameter
    set when omitted). The "fading" key is ignored here; see
    load_config.
    """

    if base is None:
        base = reference_defaults()

    values: Dict[str, Any] = {}
    errors: List[str] = []

    def assign(key: str, field_name: str, value: Any) -> None:
        if field_name in values:
            errors.append(f"{key} given more than once (two spellings of one field)")
            return
        values[field_name] = value

    for key, raw in data.items():

        if key in ("fading", *_NOISE_INPUT_KEYS):
            continue

        try:
            if key in _FIELD_KEYS:
                field_name = _FIELD_KEYS[key]
                if field_name == "region_radius":
                    assign(key, field_name, _parse_radius(raw))
                elif field_name == "k_serving":
                    assign(
                        key,
                        field_name,
                        int(raw) if float(raw).is_integer() else float(raw)
                    )
                else:
                    assign(key, field_name, float(raw))

            elif key.endswith("_db") and key[:-3] in _FIELD_KEYS:
                assign(key, _FIELD_KEYS[key[:-3]], db_to_linear(float(raw)))

            elif key == "beamwidth_deg":
                assign(key, "beamwidth", math.radians(float(raw)))

            else:
                errors.append(f"unknown configuration key: {key}")

        except (TypeError, ValueError) as error:
            if isinstance(error, ParameterError):
                errors.extend(error.violations)
            else:
                errors.append(f"{key} has an invalid value: {raw!r}")

    if "bandwidth_hz" in data or "tx_power_dbm" in data:
        try:
            noise = normalized_noise_power(
                float(data.get("bandwidth_hz", 0.0)),
                float(data.get("tx_power_dbm", 0.0)),
                float(data.get("noise_figure_db", DEFAULT_NOISE_FIGURE_DB))
            )
            assign("bandwidth_hz", "noise_power", noise)
        except ParameterError as error:
            errors.extend(error.violations)

    if errors:
        raise ParameterError(errors)

    params = replace(base, **values)

    validate(params)

    return params


def load_config(
    path: Union[str, Path]
) -> Tuple[SystemParams, Optional[FadingModel]]:
    """
    Loads a JSON configuration file.

    Returns:
        (params, model) where model is None unless the
        file carries a "fading" entry.
    """

    path = Path(path)

    if not path.exists():
        raise FileNotFoundError(
            f"Configuration not found: {path}"
        )

    with open(
        path,
        "r",
        encoding="utf-8"
    ) as file:

        data = json.load(file)

    if not isinstance(data, dict):
        raise ParameterError(
            [f"configuration must be a JSON object: {path}"]
        )

    params = params_from_dict(data)

    model = None

    fading = data.get("fading")

    if isinstance(fading, str):
        model = parse_fading_model(fading)
    elif isinstance(fading, dict):
        model = fading_model_from_dict(fading)

    if model is not None:
        validate(params, model)

    return params, model


def _params_from_defaults_file(data: Mapping[str, Any]) -> SystemParams:
    """
    The defaults file must define every field itself.
    """

    seed = SystemParams(
        lam=math.nan,
        beta=math.nan,
        alpha_los=math.nan,
        alpha_nlos=math.nan,
        c_los=math.nan,
        c_nlos=math.nan,
        main_gain=math.nan,
        side_gain=math.nan,
        beamwidth=math.nan,
        noise_power=math.nan,
        k_serving=0,
        region_radius=math.nan
    )

    return params_from_dict(data, seed)


_DEFAULTS_CACHE: Dict[str, SystemParams] = {}


def reference_defaults() -> SystemParams:
    """
    The reference parameter set (73 GHz, B = 2 GHz, P_t = 30 dBm,
    M = 18 dB, m = -2 dB, theta_b = 10 deg, beta = 0.0071,
    alpha_L = 2, alpha_N = 4, C_L = C_N = 1e-7, R = 100 m),
    read from config/reference_defaults.json.
    """

    if "reference" not in _DEFAULTS_CACHE:

        with open(
            DEFAULTS_PATH,
            "r",
            encoding="utf-8"
        ) as file:

            data = json.load(file)

        _DEFAULTS_CACHE["reference"] = _params_from_defaults_file(data)

    return _DEFAULTS_CACHE["reference"]
