"""
VC Capacity Toolkit
Link Physics

Responsibilities:
- Path loss L(r) for LOS / NLOS links
- Sectored antenna gains (serving constant, interferer two-point law)
- Fading power samplers for Nakagami, Rayleigh and no fading
- The fading kernel 1 - E[exp(-x g)] shared by every capacity expression

No:
- Geometry sampling
- Integration
- SINR assembly

The UE antenna gain is fixed at 1 and the transmit power is absorbed
into the normalized noise power; neither appears here.

Rayleigh convention: |xi|^2 is exponential with MEAN mu, so that
E[exp(-s g)] = 1 / (1 + mu s). Both Rayleigh and Nakagami are handled
as Gamma(shape, scale) laws: Nakagami (N, 1/N), Rayleigh (1, mu).
"""

from enum import Enum
from typing import Tuple, Union

import numpy as np

from utils.params import FadingModel, Nakagami, NoFading, Rayleigh, SystemParams


ArrayLike = Union[float, np.ndarray]


class ChannelDomainError(ValueError):
    """Input outside the domain of a link function."""


class LinkMark(str, Enum):
    """Blockage state of a link."""

    LOS = "los"
    NLOS = "nlos"


def is_los_mark(mark) -> bool:
    """Accepts a LinkMark, its string value, or a bool."""

    if isinstance(mark, (bool, np.bool_)):
        return bool(mark)

    if isinstance(mark, LinkMark):
        return mark is LinkMark.LOS

    try:
        return LinkMark(str(mark).lower()) is LinkMark.LOS
    except ValueError:
        raise ChannelDomainError(f"unknown link mark: {mark!r}")


# --------------------------------------------------
# Path Loss
# --------------------------------------------------

def path_loss(
    r: ArrayLike,
    is_los,
    params: SystemParams
) -> ArrayLike:
    """
    Formula:
        L(r) = C_L r^-alpha_L   (LOS)
        L(r) = C_N r^-alpha_N   (NLOS)

    Raises:
        ChannelDomainError for r <= 0
    """

    r = np.asarray(r, dtype=float)

    if np.any(r <= 0):
        raise ChannelDomainError(
            "path loss is singular at r = 0; distances must be positive"
        )

    loss = np.where(
        is_los,
        params.c_los * r ** (-params.alpha_los),
        params.c_nlos * r ** (-params.alpha_nlos)
    )

    if loss.ndim == 0:
        return float(loss)

    return loss


# --------------------------------------------------
# Antenna Gains
# --------------------------------------------------

def serving_gain(params: SystemParams) -> float:
    """Serving APs steer to the main lobe: G_k = M."""

    return params.main_gain


def sample_interferer_gain(
    params: SystemParams,
    rng: np.random.Generator,
    size=None
) -> ArrayLike:
    """
    P(G = M) = theta_b / 2 pi, otherwise G = m.
    """

    in_main_lobe = rng.random(size) < params.main_lobe_probability

    gains = np.where(
        in_main_lobe,
        params.main_gain,
        params.side_gain
    )

    if size is None:
        return float(gains)

    return gains


# --------------------------------------------------
# Fading
# --------------------------------------------------

def _gamma_law(model: FadingModel, is_los) -> Tuple[ArrayLike, ArrayLike]:
    """(shape, scale) of |xi|^2 for the given LOS mark(s)."""

    if isinstance(model, Nakagami):
        shape = np.where(is_los, model.n_los, model.n_nlos)
        return shape, 1.0 / shape

    if isinstance(model, Rayleigh):
        return 1.0, model.mu

    raise TypeError(f"{type(model).__name__} has no Gamma representation")


def fading_mean(model: FadingModel, is_los=True) -> float:
    """E[|xi|^2]: 1 for Nakagami and no fading, mu for Rayleigh."""

    if isinstance(model, Rayleigh):
        return float(model.mu)

    return 1.0


def sample_fading_power(
    model: FadingModel,
    is_los,
    rng: np.random.Generator
) -> ArrayLike:
    """
    Draws |xi|^2 for each mark in `is_los` (a bool or bool array).
    """

    marks = np.asarray(is_los, dtype=bool)

    if isinstance(model, NoFading):
        power = np.ones(marks.shape)

    else:
        shape, scale = _gamma_law(model, marks)
        power = rng.gamma(shape, scale, size=marks.shape)

    if marks.ndim == 0:
        return float(power)

    return power


def fading_log_laplace(
    model: FadingModel,
    is_los,
    x: ArrayLike
) -> ArrayLike:
    """
    log E[exp(-x g)] for the link's fading power g.

    Formula:
        Gamma(k, theta):  -k log(1 + theta x)
        no fading:        -x
    """

    x = np.asarray(x, dtype=float)

    if np.any(x < 0):
        raise ChannelDomainError("fading kernel needs x >= 0")

    if isinstance(model, NoFading):
        return -x

    shape, scale = _gamma_law(model, is_los)

    return -shape * np.log1p(scale * x)


def fading_kernel(
    model: FadingModel,
    is_los,
    x: ArrayLike
) -> ArrayLike:
    """
    1 - E[exp(-x g)].

    Nakagami:   F(N, x) = 1 - (1 + x/N)^-N
    Rayleigh:   H(mu x) = 1 - 1/(1 + mu x)
    no fading:  1 - exp(-x)

    Evaluated as -expm1(log E[exp(-x g)]), which stays accurate for
    small x and large N.
    """

    value = -np.expm1(fading_log_laplace(model, is_los, x))

    if np.ndim(value) == 0:
        return float(value)

    return value
