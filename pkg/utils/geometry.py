"""
VC Capacity Toolkit
Deployment Geometry

Responsibilities:
- Sample AP deployments as a homogeneous PPP on a disk
- Independent LOS / NLOS blockage marking, p(r) = exp(-beta r)
- Direct sampler of the K nearest (ordered) distances
- Vectorised annulus sampler for many realizations at once
- Realization dump as CSV

No:
- Path loss or antenna gains
- Fading
- SINR

All samplers take an explicit numpy Generator (see utils.streams).
"""

import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import List, Tuple, Union

import numpy as np
import pandas as pd


# --------------------------------------------------
# Types
# --------------------------------------------------

@dataclass(frozen=True)
class ApPoint:
    """One AP in polar coordinates around the typical UE."""

    r: float
    theta: float
    is_los: bool = True


@dataclass(frozen=True)
class Deployment:
    """
    A sampled set of APs stored column-wise, sorted by r.

    `is_los` is None until mark_blockage has run.
    """

    r: np.ndarray
    theta: np.ndarray
    is_los: Union[np.ndarray, None] = None

    def __len__(self) -> int:
        return int(self.r.size)

    @property
    def points(self) -> List[ApPoint]:

        marks = (
            self.is_los
            if self.is_los is not None
            else np.ones(self.r.size, dtype=bool)
        )

        return [
            ApPoint(r=float(r), theta=float(theta), is_los=bool(los))
            for r, theta, los in zip(self.r, self.theta, marks)
        ]

    def to_frame(self) -> pd.DataFrame:

        return pd.DataFrame(
            {
                "r": self.r,
                "theta": self.theta,
                "is_los": (
                    self.is_los
                    if self.is_los is not None
                    else np.ones(self.r.size, dtype=bool)
                )
            }
        )


@dataclass(frozen=True)
class OrderedDistances:
    """r_1 <= r_2 <= ... <= r_K in meters."""

    values: Tuple[float, ...] = field(default_factory=tuple)

    def __post_init__(self):

        values = tuple(float(v) for v in self.values)

        if not values:
            raise ValueError("OrderedDistances needs at least one distance")

        if any(b < a for a, b in zip(values, values[1:])):
            raise ValueError(f"distances must be nondecreasing: {values}")

        if any(not math.isfinite(v) or v < 0 for v in values):
            raise ValueError(f"distances must be finite and nonnegative: {values}")

        object.__setattr__(self, "values", values)

    @property
    def k(self) -> int:
        return len(self.values)

    @property
    def r_max(self) -> float:
        return self.values[-1]

    def as_array(self) -> np.ndarray:
        return np.asarray(self.values, dtype=float)


# --------------------------------------------------
# Blockage
# --------------------------------------------------

def los_probability(r, beta: float):
    """
    Formula:
        p(r) = exp(-beta r)

    Works on scalars and numpy arrays.
    """

    return np.exp(-beta * np.asarray(r, dtype=float))


def expected_ap_count(lam: float, radius: float) -> float:
    """Mean AP count lambda pi R^2 on the deployment disk."""

    return lam * math.pi * radius ** 2


# --------------------------------------------------
# Samplers
# --------------------------------------------------

def _sort_by_distance(r: np.ndarray, theta: np.ndarray) -> Deployment:
    # lexsort is stable: ties in r fall back to theta, then insertion order
    order = np.lexsort((theta, r))

    return Deployment(
        r=r[order],
        theta=theta[order]
    )


def sample_ppp(
    lam: float,
    radius: float,
    rng: np.random.Generator
) -> Deployment:
    """
    Homogeneous PPP on the disk of the given radius around the UE.

    Count ~ Poisson(lambda pi R^2); given the count, points are
    i.i.d. uniform on the disk. Angles lie in (-pi, pi].
    """

    if not lam > 0:
        raise ValueError(f"lambda > 0 required, got {lam}")

    if not radius > 0 or math.isinf(radius):
        raise ValueError(f"a finite radius > 0 is required, got {radius}")

    count = rng.poisson(expected_ap_count(lam, radius))

    r = radius * np.sqrt(rng.random(count))

    theta = math.pi - rng.uniform(0.0, 2.0 * math.pi, count)

    return _sort_by_distance(r, theta)


def mark_blockage(
    deployment: Deployment,
    beta: float,
    rng: np.random.Generator
) -> Deployment:
    """
    Marks each AP LOS independently with probability exp(-beta r).
    Positions and order are left untouched.
    """

    if not beta >= 0:
        raise ValueError(f"beta >= 0 required, got {beta}")

    is_los = rng.random(len(deployment)) < los_probability(deployment.r, beta)

    return Deployment(
        r=deployment.r,
        theta=deployment.theta,
        is_los=is_los
    )


def sample_ordered_distances(
    lam: float,
    k: int,
    rng: np.random.Generator
) -> OrderedDistances:
    """
    Draws (r_1, ..., r_K) with joint density
    (2 pi lambda)^K r_1...r_K exp(-pi lambda r_K^2) on r_1 <= ... <= r_K.

    Formula:
        r_j = sqrt(S_j / (pi lambda)),
        S_j = j-th arrival of a unit-rate Poisson process
    """

    return OrderedDistances(
        tuple(sample_ordered_distances_batch(lam, k, 1, rng)[0])
    )


def sample_ordered_distances_batch(
    lam: float,
    k: int,
    n: int,
    rng: np.random.Generator
) -> np.ndarray:
    """n independent draws of the K ordered distances, shape (n, K)."""

    if not lam > 0:
        raise ValueError(f"lambda > 0 required, got {lam}")

    if int(k) < 1:
        raise ValueError(f"k >= 1 required, got {k}")

    arrivals = np.cumsum(
        rng.standard_exponential((int(n), int(k))),
        axis=1
    )

    return np.sqrt(arrivals / (math.pi * lam))


def sample_annulus_distances(
    lam: float,
    inner: float,
    outer: float,
    n_realizations: int,
    rng: np.random.Generator
) -> Tuple[np.ndarray, np.ndarray]:
    """
    PPP distances in the annulus inner < r <= outer for many
    independent realizations.

    Returns:
        (owner, r) flat arrays; owner[i] is the realization index
        of point i.
    """

    if not outer > inner >= 0 or math.isinf(outer):
        raise ValueError(
            f"annulus needs 0 <= inner < outer < inf, got ({inner}, {outer})"
        )

    mean_count = lam * math.pi * (outer ** 2 - inner ** 2)

    counts = rng.poisson(mean_count, int(n_realizations))

    owner = np.repeat(
        np.arange(int(n_realizations)),
        counts
    )

    r = np.sqrt(
        inner ** 2
        + (outer ** 2 - inner ** 2) * rng.random(owner.size)
    )

    return owner, r


# --------------------------------------------------
# Dump
# --------------------------------------------------

def dump_deployment_csv(
    deployment: Deployment,
    path: Union[str, Path]
) -> None:
    """Writes columns r, theta, is_los."""

    deployment.to_frame().to_csv(
        path,
        index=False
    )
