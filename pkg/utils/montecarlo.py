"""
VC Capacity Toolkit
Monte Carlo Simulator

Responsibilities:
- Draw full network realizations: PPP deployment on the disk,
  blockage marks, interferer gains, fading powers
- SINR of the typical UE served by its K nearest APs
- Ergodic capacity and LOS-serving probability estimates
- Vectorised conditional oracles (capacity given r, Laplace functional)
- Per-trial trace CSV

No:
- Closed-form integration (analytic)
- Infinite interference fields: the simulator always uses the disk R

Every trial draws from its own counter-based stream (utils.streams),
so estimates do not depend on the worker count.
"""

import logging
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from enum import Enum
from pathlib import Path
from typing import Dict, List, Optional, Sequence, Union

import numpy as np
import pandas as pd
from scipy.stats import binomtest

from utils.analytic import METHOD_MONTECARLO, CapacityEstimate
from utils.channel import (
    is_los_mark,
    path_loss,
    sample_fading_power,
    sample_interferer_gain,
    serving_gain,
)
from utils.geometry import (
    ApPoint,
    Deployment,
    OrderedDistances,
    expected_ap_count,
    los_probability,
    mark_blockage,
    sample_annulus_distances,
    sample_ppp,
)
from utils.params import FadingModel, SystemParams, validate
from utils.quadrature import SampleMean
from utils.streams import stream


logger = logging.getLogger(__name__)

MIN_TRIALS = 100

DEFAULT_MAX_REDRAWS = 100

ORACLE_CHUNK = 10_000


class SimMode(str, Enum):
    """
    assumption: serving links forced LOS (matches the closed forms)
    faithful:   serving marks drawn from p(r) like every other link
    """

    ASSUMPTION = "assumption"
    FAITHFUL = "faithful"


class UnderPopulatedError(RuntimeError):
    """
    Fewer than K APs on the disk after the redraw limit.

    `partial` holds the statistics of the trials completed before
    the failure, when raised from an estimate.
    """

    def __init__(self, message: str, partial=None):
        self.partial = partial
        super().__init__(message)


# --------------------------------------------------
# Realizations
# --------------------------------------------------

@dataclass(frozen=True)
class NetworkRealization:
    """
    One sampled network around the typical UE.

    `deployment` is sorted by distance and carries the blockage marks
    as drawn. `link_los` holds the marks the SINR uses; in assumption
    mode the serving entries are forced True.
    """

    deployment: Deployment
    k: int
    link_los: np.ndarray
    gains: np.ndarray
    fading: np.ndarray
    mode: SimMode
    redraws: int = 0

    @property
    def aps(self) -> List[ApPoint]:
        return self.deployment.points

    @property
    def serving(self) -> np.ndarray:
        return np.arange(self.k)

    @property
    def serving_distances(self) -> OrderedDistances:
        return OrderedDistances(tuple(self.deployment.r[: self.k]))


def _require_finite_region(params: SystemParams) -> None:

    if params.is_infinite:
        raise ValueError(
            "the simulator needs a finite region_radius "
            "(infinite fields are analytic only)"
        )


def _under_populated_message(params: SystemParams, k: int, attempts: int) -> str:
    return (
        f"fewer than K={k} APs in {attempts} draws: expected AP count "
        f"lambda*pi*R^2 = {expected_ap_count(params.lam, params.region_radius):.3g} "
        f"(lambda={params.lam:g}, R={params.region_radius:g})"
    )


def _draw_populated(
    params: SystemParams,
    k: int,
    rng: np.random.Generator,
    max_redraws: int
):
    """Deployment with at least k APs, plus the number of rejections."""

    for attempt in range(max_redraws + 1):

        deployment = sample_ppp(params.lam, params.region_radius, rng)

        if len(deployment) >= k:
            return deployment, attempt

    raise UnderPopulatedError(
        _under_populated_message(params, k, max_redraws + 1)
    )


def draw_realization(
    params: SystemParams,
    model: FadingModel,
    mode: SimMode,
    rng: np.random.Generator,
    max_redraws: int = DEFAULT_MAX_REDRAWS
) -> NetworkRealization:
    """
    Draw order: deployment, blockage marks, interferer gains, fading.
    The serving set is fixed by distance before any attribute draw.
    """

    _require_finite_region(params)

    mode = SimMode(mode)
    k = int(params.k_serving)

    deployment, redraws = _draw_populated(params, k, rng, max_redraws)

    deployment = mark_blockage(deployment, params.beta, rng)

    gains = sample_interferer_gain(params, rng, size=len(deployment))
    gains[:k] = serving_gain(params)

    link_los = deployment.is_los.copy()

    if mode is SimMode.ASSUMPTION:
        link_los[:k] = True

    fading = sample_fading_power(model, link_los, rng)

    return NetworkRealization(
        deployment=deployment,
        k=k,
        link_los=link_los,
        gains=gains,
        fading=fading,
        mode=mode,
        redraws=redraws
    )


def realization_sinr(
    realization: NetworkRealization,
    params: SystemParams
) -> float:
    """
    Formula:
        gamma = sum_serving G L(r) |xi|^2
                / (sum_interferers G L(r) |xi|^2 + sigma^2)
    """

    received = (
        realization.gains
        * path_loss(realization.deployment.r, realization.link_los, params)
        * realization.fading
    )

    serving = np.zeros(received.size, dtype=bool)
    serving[realization.serving] = True

    signal = float(received[serving].sum())
    interference = float(received[~serving].sum())

    return signal / (interference + params.noise_power)


def simulate_sinr(
    params: SystemParams,
    model: FadingModel,
    mode: SimMode,
    rng: np.random.Generator
) -> float:
    return realization_sinr(
        draw_realization(params, model, mode, rng),
        params
    )


# --------------------------------------------------
# Ergodic Capacity
# --------------------------------------------------

def _run_trials(
    params: SystemParams,
    model: FadingModel,
    mode: SimMode,
    seed: int,
    indices: Sequence[int]
) -> Dict[str, object]:
    """
    Runs trials one stream each. Stops at the first under-populated
    trial and reports its message next to the completed results.
    """

    capacity, sinr, distances = [], [], []
    redraws = 0
    failure = None

    for index in indices:

        try:
            realization = draw_realization(
                params, model, mode, stream(seed, index)
            )
        except UnderPopulatedError as error:
            failure = str(error)
            break

        gamma = realization_sinr(realization, params)

        redraws += realization.redraws
        sinr.append(gamma)
        capacity.append(math.log2(1.0 + gamma))
        distances.append(realization.deployment.r[: realization.k].copy())

    return {
        "capacity": capacity,
        "sinr": sinr,
        "distances": distances,
        "redraws": redraws,
        "failure": failure,
    }


def _chunks(n: int, parts: int) -> List[range]:
    size = max(1, math.ceil(n / parts))
    return [range(start, min(n, start + size)) for start in range(0, n, size)]


def _summarize(capacity: np.ndarray) -> CapacityEstimate:

    n = capacity.size

    standard_error = (
        float(capacity.std(ddof=1) / math.sqrt(n))
        if n > 1
        else 0.0
    )

    return CapacityEstimate(
        bits_per_hz=float(capacity.mean()) if n else 0.0,
        half_width=standard_error,
        n=int(n),
        method=METHOD_MONTECARLO
    )


def estimate_capacity(
    params: SystemParams,
    model: FadingModel,
    mode: SimMode = SimMode.ASSUMPTION,
    n_trials: int = 1000,
    seed: int = 0,
    workers: int = 1,
    trace_path: Optional[Union[str, Path]] = None
) -> CapacityEstimate:
    """
    Mean of log2(1 + SINR) over independent realizations.

    Trial i uses stream(seed, i); deployment, blockage, gains and
    fading are all redrawn every trial.

    Raises:
        ValueError for n_trials < 100 or an infinite region
        UnderPopulatedError (with `partial`) when a trial cannot
        reach K APs
    """

    validate(params, model)
    _require_finite_region(params)

    n_trials = int(n_trials)

    if n_trials < MIN_TRIALS:
        raise ValueError(f"n_trials >= {MIN_TRIALS} required, got {n_trials}")

    mode = SimMode(mode)

    logger.info(
        "Monte Carlo capacity: %s, %s mode, K=%d, lambda=%g, %d trials",
        model.label, mode.value, params.k_serving, params.lam, n_trials
    )

    if workers > 1:
        parts = _chunks(n_trials, int(workers) * 4)
        with ProcessPoolExecutor(max_workers=int(workers)) as pool:
            results = list(pool.map(
                _run_trials,
                [params] * len(parts),
                [model] * len(parts),
                [mode] * len(parts),
                [seed] * len(parts),
                parts
            ))
    else:
        results = [_run_trials(params, model, mode, seed, range(n_trials))]

    capacity, sinr, distances = [], [], []
    redraws = 0

    for result in results:

        capacity.extend(result["capacity"])
        sinr.extend(result["sinr"])
        distances.extend(result["distances"])
        redraws += result["redraws"]

        if result["failure"]:
            partial = _summarize(np.asarray(capacity))
            raise UnderPopulatedError(
                f"{result['failure']} (trial {len(capacity)} of {n_trials})",
                partial=partial
            )

    if redraws:
        logger.warning(
            "%d under-populated deployments redrawn (expected AP count %.3g, K=%d)",
            redraws,
            expected_ap_count(params.lam, params.region_radius),
            params.k_serving
        )

    if trace_path is not None:
        write_trace_csv(
            trace_path,
            _trace_rows(capacity, sinr, distances)
        )

    estimate = _summarize(np.asarray(capacity))

    logger.info(
        "Monte Carlo capacity %s: %.5f +/- %.5f bps/Hz",
        model.label, estimate.bits_per_hz, estimate.half_width
    )

    return estimate


def _trace_rows(
    capacity: List[float],
    sinr: List[float],
    distances: List[np.ndarray]
) -> List[Dict[str, float]]:

    rows = []

    for trial, (bits, gamma, r) in enumerate(zip(capacity, sinr, distances)):

        row = {"trial": trial, "K": int(r.size)}

        for j, value in enumerate(r, start=1):
            row[f"r_{j}"] = float(value)

        row["sinr_db"] = 10.0 * math.log10(gamma) if gamma > 0 else -math.inf
        row["capacity"] = bits

        rows.append(row)

    return rows


def write_trace_csv(
    path: Union[str, Path],
    rows: List[Dict[str, float]]
) -> None:
    """Columns: trial, K, r_1..r_K, sinr_db, capacity."""

    frame = pd.DataFrame(rows)

    if frame.empty:
        frame = pd.DataFrame(columns=["trial", "K", "sinr_db", "capacity"])

    frame.to_csv(path, index=False)


# --------------------------------------------------
# LOS-Serving Probability
# --------------------------------------------------

@dataclass(frozen=True)
class LosProbabilityEstimate:
    """Fraction of realizations whose K serving links are all LOS."""

    probability: float
    ci_low: float
    ci_high: float
    successes: int
    n: int
    redraws: int = 0


def estimate_serving_los_probability(
    params: SystemParams,
    k: int,
    n_trials: int,
    seed: int = 0,
    confidence_level: float = 0.95
) -> LosProbabilityEstimate:
    """
    Faithful marking: every AP is LOS with probability exp(-beta r).
    The interval is the Wilson score interval.
    """

    validate(params)
    _require_finite_region(params)

    k = int(k)
    n_trials = int(n_trials)

    if k < 1:
        raise ValueError(f"k >= 1 required, got {k}")

    if n_trials < 1:
        raise ValueError(f"n_trials >= 1 required, got {n_trials}")

    successes = 0
    redraws = 0

    for trial in range(n_trials):

        rng = stream(seed, trial)

        try:
            deployment, attempts = _draw_populated(
                params, k, rng, DEFAULT_MAX_REDRAWS
            )
        except UnderPopulatedError as error:
            raise UnderPopulatedError(
                f"{error} (trial {trial} of {n_trials})",
                partial={"successes": successes, "n": trial}
            )

        redraws += attempts

        marked = mark_blockage(deployment, params.beta, rng)

        successes += int(np.all(marked.is_los[:k]))

    interval = binomtest(successes, n_trials).proportion_ci(
        confidence_level=confidence_level,
        method="wilson"
    )

    if redraws:
        logger.warning(
            "LOS probability: %d under-populated deployments redrawn", redraws
        )

    return LosProbabilityEstimate(
        probability=successes / n_trials,
        ci_low=float(interval.low),
        ci_high=float(interval.high),
        successes=successes,
        n=n_trials,
        redraws=redraws
    )


# --------------------------------------------------
# Conditional Oracles
# --------------------------------------------------

def _annulus_interference(
    params: SystemParams,
    model: FadingModel,
    inner: float,
    n: int,
    rng: np.random.Generator,
    mark=None
) -> np.ndarray:
    """
    Interference power per realization from the PPP in (inner, R].
    With `mark` set, only links carrying that mark contribute.
    """

    owner, x = sample_annulus_distances(
        params.lam, inner, params.region_radius, n, rng
    )

    los = rng.random(x.size) < los_probability(x, params.beta)
    gains = sample_interferer_gain(params, rng, size=x.size)
    fading = sample_fading_power(model, los, rng)

    power = gains * path_loss(x, los, params) * fading

    if mark is not None:
        power = np.where(los == is_los_mark(mark), power, 0.0)

    return np.bincount(owner, weights=power, minlength=n)


def sample_conditional_capacity(
    r,
    params: SystemParams,
    model: FadingModel,
    n_trials: int,
    rng: np.random.Generator
) -> CapacityEstimate:
    """
    E[log2(1 + SINR)] given the serving distances r, with serving
    links LOS at gain M and interferers from the annulus (r_K, R].
    """

    _require_finite_region(params)

    r = r if isinstance(r, OrderedDistances) else OrderedDistances(tuple(r))
    distances = r.as_array()

    strengths = (
        serving_gain(params)
        * path_loss(distances, True, params)
    )

    capacity = []

    for start in range(0, int(n_trials), ORACLE_CHUNK):

        n = min(ORACLE_CHUNK, int(n_trials) - start)

        serving_fading = sample_fading_power(
            model,
            np.ones((n, distances.size), dtype=bool),
            rng
        )

        signal = (serving_fading * strengths[None, :]).sum(axis=1)

        if params.region_radius > r.r_max:
            interference = _annulus_interference(params, model, r.r_max, n, rng)
        else:
            interference = np.zeros(n)

        capacity.append(
            np.log2(1.0 + signal / (interference + params.noise_power))
        )

    return _summarize(np.concatenate(capacity))


def laplace_functional_estimate(
    s: float,
    r_k_max: float,
    mark,
    params: SystemParams,
    model: FadingModel,
    n_trials: int,
    rng: np.random.Generator
) -> SampleMean:
    """
    -ln E[exp(-s I)] for the interference of one mark class in
    (r_K, R], with a delta-method standard error.
    """

    _require_finite_region(params)

    samples = []

    for start in range(0, int(n_trials), ORACLE_CHUNK):

        n = min(ORACLE_CHUNK, int(n_trials) - start)

        interference = _annulus_interference(
            params, model, r_k_max, n, rng, mark=mark
        )

        samples.append(np.exp(-s * interference))

    values = np.concatenate(samples)

    mean = float(values.mean())

    if mean <= 0:
        raise ValueError(
            f"Laplace functional underflowed at s={s:g}; use a smaller s"
        )

    return SampleMean(
        value=-math.log(mean),
        standard_error=float(values.std(ddof=1) / math.sqrt(values.size) / mean),
        n=int(values.size)
    )
