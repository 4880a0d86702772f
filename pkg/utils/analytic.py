"""
VC Capacity Toolkit
Analytic Capacity

Responsibilities:
- Interference exponents E_L(s), E_N(s) (Laplace functional of the
  thinned LOS / NLOS interferer fields beyond the serving set)
- Conditional ergodic capacity given the serving distances
- Unconditional ergodic capacity over the ordered-distance density
- Cooperation gain C(K=2) - C(K=1)

No:
- Sampling of full deployments (montecarlo)
- Sweeps or CSV output

Nakagami, Rayleigh and no fading share one code path; the model only
enters through channel.fading_kernel / fading_log_laplace.

Serving links are LOS with the main-lobe gain M. The UE gain A_u is 1
and the transmit power is folded into the normalized noise power.
"""

import logging
import math
from dataclasses import asdict, dataclass, replace
from functools import partial
from typing import Optional, Tuple

import numpy as np
from scipy.special import exp1

from utils.channel import (
    LinkMark,
    fading_kernel,
    fading_log_laplace,
    fading_mean,
    is_los_mark,
    serving_gain,
)
from utils.geometry import OrderedDistances
from utils.params import FadingModel, SystemParams, validate
from utils.quadrature import (
    CAPACITY_SPEC,
    INNER_SPEC,
    QuadResult,
    QuadSpec,
    SampleMean,
    ToleranceNotMet,
    expect_over_ordered_domain,
    integrate_finite,
    integrate_nested_ordered,
    integrate_semi_infinite,
)
from utils.streams import stream


logger = logging.getLogger(__name__)

LN2 = math.log(2.0)

METHOD_SAMPLED = "analytic-sampled"
METHOD_NESTED = "analytic-nested"
METHOD_MONTECARLO = "montecarlo"

METHODS = (METHOD_SAMPLED, METHOD_NESTED, METHOD_MONTECARLO)

DEFAULT_SAMPLES = 200


class UnsupportedMethodError(ValueError):
    """Unknown method tag, or nested quadrature asked for K >= 3."""


# --------------------------------------------------
# Result Type
# --------------------------------------------------

@dataclass(frozen=True)
class CapacityEstimate:
    """
    Ergodic capacity in bps/Hz with its uncertainty.

    half_width is a quadrature error bound for deterministic methods
    (n = 0) and the standard error of the mean for sampled ones.
    """

    bits_per_hz: float
    half_width: float
    n: int
    method: str
    converged: bool = True

    def __post_init__(self):

        if not self.bits_per_hz >= 0:
            raise ValueError(
                f"bits_per_hz must be nonnegative, got {self.bits_per_hz}"
            )

        if not self.half_width >= 0:
            raise ValueError(
                f"half_width must be nonnegative, got {self.half_width}"
            )

    @property
    def status(self) -> str:
        return "ok" if self.converged else "tolerance not met"

    def to_dict(self) -> dict:
        data = asdict(self)
        data["status"] = self.status
        return data


@dataclass(frozen=True)
class CooperationGain:
    """C(K=2) - C(K=1) with both constituent estimates."""

    gain: float
    half_width: float
    single: CapacityEstimate
    pair: CapacityEstimate


def normalize_method(method: str) -> str:
    """
    Accepts the full tags and the short forms "sampled" / "nested".
    """

    text = str(method).strip().lower()

    aliases = {
        "sampled": METHOD_SAMPLED,
        "nested": METHOD_NESTED,
        "mc": METHOD_MONTECARLO,
    }

    text = aliases.get(text, text)

    if text not in METHODS:
        raise UnsupportedMethodError(
            f"unknown method {method!r}; expected one of {METHODS}"
        )

    return text


# --------------------------------------------------
# Interference Exponents
# --------------------------------------------------

def _exponent_batch(
    s: np.ndarray,
    r_k_max: float,
    mark,
    params: SystemParams,
    model: FadingModel,
    spec: QuadSpec
) -> QuadResult:
    """
    2 pi lambda sum_n b_n int_{r_K}^U kernel(s a_n C x^-alpha) w(x) x dx
    for every s in the 1-D array `s` at once.
    """

    los = is_los_mark(mark)

    if los:
        c, alpha = params.c_los, params.alpha_los
    else:
        c, alpha = params.c_nlos, params.alpha_nlos

    beta = params.beta
    mixture = params.gain_mixture
    density = 2.0 * math.pi * params.lam

    def integrand(x: np.ndarray) -> np.ndarray:

        path = c * x ** (-alpha)

        if los:
            weight = np.exp(-beta * x)
        else:
            weight = -np.expm1(-beta * x)

        total = np.zeros((x.size, s.size))

        for gain, probability in mixture:
            total += probability * fading_kernel(
                model,
                los,
                s[None, :] * gain * path[:, None]
            )

        return density * total * (weight * x)[:, None]

    if params.is_infinite:

        scale = r_k_max

        if los and beta > 0:
            scale = r_k_max + 1.0 / beta

        return integrate_semi_infinite(integrand, r_k_max, spec, scale=scale)

    if params.region_radius <= r_k_max:
        zeros = np.zeros(s.size)
        return QuadResult(zeros, zeros, True, 0, 0)

    return integrate_finite(integrand, r_k_max, params.region_radius, spec)


def interference_exponent(
    s: float,
    r_k_max: float,
    mark,
    params: SystemParams,
    model: FadingModel,
    spec: QuadSpec = INNER_SPEC
) -> float:
    """
    E(s) = -ln E[exp(-s I)] for the LOS or NLOS interferers
    farther than r_K, out to U = region_radius (or infinity).

    Raises:
        ValueError for s < 0 or r_k_max <= 0
        ToleranceNotMet when the x-integral misses tolerance
    """

    if not s >= 0:
        raise ValueError(f"s >= 0 required, got {s}")

    if not r_k_max > 0:
        raise ValueError(f"r_k_max > 0 required, got {r_k_max}")

    result = _exponent_batch(
        np.array([float(s)]),
        float(r_k_max),
        mark,
        params,
        model,
        spec
    )

    value = float(np.asarray(result.value)[0])

    if not result.converged:
        raise ToleranceNotMet(
            f"interference exponent at s={s:g}, r_K={r_k_max:g} "
            f"({LinkMark.LOS.value if is_los_mark(mark) else LinkMark.NLOS.value}) "
            f"missed tolerance: {value:g} +/- {float(np.asarray(result.error)[0]):g}",
            result
        )

    return value


# --------------------------------------------------
# Conditional Capacity
# --------------------------------------------------

def _serving_strengths(r: OrderedDistances, params: SystemParams) -> np.ndarray:
    """M C_L r_k^-alpha_L for every serving AP."""

    return (
        serving_gain(params)
        * params.c_los
        * r.as_array() ** (-params.alpha_los)
    )


def _bracket(
    s: np.ndarray,
    strengths: np.ndarray,
    model: FadingModel
) -> np.ndarray:
    """
    1 - prod_k (1 - kernel(s a_k)), evaluated as -expm1(sum_k log LT).
    """

    log_lt = fading_log_laplace(
        model,
        True,
        s[:, None] * strengths[None, :]
    )

    return -np.expm1(log_lt.sum(axis=1))


def _total_exponent(
    s: np.ndarray,
    r: OrderedDistances,
    params: SystemParams,
    model: FadingModel,
    spec: QuadSpec
) -> Tuple[np.ndarray, bool]:

    los = _exponent_batch(s, r.r_max, LinkMark.LOS, params, model, spec)
    nlos = _exponent_batch(s, r.r_max, LinkMark.NLOS, params, model, spec)

    total = np.asarray(los.value) + np.asarray(nlos.value)

    return total, los.converged and nlos.converged


def _as_distances(r) -> OrderedDistances:

    if isinstance(r, OrderedDistances):
        return r

    return OrderedDistances(tuple(np.atleast_1d(r)))


def capacity_integrand(
    s,
    r,
    params: SystemParams,
    model: FadingModel,
    spec: QuadSpec = INNER_SPEC,
    with_status: bool = False
):
    """
    (exp(-s sigma^2) / s) exp(-(E_L(s) + E_N(s))) (1 - prod_k (1 - kernel_k))

    Tends to sum_k E[g] M C_L r_k^-alpha_L as s -> 0.

    with_status=True returns (values, converged), converged being
    False when any E_L / E_N integral missed `spec`.
    """

    r = _as_distances(r)

    s = np.atleast_1d(np.asarray(s, dtype=float))

    if np.any(s <= 0):
        raise ValueError("capacity integrand needs s > 0")

    exponent, converged = _total_exponent(s, r, params, model, spec)

    bracket = _bracket(s, _serving_strengths(r, params), model)

    values = np.exp(-s * params.noise_power - exponent) * bracket / s

    if with_status:
        return values, converged

    return values


def s_integration_window(
    r,
    params: SystemParams,
    model: FadingModel,
    spec: QuadSpec = CAPACITY_SPEC
) -> Tuple[float, float]:
    """
    (epsilon, S) such that the s-mass left outside [epsilon, S]
    is at most abs_tol on each side.

    Lower:  bracket <= s D with D = sum_k E[g] M C_L r_k^-alpha_L,
            so int_0^eps (1/s) s D ds = eps D.
    Upper:  int_S^inf exp(-s sigma^2)/s ds = E1(S sigma^2)
            < exp(-T)/T with T = S sigma^2 >= max(1, -ln abs_tol).
    """

    r = _as_distances(r)

    slope = fading_mean(model, True) * float(_serving_strengths(r, params).sum())

    epsilon = spec.abs_tol / slope

    upper = max(1.0, -math.log(spec.abs_tol)) / params.noise_power

    return epsilon, max(upper, 10.0 * epsilon)


def conditional_capacity(
    r,
    params: SystemParams,
    model: FadingModel,
    spec: QuadSpec = CAPACITY_SPEC,
    inner_spec: QuadSpec = INNER_SPEC
) -> CapacityEstimate:
    """
    Ergodic capacity (bps/Hz) given the serving distances r_1..r_K.

    Formula:
        (1/ln 2) int_0^inf (exp(-s sigma^2)/s)
                           exp(-(E_L(s) + E_N(s)))
                           (1 - prod_k (1 - kernel(s M C_L r_k^-alpha_L))) ds

    K is len(r); interferers start at r_K. The s-integral runs in
    u = ln s over the window from s_integration_window; every outer
    round evaluates E_L and E_N for all its s-nodes in one batch.
    """

    r = _as_distances(r)

    if r.values[0] <= 0:
        raise ValueError("serving distances must be positive")

    strengths = _serving_strengths(r, params)
    sigma2 = params.noise_power

    epsilon, upper = s_integration_window(r, params, model, spec)

    inner_ok = []

    def integrand(u: np.ndarray) -> np.ndarray:

        s = np.exp(u)

        values, converged = capacity_integrand(
            s, r, params, model, inner_spec, with_status=True
        )
        inner_ok.append(converged)

        return s * values

    result = integrate_finite(
        integrand,
        math.log(epsilon),
        math.log(upper),
        spec
    )

    truncated = (
        epsilon * fading_mean(model, True) * strengths.sum()
        + exp1(upper * sigma2)
    )

    converged = result.converged and all(inner_ok)

    bits = max(0.0, float(result.value) / LN2)

    logger.debug(
        "Conditional capacity r=%s (%s): %.6f bps/Hz, %d s-evaluations",
        r.values, model.label, bits, result.evaluations
    )

    if not converged:
        logger.warning(
            "Conditional capacity at r=%s (%s) missed tolerance",
            r.values, model.label
        )

    return CapacityEstimate(
        bits_per_hz=bits,
        half_width=float(result.error + truncated) / LN2,
        n=0,
        method=METHOD_NESTED,
        converged=converged
    )


def no_interference_capacity(r, params: SystemParams) -> float:
    """
    Formula:
        log2(1 + M C_L sum_k r_k^-alpha_L / sigma^2)

    No fading, no interferers.
    """

    r = _as_distances(r)

    snr = float(_serving_strengths(r, params).sum()) / params.noise_power

    return math.log2(1.0 + snr)


# --------------------------------------------------
# Ergodic Capacity
# --------------------------------------------------

def _conditional_bits(
    r: OrderedDistances,
    params: SystemParams,
    model: FadingModel,
    spec: QuadSpec
) -> Tuple[float, bool]:
    estimate = conditional_capacity(r, params, model, spec)
    return estimate.bits_per_hz, estimate.converged


def _sampled_estimate(mean: SampleMean) -> CapacityEstimate:
    return CapacityEstimate(
        bits_per_hz=max(0.0, mean.value),
        half_width=mean.standard_error,
        n=mean.n,
        method=METHOD_SAMPLED,
        converged=mean.converged
    )


def ergodic_capacity(
    params: SystemParams,
    model: FadingModel,
    method: str = METHOD_SAMPLED,
    budget: Optional[int] = None,
    seed: int = 0,
    workers: int = 1,
    spec: QuadSpec = CAPACITY_SPEC
) -> CapacityEstimate:
    """
    Ergodic capacity with K = params.k_serving, averaged over the
    joint density of the ordered serving distances.

    Args:
        method: "analytic-sampled" (or "sampled") draws `budget`
            distance vectors from stream(seed, 0); "analytic-nested"
            (or "nested") integrates over the ordered domain, K <= 2
        budget: number of distance draws for the sampled method
        workers: process count for the sampled method; the result
            does not depend on it

    Raises:
        UnsupportedMethodError for nested with K >= 3 or an
        unknown / montecarlo tag
    """

    validate(params, model)

    method = normalize_method(method)

    k = int(params.k_serving)

    g = partial(
        _conditional_bits,
        params=params,
        model=model,
        spec=spec
    )

    logger.info(
        "Ergodic capacity: %s, K=%d, lambda=%g, %s",
        model.label, k, params.lam, method
    )

    if method == METHOD_SAMPLED:

        n = int(budget) if budget else DEFAULT_SAMPLES

        mean = expect_over_ordered_domain(
            g,
            params.lam,
            k,
            n,
            stream(seed, 0),
            workers=workers
        )

        estimate = _sampled_estimate(mean)

    elif method == METHOD_NESTED:

        if k > 2:
            raise UnsupportedMethodError(
                f"nested quadrature is limited to K <= 2 (got K={k}); "
                "use the sampled method"
            )

        result = integrate_nested_ordered(g, params.lam, k, spec)

        estimate = CapacityEstimate(
            bits_per_hz=max(0.0, float(result.value)),
            half_width=float(result.error),
            n=0,
            method=METHOD_NESTED,
            converged=result.converged
        )

    else:
        raise UnsupportedMethodError(
            "montecarlo estimates come from utils.montecarlo.estimate_capacity"
        )

    logger.info(
        "Ergodic capacity %s: %.5f +/- %.5f bps/Hz",
        model.label, estimate.bits_per_hz, estimate.half_width
    )

    return estimate


def _leading_bits(
    r: OrderedDistances,
    params: SystemParams,
    model: FadingModel,
    spec: QuadSpec
) -> Tuple[float, bool]:
    return _conditional_bits(OrderedDistances(r.values[:1]), params, model, spec)


def cooperation_gain(
    params: SystemParams,
    model: FadingModel,
    method: str = METHOD_SAMPLED,
    budget: Optional[int] = None,
    seed: int = 0,
    workers: int = 1,
    spec: QuadSpec = CAPACITY_SPEC
) -> CooperationGain:
    """
    C(K=2) - C(K=1) at otherwise identical parameters.

    The sampled method evaluates both capacities on the same draws
    of (r_1, r_2), the K=1 term using r_1 alone. The nested method
    integrates each capacity separately.
    """

    validate(params, model)

    method = normalize_method(method)

    if method != METHOD_SAMPLED:

        single = ergodic_capacity(
            _with_k(params, 1), model, method, budget, seed, workers, spec
        )

        pair = ergodic_capacity(
            _with_k(params, 2), model, method, budget, seed, workers, spec
        )

    else:

        n = int(budget) if budget else DEFAULT_SAMPLES

        means = [
            expect_over_ordered_domain(
                partial(bits, params=params, model=model, spec=spec),
                params.lam,
                2,
                n,
                stream(seed, 0),
                workers=workers
            )
            for bits in (_leading_bits, _conditional_bits)
        ]

        single, pair = (_sampled_estimate(mean) for mean in means)

    logger.info(
        "Cooperation gain %s, lambda=%g: %.5f bps/Hz",
        model.label, params.lam, pair.bits_per_hz - single.bits_per_hz
    )

    return CooperationGain(
        gain=pair.bits_per_hz - single.bits_per_hz,
        half_width=pair.half_width + single.half_width,
        single=single,
        pair=pair
    )


def _with_k(params: SystemParams, k: int) -> SystemParams:
    return replace(params, k_serving=k)
