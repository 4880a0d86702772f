"""
VC Capacity Toolkit
Numerical Integration Engine

Responsibilities:
- Adaptive Gauss-Kronrod (7/15) quadrature on finite intervals
- Semi-infinite integrals through a tail substitution
- Expectations over the ordered-distance domain
  0 < r_1 <= ... <= r_K, by sampling or (K <= 2) nested quadrature

No:
- Capacity formulas
- Fading or geometry knowledge beyond the ordered-distance density

Integrands are vectorised: f receives a 1-D array of abscissae (m,) and
returns an array of shape (m,) or (m, *batch). A batch integrand is
integrated for every batch element at once on a shared panel set, and
converges only when every element meets its own tolerance.

Non-convergence is never silent and never raised: the QuadResult
carries converged=False with the best estimate and its error bound.
"""

import logging
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from typing import Callable, List, Tuple, Union

import numpy as np

from utils.geometry import OrderedDistances, sample_ordered_distances_batch


logger = logging.getLogger(__name__)

Integrand = Callable[[np.ndarray], np.ndarray]

# g over the ordered domain returns a number, or (number, converged)
SampleValue = Union[float, Tuple[float, bool]]


# --------------------------------------------------
# Gauss-Kronrod 7/15 Rule
# --------------------------------------------------

_KRONROD_NODES = np.array([
    0.991455371120812639206854697526329,
    0.949107912342758524526189684047851,
    0.864864423359769072789712788640926,
    0.741531185599394439863864773280788,
    0.586087235467691130294144845693013,
    0.405845151377397166906606412076961,
    0.207784955007898467600689403773245,
])

_KRONROD_WEIGHTS = np.array([
    0.022935322010529224963732008058970,
    0.063092092629978553290700663189204,
    0.104790010322250183839876322541518,
    0.140653259715525918745189590510238,
    0.169004726639267902826583426598550,
    0.190350578064785409913256402421014,
    0.204432940075298892414161999234649,
])

_KRONROD_CENTER_WEIGHT = 0.209482141084727828012999174891714

# Gauss weights on the odd Kronrod nodes (0.949..., 0.741..., 0.405...)
_GAUSS_WEIGHTS = np.array([
    0.0,
    0.129484966168869693270611432679082,
    0.0,
    0.279705391489276667901467771423780,
    0.0,
    0.381830050505118944950369775488975,
    0.0,
])

_GAUSS_CENTER_WEIGHT = 0.417959183673469387755102040816327

NODES = np.concatenate([-_KRONROD_NODES, [0.0], _KRONROD_NODES[::-1]])

WEIGHTS_KRONROD = np.concatenate(
    [_KRONROD_WEIGHTS, [_KRONROD_CENTER_WEIGHT], _KRONROD_WEIGHTS[::-1]]
)

WEIGHTS_GAUSS = np.concatenate(
    [_GAUSS_WEIGHTS, [_GAUSS_CENTER_WEIGHT], _GAUSS_WEIGHTS[::-1]]
)


# --------------------------------------------------
# Types
# --------------------------------------------------

TAIL_TRANSFORMS = ("rational", "exponential")


@dataclass(frozen=True)
class QuadSpec:
    """
    Tolerances and limits of one adaptive integration.

    A result is accepted when error <= max(abs_tol, rel_tol * |value|).
    `max_depth` bounds how often a single panel may be bisected,
    `max_panels` bounds the total panel count.
    """

    rel_tol: float = 1e-6
    abs_tol: float = 1e-12
    max_depth: int = 40
    tail_transform: str = "rational"
    max_panels: int = 4096

    def __post_init__(self):

        problems = []

        if not self.rel_tol > 0:
            problems.append("rel_tol > 0 required")

        if not self.abs_tol > 0:
            problems.append("abs_tol > 0 required")

        if not int(self.max_depth) >= 1:
            problems.append("max_depth >= 1 required")

        if self.tail_transform not in TAIL_TRANSFORMS:
            problems.append(
                f"tail_transform must be one of {TAIL_TRANSFORMS}"
            )

        if not int(self.max_panels) >= 2:
            problems.append("max_panels >= 2 required")

        if problems:
            raise ValueError("; ".join(problems))


INNER_SPEC = QuadSpec(rel_tol=1e-6, abs_tol=1e-12)

CAPACITY_SPEC = QuadSpec(rel_tol=1e-4, abs_tol=1e-10)


@dataclass(frozen=True)
class QuadResult:
    """Integral estimate with its error bound."""

    value: Union[float, np.ndarray]
    error: Union[float, np.ndarray]
    converged: bool
    evaluations: int
    panels: int

    @property
    def status(self) -> str:
        return "ok" if self.converged else "tolerance not met"


@dataclass(frozen=True)
class SampleMean:
    """
    Monte Carlo mean with the standard error of the mean.

    converged is False when any sample came from an integral that
    missed its tolerance.
    """

    value: float
    standard_error: float
    n: int
    converged: bool = True


class ToleranceNotMet(RuntimeError):
    """
    Raised by callers that need a plain number and got an
    unconverged integral. `result` keeps the best estimate.
    """

    def __init__(self, message: str, result: QuadResult):
        self.result = result
        super().__init__(message)


class NonFiniteSampleError(ValueError):
    """A sampled integrand returned inf or nan."""


# --------------------------------------------------
# Adaptive Engine
# --------------------------------------------------

def _evaluate_panels(
    f: Integrand,
    left: np.ndarray,
    right: np.ndarray
):
    """
    Kronrod estimate and |Kronrod - Gauss| error per panel.
    Shapes: (p, *batch).
    """

    half = 0.5 * (right - left)
    center = 0.5 * (right + left)

    x = center[:, None] + half[:, None] * NODES[None, :]

    fx = np.asarray(
        f(x.reshape(-1)),
        dtype=float
    )

    batch_shape = fx.shape[1:]

    fx = fx.reshape((left.size, NODES.size) + batch_shape)

    kronrod = np.tensordot(WEIGHTS_KRONROD, fx, axes=([0], [1]))
    gauss = np.tensordot(WEIGHTS_GAUSS, fx, axes=([0], [1]))

    scale = half.reshape((-1,) + (1,) * len(batch_shape))

    return kronrod * scale, np.abs(kronrod - gauss) * scale


def _unwrap(value: np.ndarray):

    if np.ndim(value) == 0:
        return float(value)

    return value


def integrate_finite(
    f: Integrand,
    a: float,
    b: float,
    spec: QuadSpec = INNER_SPEC
) -> QuadResult:
    """
    Globally adaptive Gauss-Kronrod quadrature of f over [a, b].

    Every round bisects the panels whose error exceeds their
    width-proportional share of the tolerance; all new panels are
    evaluated in one vectorised call.
    """

    a = float(a)
    b = float(b)

    if a == b:
        first = np.asarray(f(np.array([a])), dtype=float)
        zeros = np.zeros(first.shape[1:])
        return QuadResult(_unwrap(zeros), _unwrap(zeros), True, 1, 0)

    if b < a:
        flipped = integrate_finite(f, b, a, spec)
        return QuadResult(
            _unwrap(-np.asarray(flipped.value)),
            flipped.error,
            flipped.converged,
            flipped.evaluations,
            flipped.panels
        )

    total_width = b - a

    left = np.array([a])
    right = np.array([b])
    depth = np.array([0])

    values, errors = _evaluate_panels(f, left, right)

    evaluations = NODES.size
    converged = False

    while True:

        total = values.sum(axis=0)
        error = errors.sum(axis=0)

        target = np.maximum(
            spec.abs_tol,
            spec.rel_tol * np.abs(total)
        )

        if np.all(error <= target):
            converged = True
            break

        ratio = errors / target

        if ratio.ndim > 1:
            ratio = ratio.reshape(ratio.shape[0], -1).max(axis=1)

        share = (right - left) / total_width

        split = (ratio > share) & (depth < spec.max_depth)

        if not split.any():
            break

        if left.size + int(split.sum()) > spec.max_panels:
            break

        keep = ~split

        mid = 0.5 * (left[split] + right[split])

        new_left = np.concatenate([left[split], mid])
        new_right = np.concatenate([mid, right[split]])
        new_depth = np.concatenate([depth[split], depth[split]]) + 1

        new_values, new_errors = _evaluate_panels(f, new_left, new_right)

        evaluations += new_left.size * NODES.size

        left = np.concatenate([left[keep], new_left])
        right = np.concatenate([right[keep], new_right])
        depth = np.concatenate([depth[keep], new_depth])
        values = np.concatenate([values[keep], new_values])
        errors = np.concatenate([errors[keep], new_errors])

    if not converged:
        logger.warning(
            "Integral on [%g, %g] missed tolerance (rel %g, abs %g) "
            "after %d evaluations on %d panels",
            a, b, spec.rel_tol, spec.abs_tol, evaluations, left.size
        )

    logger.debug(
        "Integral on [%g, %g]: %d evaluations, %d panels",
        a, b, evaluations, left.size
    )

    return QuadResult(
        value=_unwrap(total),
        error=_unwrap(error),
        converged=converged,
        evaluations=evaluations,
        panels=int(left.size)
    )


def _broadcast_rows(jacobian: np.ndarray, values: np.ndarray) -> np.ndarray:
    return jacobian.reshape((-1,) + (1,) * (values.ndim - 1)) * values


def integrate_semi_infinite(
    f: Integrand,
    lower: float,
    spec: QuadSpec = INNER_SPEC,
    scale: float = 1.0
) -> QuadResult:
    """
    Integral of f over (lower, infinity).

    Substitutions (t in (0, 1)):
        rational:     x = lower + scale * t / (1 - t)
        exponential:  x = lower - scale * ln(1 - t)

    `scale` should be the length over which f changes; it does not
    change the value, only how fast the panels resolve it.
    """

    if not scale > 0:
        raise ValueError(f"scale > 0 required, got {scale}")

    if spec.tail_transform == "rational":

        def transformed(t: np.ndarray) -> np.ndarray:
            gap = 1.0 - t
            x = lower + scale * t / gap
            return _broadcast_rows(
                scale / gap ** 2,
                np.asarray(f(x), dtype=float)
            )

    else:

        def transformed(t: np.ndarray) -> np.ndarray:
            gap = 1.0 - t
            x = lower - scale * np.log1p(-t)
            return _broadcast_rows(
                scale / gap,
                np.asarray(f(x), dtype=float)
            )

    return integrate_finite(transformed, 0.0, 1.0, spec)


# --------------------------------------------------
# Ordered-Distance Domain
# --------------------------------------------------

def ordered_distance_density(r: OrderedDistances, lam: float) -> float:
    """
    Formula:
        f(r) = (2 pi lambda)^K r_1 ... r_K exp(-pi lambda r_K^2)
    """

    values = r.as_array()

    return float(
        (2.0 * math.pi * lam) ** values.size
        * np.prod(values)
        * math.exp(-math.pi * lam * values[-1] ** 2)
    )


def _split_sample(output: SampleValue) -> Tuple[float, bool]:

    if isinstance(output, tuple):
        value, converged = output
        return float(value), bool(converged)

    return float(output), True


def expect_over_ordered_domain(
    g: Callable[[OrderedDistances], SampleValue],
    lam: float,
    k: int,
    n_samples: int,
    rng: np.random.Generator,
    workers: int = 1
) -> SampleMean:
    """
    Monte Carlo mean of g over draws of the K ordered distances.

    g returns a number or a (number, converged) pair; the mean is
    converged only when every sample is.

    Draws are taken up front from `rng`, so the result does not depend
    on `workers`. With workers > 1, g must be picklable (a module-level
    function or a functools.partial of one).

    Raises:
        NonFiniteSampleError naming the distances of the first
        non-finite draw
    """

    n_samples = int(n_samples)

    if n_samples < 2:
        raise ValueError(f"n_samples >= 2 required, got {n_samples}")

    draws = [
        OrderedDistances(tuple(row))
        for row in sample_ordered_distances_batch(lam, k, n_samples, rng)
    ]

    if workers > 1:
        with ProcessPoolExecutor(max_workers=int(workers)) as pool:
            outputs = list(pool.map(g, draws, chunksize=max(1, n_samples // (8 * workers))))
    else:
        outputs = []
        for distances in draws:
            output = g(distances)
            value, _ = _split_sample(output)
            if not math.isfinite(value):
                raise NonFiniteSampleError(
                    f"integrand returned {value} at distances {distances.values}"
                )
            outputs.append(output)

    samples = [_split_sample(output) for output in outputs]

    values = np.asarray([value for value, _ in samples], dtype=float)

    bad = np.flatnonzero(~np.isfinite(values))

    if bad.size:
        raise NonFiniteSampleError(
            f"integrand returned {values[bad[0]]} at distances "
            f"{draws[bad[0]].values}"
        )

    missed = sum(1 for _, converged in samples if not converged)

    if missed:
        logger.warning(
            "%d of %d sampled integrals missed tolerance", missed, n_samples
        )

    return SampleMean(
        value=float(values.mean()),
        standard_error=float(values.std(ddof=1) / math.sqrt(n_samples)),
        n=n_samples,
        converged=not missed
    )


def integrate_nested_ordered(
    g: Callable[[OrderedDistances], SampleValue],
    lam: float,
    k: int,
    spec: QuadSpec = CAPACITY_SPEC
) -> QuadResult:
    """
    Deterministic expectation of g under the ordered-distance density,
    for K = 1 or K = 2.

    K = 1:  int_0^inf g(r) 2 pi lambda r exp(-pi lambda r^2) dr
    K = 2:  int_0^inf (2 pi lambda)^2 r_2 exp(-pi lambda r_2^2)
                int_0^{r_2} g(r_1, r_2) r_1 dr_1 dr_2

    g may return (number, converged); any unconverged node makes the
    whole result unconverged.
    """

    if k not in (1, 2):
        raise ValueError(f"nested quadrature supports k in {{1, 2}}, got {k}")

    typical = 1.0 / math.sqrt(math.pi * lam)

    node_flags: List[bool] = []

    def evaluate(distances: OrderedDistances) -> float:
        value, converged = _split_sample(g(distances))
        node_flags.append(converged)
        return value

    if k == 1:

        def outer_one(r: np.ndarray) -> np.ndarray:
            values = np.array([evaluate(OrderedDistances((x,))) for x in r])
            return values * 2.0 * math.pi * lam * r * np.exp(-math.pi * lam * r ** 2)

        result = integrate_semi_infinite(outer_one, 0.0, spec, scale=typical)

        return QuadResult(
            value=result.value,
            error=result.error,
            converged=result.converged and all(node_flags),
            evaluations=result.evaluations,
            panels=result.panels
        )

    inner_results: List[QuadResult] = []

    def outer_two(r2: np.ndarray) -> np.ndarray:

        rows = []

        for outer in r2:

            inner = integrate_finite(
                lambda r1, outer=outer: np.array(
                    [evaluate(OrderedDistances((x, outer))) for x in r1]
                ) * r1,
                0.0,
                outer,
                spec
            )

            inner_results.append(inner)
            rows.append(inner.value)

        return (
            np.asarray(rows)
            * (2.0 * math.pi * lam) ** 2
            * r2
            * np.exp(-math.pi * lam * r2 ** 2)
        )

    outer = integrate_semi_infinite(outer_two, 0.0, spec, scale=typical)

    worst_inner = max(
        (
            abs(result.error) / abs(result.value)
            for result in inner_results
            if result.value
        ),
        default=0.0
    )

    return QuadResult(
        value=outer.value,
        error=float(outer.error + worst_inner * abs(outer.value)),
        converged=(
            outer.converged
            and all(r.converged for r in inner_results)
            and all(node_flags)
        ),
        evaluations=outer.evaluations + sum(r.evaluations for r in inner_results),
        panels=outer.panels
    )
