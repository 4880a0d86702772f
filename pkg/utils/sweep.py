"""
VC Capacity Toolkit
Parameter Sweeps

Responsibilities:
- Capacity sweeps over lambda, beta or k_serving, for every
  (grid value x fading model x method)
- LOS-serving probability tables over lambda, K and R
- Plot-ready CSV output with a fixed header

No:
- Argument parsing (cli.py)
- Plotting

Rows always come out in grid order (value, then model, then method),
whatever order the points finish in. Each point carries its own seed
derived from the master seed and its position.
"""

import logging
import math
import sys
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Any, Dict, List, Optional, Sequence, TextIO, Tuple, Union

import pandas as pd

from utils.analytic import (
    METHOD_MONTECARLO,
    METHOD_SAMPLED,
    ergodic_capacity,
    normalize_method,
)
from utils.geometry import expected_ap_count
from utils.montecarlo import (
    SimMode,
    estimate_capacity,
    estimate_serving_los_probability,
)
from utils.params import (
    FadingModel,
    ParameterError,
    SystemParams,
    collect_violations,
)
from utils.streams import derive_seed


logger = logging.getLogger(__name__)

SWEEP_COLUMNS = [
    "swept_param",
    "value",
    "model",
    "method",
    "capacity_bps_hz",
    "half_width",
    "n",
    "seed",
    "status",
]

LOS_COLUMNS = [
    "lambda",
    "k_serving",
    "region_radius",
    "expected_ap_count",
    "probability",
    "ci_low",
    "ci_high",
    "n",
    "seed",
    "status",
]

SWEEPABLE = {
    "lambda": "lam",
    "beta": "beta",
    "k_serving": "k_serving",
}

NO_SWEEP = "none"


def _known_methods(methods: Sequence[str]) -> set:

    known = set()

    for method in methods:
        try:
            known.add(normalize_method(method))
        except ValueError:
            continue

    return known


# --------------------------------------------------
# Specs
# --------------------------------------------------

@dataclass(frozen=True)
class SweepSpec:
    """
    One capacity sweep.

    `trials` is the Monte Carlo trial count per point, `samples` the
    distance-draw count of the sampled analytic method. With
    finite_region the analytic interference field stops at R
    (like the simulator); with False it extends to infinity. None
    picks the disk whenever montecarlo is among the methods, so
    analytic and simulated rows of one table share a field.
    """

    swept_parameter: str
    grid: Tuple[float, ...]
    models: Tuple[FadingModel, ...]
    methods: Tuple[str, ...]
    trials: int = 1000
    samples: int = 200
    master_seed: int = 2024
    finite_region: Optional[bool] = None
    workers: int = 1
    trace_dir: Optional[str] = None

    def point_params(self, base: SystemParams, value) -> SystemParams:
        return apply_value(base, self.swept_parameter, value)

    @property
    def has_simulation(self) -> bool:
        return METHOD_MONTECARLO in _known_methods(self.methods)

    @property
    def has_analytic(self) -> bool:
        return bool(_known_methods(self.methods) - {METHOD_MONTECARLO})

    @property
    def analytic_field_is_finite(self) -> bool:

        if self.finite_region is None:
            return self.has_simulation

        return bool(self.finite_region)


@dataclass(frozen=True)
class LosSweepSpec:
    """LOS-serving probability table over lambda x K (x R)."""

    lambdas: Tuple[float, ...]
    k_values: Tuple[int, ...]
    radii: Tuple[float, ...] = field(default_factory=tuple)
    trials: int = 10_000
    master_seed: int = 2024
    workers: int = 1


@dataclass(frozen=True)
class SweepResult:
    """Sweep rows in deterministic order."""

    rows: List[Dict[str, Any]]
    columns: List[str] = field(default_factory=lambda: list(SWEEP_COLUMNS))

    def to_frame(self) -> pd.DataFrame:
        return pd.DataFrame(self.rows, columns=self.columns)

    def to_csv(self, target: Union[str, Path, TextIO, None] = None):
        return self.to_frame().to_csv(target, index=False)

    def __len__(self) -> int:
        return len(self.rows)


def apply_value(base: SystemParams, name: str, value) -> SystemParams:
    """Copy of `base` with one sweepable parameter replaced."""

    if name == NO_SWEEP:
        return base

    if name not in SWEEPABLE:
        raise ParameterError(
            [f"swept parameter must be one of {sorted(SWEEPABLE)}, got {name!r}"]
        )

    if name == "k_serving":
        number = float(value)
        value = int(number) if number.is_integer() else number

    else:
        value = float(value)

    return replace(base, **{SWEEPABLE[name]: value})


def validate_sweep(spec: SweepSpec, base: SystemParams) -> None:
    """
    Raises:
        ParameterError listing every problem with the sweep and
        with each grid point
    """

    problems = []

    if spec.swept_parameter != NO_SWEEP and spec.swept_parameter not in SWEEPABLE:
        problems.append(
            f"swept parameter must be one of {sorted(SWEEPABLE)}"
        )

    if not spec.grid:
        problems.append("grid must not be empty")

    if not spec.models:
        problems.append("at least one fading model is required")

    if not spec.methods:
        problems.append("at least one method is required")

    for method in spec.methods:
        try:
            normalize_method(method)
        except ValueError as error:
            problems.append(str(error))

    if not int(spec.trials) > 0 or not int(spec.samples) > 0:
        problems.append("trials and samples must be > 0")

    if not problems:
        for value in spec.grid:
            point = spec.point_params(base, value)
            for model in spec.models:
                for violation in collect_violations(
                    point.interference_field(spec.analytic_field_is_finite),
                    model
                ):
                    problems.append(
                        f"{spec.swept_parameter}={value:g}: {violation}"
                    )

    if problems:
        raise ParameterError(list(dict.fromkeys(problems)))


# --------------------------------------------------
# Capacity Sweep
# --------------------------------------------------

def trace_path(trace_dir: Optional[str], seed: int) -> Optional[Path]:
    """Per-trial trace file of the montecarlo row with this seed."""

    if trace_dir is None:
        return None

    return Path(trace_dir) / f"trace_{seed}.csv"


def _format_value(name: str, value):

    if name == "k_serving":
        return int(value)

    return float(value)


def evaluate_point(
    params: SystemParams,
    model: FadingModel,
    method: str,
    spec: SweepSpec,
    seed: int
) -> Dict[str, Any]:
    """
    One row. Failures are caught and written to `status` so the
    sweep continues.
    """

    try:

        method = normalize_method(method)

        if method == METHOD_MONTECARLO:
            estimate = estimate_capacity(
                params,
                model,
                SimMode.ASSUMPTION,
                n_trials=spec.trials,
                seed=seed,
                trace_path=trace_path(spec.trace_dir, seed)
            )

        else:
            estimate = ergodic_capacity(
                params.interference_field(spec.analytic_field_is_finite),
                model,
                method,
                budget=spec.samples if method == METHOD_SAMPLED else None,
                seed=seed
            )

        return {
            "capacity_bps_hz": estimate.bits_per_hz,
            "half_width": estimate.half_width,
            "n": estimate.n,
            "status": estimate.status,
        }

    except (ValueError, RuntimeError) as error:

        logger.warning(
            "Point %s / %s failed: %s",
            model.label, method, error
        )

        return {
            "capacity_bps_hz": math.nan,
            "half_width": math.nan,
            "n": 0,
            "status": f"error: {error}",
        }


def _evaluate_task(task: Tuple) -> Dict[str, Any]:
    return evaluate_point(*task)


def run_sweep(
    spec: SweepSpec,
    base: SystemParams
) -> SweepResult:
    """
    One row per (grid value x model x method).

    Point p (in row order) uses seed derive_seed(master_seed, p);
    rows are identical for any worker count.
    """

    validate_sweep(spec, base)

    if spec.has_simulation and spec.has_analytic and not spec.analytic_field_is_finite:
        logger.warning(
            "Analytic rows use an infinite interference field, montecarlo "
            "rows the R=%g m disk; values are not directly comparable",
            base.region_radius
        )

    labels = []
    tasks = []

    for value in spec.grid:

        params = spec.point_params(base, value)

        for model in spec.models:
            for method in spec.methods:

                seed = derive_seed(spec.master_seed, len(tasks))

                labels.append((value, model.label, normalize_method(method), seed))
                tasks.append((params, model, method, spec, seed))

    logger.info(
        "Sweep over %s: %d points, %d worker(s)",
        spec.swept_parameter, len(tasks), spec.workers
    )

    if spec.workers > 1:
        with ProcessPoolExecutor(max_workers=int(spec.workers)) as pool:
            outcomes = list(pool.map(_evaluate_task, tasks))
    else:
        outcomes = [_evaluate_task(task) for task in tasks]

    rows = []

    for (value, label, method, seed), outcome in zip(labels, outcomes):

        rows.append({
            "swept_param": spec.swept_parameter,
            "value": _format_value(spec.swept_parameter, value),
            "model": label,
            "method": method,
            "capacity_bps_hz": outcome["capacity_bps_hz"],
            "half_width": outcome["half_width"],
            "n": outcome["n"],
            "seed": seed,
            "status": outcome["status"],
        })

    return SweepResult(rows=rows)


def run_capacity_point(
    base: SystemParams,
    models: Sequence[FadingModel],
    methods: Sequence[str],
    trials: int = 1000,
    samples: int = 200,
    master_seed: int = 2024,
    finite_region: Optional[bool] = None,
    workers: int = 1,
    trace_dir: Optional[str] = None
) -> SweepResult:
    """
    The single-point evaluation: a sweep with swept_param 'none'.

    With trace_dir, every montecarlo row also writes its per-trial
    trace to trace_dir/trace_<seed>.csv.
    """

    spec = SweepSpec(
        swept_parameter=NO_SWEEP,
        grid=(math.nan,),
        models=tuple(models),
        methods=tuple(methods),
        trials=trials,
        samples=samples,
        master_seed=master_seed,
        finite_region=finite_region,
        workers=workers,
        trace_dir=trace_dir
    )

    result = run_sweep(spec, base)

    for row in result.rows:
        row["value"] = ""

    return result


# --------------------------------------------------
# LOS-Serving Probability Sweep
# --------------------------------------------------

def _los_task(task: Tuple) -> Dict[str, Any]:

    params, k, trials, seed = task

    try:
        estimate = estimate_serving_los_probability(params, k, trials, seed)

        return {
            "probability": estimate.probability,
            "ci_low": estimate.ci_low,
            "ci_high": estimate.ci_high,
            "n": estimate.n,
            "status": "ok",
        }

    except (ValueError, RuntimeError) as error:

        logger.warning("LOS point lambda=%g K=%d failed: %s", params.lam, k, error)

        return {
            "probability": math.nan,
            "ci_low": math.nan,
            "ci_high": math.nan,
            "n": 0,
            "status": f"error: {error}",
        }


def run_los_probability_sweep(
    spec: LosSweepSpec,
    base: SystemParams
) -> pd.DataFrame:
    """
    Rows ordered by (R, lambda, K). All K values at one (R, lambda)
    share a seed, so they see the same deployments and the K+1
    column can never exceed the K column.
    """

    radii = spec.radii or (base.region_radius,)

    problems = []

    if not spec.lambdas:
        problems.append("lambda grid must not be empty")

    if not spec.k_values:
        problems.append("K list must not be empty")

    if not int(spec.trials) > 0:
        problems.append("trials must be > 0")

    if any(math.isinf(float(radius)) for radius in radii):
        problems.append("LOS probability needs a finite region_radius")

    if problems:
        raise ParameterError(problems)

    labels = []
    tasks = []

    for r_index, radius in enumerate(radii):
        for l_index, lam in enumerate(spec.lambdas):

            seed = derive_seed(spec.master_seed, r_index, l_index)

            for k in spec.k_values:

                params = replace(
                    base,
                    lam=float(lam),
                    region_radius=float(radius),
                    k_serving=int(k)
                )

                violations = collect_violations(params)

                if violations:
                    raise ParameterError(
                        [f"lambda={lam:g}, K={k}, R={radius:g}: {v}" for v in violations]
                    )

                labels.append((float(lam), int(k), float(radius), seed))
                tasks.append((params, int(k), int(spec.trials), seed))

    logger.info("LOS probability sweep: %d points", len(tasks))

    if spec.workers > 1:
        with ProcessPoolExecutor(max_workers=int(spec.workers)) as pool:
            outcomes = list(pool.map(_los_task, tasks))
    else:
        outcomes = [_los_task(task) for task in tasks]

    rows = []

    for (lam, k, radius, seed), outcome in zip(labels, outcomes):

        rows.append({
            "lambda": lam,
            "k_serving": k,
            "region_radius": radius,
            "expected_ap_count": expected_ap_count(lam, radius),
            "probability": outcome["probability"],
            "ci_low": outcome["ci_low"],
            "ci_high": outcome["ci_high"],
            "n": outcome["n"],
            "seed": seed,
            "status": outcome["status"],
        })

    return pd.DataFrame(rows, columns=LOS_COLUMNS)


def write_table(
    frame: pd.DataFrame,
    target: Optional[Union[str, Path, TextIO]]
) -> None:
    """CSV to a path, an open stream, or (None) standard output."""

    frame.to_csv(target if target is not None else sys.stdout, index=False)
