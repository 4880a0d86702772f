"""
VC Capacity Toolkit
Command Line Entry Point

Verbs:
- capacity   single-point evaluation (one CSV row per model x method)
- sweep      capacity over a lambda / beta / k_serving grid
- los-prob   LOS-serving probability table over lambda x K (x R)
- selftest   runs the oracle test suites

Data goes to standard output (or --out); logs go to standard error.

Exit status:
    0  success
    1  runtime failure (tolerance, under-populated deployment)
    2  invalid parameters, arguments or configuration file
"""

import argparse
import logging
import os
import sys
from pathlib import Path
from typing import List, Optional, Sequence

from dotenv import load_dotenv

from utils.analytic import METHOD_MONTECARLO, METHOD_SAMPLED, normalize_method
from utils.geometry import dump_deployment_csv
from utils.montecarlo import SimMode, draw_realization
from utils.params import (
    NoFading,
    ParameterError,
    load_config,
    reference_defaults,
    reference_models,
    params_from_dict,
    parse_fading_model,
)
from utils.streams import stream
from utils.sweep import (
    LosSweepSpec,
    SweepSpec,
    run_capacity_point,
    run_los_probability_sweep,
    run_sweep,
    write_table,
)


load_dotenv()

logger = logging.getLogger(__name__)

BASE_DIR = Path(__file__).resolve().parent

TESTS_DIR = BASE_DIR / "tests"

LOG_FORMAT = "%(asctime)s - %(levelname)s - %(message)s"


# --------------------------------------------------
# Argument Helpers
# --------------------------------------------------

def _split(text: Optional[str]) -> List[str]:

    if not text:
        return []

    return [part.strip() for part in text.split(",") if part.strip()]


def _split_models(text: Optional[str]) -> List[str]:
    """
    Splits a model list on ';' or on ',' between model names,
    keeping "nakagami:3,2" in one piece.
    """

    if not text:
        return []

    if ";" in text:
        return [part.strip() for part in text.split(";") if part.strip()]

    models: List[str] = []

    for part in text.split(","):
        part = part.strip()
        if not part:
            continue
        if models and part[0].isdigit():
            models[-1] = f"{models[-1]},{part}"
        else:
            models.append(part)

    return models


def _floats(text: Optional[str]) -> List[float]:

    try:
        return [float(value) for value in _split(text)]
    except ValueError:
        raise ParameterError([f"expected a comma list of numbers, got {text!r}"])


def _overrides(pairs: Sequence[str]) -> dict:

    values = {}

    for pair in pairs or []:

        key, sep, value = pair.partition("=")

        if not sep:
            raise ParameterError([f"--set expects key=value, got {pair!r}"])

        values[key.strip()] = value.strip()

    return values


def _coerce(value: str):

    try:
        return float(value)
    except ValueError:
        return value


def _base_params(args):

    if args.config:
        params, model = load_config(args.config)
    else:
        params, model = reference_defaults(), None

    overrides = {
        key: _coerce(value)
        for key, value in _overrides(args.set).items()
    }

    if args.k is not None:
        overrides["k_serving"] = args.k

    if args.radius is not None:
        overrides["region_radius"] = _coerce(args.radius)

    if overrides:
        params = params_from_dict(overrides, base=params)

    return params, model


def _models(args, config_model):

    names = _split_models(args.model)

    if names:
        return [parse_fading_model(name) for name in names]

    if config_model is not None:
        return [config_model]

    return reference_models()


def _methods(args, default: Sequence[str]) -> List[str]:

    names = _split(args.method) or list(default)

    return [normalize_method(name) for name in names]


def _seed(args) -> int:

    if args.seed is not None:
        return int(args.seed)

    return int(os.environ.get("CAPACITY_DEFAULT_SEED", "2024"))


def _workers(args) -> int:

    if args.workers is not None:
        return max(1, int(args.workers))

    return max(1, int(os.environ.get("CAPACITY_WORKERS", "1")))


def _trace_dir(path: Optional[str]) -> Optional[str]:

    if path is None:
        return None

    Path(path).mkdir(parents=True, exist_ok=True)

    return path


def _dump_deployment(params, seed: int, path: str) -> None:

    realization = draw_realization(
        params, NoFading(), SimMode.FAITHFUL, stream(seed)
    )

    dump_deployment_csv(realization.deployment, path)

    logger.info(
        "Deployment with %d APs written to %s", len(realization.deployment), path
    )


# --------------------------------------------------
# Verbs
# --------------------------------------------------

def cmd_capacity(args) -> int:

    params, config_model = _base_params(args)

    result = run_capacity_point(
        params,
        _models(args, config_model),
        _methods(args, (METHOD_SAMPLED, METHOD_MONTECARLO)),
        trials=args.trials,
        samples=args.samples,
        master_seed=_seed(args),
        finite_region=args.finite_region,
        workers=_workers(args),
        trace_dir=_trace_dir(args.trace)
    )

    write_table(result.to_frame(), args.out)

    if args.dump_deployment:
        _dump_deployment(params, _seed(args), args.dump_deployment)

    return 0


def cmd_sweep(args) -> int:

    params, config_model = _base_params(args)

    spec = SweepSpec(
        swept_parameter=args.param,
        grid=tuple(_floats(args.grid)),
        models=tuple(_models(args, config_model)),
        methods=tuple(_methods(args, (METHOD_SAMPLED, METHOD_MONTECARLO))),
        trials=args.trials,
        samples=args.samples,
        master_seed=_seed(args),
        finite_region=args.finite_region,
        workers=_workers(args)
    )

    result = run_sweep(spec, params)

    write_table(result.to_frame(), args.out)

    return 0


def cmd_los_prob(args) -> int:

    params, _ = _base_params(args)

    lambdas = _floats(args.grid) or [params.lam]

    k_values = [int(k) for k in _floats(args.k_list)] or [int(params.k_serving)]

    radii = _floats(args.radii)

    spec = LosSweepSpec(
        lambdas=tuple(lambdas),
        k_values=tuple(k_values),
        radii=tuple(radii),
        trials=args.trials,
        master_seed=_seed(args),
        workers=_workers(args)
    )

    frame = run_los_probability_sweep(spec, params)

    write_table(frame, args.out)

    return 0


def cmd_selftest(args) -> int:

    import pytest

    marker = "oracle or slow" if args.full else "oracle and not slow"

    return int(pytest.main(["-q", "-m", marker, str(TESTS_DIR)]))


# --------------------------------------------------
# Parser
# --------------------------------------------------

def _common(parser: argparse.ArgumentParser) -> None:

    parser.add_argument("--config", help="JSON parameter file (default: reference set)")
    parser.add_argument("--out", help="CSV output file (default: standard output)")
    parser.add_argument("--seed", type=int, help="master seed")
    parser.add_argument("--set", action="append", metavar="KEY=VALUE",
                        help="override one parameter, e.g. --set beta=0.02")
    parser.add_argument("--k", type=int, help="number of serving APs K")
    parser.add_argument("--radius", help="region radius R in meters, or 'infinite'")
    parser.add_argument("--trials", type=int, default=1000,
                        help="Monte Carlo trials per point")
    parser.add_argument("--samples", type=int, default=200,
                        help="distance draws for the analytic-sampled method")
    parser.add_argument("--method", help="comma list of methods")
    parser.add_argument("--model", help="model list, e.g. 'nakagami:3,2;rayleigh:1;nofading'")
    parser.add_argument("--workers", type=int, help="worker processes")
    parser.add_argument("--log-level", help="DEBUG, INFO, WARNING, ...")

    region = parser.add_mutually_exclusive_group()
    region.add_argument("--finite-region", dest="finite_region", action="store_true",
                        help="analytic interference field ends at R "
                             "(default when montecarlo is among the methods)")
    region.add_argument("--infinite-region", dest="finite_region", action="store_false",
                        help="analytic interference field extends to infinity "
                             "(default for analytic-only runs)")
    parser.set_defaults(finite_region=None)


def build_parser() -> argparse.ArgumentParser:

    parser = argparse.ArgumentParser(
        prog="cli.py",
        description="Ergodic capacity of user-centric virtual-cell mmWave networks"
    )

    verbs = parser.add_subparsers(dest="verb", required=True)

    capacity = verbs.add_parser("capacity", help="single-point evaluation")
    _common(capacity)
    capacity.add_argument("--trace", metavar="DIR",
                          help="write per-trial montecarlo traces to DIR/trace_<seed>.csv")
    capacity.add_argument("--dump-deployment", metavar="FILE",
                          help="write one deployment drawn from the master seed to FILE")
    capacity.set_defaults(handler=cmd_capacity)

    sweep = verbs.add_parser("sweep", help="capacity over a parameter grid")
    _common(sweep)
    sweep.add_argument("--param", required=True, choices=["lambda", "beta", "k_serving"])
    sweep.add_argument("--grid", required=True, help="comma list of values")
    sweep.set_defaults(handler=cmd_sweep)

    los = verbs.add_parser("los-prob", help="LOS-serving probability table")
    _common(los)
    los.add_argument("--grid", help="comma list of lambda values")
    los.add_argument("--k-list", help="comma list of K values")
    los.add_argument("--radii", help="comma list of region radii")
    los.set_defaults(handler=cmd_los_prob, trials=10_000)

    selftest = verbs.add_parser("selftest", help="run the oracle test suites")
    selftest.add_argument("--log-level")
    selftest.add_argument("--full", action="store_true",
                          help="include the slow acceptance grids")
    selftest.set_defaults(handler=cmd_selftest)

    return parser


def configure_logging(level: Optional[str]) -> None:

    level = (level or os.environ.get("CAPACITY_LOG_LEVEL", "INFO")).upper()

    logging.basicConfig(
        stream=sys.stderr,
        level=getattr(logging, level, logging.INFO),
        format=LOG_FORMAT
    )


def main(argv: Optional[Sequence[str]] = None) -> int:

    parser = build_parser()
    args = parser.parse_args(argv)

    configure_logging(args.log_level)

    try:
        return args.handler(args)

    except (ValueError, OSError) as error:
        print(f"error: {error}", file=sys.stderr)
        return 2

    except RuntimeError as error:
        print(f"error: {error}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
