"""
VC Capacity Toolkit
FastAPI Backend API Layer

Responsibilities:
- REST API endpoints
- Request validation
- Connecting the capacity modules

No:
- Capacity formulas
- Sampling
- UI logic

Uses:
- utils.params
- utils.analytic
- utils.montecarlo
- utils.sweep
"""

import logging
import os
import sys
from typing import Any, Dict, List, Optional

from dotenv import load_dotenv
from fastapi import FastAPI, HTTPException
from fastapi.middleware.cors import CORSMiddleware
from pydantic import BaseModel, Field

from utils.analytic import METHOD_MONTECARLO, METHOD_SAMPLED, normalize_method
from utils.params import (
    fading_model_to_dict,
    reference_defaults,
    reference_models,
    params_from_dict,
    parse_fading_model,
)
from utils.sweep import (
    LosSweepSpec,
    SweepSpec,
    run_capacity_point,
    run_los_probability_sweep,
    run_sweep,
)


load_dotenv()

logging.basicConfig(
    stream=sys.stderr,
    level=os.environ.get("CAPACITY_LOG_LEVEL", "INFO").upper(),
    format="%(asctime)s - %(levelname)s - %(message)s"
)

logger = logging.getLogger(__name__)

DEFAULT_SEED = int(os.environ.get("CAPACITY_DEFAULT_SEED", "2024"))


app = FastAPI(
    title="VC Capacity Toolkit API",
    version="1.0.0",
    description="Ergodic capacity of user-centric virtual-cell mmWave networks"
)

app.add_middleware(
    CORSMiddleware,
    allow_origins=["*"],
    allow_methods=["*"],
    allow_headers=["*"],
)


# --------------------------------------------------
# Request Models
# --------------------------------------------------

class CapacityRequest(BaseModel):
    params: Dict[str, Any] = Field(default_factory=dict)
    models: List[str] = Field(default_factory=lambda: ["nakagami:3,2", "rayleigh:1", "nofading"])
    methods: List[str] = Field(default_factory=lambda: [METHOD_SAMPLED, METHOD_MONTECARLO])
    trials: int = 1000
    samples: int = 200
    seed: int = DEFAULT_SEED
    finite_region: Optional[bool] = None


class SweepRequest(CapacityRequest):
    swept_parameter: str
    grid: List[float]


class LosProbabilityRequest(BaseModel):
    params: Dict[str, Any] = Field(default_factory=dict)
    lambdas: List[float]
    k_values: List[int] = Field(default_factory=lambda: [1])
    radii: List[float] = Field(default_factory=list)
    trials: int = 10_000
    seed: int = DEFAULT_SEED


# --------------------------------------------------
# Helpers
# --------------------------------------------------

def _resolve(request: CapacityRequest):

    params = params_from_dict(request.params, base=reference_defaults())

    models = [parse_fading_model(name) for name in request.models]

    methods = [normalize_method(name) for name in request.methods]

    return params, models, methods


def _records(frame) -> List[Dict[str, Any]]:
    """NaN is not valid JSON; failed points carry None."""

    return [
        {key: (None if value != value else value) for key, value in row.items()}
        for row in frame.to_dict(orient="records")
    ]


# --------------------------------------------------
# Defaults
# --------------------------------------------------

@app.get("/defaults")
def read_defaults():
    return {
        "params": reference_defaults().to_dict(),
        "models": [fading_model_to_dict(model) for model in reference_models()],
    }


# --------------------------------------------------
# Capacity
# --------------------------------------------------

@app.post("/capacity")
def compute_capacity(request: CapacityRequest):
    try:
        params, models, methods = _resolve(request)

        result = run_capacity_point(
            params,
            models,
            methods,
            trials=request.trials,
            samples=request.samples,
            master_seed=request.seed,
            finite_region=request.finite_region
        )

        return _records(result.to_frame())

    except ValueError as error:
        raise HTTPException(status_code=400, detail=str(error))
    except RuntimeError as error:
        raise HTTPException(status_code=500, detail=str(error))


@app.post("/sweep")
def compute_sweep(request: SweepRequest):
    try:
        params, models, methods = _resolve(request)

        spec = SweepSpec(
            swept_parameter=request.swept_parameter,
            grid=tuple(request.grid),
            models=tuple(models),
            methods=tuple(methods),
            trials=request.trials,
            samples=request.samples,
            master_seed=request.seed,
            finite_region=request.finite_region
        )

        return _records(run_sweep(spec, params).to_frame())

    except ValueError as error:
        raise HTTPException(status_code=400, detail=str(error))
    except RuntimeError as error:
        raise HTTPException(status_code=500, detail=str(error))


# --------------------------------------------------
# LOS Probability
# --------------------------------------------------

@app.post("/los-probability")
def compute_los_probability(request: LosProbabilityRequest):
    try:
        params = params_from_dict(request.params, base=reference_defaults())

        spec = LosSweepSpec(
            lambdas=tuple(request.lambdas),
            k_values=tuple(request.k_values),
            radii=tuple(request.radii),
            trials=request.trials,
            master_seed=request.seed
        )

        return _records(run_los_probability_sweep(spec, params))

    except ValueError as error:
        raise HTTPException(status_code=400, detail=str(error))
    except RuntimeError as error:
        raise HTTPException(status_code=500, detail=str(error))
