"""
API Client
VC Capacity Toolkit

Responsibilities:
- Communicate with the FastAPI backend
- Send HTTP requests
- Return JSON responses

No:
- Streamlit code
- Capacity formulas
- Data formatting
"""

import os
from typing import Any, Dict, List, Optional

import requests
from dotenv import load_dotenv


# --------------------------------------------------
# Configuration
# --------------------------------------------------

load_dotenv()

API_BASE_URL = os.environ.get("CAPACITY_API_URL", "http://127.0.0.1:8000")

# Monte Carlo points can take minutes
DEFAULT_TIMEOUT = 600


# --------------------------------------------------
# Internal Request Helper
# --------------------------------------------------

def _request(
    method: str,
    endpoint: str,
    **kwargs
):
    """
    Sends an HTTP request to the FastAPI backend.

    Raises:
        RuntimeError carrying the backend's `detail` on HTTP errors
        requests.ConnectionError
        requests.Timeout
    """

    url = f"{API_BASE_URL}{endpoint}"

    response = requests.request(
        method=method,
        url=url,
        timeout=DEFAULT_TIMEOUT,
        **kwargs
    )

    try:
        response.raise_for_status()
    except requests.HTTPError:
        try:
            detail = response.json().get("detail")
        except ValueError:
            detail = response.text

        raise RuntimeError(detail)

    return response.json()


# --------------------------------------------------
# Defaults
# --------------------------------------------------

def get_defaults():
    return _request(
        "GET",
        "/defaults"
    )


# --------------------------------------------------
# Capacity
# --------------------------------------------------

def compute_capacity(
    params: Dict[str, Any],
    models: List[str],
    methods: List[str],
    trials: int = 1000,
    samples: int = 200,
    seed: Optional[int] = None,
    finite_region: Optional[bool] = None
):
    body = {
        "params": params,
        "models": models,
        "methods": methods,
        "trials": trials,
        "samples": samples,
        "finite_region": finite_region
    }

    if seed is not None:
        body["seed"] = seed

    return _request(
        "POST",
        "/capacity",
        json=body
    )


def run_sweep(
    params: Dict[str, Any],
    swept_parameter: str,
    grid: List[float],
    models: List[str],
    methods: List[str],
    trials: int = 1000,
    samples: int = 200,
    seed: Optional[int] = None,
    finite_region: Optional[bool] = None
):
    body = {
        "params": params,
        "swept_parameter": swept_parameter,
        "grid": grid,
        "models": models,
        "methods": methods,
        "trials": trials,
        "samples": samples,
        "finite_region": finite_region
    }

    if seed is not None:
        body["seed"] = seed

    return _request(
        "POST",
        "/sweep",
        json=body
    )


# --------------------------------------------------
# LOS Probability
# --------------------------------------------------

def compute_los_probability(
    params: Dict[str, Any],
    lambdas: List[float],
    k_values: List[int],
    radii: Optional[List[float]] = None,
    trials: int = 10_000,
    seed: Optional[int] = None
):
    body = {
        "params": params,
        "lambdas": lambdas,
        "k_values": k_values,
        "radii": radii or [],
        "trials": trials
    }

    if seed is not None:
        body["seed"] = seed

    return _request(
        "POST",
        "/los-probability",
        json=body
    )
