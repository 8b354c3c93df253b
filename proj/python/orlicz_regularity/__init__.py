"""Python front end to the orlicz-regularity C++ core."""

import json

from ._core import (
    ConfigError,
    DomainError,
    GeometryError,
    NumericError,
    Phi,
    RefinementError,
    ball_capacity,
    ball_capacity_bounds,
    run_task_artifacts,
    sha256,
)
from ._core import run_task_json as _run_task_json


def run_task(task, config):
    """Run a CLI task on config text and return the parsed JSON report."""
    return json.loads(_run_task_json(task, config))


__all__ = [
    "ConfigError",
    "DomainError",
    "GeometryError",
    "NumericError",
    "Phi",
    "RefinementError",
    "ball_capacity",
    "ball_capacity_bounds",
    "run_task",
    "run_task_artifacts",
    "sha256",
]
