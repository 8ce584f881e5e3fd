"""Potential-theory experiments: Leja points, orthogonal polynomials, capacity."""

import json

from ._core import (
    ConfigError,
    PairingFailure,
    PotlabError,
    StressFailure,
    circle_potential_gap,
    leja_points,
    segment_potential_gap,
)
from . import _core

__all__ = [
    "ConfigError",
    "PairingFailure",
    "PotlabError",
    "StressFailure",
    "capacity",
    "circle_potential_gap",
    "leja_points",
    "run_experiment",
    "segment_potential_gap",
]


def run_experiment(name, **config):
    """Run an experiment; returns (summary dict, {file name: text})."""
    summary, files = _core.run_experiment(name, json.dumps(config))
    return json.loads(summary), dict(files)


def capacity(region, n=64):
    """Capacity report for a region given as a dict, e.g. {"kind": "disk", "r": 1}."""
    return json.loads(_core.capacity(json.dumps(region), n))
