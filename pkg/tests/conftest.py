"""Pytest configuration and fixtures."""
import json
import math

import pytest

from src.grid.lattice import EpsGrid
from src.models.base import Box
from src.models.exponential import BernoulliNatural, GaussianLocation
from src.models.location import LaplaceLocation


@pytest.fixture
def gaussian():
    """Fixture for the one-dimensional Gaussian location family."""
    return GaussianLocation(1)


@pytest.fixture
def laplace():
    """Fixture for the one-dimensional Laplace location family."""
    return LaplaceLocation(1)


@pytest.fixture
def bernoulli():
    """Fixture for the Bernoulli natural-parameter family."""
    return BernoulliNatural(1)


@pytest.fixture
def unit_grid():
    """Fixture for the grid 0.1 Z within [-1, 1] (21 points)."""
    return EpsGrid.create(0.0, 0.1, Box.cube(1, -1.0, 1.0))


@pytest.fixture
def sqrt_rule_grid():
    """Fixture for the eps = sqrt(2/100) grid within [-3, 3]."""
    return EpsGrid.create(0.0, math.sqrt(2.0 / 100), Box.cube(1, -3.0, 3.0))


@pytest.fixture
def experiment_payload():
    """Fixture for a small, valid Gaussian experiment description."""
    return {
        "family": "gaussian",
        "dim": 1,
        "theta_star": [0.0],
        "grid": {"eps_rule": "sqrt(2/n)", "lower": [-3.0], "upper": [3.0]},
        "n": [100],
        "reps": 50,
        "seed": 7,
        "decay_constant": 0.125,
        "certificates": ["gaussian-decay-concrete", "minimax"],
    }


@pytest.fixture
def write_config(tmp_path):
    """Fixture returning a helper that writes a config payload to a JSON file."""
    def _write(payload, name="experiment.json"):
        path = tmp_path / name
        path.write_text(json.dumps(payload), encoding="utf-8")
        return path
    return _write
