"""
Test configuration and fixtures.
"""

import os

import numpy as np
import pytest
import yaml
from click.testing import CliRunner
from dotenv import load_dotenv

# Load test environment variables
load_dotenv(".env.test")
os.environ.setdefault("LOG_LEVEL", "WARNING")

from phlo.forms.fields import FieldPair, Polynomial, random_field_pair  # noqa: E402
from phlo.models.schemas import GridSpec, PhLOConfig, RunConfig, SweepSpec  # noqa: E402
from phlo.physics.solutions import build_solution  # noqa: E402

TEST_SEED = 20240611


@pytest.fixture
def rng():
    """Seeded generator, fresh per test."""
    return np.random.default_rng(TEST_SEED)


@pytest.fixture
def default_config():
    return PhLOConfig()


@pytest.fixture
def small_config():
    """Default solution on a coarse grid, enough for integral identities."""
    return PhLOConfig(grid=GridSpec(counts=(17, 17, 17), xi_counts=5))


@pytest.fixture
def small_sweep():
    return SweepSpec(field_pairs=2, points=10, bridge_samples=100, solution_points=50)


@pytest.fixture
def small_run(small_config, small_sweep):
    return RunConfig(phlo=small_config, sweep=small_sweep, seed=1234)


@pytest.fixture
def linear_pair():
    """u = xi, p = z, eps = +1."""
    return FieldPair(Polynomial.coordinate(3), Polynomial.coordinate(2), 1)


@pytest.fixture
def random_pair(rng):
    return random_field_pair(rng)


@pytest.fixture
def unit_helix():
    """eps = kappa = l0 = 1 with phi == 1: u = cos(-z), p = sin(-z)."""
    return build_solution(PhLOConfig(), amplitude=Polynomial.constant(1.0))


@pytest.fixture
def small_config_data():
    """Plain-data form of a quick run config."""
    return {
        "seed": 1234,
        "phlo": {"grid": {"counts": [17, 17, 17], "xi_counts": 5}},
        "sweep": {"field_pairs": 2, "points": 10, "bridge_samples": 100, "solution_points": 50},
    }


@pytest.fixture
def write_config(tmp_path):
    """Write a config mapping to a YAML file and return its path."""

    def _write(data, name: str = "config.yaml"):
        path = tmp_path / name
        path.write_text(yaml.safe_dump(data), encoding="utf-8")
        return path

    return _write


@pytest.fixture
def runner():
    """CLI runner keeping log lines on stderr apart from command output."""
    return CliRunner(mix_stderr=False)
