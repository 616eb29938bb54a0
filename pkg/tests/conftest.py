"""Shared fixtures for the slab scattering tests."""

import numpy as np
import pytest

from slab_scatter.config import config
from slab_scatter.potentials import PotentialSpec, make_alternating_delta_comb, make_single_delta_comb


@pytest.fixture(autouse=True)
def reset_config():
    """Every test starts from the built-in tolerances."""
    config.reset()
    yield
    config.reset()


@pytest.fixture
def single_comb() -> PotentialSpec:
    return make_single_delta_comb(100.0, 1.0)


@pytest.fixture
def alternating_comb() -> PotentialSpec:
    return make_alternating_delta_comb(50.0, 1.0)


@pytest.fixture
def free_spec() -> PotentialSpec:
    return PotentialSpec(period=1.0)


@pytest.fixture
def rng() -> np.random.Generator:
    return np.random.default_rng(20240611)


def pytest_configure(config):
    config.addinivalue_line("markers", "slow: desk-scale runs; deselect with -m 'not slow'")
