"""Tests for namespaced configuration resolution."""

import pytest

from slab_scatter.config import DEFAULTS, Config, config
from slab_scatter.exceptions import ConfigurationError


def test_defaults():
    assert config.get("transfer.det_tol") == DEFAULTS["transfer.det_tol"]
    assert config.get("spectrum.nudges") == (1e-4, 1e-6, 1e-8)


def test_env_name():
    assert Config.env_name("transfer.det_tol") == "SCATTER_TRANSFER_DET_TOL"


def test_environment_overrides_default(monkeypatch):
    monkeypatch.setenv("SCATTER_TRANSFER_DET_TOL", "1e-12")
    monkeypatch.setenv("SCATTER_SPECTRUM_NUDGES", "1e-3, 1e-5")
    assert config.get("transfer.det_tol") == 1e-12
    assert config.get("spectrum.nudges") == (1e-3, 1e-5)


def test_explicit_override_beats_environment(monkeypatch):
    monkeypatch.setenv("SCATTER_TIMEDOMAIN_COURANT", "0.5")
    config.set("timedomain.courant", "0.7")
    assert config.get("timedomain.courant") == 0.7


def test_integer_keys_are_coerced():
    config.set("transfer.ode_retries", "5")
    assert config.get("transfer.ode_retries") == 5
    assert isinstance(config.get("transfer.ode_retries"), int)


def test_overridden_restores_previous_values():
    config.set("spectrum.edge_tol", 1e-8)
    with config.overridden({"spectrum.edge_tol": 1e-12, "verify.det_tol": "1e-6"}):
        assert config.get("spectrum.edge_tol") == 1e-12
        assert config.get("verify.det_tol") == 1e-6
    assert config.get("spectrum.edge_tol") == 1e-8
    assert config.get("verify.det_tol") == DEFAULTS["verify.det_tol"]


def test_overridden_restores_after_error():
    with pytest.raises(RuntimeError):
        with config.overridden({"spectrum.edge_tol": 1e-12}):
            raise RuntimeError("boom")
    assert config.get("spectrum.edge_tol") == DEFAULTS["spectrum.edge_tol"]


def test_unknown_key():
    with pytest.raises(ConfigurationError):
        config.get("transfer.nope")
    with pytest.raises(ConfigurationError):
        config.set("nope", 1.0)


@pytest.mark.parametrize("key, raw", [("transfer.det_tol", "tiny"), ("transfer.ode_retries", "2.5")])
def test_unparseable_value(key, raw):
    with pytest.raises(ConfigurationError):
        config.set(key, raw)


def test_bad_environment_value(monkeypatch):
    monkeypatch.setenv("SCATTER_VERIFY_DRIFT_TOL", "lots")
    with pytest.raises(ConfigurationError):
        config.get("verify.drift_tol")


def test_as_dict_lists_every_key():
    assert set(config.as_dict()) == set(DEFAULTS)
