"""Tests for the leapfrog pulse simulation and the frequency-domain prediction.

Grids are kept small; desk-scale runs are marked slow.
"""

import math
from dataclasses import replace

import numpy as np
import pytest

from slab_scatter.config import config
from slab_scatter.exceptions import ConfigurationError, StabilityError
from slab_scatter.timedomain import (
    FieldState,
    PulseConfig,
    build_grid,
    envelope,
    freq_domain_oracle,
    make_initial_pulse,
    pulse_config_from_dict,
    pulse_energy,
    read_snapshot,
    reverse,
    run,
    step,
    total_energy,
    write_snapshot,
)


@pytest.fixture
def free_pulse() -> PulseConfig:
    return PulseConfig(amplitude=0.0, periods=1, width=20.0, cells_per_period=32, margin=2.0, record_every=20)


@pytest.fixture
def comb_pulse() -> PulseConfig:
    return PulseConfig(amplitude=20.0, periods=3, width=10.0, cells_per_period=32, margin=2.0, record_every=20)


def test_envelope_shape():
    assert envelope(-0.5) == pytest.approx(1.0)
    np.testing.assert_array_equal(envelope(np.array([-1.0, 0.0, 0.3, -1.7])), 0.0)
    assert 0 < envelope(-0.1) < 1


def test_desk_scale_defaults():
    cfg = PulseConfig.desk_scale(100.0)
    assert cfg.periods == 7
    assert cfg.width == pytest.approx(100.0**1.2)
    assert cfg.omega0 == pytest.approx(math.pi * (1.0 - 2.0 / 100.0))
    assert cfg.transit_time == pytest.approx(100.0 * 7 / (2.0 * math.pi))
    assert cfg.resolved_t_end == pytest.approx(cfg.width + 1.5 * cfg.transit_time + 7.0)


def test_free_medium_carrier(free_pulse):
    assert free_pulse.omega0 == pytest.approx(math.pi)
    assert free_pulse.transit_time == 1.0
    assert free_pulse.spec().is_free


@pytest.mark.parametrize(
    "overrides",
    [
        {"amplitude": -1.0},
        {"periods": 0},
        {"width": 0.0},
        {"theta": 0.0},
        {"theta": 4.0},
        {"cells_per_period": 1},
        {"amplitude": 1.0, "theta": 2.0},
        {"t_end": -1.0},
        {"record_every": 0},
    ],
)
def test_pulse_config_validation(overrides):
    values = {"amplitude": 100.0, "periods": 7, "width": 50.0}
    values.update(overrides)
    with pytest.raises(ConfigurationError):
        PulseConfig(**values)


def test_pulse_config_from_dict():
    cfg = pulse_config_from_dict({"amplitude": 100, "periods": 5, "cells_per_period": 16})
    assert cfg.width == pytest.approx(100.0**1.2)
    assert cfg.cells_per_period == 16
    with pytest.raises(ConfigurationError):
        pulse_config_from_dict({"periods": 5})
    with pytest.raises(ConfigurationError):
        pulse_config_from_dict({"amplitude": 100, "periods": 5, "colour": "red"})


def test_grid_places_deltas_on_nodes(comb_pulse):
    grid = build_grid(comb_pulse)
    assert grid.x[grid.origin] == 0.0
    np.testing.assert_allclose(grid.x[grid.delta_nodes], [0.0, 1.0, 2.0], atol=1e-12)
    assert grid.x[grid.slab_end] == pytest.approx(3.0)
    assert grid.dt < grid.h


def test_initial_pulse_sits_left_of_slab(comb_pulse):
    state = make_initial_pulse(comb_pulse)
    grid = build_grid(comb_pulse)
    assert np.all(state.current[grid.origin :] == 0)
    assert np.max(np.abs(state.current)) > 0


def test_initial_discrete_energy_matches_exact(free_pulse):
    snapshot = total_energy(make_initial_pulse(free_pulse), free_pulse)
    assert snapshot.total == pytest.approx(pulse_energy(free_pulse), rel=1e-2)
    assert snapshot.right == 0.0


def test_free_pulse_passes_through(free_pulse):
    report = run(free_pulse)
    assert report.drift < 1e-2
    assert report.fractions()["transmitted"] > 0.999
    summary = report.summary()
    assert summary["transmitted_fraction"] == pytest.approx(report.fractions()["transmitted"])
    assert summary["omega0"] == pytest.approx(math.pi)


def test_comb_reflects_most_energy(comb_pulse):
    report = run(comb_pulse)
    assert report.drift < 1e-2
    fractions = report.fractions()
    assert sum(fractions.values()) == pytest.approx(1.0)
    assert fractions["reflected"] > 0.5
    assert report.times[0] == 0.0
    assert report.times[-1] == pytest.approx(report.final_state.t)
    assert len(report.rows()) == len(report.times)


def test_oracle_in_free_medium_recovers_pulse_energy(free_pulse):
    assert freq_domain_oracle(free_pulse) == pytest.approx(pulse_energy(free_pulse), rel=1e-2)


def test_reverse_retraces_the_run(free_pulse):
    start = make_initial_pulse(free_pulse)
    state = start
    for _ in range(50):
        state = step(state, free_pulse)
    state = reverse(state)
    for _ in range(49):
        state = step(state, free_pulse)
    assert state.t == pytest.approx(0.0, abs=1e-12)
    np.testing.assert_allclose(state.current, start.current, atol=1e-9 * np.max(np.abs(start.current)))


def test_courant_violation_is_detected(free_pulse):
    with config.overridden({"timedomain.courant": 1.5}):
        with pytest.raises(StabilityError) as excinfo:
            run(free_pulse)
    assert "dt <=" in excinfo.value.bound


def test_snapshot_file(tmp_path, comb_pulse):
    state = make_initial_pulse(comb_pulse)
    path = tmp_path / "field.bin"
    write_snapshot(str(path), state, comb_pulse.h)
    values, h, t = read_snapshot(str(path))
    np.testing.assert_array_equal(values, state.current)
    assert h == comb_pulse.h
    assert t == 0.0


def test_truncated_snapshot_rejected(tmp_path, comb_pulse):
    path = tmp_path / "field.bin"
    write_snapshot(str(path), make_initial_pulse(comb_pulse), comb_pulse.h)
    data = path.read_bytes()
    path.write_bytes(data[:-16])
    with pytest.raises(ConfigurationError):
        read_snapshot(str(path))


@pytest.mark.parametrize("cells", [16, 32, 64])
def test_comb_energy_is_conserved_at_every_resolution(cells):
    cfg = PulseConfig(amplitude=50.0, periods=3, width=20.0, cells_per_period=cells, margin=2.0, record_every=20)
    report = run(cfg, reference=False)
    assert report.drift < 1e-8


def test_reflected_fraction_is_stable_under_grid_halving(comb_pulse):
    coarse = run(comb_pulse, reference=False).fractions()
    fine = run(replace(comb_pulse, cells_per_period=64), reference=False).fractions()
    assert fine["reflected"] == pytest.approx(coarse["reflected"], abs=2e-2)
    assert fine["transmitted"] == pytest.approx(coarse["transmitted"], abs=2e-2)


def test_manual_stepping_past_the_courant_bound_is_detected(free_pulse):
    with config.overridden({"timedomain.courant": 1.5}):
        state = make_initial_pulse(free_pulse)
        with pytest.raises(StabilityError) as excinfo:
            for _ in range(1000):
                state = step(state, free_pulse)
    assert "dt <=" in excinfo.value.bound


def test_growth_check_compares_checkpoints(free_pulse):
    state = make_initial_pulse(free_pulse)
    with config.overridden({"timedomain.growth_limit": 0.5, "timedomain.check_every": 10}):
        for _ in range(9):
            state = step(state, free_pulse)
        with pytest.raises(StabilityError):
            step(state, free_pulse)


def test_step_is_linear(comb_pulse, rng):
    pulse = make_initial_pulse(comb_pulse)
    size = pulse.current.size
    noise = FieldState(
        previous=rng.normal(size=size) + 1j * rng.normal(size=size),
        current=rng.normal(size=size) + 1j * rng.normal(size=size),
        t=0.0,
        dt=pulse.dt,
    )
    a, b = 0.7 - 0.2j, -1.3
    combined = FieldState(
        previous=a * pulse.previous + b * noise.previous,
        current=a * pulse.current + b * noise.current,
        t=0.0,
        dt=pulse.dt,
    )
    expected = a * step(pulse, comb_pulse).current + b * step(noise, comb_pulse).current
    np.testing.assert_allclose(step(combined, comb_pulse).current, expected, rtol=0, atol=1e-12)


def test_step_moves_the_front_one_node(comb_pulse, rng):
    grid = build_grid(comb_pulse)
    size = grid.x.size
    front = grid.origin + 5
    previous = np.zeros(size, dtype=complex)
    current = np.zeros(size, dtype=complex)
    previous[1:front] = rng.normal(size=front - 1)
    current[1 : front + 1] = rng.normal(size=front)
    new = step(FieldState(previous=previous, current=current, t=0.0, dt=grid.dt), comb_pulse).current
    assert np.all(new[front + 2 :] == 0)
    assert new[front + 1] != 0


def test_single_delta_splits_energy_like_its_reflection_coefficient():
    A = 20.0
    cfg = PulseConfig(amplitude=A, periods=1, width=30.0, cells_per_period=32, margin=2.0, record_every=50)
    fractions = run(cfg, reference=False).fractions()
    w = cfg.omega0
    reflectance = A**2 / (4.0 * w**2 + A**2)
    assert fractions["reflected"] == pytest.approx(reflectance, rel=5e-2)
    assert fractions["transmitted"] == pytest.approx(1.0 - reflectance, rel=5e-2)


def test_transmitted_energy_matches_frequency_domain_prediction(comb_pulse):
    report = run(comb_pulse, reference=False)
    final = report.snapshot()
    predicted = freq_domain_oracle(comb_pulse, t=final.t) / report.initial_energy
    assert final.right / final.total == pytest.approx(predicted, rel=0.1, abs=5e-3)


@pytest.mark.slow
def test_desk_scale_runs_conserve_energy_and_scale_as_inverse_square():
    fractions = {}
    for A in (50.0, 100.0):
        cfg = PulseConfig.desk_scale(A, cells_per_period=64, record_every=50)
        report = run(cfg, reference=False)
        assert report.drift < 1e-3
        final = report.snapshot()
        fractions[A] = final.right / final.total
    predicted = freq_domain_oracle(cfg, t=final.t) / report.initial_energy
    assert fractions[100.0] == pytest.approx(predicted, rel=0.1)
    assert 2.8 <= fractions[50.0] / fractions[100.0] <= 5.7
