"""Tests for propagators, monodromy matrices and Chebyshev powers."""

import math

import numpy as np
import pytest

from slab_scatter.config import config
from slab_scatter.exceptions import DomainError, ScaleExceededError, SingularityError
from slab_scatter.implementations.profiles import PolyProfile
from slab_scatter.potentials import SmoothPiece, make_constant_pieces, make_scaled_smooth
from slab_scatter.transfer import (
    Mat2,
    chebyshev_pair,
    chebyshev_t,
    constant_propagator,
    delta_jump,
    free_propagator,
    hs_excess,
    hs_norm_sq,
    monodromy,
    monodromy_power,
    propagator,
    repeated_product,
    sine_ratio,
    smooth_propagator,
    transfer_over_slab,
)


def assert_mat_close(left: Mat2, right: Mat2, tol: float) -> None:
    np.testing.assert_allclose(left.to_array(), right.to_array(), rtol=0, atol=tol)


def test_free_propagator_is_rotation():
    M = free_propagator(1.3, 0.7)
    assert M.a == pytest.approx(math.cos(0.91))
    assert M.b == pytest.approx(math.sin(0.91))
    assert M.c == pytest.approx(-math.sin(0.91))
    assert M.det() == pytest.approx(1.0)


def test_zero_frequency_is_singular():
    with pytest.raises(SingularityError):
        free_propagator(0.0, 1.0)
    with pytest.raises(SingularityError):
        delta_jump(0.0, 1.0)


def test_negative_length_rejected():
    with pytest.raises(DomainError):
        free_propagator(1.0, -0.1)
    with pytest.raises(DomainError):
        constant_propagator(1.0, 2.0, -0.1)


def test_delta_jump():
    M = delta_jump(2.0, 10.0)
    assert (M.a, M.b, M.c, M.d) == (1.0, 0.0, 5.0, 1.0)


def test_constant_propagator_zero_level_matches_free():
    assert_mat_close(constant_propagator(2.5, 0.0, 0.4), free_propagator(2.5, 0.4), 1e-14)


def test_constant_propagator_at_turning_level():
    # kappa = 0: psi is linear in x.
    M = constant_propagator(2.0, 4.0, 0.3)
    assert_mat_close(M, Mat2(1.0, 0.6, 0.0, 1.0), 1e-14)


@pytest.mark.parametrize("level", [-30.0, 3.0, 50.0])
def test_constant_propagator_is_unimodular(level):
    M = constant_propagator(3.0, level, 0.8)
    assert abs(M.det() - 1.0) < 1e-12 * max(1.0, M.max_abs() ** 2)


def test_constant_piece_closed_form_matches_integration():
    spec = make_constant_pieces([(0.0, 0.5, 1.0), (0.5, 1.0, -1.0)], 20.0, 1.0)
    with config.overridden({"transfer.ode_rtol": 1e-12, "transfer.ode_atol": 1e-14}):
        closed = smooth_propagator(4.0, spec, 0.0, 1.0)
        integrated = smooth_propagator(4.0, spec, 0.0, 1.0, closed_form=False)
    assert_mat_close(closed, integrated, 1e-8)


def test_smooth_propagator_refuses_deltas_and_foreign_intervals(alternating_comb):
    with pytest.raises(DomainError):
        smooth_propagator(2.0, alternating_comb, 0.0, 2.0)
    with pytest.raises(DomainError):
        propagator(2.0, alternating_comb, 0.5, 2.5)


def test_propagator_splits_at_any_point(single_comb):
    whole = propagator(2.7, single_comb, 0.0, 1.0)
    split = propagator(2.7, single_comb, 0.4, 1.0) @ propagator(2.7, single_comb, 0.0, 0.4)
    assert_mat_close(whole, split, 1e-12)


def test_single_comb_monodromy_closed_form(single_comb):
    w = 2.7
    M = monodromy(w, single_comb)
    expected = free_propagator(w, 1.0) @ delta_jump(w, 100.0)
    assert_mat_close(M, expected, 1e-13)
    assert M.half_trace().real == pytest.approx(math.cos(w) + 50.0 * math.sin(w) / w)


def test_alternating_comb_discriminant(alternating_comb):
    w = 2.3
    F = monodromy(w, alternating_comb).half_trace().real
    assert F == pytest.approx(math.cos(2 * w) - (50.0**2 / (2 * w * w)) * math.sin(w) ** 2, rel=1e-12)


def test_alternating_comb_is_identity_at_pi(alternating_comb):
    M = monodromy(math.pi, alternating_comb)
    assert M.distance_to_identity(1.0) < 1e-10


def test_polynomial_piece_is_unimodular():
    spec = make_scaled_smooth([SmoothPiece(0.0, 1.0, PolyProfile((0.0, 0.0, 1.0)))], 5.0, 1.0)
    M = monodromy(3.0, spec)
    assert abs(M.det() - 1.0) < 1e-8


def test_chebyshev_values():
    assert chebyshev_pair(0.3, -1) == (0j, 0j)
    assert chebyshev_pair(0.3, 0) == (1.0, 0.0)
    u2, u1 = chebyshev_pair(0.3, 2)
    assert u1 == pytest.approx(0.6)
    assert u2 == pytest.approx(4 * 0.09 - 1)
    k = math.acos(0.3)
    assert chebyshev_pair(0.3, 9)[0].real == pytest.approx(math.sin(10 * k) / math.sin(k))
    assert chebyshev_t(0.3, 7).real == pytest.approx(math.cos(7 * k))
    assert sine_ratio(k, 10) == pytest.approx(chebyshev_pair(0.3, 9)[0])


def test_chebyshev_at_band_edges_grows_linearly():
    assert chebyshev_pair(1.0, 99)[0] == pytest.approx(100.0)
    assert chebyshev_pair(-1.0, 99)[0] == pytest.approx(-100.0)


def test_chebyshev_rejects_bad_index_and_overflow():
    with pytest.raises(DomainError):
        chebyshev_pair(0.5, -2)
    with pytest.raises(ScaleExceededError):
        chebyshev_pair(1e10, 100)


def test_sine_ratio_at_edge():
    with pytest.raises(SingularityError):
        sine_ratio(0.0, 3)


@pytest.mark.parametrize("N", [1, 2, 7, 30])
def test_chebyshev_power_matches_repeated_product(single_comb, N):
    M = monodromy(3.0, single_comb)
    fast = monodromy_power(M, M.half_trace(), N)
    slow = repeated_product(M, N)
    assert fast.max_abs() == pytest.approx(slow.max_abs(), rel=1e-8)
    np.testing.assert_allclose(fast.to_array(), slow.to_array(), rtol=1e-8, atol=1e-8 * slow.max_abs())


def test_power_rejects_non_unimodular():
    with pytest.raises(DomainError):
        monodromy_power(Mat2(2.0, 0.0, 0.0, 2.0), 2.0, 3)
    with pytest.raises(DomainError):
        monodromy_power(Mat2.identity(), 1.0, 0)


def test_transfer_over_slab_complex_frequency(alternating_comb):
    w = 2.0 + 0.1j
    T = transfer_over_slab(w, alternating_comb, 5)
    assert abs(T.det() - 1.0) < 1e-9 * max(1.0, T.max_abs() ** 2)


def test_hs_excess_matches_norm_for_real_matrix(single_comb):
    M = monodromy(2.1, single_comb)
    assert hs_excess(M).real == pytest.approx(hs_norm_sq(M) - 2.0, rel=1e-10)


@pytest.mark.parametrize(
    "omega, d, expected",
    [
        (math.pi, 1.0, Mat2(-1.0, 0.0, 0.0, -1.0)),
        (1.0, 0.0, Mat2.identity()),
        (math.pi / 2, 1.0, Mat2(0.0, 1.0, -1.0, 0.0)),
    ],
)
def test_free_propagator_examples(omega, d, expected):
    assert_mat_close(free_propagator(omega, d), expected, 1e-15)


@pytest.mark.parametrize("omega, strength, expected", [(1.0, 2.0, Mat2(1.0, 0.0, 2.0, 1.0)), (2.0, 0.0, Mat2.identity())])
def test_delta_jump_examples(omega, strength, expected):
    assert_mat_close(delta_jump(omega, strength), expected, 0.0)


def test_trace_of_power_is_cos_nk(single_comb):
    M = monodromy(3.08, single_comb)
    F = M.half_trace().real
    power = monodromy_power(M, M.half_trace(), 9)
    assert power.half_trace().real == pytest.approx(math.cos(9 * math.acos(F)), abs=1e-8)


@pytest.mark.parametrize("omega", [2.7, 3.0 + 0.2j])
def test_propagator_composes_over_random_splits(alternating_comb, rng, omega):
    pieces = make_constant_pieces([(0.0, 0.3, 1.0), (0.3, 1.0, -0.5)], 6.0, 1.0)
    for spec in (alternating_comb, pieces):
        for _ in range(10):
            x0, s, x1 = np.sort(rng.uniform(0.0, spec.period, 3))
            whole = propagator(omega, spec, x0, x1)
            split = propagator(omega, spec, s, x1) @ propagator(omega, spec, x0, s)
            assert_mat_close(whole, split, 1e-10 * max(1.0, whole.max_abs()))
