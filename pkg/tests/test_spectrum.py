"""Tests for dispersion, band scanning, edge classes and group velocity."""

import math
import warnings

import numpy as np
import pytest

import slab_scatter
from slab_scatter.config import config
from slab_scatter.exceptions import (
    AccuracyError,
    ClassificationError,
    DomainError,
    NearEdgeError,
    UnderResolutionWarning,
)
from slab_scatter.potentials import make_alternating_delta_comb, make_single_delta_comb
from slab_scatter.spectrum import (
    EdgeKind,
    Regime,
    band_of,
    bloch_k,
    classify_edge,
    degenerate_edge_velocity,
    discriminant,
    dispersion,
    find_bands,
    group_velocity,
    weyl_functions,
)
from slab_scatter.transfer import monodromy


def test_free_medium_dispersion_is_identity(free_spec):
    omegas = np.linspace(0.5, 9.0, 60)
    samples = dispersion(free_spec, omegas)
    ks = np.array([s.k.real for s in samples])
    np.testing.assert_allclose(ks, omegas, atol=1e-9)


def test_free_medium_has_one_open_band(free_spec):
    bands = find_bands(free_spec, 0.5, 9.0)
    assert len(bands) == 1
    assert bands[0].lo_class is EdgeKind.OPEN
    assert bands[0].hi_class is EdgeKind.OPEN


def test_bloch_k_regimes(single_comb):
    assert bloch_k(2.0, single_comb).regime is Regime.GAP
    assert bloch_k(3.08, single_comb).regime is Regime.BAND
    edge = bloch_k(math.pi, single_comb)
    assert edge.regime is Regime.EDGE
    assert edge.mu == -1


def test_gap_branch_decays(single_comb):
    sample = bloch_k(2.0, single_comb)
    assert abs(sample.mu) < 1.0
    assert sample.k.imag > 0
    assert math.cos(sample.k.real) * math.cosh(sample.k.imag) == pytest.approx(sample.F.real, rel=1e-10)


def test_band_phase_satisfies_cos_k_equals_f(single_comb):
    sample = bloch_k(3.08, single_comb)
    assert sample.k.imag == 0
    assert math.cos(sample.k.real) == pytest.approx(sample.F.real, abs=1e-12)


def test_complex_frequency_picks_decaying_root(alternating_comb):
    sample = bloch_k(2.5 + 0.05j, alternating_comb)
    assert abs(sample.mu) < 1.0


def test_lower_half_plane_rejected(single_comb):
    with pytest.raises(DomainError):
        bloch_k(2.0 - 0.1j, single_comb)


def test_single_comb_bands(single_comb):
    bands = find_bands(single_comb, 0.1, 10.0)
    assert len(bands) == 3
    assert [b.index for b in bands] == [1, 2, 3]
    for n, band in enumerate(bands, start=1):
        assert band.hi == pytest.approx(n * math.pi, abs=1e-9)
        assert band.lo_class is EdgeKind.NONDEGENERATE
        assert band.hi_class is EdgeKind.NONDEGENERATE
    assert bands[0].lo == pytest.approx(3.0207, abs=1e-3)


def test_first_index_offsets_numbering(single_comb):
    bands = find_bands(single_comb, 2.9, 3.5, first_index=4)
    assert bands[0].index == 4


def test_alternating_comb_degenerate_touching(alternating_comb):
    bands = find_bands(alternating_comb, 2.0, 4.5)
    assert len(bands) == 2
    assert bands[0].hi == pytest.approx(math.pi, abs=1e-7)
    assert bands[1].lo == pytest.approx(math.pi, abs=1e-7)
    assert bands[0].hi_class is EdgeKind.DEGENERATE
    assert bands[1].lo_class is EdgeKind.DEGENERATE
    assert bands[0].lo_class is EdgeKind.NONDEGENERATE
    assert bands[1].hi_class is EdgeKind.NONDEGENERATE


def test_band_cut_by_window_is_open(single_comb):
    bands = find_bands(single_comb, 3.05, 3.5)
    assert bands[0].lo_class is EdgeKind.OPEN
    assert bands[0].hi_class is EdgeKind.NONDEGENERATE


def test_coarse_grid_warns_about_under_resolution():
    spec = make_single_delta_comb(5000.0, 1.0)
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always")
        find_bands(spec, 0.1, 40.0, grid=20)
    assert any(issubclass(w.category, UnderResolutionWarning) for w in caught)


@pytest.mark.parametrize("lo, hi, grid", [(0.0, 1.0, 100), (2.0, 1.0, 100), (1.0, 2.0, 1)])
def test_find_bands_rejects_bad_ranges(single_comb, lo, hi, grid):
    with pytest.raises(DomainError):
        find_bands(single_comb, lo, hi, grid)


def test_classify_edges(single_comb, alternating_comb):
    assert classify_edge(single_comb, math.pi).kind is EdgeKind.NONDEGENERATE
    degenerate = classify_edge(alternating_comb, math.pi)
    assert degenerate.kind is EdgeKind.DEGENERATE
    assert degenerate.identity_sign == 1
    assert degenerate.curvature_opposes
    with pytest.raises(DomainError):
        classify_edge(single_comb, 2.0)


def test_group_velocity_free_medium(free_spec):
    assert group_velocity(1.3, free_spec).V_g == pytest.approx(1.0, abs=1e-8)
    assert group_velocity(4.0, free_spec).V_g == pytest.approx(1.0, abs=1e-8)


def test_group_velocity_in_narrow_band_is_small(single_comb):
    sample = group_velocity(3.08, single_comb)
    assert 0 < sample.V_g <= 2.0 * math.pi / 100.0 * 1.05


def test_group_velocity_guards(single_comb):
    with pytest.raises(DomainError):
        group_velocity(2.0, single_comb)
    with pytest.raises(NearEdgeError):
        group_velocity(math.pi, single_comb)


@pytest.mark.parametrize("A", [50.0, 100.0])
def test_degenerate_edge_velocity(A):
    spec = make_alternating_delta_comb(A, 1.0)
    expected = 2.0 / math.sqrt(4.0 + A * A / math.pi**2)
    assert degenerate_edge_velocity(spec, math.pi) == pytest.approx(expected, rel=1e-3)


def test_degenerate_edge_velocity_rejects_plain_edge(single_comb):
    with pytest.raises(ClassificationError):
        degenerate_edge_velocity(single_comb, math.pi)


def test_weyl_functions_are_eigenvector_slopes(single_comb):
    w = 2.0 + 0.1j
    m_plus, m_minus = weyl_functions(w, single_comb)
    assert m_plus != pytest.approx(m_minus)
    M = monodromy(w, single_comb)
    mu = complex(np.exp(1j * bloch_k(w, single_comb).k))
    assert M.a + M.b * m_plus == pytest.approx(mu, rel=1e-8)


def test_band_of(single_comb):
    bands = find_bands(single_comb, 0.1, 10.0)
    assert band_of(bands, 3.08).index == 1
    assert band_of(bands, 2.0) is None


def test_discriminant_matches_closed_form(single_comb):
    w = 7.7
    assert discriminant(w, single_comb).real == pytest.approx(math.cos(w) + 50.0 * math.sin(w) / w, rel=1e-12)


def test_weyl_representations_disagreeing_beyond_tolerance_raise(single_comb):
    with config.overridden({"spectrum.weyl_tol": -1.0}):
        with pytest.raises(AccuracyError):
            weyl_functions(2.0 + 0.1j, single_comb)


def test_bloch_phase_is_monotone_inside_a_band(single_comb):
    band = find_bands(single_comb, 0.1, 4.0)[0]
    pad = 1e-3 * band.width
    omegas = np.linspace(band.lo + pad, band.hi - pad, 200)
    ks = np.array([s.k.real for s in dispersion(single_comb, omegas)])
    steps = np.diff(ks)
    assert np.all(steps > 0) or np.all(steps < 0)
    assert abs(ks[-1] - ks[0]) == pytest.approx(math.pi, abs=0.2)


def test_edge_classes_survive_halving_the_derivative_step(single_comb, alternating_comb):
    edges = [(single_comb, e) for b in find_bands(single_comb, 0.1, 10.0) for e in (b.lo, b.hi)]
    edges.append((alternating_comb, math.pi))
    base = [classify_edge(spec, omega) for spec, omega in edges]
    with config.overridden({"spectrum.richardson_step": 0.5e-4}):
        halved = [classify_edge(spec, omega) for spec, omega in edges]
    for before, after in zip(base, halved):
        assert after.kind is before.kind
        assert after.F_double_prime == pytest.approx(before.F_double_prime, rel=1e-4)


def test_huge_discriminant_stays_warning_free():
    spec = make_single_delta_comb(1e200, 1.0)
    with warnings.catch_warnings():
        warnings.simplefilter("error")
        sample = bloch_k(2.0, spec)
    assert sample.regime is Regime.GAP
    assert 0 < sample.mu.real < 1e-150
    assert sample.k.imag == pytest.approx(math.log(2.0 * sample.F.real), rel=1e-12)


def test_package_exports_edge_and_weyl_helpers():
    assert slab_scatter.weyl_functions is weyl_functions
    assert slab_scatter.degenerate_edge_velocity is degenerate_edge_velocity
    assert {"weyl_functions", "degenerate_edge_velocity"} <= set(slab_scatter.__all__)
