"""Built-in acceptance suite run by ``slab-scatter verify``.

Each criterion returns ``(passed, measured, bound)``. Wall-clock limits are
reported next to the measured time but never fail a criterion.
"""

import math
import time
import warnings
from dataclasses import dataclass, field
from typing import Any, Callable, Dict, Iterable, List, Optional, Tuple

import numpy as np
from scipy.optimize import brentq

from ..config import config
from ..exceptions import SlabScatterError
from ..logger import get_logger
from ..potentials import (
    DeltaTerm,
    PotentialSpec,
    SmoothPiece,
    make_alternating_delta_comb,
    make_constant_pieces,
    make_scaled_smooth,
    make_single_delta_comb,
)
from ..scattering import (
    gap_decay_fit,
    reflection_convergence,
    reflection_formula,
    scatter_direct,
    scatter_semi_infinite,
    transmittance_formula,
    transparency_points,
)
from ..spectrum import (
    EdgeKind,
    Regime,
    bloch_k,
    degenerate_edge_velocity,
    discriminant,
    find_bands,
    group_velocity,
)
from ..timedomain import PulseConfig, freq_domain_oracle, run
from ..transfer import monodromy, monodromy_power, repeated_product
from ..utils import log_log_slope
from .profiles import ConstProfile, PolyProfile

logger = get_logger(__name__)

Outcome = Tuple[bool, Dict[str, Any], Dict[str, Any]]


@dataclass
class CriterionResult:
    id: int
    name: str
    passed: bool
    measured: Dict[str, Any] = field(default_factory=dict)
    bound: Dict[str, Any] = field(default_factory=dict)
    seconds: float = 0.0
    time_limit: float = 0.0
    error: Optional[str] = None

    def as_dict(self) -> Dict[str, Any]:
        return {
            "id": self.id,
            "name": self.name,
            "passed": self.passed,
            "measured": self.measured,
            "bound": self.bound,
            "seconds": self.seconds,
            "time_limit": self.time_limit,
            "error": self.error,
        }


def _first_band(spec: PotentialSpec, lo: float, hi: float, grid: int = 400):
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        bands = [b for b in find_bands(spec, lo, hi, grid) if b.lo_class is not EdgeKind.OPEN and b.hi_class is not EdgeKind.OPEN]
    if not bands:
        raise SlabScatterError(f"No complete band in ({lo}, {hi})")
    return bands[0]


class AcceptanceSuite:
    """Desk-scale checks of the band, scattering and pulse laws."""

    def __init__(self, seed: int = 0, quick: bool = False) -> None:
        self.seed = seed
        self.quick = quick

    def _rng(self, criterion: int) -> np.random.Generator:
        return np.random.default_rng([self.seed, criterion])

    def _count(self, full: int, quick: int) -> int:
        return quick if self.quick else full

    def _random_spec(self, rng: np.random.Generator, smooth: bool = True) -> PotentialSpec:
        kinds = ["single", "alternating", "constant"] + (["poly"] if smooth else [])
        weights = [0.35, 0.35, 0.28, 0.02] if smooth else [0.4, 0.4, 0.2]
        kind = rng.choice(kinds, p=weights)
        if kind == "single":
            return make_single_delta_comb(float(rng.uniform(1.0, 200.0)) * rng.choice([-1.0, 1.0]), float(rng.uniform(0.5, 2.0)))
        if kind == "alternating":
            return make_alternating_delta_comb(float(rng.uniform(1.0, 50.0)), float(rng.uniform(0.25, 1.0)))
        L = float(rng.uniform(0.5, 1.5))
        if kind == "constant":
            split = float(rng.uniform(0.2, 0.8)) * L
            levels = [(0.0, split, float(rng.uniform(-1.0, 1.0))), (split, L, float(rng.uniform(-1.0, 1.0)))]
            spec = make_constant_pieces(levels, float(rng.uniform(1.0, 20.0)), L)
            if rng.uniform() < 0.5:
                # Mixed spec: a delta on the boundary between the two levels.
                return PotentialSpec(L, spec.amplitude, (DeltaTerm(split, float(rng.choice([-1.0, 1.0]))),), spec.smooth)
            return spec
        coefficients = tuple(float(c) for c in rng.uniform(-1.0, 1.0, size=3))
        return make_scaled_smooth([SmoothPiece(0.0, L, PolyProfile(coefficients))], float(rng.uniform(1.0, 5.0)), L)

    def check_determinant(self) -> Outcome:
        rng = self._rng(1)
        worst = 0.0
        samples = self._count(10_000, 500)
        with config.overridden({"transfer.ode_rtol": 1e-12, "transfer.ode_atol": 1e-14}):
            for _ in range(samples):
                spec = self._random_spec(rng)
                omega = float(rng.uniform(1.0, 20.0))
                worst = max(worst, abs(monodromy(omega, spec).det() - 1.0))
        bound = config.get("verify.det_tol")
        return worst < bound, {"max_det_defect": worst, "samples": samples}, {"max_det_defect": bound}

    def check_chebyshev(self) -> Outcome:
        rng = self._rng(2)
        worst = 0.0
        samples = self._count(1_000, 100)
        for _ in range(samples):
            spec = self._random_spec(rng, smooth=False)
            omega = float(rng.uniform(1.0, 20.0))
            N = int(rng.integers(1, 65))
            M = monodromy(omega, spec)
            fast = monodromy_power(M, M.half_trace(), N)
            slow = repeated_product(M, N)
            scale = max(1.0, slow.max_abs())
            worst = max(worst, float(np.max(np.abs(fast.to_array() - slow.to_array()))) / scale)
        bound = config.get("verify.chebyshev_tol")
        return worst < bound, {"max_relative_error": worst, "samples": samples}, {"max_relative_error": bound}

    def check_formulas(self) -> Outcome:
        rng = self._rng(3)
        samples = self._count(1_000, 100)
        worst_r = worst_t = worst_c = 0.0
        for _ in range(samples):
            spec = self._random_spec(rng, smooth=False)
            omega = float(rng.uniform(0.5, 15.0))
            N = int(rng.integers(1, 65))
            direct = scatter_direct(omega, spec, N)
            worst_r = max(worst_r, abs(reflection_formula(omega, spec, N) - direct.r))
            worst_t = max(worst_t, abs(transmittance_formula(omega, spec, N) - direct.transmittance_hs))
            worst_c = max(worst_c, direct.conservation_defect)
        bounds = {
            "rnr_vs_direct": config.get("verify.rnr_tol"),
            "tnt_vs_hs": config.get("verify.tnt_tol"),
            "conservation": config.get("verify.conservation_tol"),
        }
        measured = {"rnr_vs_direct": worst_r, "tnt_vs_hs": worst_t, "conservation": worst_c, "samples": samples}
        passed = worst_r < bounds["rnr_vs_direct"] and worst_t < bounds["tnt_vs_hs"] and worst_c < bounds["conservation"]
        return passed, measured, bounds

    def check_narrow_band(self) -> Outcome:
        A, L, n = 100.0, 1.0, 1
        band = _first_band(make_single_delta_comb(A, L), 2.0, 3.3)
        eps = brentq(lambda e: math.tan(e / 2.0) - 2.0 * (n * math.pi - e) / (A * L), 1e-9, 1.0, xtol=1e-16, rtol=1e-15)
        exact = (n * math.pi - eps) / L
        x = 4.0 / (A * L)
        first_order = n * math.pi * (1.0 - x) / L
        # The first-order form is off by about 16 n pi / (A^2 L^3).
        second_order = n * math.pi * (1.0 - x + x * x) / L
        measured = {
            "edge": band.lo,
            "root_error": abs(band.lo - exact),
            "first_order_error": abs(band.lo - first_order),
            "second_order_error": abs(band.lo - second_order),
        }
        bounds = {
            "root_error": config.get("verify.edge_ep_tol"),
            "first_order_error": 20.0 * n * math.pi / (A**2 * L**3),
            "second_order_error": 10.0 / A**2,
        }
        passed = all(measured[key] < bounds[key] for key in bounds)
        return passed, measured, bounds

    def check_group_velocity_bound(self) -> Outcome:
        amplitudes = [50.0, 100.0, 200.0]
        L = 1.0
        peaks, ratios = [], []
        margin = config.get("spectrum.interior_margin")
        for A in amplitudes:
            spec = make_single_delta_comb(A, L)
            band = _first_band(spec, 2.0, 3.3)
            best = 0.0
            for omega in np.linspace(band.lo, band.hi, self._count(401, 101))[1:-1]:
                if abs(discriminant(float(omega), spec).real) >= 1.0 - 10.0 * margin:
                    continue
                best = max(best, abs(group_velocity(float(omega), spec).V_g))
            peaks.append(best)
            ratios.append(best / ((2.0 * math.pi / (A * L)) * (1.0 + 5.0 / A)))
        slope = log_log_slope(amplitudes, peaks)
        tol = config.get("verify.vg_slope_tol")
        measured = {"max_vg": peaks, "max_ratio_to_bound": max(ratios), "slope": slope}
        bounds = {"max_ratio_to_bound": 1.0, "slope": -1.0, "slope_tol": tol}
        return max(ratios) <= 1.0 and abs(slope + 1.0) <= tol, measured, bounds

    def check_degenerate_edge(self) -> Outcome:
        l = 1.0
        omega = math.pi / l
        tol = config.get("verify.degenerate_tol")
        spec = make_alternating_delta_comb(100.0, l)
        distance = monodromy(omega, spec).distance_to_identity(1.0)
        reflections = {N: abs(scatter_direct(omega, spec, N).r) for N in (4, 32, 256)}
        amplitudes = [50.0, 100.0, 200.0]
        velocities = [degenerate_edge_velocity(make_alternating_delta_comb(A, l), omega) for A in amplitudes]
        slope = log_log_slope(amplitudes, velocities)
        measured = {"identity_distance": distance, "reflection": reflections, "velocities": velocities, "slope": slope}
        bounds = {"identity_distance": tol, "reflection": tol, "slope": -1.0, "slope_tol": 0.10}
        passed = distance < tol and max(reflections.values()) < tol and abs(slope + 1.0) <= 0.10
        return passed, measured, bounds

    def check_transparency(self) -> Outcome:
        A, N = 100.0, 8
        spec = make_single_delta_comb(A, 1.0)
        band = _first_band(spec, 2.0, 3.3)
        points = transparency_points(spec, band, N)
        peaks = [math.sqrt(p.transmittance) for p in points]
        omegas = [p.omega for p in points]
        valleys = [
            math.sqrt(transmittance_formula(0.5 * (a + b), spec, N)) for a, b in zip(sorted(omegas), sorted(omegas)[1:])
        ]
        measured = {
            "count": len(points),
            "min_peak": min(peaks) if peaks else float("nan"),
            "max_valley": max(valleys) if valleys else float("nan"),
        }
        bounds = {"count": N - 1, "min_peak": 1.0 - 1e-8, "max_valley": 10.0 / A}
        passed = len(points) == N - 1 and min(peaks) > bounds["min_peak"] and max(valleys) < bounds["max_valley"]
        return passed, measured, bounds

    def check_gap_decay(self) -> Outcome:
        spec = make_single_delta_comb(100.0, 1.0)
        with warnings.catch_warnings():
            warnings.simplefilter("ignore")
            bands = [b for b in find_bands(spec, 2.0, 6.5, 800) if b.hi_class is not EdgeKind.OPEN]
        omega = 0.5 * (bands[0].hi + bands[1].lo)
        fit = gap_decay_fit(spec, omega, list(range(4, 65)))
        error = abs(fit.sigma - fit.im_k) / fit.im_k
        tol = config.get("verify.decay_tol")
        return error <= tol, {"omega": omega, "sigma": fit.sigma, "im_k": fit.im_k, "relative_error": error}, {"relative_error": tol}

    def check_edge_law(self) -> Outcome:
        spec = make_single_delta_comb(100.0, 1.0)
        edge = _first_band(spec, 2.0, 3.3).hi
        products = {N: N * math.sqrt(transmittance_formula(edge, spec, N)) for N in (16, 64, 256, 1024)}
        spread = max(products.values()) / min(products.values())
        return spread < 2.0, {"edge": edge, "N_times_t": products, "spread": spread}, {"spread": 2.0}

    def check_semi_infinite(self) -> Outcome:
        spec = make_single_delta_comb(10.0, 1.0)
        band = _first_band(spec, 0.5, 3.3)
        centre = brentq(lambda w: discriminant(w, spec).real, band.lo, band.hi)
        distances = [d for _, d in reflection_convergence(spec, complex(centre, 0.01), list(range(10, 90, 10)))]
        ratios = [b / a for a, b in zip(distances, distances[1:])]

        amplitudes = [50.0, 100.0, 200.0]
        l = 1.0
        scaled = []
        for A in amplitudes:
            alternating = make_alternating_delta_comb(A, l)
            omega = math.pi / l + 0.5 / A**2
            scaled.append(abs(scatter_semi_infinite(omega, alternating).r + 1.0) * A)
        spread = max(scaled) / min(scaled)

        limit = config.get("verify.geometric_ratio")
        measured = {"convergence_ratios": ratios, "scaled_defects": scaled, "spread": spread}
        bounds = {"convergence_ratio": limit, "spread": 3.0}
        return max(ratios) < limit and spread < 3.0, measured, bounds

    def check_pulse(self) -> Outcome:
        cells = self._count(64, 32)
        fractions, oracle_errors, drifts, pre = {}, {}, {}, {}
        for A in (50.0, 100.0):
            cfg = PulseConfig.desk_scale(A, cells_per_period=cells, record_every=20)
            report = run(cfg)
            final = report.snapshot()
            predicted = freq_domain_oracle(cfg, t=final.t) / report.initial_energy
            fractions[A] = final.right / final.total
            oracle_errors[A] = abs(fractions[A] - predicted) / predicted
            drifts[A] = report.drift
            early = report.energy_at(0.5 * cfg.transit_time)
            pre[A] = early.right / early.total
        ratio = fractions[50.0] / fractions[100.0]
        bounds = {
            "drift": config.get("verify.drift_tol"),
            "oracle_relative_error": config.get("verify.oracle_rel_tol"),
            "ratio_range": [2.8, 5.7],
            "pre_transit_fraction": 1e-5,
        }
        measured = {
            "transmitted_fraction": fractions,
            "oracle_relative_error": oracle_errors,
            "drift": drifts,
            "ratio": ratio,
            "pre_transit_fraction": pre,
            "cells_per_period": cells,
        }
        passed = (
            max(drifts.values()) < bounds["drift"]
            and oracle_errors[100.0] < bounds["oracle_relative_error"]
            and 2.8 <= ratio <= 5.7
            and pre[100.0] < bounds["pre_transit_fraction"]
        )
        return passed, measured, bounds

    def check_wkb_trends(self) -> Outcome:
        L, omega = 1.0, 3.0
        barrier = [SmoothPiece(0.0, L, ConstProfile(1.0))]
        barrier_regimes = {A: bloch_k(omega, make_scaled_smooth(barrier, A, L)).regime.value for A in (4.0, 25.0, 100.0, 400.0)}
        gap_from = [A for A, regime in barrier_regimes.items() if regime == Regime.GAP.value]
        barrier_ok = bool(gap_from) and all(barrier_regimes[A] == Regime.GAP.value for A in barrier_regimes if A >= min(gap_from))

        well = [SmoothPiece(0.0, L, ConstProfile(-1.0))]
        velocities = [group_velocity(omega, make_scaled_smooth(well, A, L)).V_g for A in (25.0, 100.0, 400.0)]
        well_ok = all(b > a for a, b in zip(velocities, velocities[1:]))

        sign_changing = make_constant_pieces([(0.0, 0.5, 1.0), (0.5, 1.0, -1.0)], 400.0, L)
        with warnings.catch_warnings():
            warnings.simplefilter("ignore")
            bands = find_bands(sign_changing, 0.1, 4.0 * math.pi, self._count(2000, 500))
        degenerate = sum(1 for b in bands for kind in (b.lo_class, b.hi_class) if kind is EdgeKind.DEGENERATE)

        measured = {
            "barrier_regimes": barrier_regimes,
            "well_velocities": velocities,
            "sign_changing_degenerate_edges": degenerate,
        }
        bounds = {"barrier": "gap beyond threshold", "well": "increasing", "sign_changing_degenerate_edges": 0}
        return barrier_ok and well_ok and degenerate == 0, measured, bounds

    def criteria(self) -> List[Tuple[int, str, float, Callable[[], Outcome]]]:
        return [
            (1, "determinant law", 30.0, self.check_determinant),
            (2, "Chebyshev power identity", 10.0, self.check_chebyshev),
            (3, "formula cross-validation", 10.0, self.check_formulas),
            (4, "narrow-band edge asymptotics", 1.0, self.check_narrow_band),
            (5, "group-velocity bound", 5.0, self.check_group_velocity_bound),
            (6, "degenerate edge", 5.0, self.check_degenerate_edge),
            (7, "transparency points", 5.0, self.check_transparency),
            (8, "gap decay", 5.0, self.check_gap_decay),
            (9, "non-degenerate edge law", 5.0, self.check_edge_law),
            (10, "semi-infinite limit", 5.0, self.check_semi_infinite),
            (11, "time-domain energy split", 300.0, self.check_pulse),
            (12, "strong-potential trends", 30.0, self.check_wkb_trends),
        ]

    def run(self, only: Optional[Iterable[int]] = None) -> List[CriterionResult]:
        """Run the selected criteria; a failing criterion never stops the others."""
        wanted = set(only) if only else None
        results = []
        for number, name, limit, check in self.criteria():
            if wanted is not None and number not in wanted:
                continue
            started = time.perf_counter()
            try:
                passed, measured, bound = check()
                error = None
            except (SlabScatterError, ArithmeticError, ValueError) as e:
                passed, measured, bound, error = False, {}, {}, f"{type(e).__name__}: {str(e)}"
            seconds = time.perf_counter() - started
            result = CriterionResult(number, name, bool(passed), measured, bound, seconds, limit, error)
            logger.info(f"Criterion {number} ({name}): {'pass' if passed else 'FAIL'} in {seconds:.2f}s")
            results.append(result)
        return results

    def report(self, results: List[CriterionResult]) -> Dict[str, Any]:
        return {
            "seed": self.seed,
            "quick": self.quick,
            "passed": all(r.passed for r in results),
            "criteria": [r.as_dict() for r in results],
        }
