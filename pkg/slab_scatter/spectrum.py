"""Floquet discriminant, Bloch dispersion, band scanning and group velocity."""

import math
import warnings
from dataclasses import dataclass, replace
from enum import Enum
from typing import Iterable, List, Optional, Sequence, Tuple

import numpy as np
from scipy.optimize import bisect, brentq, minimize_scalar

from .config import config
from .exceptions import (
    AccuracyError,
    AmbiguousClassificationError,
    ClassificationError,
    DomainError,
    EdgeSingularityError,
    NearEdgeError,
    ScaleExceededError,
    UnderResolutionWarning,
)
from .logger import get_logger
from .potentials import PotentialSpec
from .transfer import Frequency, Mat2, check_frequency, monodromy
from .utils import parallel_map, richardson_derivative

logger = get_logger(__name__)


class Regime(str, Enum):
    BAND = "band"
    GAP = "gap"
    EDGE = "edge"


class EdgeKind(str, Enum):
    NONDEGENERATE = "nondegenerate"
    DEGENERATE = "degenerate"
    # Band cut off by the scan window rather than by |F| = 1.
    OPEN = "open"


@dataclass(frozen=True)
class DispersionSample:
    """Bloch phase per period at one frequency, with ``cos k = F``."""

    omega: complex
    F: complex
    k: complex
    regime: Regime
    mu: complex
    nudge: float = 0.0


@dataclass(frozen=True)
class Band:
    index: int
    lo: float
    hi: float
    lo_class: EdgeKind
    hi_class: EdgeKind

    @property
    def width(self) -> float:
        return self.hi - self.lo

    def contains(self, omega: float) -> bool:
        return self.lo <= omega <= self.hi


@dataclass(frozen=True)
class EdgeClassification:
    """Diagnostics of a band edge.

    ``monodromy_dist`` is ``min(|M - I|, |M + I|)`` and ``identity_sign`` tells
    which of the two was closer.
    """

    omega: float
    kind: EdgeKind
    F: float
    F_prime: float
    F_double_prime: float
    monodromy_dist: float
    identity_sign: int
    curvature_opposes: bool
    tol_der: float
    tol_mat: float

    def as_dict(self) -> dict:
        return {
            "omega": self.omega,
            "kind": self.kind.value,
            "F": self.F,
            "F_prime": self.F_prime,
            "F_double_prime": self.F_double_prime,
            "monodromy_dist": self.monodromy_dist,
            "identity_sign": self.identity_sign,
            "curvature_opposes": self.curvature_opposes,
            "tol_der": self.tol_der,
            "tol_mat": self.tol_mat,
        }


@dataclass(frozen=True)
class GroupVelocitySample:
    omega: float
    k_prime: float
    V_g: float


def discriminant(omega: Frequency, spec: PotentialSpec) -> complex:
    """Floquet discriminant ``F = (alpha + delta)/2`` of the monodromy matrix."""
    return monodromy(omega, spec).half_trace()


def _real_discriminant(omega: float, spec: PotentialSpec) -> float:
    return discriminant(omega, spec).real


def _roots(F: complex) -> Tuple[complex, complex]:
    """Roots of ``mu**2 - 2 F mu + 1 = 0``, larger modulus first.

    The smaller root is ``1 / larger``, which avoids cancelling ``F`` against
    ``sqrt(F**2 - 1)`` deep in a gap.

    Raises:
        ScaleExceededError: If ``F`` is not finite.
    """
    F = complex(F)
    if not np.isfinite(F):
        raise ScaleExceededError(f"Discriminant is not finite: {F}")
    if abs(F) > 1e150:
        large = 2.0 * F
    else:
        root = complex(np.sqrt(F * F - 1.0))
        large = F + root if abs(F + root) >= abs(F - root) else F - root
    return large, 1.0 / large


def _phase(mu: complex) -> complex:
    mu = complex(mu)
    if mu == 0 or not np.isfinite(mu):
        raise ScaleExceededError(f"Floquet multiplier {mu} is out of floating-point range")
    return complex(-1j * np.log(mu))


def bloch_k(omega: Frequency, spec: PotentialSpec) -> DispersionSample:
    """Bloch phase with the decaying branch ``|exp(ik)| <= 1``.

    For ``Im omega > 0`` the root with ``|mu| < 1`` is taken directly. Real
    frequencies inside a band are nudged to ``omega + i eps |omega|`` for the
    configured eps values until the nudged choice is stable, and the real
    root closest to it is returned.
    """
    w = check_frequency(omega)
    F = discriminant(w, spec)

    if w.imag > 0:
        plus, minus = _roots(F)
        mu = plus if abs(plus) < abs(minus) else minus
        k = _phase(mu)
        regime = Regime.GAP if k.imag > config.get("spectrum.branch_tol") else Regime.BAND
        return DispersionSample(w, F, k, regime, mu)
    if w.imag < 0:
        raise DomainError(f"Frequencies in the lower half plane are not supported: {w}")

    F_real = F.real
    if abs(abs(F_real) - 1.0) < config.get("spectrum.edge_tol"):
        mu = complex(math.copysign(1.0, F_real))
        k = 0j if mu.real > 0 else complex(math.pi)
        return DispersionSample(w, F, k, Regime.EDGE, mu)

    plus, minus = _roots(F_real)
    if abs(F_real) > 1.0:
        mu = plus if abs(plus) < abs(minus) else minus
        return DispersionSample(w, F, _phase(mu), Regime.GAP, mu)

    chosen: Optional[complex] = None
    used = 0.0
    for eps in config.get("spectrum.nudges"):
        nudged_plus, nudged_minus = _roots(discriminant(w + 1j * eps * abs(w), spec))
        nudged = nudged_plus if abs(nudged_plus) < abs(nudged_minus) else nudged_minus
        candidate = plus if abs(plus - nudged) <= abs(minus - nudged) else minus
        if chosen is not None and candidate == chosen:
            used = eps
            break
        chosen, used = candidate, eps
    mu = chosen
    k = complex(_phase(mu).real)
    return DispersionSample(w, F, k, Regime.BAND, mu, nudge=used)


def dispersion(spec: PotentialSpec, omegas: Iterable[Frequency]) -> List[DispersionSample]:
    """Sweep ``bloch_k`` and unwrap ``Re k`` by continuity across the sweep."""
    samples = parallel_map(lambda w: bloch_k(w, spec), list(omegas))
    if len(samples) < 2:
        return samples
    unwrapped = np.unwrap(np.array([s.k.real for s in samples]))
    return [replace(s, k=complex(re, s.k.imag)) for s, re in zip(samples, unwrapped)]


def _edge_residual(omega: float, spec: PotentialSpec) -> float:
    return abs(_real_discriminant(omega, spec)) - 1.0


def _refine_crossing(spec: PotentialSpec, a: float, b: float, ga: float, gb: float) -> float:
    if ga == 0.0:
        return a
    if gb == 0.0:
        return b
    if ga * gb > 0:
        # One side sits within the edge tolerance of |F| = 1 already.
        return a if abs(ga) < abs(gb) else b
    return float(
        bisect(
            _edge_residual,
            a,
            b,
            args=(spec,),
            xtol=1e-15 * max(1.0, abs(b)),
            rtol=config.get("spectrum.bisect_rtol"),
            maxiter=400,
        )
    )


def _scan_grid(spec: PotentialSpec, omega_lo: float, omega_hi: float, grid: int) -> Tuple[np.ndarray, List[Tuple[float, float]]]:
    """Uniform grid densified near ``n pi / L`` where narrow bands sit."""
    base = np.linspace(omega_lo, omega_hi, grid)
    step = (omega_hi - omega_lo) / (grid - 1)
    factor = int(max(config.get("spectrum.densify_min"), math.ceil(abs(spec.amplitude))))
    remaining = config.get("spectrum.densify_max_points")
    extra: List[np.ndarray] = []
    starved: List[Tuple[float, float]] = []

    n_lo = max(1, math.ceil(omega_lo * spec.period / math.pi - 1e-12))
    n_hi = math.floor(omega_hi * spec.period / math.pi + 1e-12)
    for n in range(n_lo, n_hi + 1):
        center = n * math.pi / spec.period
        lo = max(omega_lo, center - 3.0 * step)
        hi = min(omega_hi, center + 2.0 * step)
        count = min(4 * factor, remaining)
        if count < 4 * factor:
            starved.append((lo, hi))
        if count > 0:
            extra.append(np.linspace(lo, hi, count + 2)[1:-1])
            remaining -= count
    points = np.unique(np.concatenate([base, *extra])) if extra else base
    return points, starved


def _runs(mask: np.ndarray) -> List[Tuple[int, int]]:
    """Inclusive index ranges of consecutive True entries."""
    runs = []
    start = None
    for i, flag in enumerate(mask):
        if flag and start is None:
            start = i
        elif not flag and start is not None:
            runs.append((start, i - 1))
            start = None
    if start is not None:
        runs.append((start, len(mask) - 1))
    return runs


def _derivative(spec: PotentialSpec, omega: float, order: int) -> float:
    h0 = config.get("spectrum.richardson_step") * abs(omega)
    return richardson_derivative(lambda w: _real_discriminant(w, spec), omega, h0, order=order)


def _touching_points(
    spec: PotentialSpec, xs: np.ndarray, gs: np.ndarray, start: int, stop: int
) -> List[Tuple[float, float]]:
    """Interior maxima of ``|F| - 1`` inside one band run, as ``(omega, residual)``."""
    found = []
    for i in range(start + 1, stop):
        if not (gs[i] >= gs[i - 1] and gs[i] >= gs[i + 1]):
            continue
        a, b = float(xs[i - 1]), float(xs[i + 1])
        da, db = _derivative(spec, a, 1), _derivative(spec, b, 1)
        if da * db < 0:
            peak = float(brentq(lambda w: _derivative(spec, w, 1), a, b, xtol=1e-15 * b, rtol=1e-14))
        else:
            res = minimize_scalar(
                lambda w: -_edge_residual(w, spec), bounds=(a, b), method="bounded", options={"xatol": 1e-12 * b}
            )
            peak = float(res.x)
        found.append((peak, _edge_residual(peak, spec)))
    return found


def find_bands(
    spec: PotentialSpec, omega_lo: float, omega_hi: float, grid: int = 2000, first_index: int = 1
) -> List[Band]:
    """Locate the bands ``|F| <= 1`` in ``[omega_lo, omega_hi]``.

    Sign changes of ``|F| - 1`` on the (densified) grid are refined by
    bisection. Interior maxima of ``|F|`` inside a band are located exactly;
    a maximum touching 1 splits the band at a shared degenerate edge, one
    exceeding 1 reveals a hidden gap.

    Args:
        spec: Potential of one period.
        omega_lo: Lower end of the scan, positive.
        omega_hi: Upper end of the scan.
        grid: Number of uniform grid points before densification.
        first_index: Index given to the lowest band found.

    Returns:
        Bands in increasing frequency order. Edges at the window boundary
        have class ``open``.

    Raises:
        DomainError: On an empty or non-positive range or a grid under 2 points.
    """
    if not (0.0 < omega_lo < omega_hi):
        raise DomainError(f"Need 0 < omega_lo < omega_hi, got ({omega_lo}, {omega_hi})")
    if grid < 2:
        raise DomainError(f"Grid needs at least 2 points, got {grid}")

    if spec.is_free or spec.amplitude == 0.0:
        # Every n pi / L is a trivial touching point; report one band.
        return [Band(first_index, float(omega_lo), float(omega_hi), EdgeKind.OPEN, EdgeKind.OPEN)]

    edge_tol = config.get("spectrum.edge_tol")
    xs, suspects = _scan_grid(spec, omega_lo, omega_hi, grid)
    gs = np.array(parallel_map(lambda w: _edge_residual(float(w), spec), xs))
    in_band = gs <= edge_tol

    # Structure narrower than two cells of the uniform grid.
    cell = (omega_hi - omega_lo) / (grid - 1)
    for start, stop in _runs(in_band) + _runs(~in_band):
        if 0 < start and stop < len(xs) - 1 and xs[stop + 1] - xs[start - 1] < 2.0 * cell:
            suspects.append((float(xs[start - 1]), float(xs[stop + 1])))

    # Each entry: (lo, lo_kind, hi, hi_kind).
    intervals: List[Tuple[float, EdgeKind, float, EdgeKind]] = []
    for start, stop in _runs(in_band):
        if start == 0:
            lo, lo_kind = float(xs[0]), EdgeKind.OPEN
        else:
            lo = _refine_crossing(spec, float(xs[start - 1]), float(xs[start]), gs[start - 1], gs[start])
            lo_kind = EdgeKind.NONDEGENERATE
        if stop == len(xs) - 1:
            hi, hi_kind = float(xs[-1]), EdgeKind.OPEN
        else:
            hi = _refine_crossing(spec, float(xs[stop]), float(xs[stop + 1]), gs[stop], gs[stop + 1])
            hi_kind = EdgeKind.NONDEGENERATE

        cursor, cursor_kind = lo, lo_kind
        for peak, residual in _touching_points(spec, xs, gs, start, stop):
            if residual < -edge_tol or not (cursor < peak < hi):
                continue
            if residual <= edge_tol:
                intervals.append((cursor, cursor_kind, peak, EdgeKind.DEGENERATE))
                cursor, cursor_kind = peak, EdgeKind.DEGENERATE
                continue
            left_grid = float(xs[max(start, int(np.searchsorted(xs, peak)) - 1)])
            right_grid = float(xs[min(stop, int(np.searchsorted(xs, peak)))])
            gap_lo = _refine_crossing(spec, left_grid, peak, _edge_residual(left_grid, spec), residual)
            gap_hi = _refine_crossing(spec, peak, right_grid, residual, _edge_residual(right_grid, spec))
            logger.info(f"Split hidden gap ({gap_lo:.12g}, {gap_hi:.12g}) inside a scanned band")
            intervals.append((cursor, cursor_kind, gap_lo, EdgeKind.NONDEGENERATE))
            cursor, cursor_kind = gap_hi, EdgeKind.NONDEGENERATE
        intervals.append((cursor, cursor_kind, hi, hi_kind))

    bands = []
    for offset, (lo, lo_kind, hi, hi_kind) in enumerate(intervals):
        bands.append(
            Band(
                index=first_index + offset,
                lo=lo,
                hi=hi,
                lo_class=_confirm_kind(spec, lo, lo_kind),
                hi_class=_confirm_kind(spec, hi, hi_kind),
            )
        )

    if suspects:
        message = f"Band scan may have missed structure narrower than two grid cells in {len(suspects)} interval(s)"
        logger.warning(f"{message}: {suspects}")
        warnings.warn(UnderResolutionWarning(message, suspects))

    logger.info(f"Found {len(bands)} band(s) in ({omega_lo}, {omega_hi}) on {len(xs)} grid points")
    return bands


def _confirm_kind(spec: PotentialSpec, omega: float, expected: EdgeKind) -> EdgeKind:
    if expected is EdgeKind.OPEN:
        return expected
    try:
        return classify_edge(spec, omega).kind
    except AmbiguousClassificationError as e:
        logger.warning(f"Edge at {omega:.12g} is ambiguous, keeping scan result '{expected.value}': {e.diagnostics}")
        return expected


def classify_edge(spec: PotentialSpec, omega_edge: float) -> EdgeClassification:
    """Decide whether a band edge is degenerate.

    Degenerate requires small ``F'``, large ``F''`` and a monodromy matrix
    close to ``+I`` or ``-I``. The derivative threshold is relative to the
    slope of F over a window of 1% of omega.

    Raises:
        DomainError: If ``|F(omega_edge)|`` is not 1 within tolerance.
        AmbiguousClassificationError: If the diagnostics disagree.
    """
    omega = float(omega_edge)
    check_frequency(omega)
    M: Mat2 = monodromy(omega, spec)
    F = M.half_trace().real
    F1 = _derivative(spec, omega, 1)
    F2 = _derivative(spec, omega, 2)

    residual = abs(abs(F) - 1.0)
    allowed = config.get("spectrum.edge_tol") + config.get("spectrum.bisect_rtol") * omega * abs(F1) * 4.0
    if residual > allowed:
        raise DomainError(f"|F({omega})| = {abs(F):.15g} is not 1 within {allowed:.3g}")

    delta = 1e-2 * omega
    slope = max(
        abs(_real_discriminant(omega + delta, spec) - F), abs(F - _real_discriminant(omega - delta, spec))
    ) / delta
    tol_der = config.get("spectrum.tol_der") * max(1.0, slope)
    tol_mat = config.get("spectrum.tol_mat")

    dist_plus, dist_minus = M.distance_to_identity(1.0), M.distance_to_identity(-1.0)
    sign = 1 if dist_plus <= dist_minus else -1
    dist = min(dist_plus, dist_minus)

    flat = abs(F1) < tol_der
    near_identity = dist < tol_mat
    curved = abs(F2) > tol_der

    if flat and near_identity and curved:
        kind = EdgeKind.DEGENERATE
    elif not flat and not near_identity:
        kind = EdgeKind.NONDEGENERATE
    else:
        kind = None

    result = EdgeClassification(
        omega=omega,
        kind=kind if kind is not None else EdgeKind.NONDEGENERATE,
        F=F,
        F_prime=F1,
        F_double_prime=F2,
        monodromy_dist=dist,
        identity_sign=sign,
        curvature_opposes=F * F2 < 0,
        tol_der=tol_der,
        tol_mat=tol_mat,
    )
    if kind is None:
        raise AmbiguousClassificationError(
            f"Edge diagnostics at omega = {omega:.12g} conflict "
            f"(|F'| = {abs(F1):.3g}, |F''| = {abs(F2):.3g}, dist = {dist:.3g})",
            diagnostics=result.as_dict(),
        )
    logger.debug(f"Edge {omega:.12g}: {kind.value}, F'={F1:.6g}, F''={F2:.6g}, dist={dist:.3g}")
    return result


def group_velocity(omega: float, spec: PotentialSpec) -> GroupVelocitySample:
    """``V_g = L / k'`` with ``k' = -F' / sin k`` on the selected branch.

    Raises:
        DomainError: If omega lies in a gap.
        NearEdgeError: If ``|F|`` is within the interior margin of 1.
    """
    omega = float(omega)
    sample = bloch_k(omega, spec)
    F = sample.F.real
    margin = config.get("spectrum.interior_margin")
    if abs(F) > 1.0 + config.get("spectrum.edge_tol"):
        raise DomainError(f"omega = {omega} lies in a gap (|F| = {abs(F):.6g})")
    if abs(F) >= 1.0 - margin:
        raise NearEdgeError(f"omega = {omega} is within {margin:g} of a band edge (|F| = {abs(F):.12g})")

    sin_k = float(np.sin(sample.k.real))
    k_prime = -_derivative(spec, omega, 1) / sin_k
    return GroupVelocitySample(omega=omega, k_prime=k_prime, V_g=spec.period / k_prime)


def degenerate_edge_velocity(spec: PotentialSpec, omega0: float) -> float:
    """``V_g = L / sqrt(|F''|)`` at a degenerate band edge.

    Raises:
        ClassificationError: If the edge is not degenerate.
    """
    edge = classify_edge(spec, omega0)
    if edge.kind is not EdgeKind.DEGENERATE:
        raise ClassificationError(f"Edge at {omega0} is {edge.kind.value}, not degenerate")
    return spec.period / math.sqrt(abs(edge.F_double_prime))


def weyl_functions(omega: Frequency, spec: PotentialSpec) -> Tuple[complex, complex]:
    """Weyl functions ``m_plus, m_minus``: second components of the eigenvectors ``(1, m)``.

    Uses ``(mu - alpha)/beta`` or ``gamma/(mu - delta)``, whichever has the
    larger denominator, and checks the two against each other when both are
    well conditioned.

    Raises:
        EdgeSingularityError: If both representations are singular.
        AccuracyError: If both are well conditioned but disagree beyond
            ``spectrum.weyl_tol`` times their conditioning.
    """
    M = monodromy(omega, spec)
    sample = bloch_k(omega, spec)
    mu_plus = complex(np.exp(1j * sample.k))
    scale = max(1.0, M.max_abs())
    tiny = 1e-13 * scale

    def pick(mu: complex) -> complex:
        den_first, den_second = M.b, mu - M.d
        if abs(den_first) < tiny and abs(den_second) < tiny:
            raise EdgeSingularityError(f"Both Weyl representations are singular at omega = {omega}")
        first = (mu - M.a) / den_first if abs(den_first) >= tiny else None
        second = M.c / den_second if abs(den_second) >= tiny else None
        if first is not None and second is not None:
            conditioning = scale / min(abs(den_first), abs(den_second))
            mismatch = abs(first - second) / max(1.0, abs(first))
            requested = config.get("spectrum.weyl_tol") * conditioning
            if mismatch > requested:
                raise AccuracyError(f"Weyl representations disagree at omega = {omega}", requested, mismatch)
            return first if abs(den_first) >= abs(den_second) else second
        return first if first is not None else second

    return pick(mu_plus), pick(1.0 / mu_plus)


def band_of(bands: Sequence[Band], omega: float) -> Optional[Band]:
    """Return the band containing omega, if any."""
    for band in bands:
        if band.contains(omega):
            return band
    return None
