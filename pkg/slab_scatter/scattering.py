"""Reflection and transmission by N-period slabs and by the semi-infinite medium.

The incoming wave is ``exp(i omega x)`` from the left:

    psi = exp(i w x) + r exp(-i w x),   x < 0
    psi = t exp(i w x),                 x > N L
"""

import math
from dataclasses import dataclass
from typing import List, Optional, Sequence, Tuple

import numpy as np
from scipy.optimize import bisect
from scipy.stats import linregress

from .config import config
from .exceptions import (
    AccuracyError,
    DomainError,
    EdgeSingularityError,
    NumericDegeneracyError,
    RefinementError,
    ScaleExceededError,
)
from .logger import get_logger
from .potentials import PotentialSpec
from .spectrum import Band, EdgeKind, Regime, bloch_k, weyl_functions
from .transfer import (
    Frequency,
    Mat2,
    check_frequency,
    chebyshev_pair,
    chebyshev_t,
    hs_excess,
    hs_norm_sq,
    monodromy,
    monodromy_power,
)
from .utils import parallel_map

logger = get_logger(__name__)


@dataclass(frozen=True)
class ScatterResult:
    """``(r_N, t_N)`` of an N-period slab.

    ``transmittance_hs`` is ``4 / (|T|^2 + 2)``, an independent value of
    ``|t|^2``. Both certificates are NaN for complex omega.
    """

    omega: complex
    N: int
    r: complex
    t: complex
    conservation_defect: float
    transmittance_hs: float
    regime: Optional[Regime] = None

    @property
    def transmittance(self) -> float:
        return abs(self.t) ** 2

    @property
    def reflectance(self) -> float:
        return abs(self.r) ** 2


@dataclass(frozen=True)
class SemiInfiniteResult:
    """Reflection by the periodic medium filling ``x > 0``; ``c`` matches ``psi = c psi_plus``."""

    omega: complex
    r: complex
    c: complex
    m_plus: complex
    r_weyl: complex
    mismatch: float


@dataclass(frozen=True)
class TransparencyPoint:
    omega: float
    band_index: int
    m: int
    residual: float
    transmittance: float
    in_window: bool = True


@dataclass(frozen=True)
class GapDecayFit:
    """Least-squares decay of ``log|t_N|`` with N; theory gives ``sigma = Im k``."""

    omega: float
    sigma: float
    fit_residual: float
    im_k: float
    periods: Tuple[int, ...]
    magnitudes: Tuple[float, ...]


def _regime(F: complex) -> Regime:
    g = abs(F.real) - 1.0
    if abs(g) < config.get("spectrum.edge_tol"):
        return Regime.EDGE
    return Regime.BAND if g < 0 else Regime.GAP


def scatter_matrix(omega: Frequency, T: Mat2, length: float, N: int = 1) -> ScatterResult:
    """``(r, t)`` for any unimodular transfer matrix ``T`` of a potential on ``[0, length]``.

    ``t`` uses ``det T = 1`` exactly. Deep in a gap the entries of ``T`` grow
    like ``|mu|**N`` and recomputing ``ad - bc`` from them cancels to noise.

    Raises:
        DomainError: If ``T`` is not unimodular to the entry scale.
        NumericDegeneracyError: If ``a + d + i(c - b)`` vanishes.
    """
    w = check_frequency(omega)
    a, b, c, d = T.a, T.b, T.c, T.d
    det_defect = abs(T.det() - 1.0) / max(1.0, T.max_abs() ** 2)
    if det_defect > max(config.get("transfer.det_tol"), 10.0 * config.get("transfer.ode_rtol")):
        raise DomainError(f"Transfer matrix is not unimodular (|det - 1| = {det_defect:.3g} relative)")
    denominator = a + d + 1j * (c - b)
    if abs(denominator) < 1e-300 or not np.isfinite(denominator):
        raise NumericDegeneracyError(f"Reflection denominator vanishes at omega = {w}")

    r = (d - a - 1j * (b + c)) / denominator
    # a(1 + r) + i b(1 - r) = 2 det(T) / denominator
    t = complex(np.exp(-1j * w * length)) * 2.0 / denominator

    if w.imag == 0:
        defect = abs(abs(r) ** 2 + abs(t) ** 2 - 1.0)
        transmittance_hs = 4.0 / (hs_norm_sq(T) + 2.0)
        tol = config.get("scattering.conservation_tol")
        if defect > tol:
            logger.warning(f"Energy conservation defect {defect:.3g} exceeds {tol:g} at omega = {w.real}")
    else:
        defect = float("nan")
        transmittance_hs = float("nan")
    return ScatterResult(w, N, complex(r), complex(t), defect, transmittance_hs)


def scatter_direct(omega: Frequency, spec: PotentialSpec, N: int) -> ScatterResult:
    """Scatter off the slab using ``T = M**N`` and the boundary-matching solution.

    Raises:
        DomainError: If ``N < 1``.
        NumericDegeneracyError: If the reflection denominator vanishes.
    """
    w = check_frequency(omega)
    M = monodromy(w, spec)
    T = monodromy_power(M, M.half_trace(), N)
    result = scatter_matrix(w, T, N * spec.period, N)
    regime = _regime(M.half_trace()) if w.imag == 0 else None
    return ScatterResult(
        result.omega, N, result.r, result.t, result.conservation_defect, result.transmittance_hs, regime
    )


def _cot(z: complex) -> complex:
    """Cotangent that stays finite for large ``|Im z|``."""
    if z.imag >= 0:
        e = complex(np.exp(2j * z))
        return 1j * (e + 1.0) / (e - 1.0)
    e = complex(np.exp(-2j * z))
    return -1j * (e + 1.0) / (e - 1.0)


def reflection_formula(omega: Frequency, spec: PotentialSpec, N: int) -> complex:
    """``r_N = -[(alpha - delta) + i(beta + gamma)] / [2 sin k cot(N k) + i(gamma - beta)]``.

    Evaluated as written when ``sin k`` and ``sin N k`` are safely nonzero;
    otherwise ``sin k cot(N k)`` is replaced by ``T_N / U_{N-1}`` and the
    quotient is multiplied through by ``U_{N-1}``, which is finite at band
    edges and transparency points.
    """
    w = check_frequency(omega)
    if N < 1:
        raise DomainError(f"Period count must be >= 1, got {N}")
    M = monodromy(w, spec)
    numerator = (M.a - M.d) + 1j * (M.b + M.c)
    twist = 1j * (M.c - M.b)

    k = bloch_k(w, spec).k
    sin_k = complex(np.sin(k))
    sin_nk = complex(np.sin(N * k)) if abs((N * k).imag) < 700 else complex("inf")
    if abs(sin_k) > 1e-6 and abs(sin_nk) > 1e-8:
        denominator = 2.0 * sin_k * _cot(N * k) + twist
        if abs(denominator) > 0:
            return -numerator / denominator

    F = M.half_trace()
    u, _ = chebyshev_pair(F, N - 1)
    return -u * numerator / (2.0 * chebyshev_t(F, N) + u * twist)


def transmittance_formula(omega: float, spec: PotentialSpec, N: int) -> float:
    """``|t_N|^2 = 4 / [(|M|^2 - 2) U_{N-1}(F)^2 + 4]`` for real omega."""
    w = check_frequency(omega)
    if w.imag != 0:
        raise DomainError(f"Transmittance formula needs a real frequency, got {w}")
    if N < 1:
        raise DomainError(f"Period count must be >= 1, got {N}")
    M = monodromy(w, spec)
    u, _ = chebyshev_pair(M.half_trace().real, N - 1)
    u = u.real
    return 4.0 / (hs_excess(M).real * u * u + 4.0)


def scatter_semi_infinite(omega: Frequency, spec: PotentialSpec) -> SemiInfiniteResult:
    """Reflection by the medium filling ``x > 0``.

    ``r = (beta + gamma - i(alpha - delta)) / (2 sin k + beta - gamma)``,
    checked against ``(i - m_plus)/(i + m_plus)``.

    Raises:
        EdgeSingularityError: At a band edge.
        AccuracyError: If the two forms of ``r`` disagree beyond
            ``scattering.formula_tol`` times the entry scale of ``M``.
    """
    w = check_frequency(omega)
    sample = bloch_k(w, spec)
    if sample.regime is Regime.EDGE:
        raise EdgeSingularityError(f"Semi-infinite reflection is singular at the band edge omega = {w}")

    M = monodromy(w, spec)
    sin_k = complex(np.sin(sample.k))
    denominator = 2.0 * sin_k + (M.b - M.c)
    if abs(denominator) == 0:
        raise EdgeSingularityError(f"Semi-infinite reflection denominator vanishes at omega = {w}")
    r = ((M.b + M.c) - 1j * (M.a - M.d)) / denominator

    m_plus, _ = weyl_functions(w, spec)
    r_weyl = (1j - m_plus) / (1j + m_plus)
    mismatch = abs(r - r_weyl)
    requested = config.get("scattering.formula_tol") * max(1.0, M.max_abs())
    if mismatch > requested:
        raise AccuracyError(f"Semi-infinite reflection forms disagree at omega = {w}", requested, mismatch)
    return SemiInfiniteResult(w, complex(r), complex(1.0 + r), complex(m_plus), complex(r_weyl), mismatch)


def transparency_points(
    spec: PotentialSpec, band: Band, N: int, window: Optional[Tuple[float, float]] = None
) -> List[TransparencyPoint]:
    """Frequencies inside ``band`` where ``sin(N k) = 0`` and ``sin k != 0``.

    ``arccos F`` runs monotonically over ``[0, pi]`` across a band, so each
    ``k = m pi / N``, ``m = 1..N-1``, is bracketed and found by bisection.
    Points inside ``window`` (if given) are flagged.

    Raises:
        RefinementError: If a full band fails to bracket some ``m``.
        AccuracyError: If ``|t_N|`` misses 1 at a point by more than
            ``10 * scattering.transparency_tol``.
    """
    if N < 2:
        return []
    if not band.hi > band.lo:
        raise RefinementError(f"Band {band.index} has no width")

    def phase(w: float) -> float:
        return math.acos(min(1.0, max(-1.0, monodromy(w, spec).half_trace().real)))

    full = band.lo_class is not EdgeKind.OPEN and band.hi_class is not EdgeKind.OPEN
    phase_lo, phase_hi = phase(band.lo), phase(band.hi)
    rtol = config.get("spectrum.bisect_rtol")
    tol = config.get("scattering.transparency_tol")

    points = []
    for m in range(1, N):
        target = m * math.pi / N
        f_lo, f_hi = phase_lo - target, phase_hi - target
        if f_lo * f_hi > 0:
            if full:
                raise RefinementError(
                    f"Could not bracket k = {m}pi/{N} in band {band.index} ({band.lo:.15g}, {band.hi:.15g})"
                )
            continue
        root = float(bisect(lambda w: phase(w) - target, band.lo, band.hi, xtol=1e-15 * band.hi, rtol=rtol))

        F = monodromy(root, spec).half_trace().real
        sin_k = math.sqrt(max(0.0, 1.0 - F * F))
        u, _ = chebyshev_pair(F, N - 1)
        residual = abs(u.real) * sin_k
        transmittance = transmittance_formula(root, spec, N)
        excess = abs(math.sqrt(transmittance) - 1.0)
        if excess > 10.0 * tol:
            raise AccuracyError(f"|t_{N}| != 1 at transparency point {root:.15g} of band {band.index}", 10.0 * tol, excess)
        inside = window is None or window[0] <= root <= window[1]
        points.append(TransparencyPoint(root, band.index, m, residual, transmittance, inside))
    logger.debug(f"Band {band.index}: {len(points)} transparency point(s) for N = {N}")
    return points


def gap_decay_fit(spec: PotentialSpec, omega: float, N_list: Sequence[int]) -> GapDecayFit:
    """Fit ``log|t_N| = c - sigma N`` over ``N_list``.

    N values whose transmittance underflows are dropped with a warning.

    Raises:
        RefinementError: If fewer than two N values remain.
    """
    floor = config.get("scattering.underflow")
    used: List[int] = []
    magnitudes: List[float] = []
    for N in sorted(N_list):
        try:
            value = transmittance_formula(omega, spec, N)
        except ScaleExceededError:
            value = 0.0
        if value < floor:
            logger.warning(f"|t_N| underflows at N = {N} (omega = {omega}); truncating the N list there")
            break
        used.append(N)
        magnitudes.append(math.sqrt(value))
    if len(used) < 2:
        raise RefinementError(f"Gap decay fit needs two usable N values, got {used}")

    logs = np.log(np.array(magnitudes))
    fit = linregress(np.array(used, dtype=float), logs)
    residuals = logs - (fit.intercept + fit.slope * np.array(used, dtype=float))
    sample = bloch_k(omega, spec)
    return GapDecayFit(
        omega=float(omega),
        sigma=float(-fit.slope),
        fit_residual=float(np.sqrt(np.mean(residuals**2))),
        im_k=float(sample.k.imag),
        periods=tuple(used),
        magnitudes=tuple(magnitudes),
    )


def cauchy_mean_defect(
    spec: PotentialSpec, N: int, center: complex, radius: float, samples: int = 64
) -> float:
    """``|mean of r_N over a circle - r_N(center)|`` in the upper half plane.

    Raises:
        DomainError: If the circle leaves the upper half plane.
    """
    if not (center.imag - radius > 0):
        raise DomainError(f"Circle around {center} with radius {radius} leaves the upper half plane")
    angles = np.linspace(0.0, 2.0 * math.pi, samples, endpoint=False)
    values = [scatter_direct(center + radius * complex(np.exp(1j * a)), spec, N).r for a in angles]
    return float(abs(np.mean(values) - scatter_direct(center, spec, N).r))


def reflection_convergence(spec: PotentialSpec, omega: complex, N_list: Sequence[int]) -> List[Tuple[int, float]]:
    """``|r_N - r|`` against the semi-infinite limit for each N."""
    limit = scatter_semi_infinite(omega, spec).r
    return [(N, float(abs(scatter_direct(omega, spec, N).r - limit))) for N in N_list]


def transmission_amplitudes(spec: PotentialSpec, N: int, omegas: np.ndarray) -> np.ndarray:
    """``t_N`` on an array of real frequencies.

    Delta-only specs are evaluated with vectorized monodromy products; specs
    with smooth pieces fall back to :func:`scatter_direct` per frequency.
    """
    w = np.asarray(omegas, dtype=complex)
    if N < 1:
        raise DomainError(f"Period count must be >= 1, got {N}")
    if spec.smooth:
        return np.array(parallel_map(lambda x: scatter_direct(complex(x), spec, N).t, list(w)))
    if np.any(w == 0):
        raise DomainError("omega = 0 is singular in Pruefer scaling")

    a, b = np.ones_like(w), np.zeros_like(w)
    c, d = np.zeros_like(w), np.ones_like(w)

    def rotate(length: float) -> None:
        nonlocal a, b, c, d
        cos, sin = np.cos(w * length), np.sin(w * length)
        a, b, c, d = cos * a + sin * c, cos * b + sin * d, cos * c - sin * a, cos * d - sin * b

    cursor = 0.0
    for offset, strength in spec.effective_deltas():
        if offset > cursor:
            rotate(offset - cursor)
        c, d = c + (strength / w) * a, d + (strength / w) * b
        cursor = offset
    rotate(spec.period - cursor)

    two_f = a + d
    current, previous = np.ones_like(w), np.zeros_like(w)
    with np.errstate(over="ignore", invalid="ignore"):
        for _ in range(N - 1):
            current, previous = two_f * current - previous, current
        Ta, Tb = current * a - previous, current * b
        Tc, Td = current * c, current * d - previous
        denominator = Ta + Td + 1j * (Tc - Tb)
        t = np.exp(-1j * w * N * spec.period) * 2.0 / denominator
    # Deep in a gap the denominator overflows and t underflows to 0.
    return np.where(np.isfinite(t), t, 0.0)
