"""Pruefer propagators, monodromy matrices and their powers.

Cauchy data are recorded as ``(psi, psi'/omega)`` so that free propagation is
a rotation. Propagators compose left to right in space: the matrix of a later
segment multiplies on the left.
"""

import logging
from dataclasses import dataclass
from typing import Callable, List, Optional, Tuple, Union

import numpy as np
from scipy.integrate import solve_ivp
from tenacity import Retrying, before_sleep_log, retry_if_exception_type, stop_after_attempt

from .config import config
from .exceptions import AccuracyError, DomainError, ScaleExceededError, SingularityError
from .logger import get_logger
from .potentials import PotentialSpec

logger = get_logger(__name__)

Frequency = Union[float, complex]

# Below this |kappa * d| the closed form switches to a Taylor series for sin(x)/x.
_SERIES_CUTOFF = 1e-4


@dataclass(frozen=True)
class Mat2:
    """Complex 2x2 matrix ``[[a, b], [c, d]]``."""

    a: complex
    b: complex
    c: complex
    d: complex

    @classmethod
    def identity(cls) -> "Mat2":
        return cls(1.0 + 0j, 0j, 0j, 1.0 + 0j)

    @classmethod
    def from_array(cls, array: np.ndarray) -> "Mat2":
        return cls(complex(array[0, 0]), complex(array[0, 1]), complex(array[1, 0]), complex(array[1, 1]))

    def to_array(self) -> np.ndarray:
        return np.array([[self.a, self.b], [self.c, self.d]], dtype=complex)

    def __matmul__(self, other: "Mat2") -> "Mat2":
        return Mat2(
            self.a * other.a + self.b * other.c,
            self.a * other.b + self.b * other.d,
            self.c * other.a + self.d * other.c,
            self.c * other.b + self.d * other.d,
        )

    def scaled(self, factor: complex) -> "Mat2":
        return Mat2(factor * self.a, factor * self.b, factor * self.c, factor * self.d)

    def det(self) -> complex:
        return self.a * self.d - self.b * self.c

    def trace(self) -> complex:
        return self.a + self.d

    def half_trace(self) -> complex:
        return 0.5 * (self.a + self.d)

    def max_abs(self) -> float:
        return max(abs(self.a), abs(self.b), abs(self.c), abs(self.d))

    def distance_to_identity(self, sign: float = 1.0) -> float:
        """Frobenius norm of ``M - sign * I``."""
        return float(
            np.sqrt(abs(self.a - sign) ** 2 + abs(self.b) ** 2 + abs(self.c) ** 2 + abs(self.d - sign) ** 2)
        )

    def is_finite(self) -> bool:
        return bool(np.all(np.isfinite([self.a, self.b, self.c, self.d])))


def check_frequency(omega: Frequency) -> complex:
    """Return omega as a complex number, rejecting zero.

    Raises:
        SingularityError: If omega is zero.
    """
    w = complex(omega)
    if w == 0:
        raise SingularityError("omega = 0 is singular in Pruefer scaling")
    return w


def _guard(M: Mat2, where: str) -> Mat2:
    limit = config.get("transfer.overflow")
    if not M.is_finite() or M.max_abs() > limit:
        raise ScaleExceededError(f"Propagator entries exceed {limit:.3g} in {where}")
    return M


def free_propagator(omega: Frequency, d: float) -> Mat2:
    """Rotation ``[[cos wd, sin wd], [-sin wd, cos wd]]`` through a free segment.

    Raises:
        DomainError: If ``d < 0``.
        SingularityError: If omega is zero.
    """
    w = check_frequency(omega)
    if d < 0:
        raise DomainError(f"Segment length must be non-negative, got {d}")
    with np.errstate(over="ignore", invalid="ignore"):
        cos = complex(np.cos(w * d))
        sin = complex(np.sin(w * d))
    return _guard(Mat2(cos, sin, -sin, cos), "free_propagator")


def delta_jump(omega: Frequency, strength: float) -> Mat2:
    """Jump ``[[1, 0], [strength/omega, 1]]`` across ``strength * delta``.

    Raises:
        SingularityError: If omega is zero.
    """
    w = check_frequency(omega)
    return Mat2(1.0 + 0j, 0j, complex(strength) / w, 1.0 + 0j)


def constant_propagator(omega: Frequency, level: float, d: float) -> Mat2:
    """Closed-form propagator through a segment where ``q == level``.

    With ``kappa = sqrt(omega**2 - level)`` the entries are ``cos(kappa d)``,
    ``omega S``, ``-(kappa**2/omega) S`` and ``cos(kappa d)``, where
    ``S = sin(kappa d)/kappa``. The complex square root covers both the
    oscillating and the hyperbolic case.
    """
    w = check_frequency(omega)
    if d < 0:
        raise DomainError(f"Segment length must be non-negative, got {d}")
    kappa_sq = w * w - level
    kappa = np.sqrt(complex(kappa_sq))
    z = kappa * d
    with np.errstate(over="ignore", invalid="ignore"):
        cos = complex(np.cos(z))
        if abs(z) < _SERIES_CUTOFF:
            sinc_d = d * (1.0 - z * z / 6.0 + z**4 / 120.0)
        else:
            sinc_d = complex(np.sin(z)) / kappa
    return _guard(Mat2(cos, w * sinc_d, -(kappa_sq / w) * sinc_d, cos), "constant_propagator")


def _integrate_segment(w: complex, q: Callable[[float], float], x0: float, x1: float, rtol: float, atol: float) -> Mat2:
    def rhs(x: float, y: np.ndarray) -> np.ndarray:
        coupling = (q(x) - w * w) / w
        # y holds the matrix row-major: [p1 of col 1, p1 of col 2, p2 of col 1, p2 of col 2]
        return np.array([w * y[2], w * y[3], coupling * y[0], coupling * y[1]])

    y0 = np.array([1.0, 0.0, 0.0, 1.0], dtype=complex)
    result = solve_ivp(rhs, (x0, x1), y0, method="DOP853", rtol=rtol, atol=atol)
    if result.status != 0:
        raise AccuracyError(f"Integrator failed on [{x0}, {x1}]: {result.message}", requested=rtol)

    y = result.y[:, -1]
    M = Mat2(complex(y[0]), complex(y[1]), complex(y[2]), complex(y[3]))
    _guard(M, "smooth_propagator")
    achieved = abs(M.det() - 1.0) / max(1.0, M.max_abs() ** 2)
    if achieved > 10.0 * max(rtol, config.get("transfer.det_tol")):
        raise AccuracyError(f"Unimodularity lost on [{x0}, {x1}]", requested=rtol, achieved=achieved)
    return M


def _smooth_segments(spec: PotentialSpec, x0: float, x1: float) -> List[Tuple[float, float, Optional[float], Optional[Callable]]]:
    """Split [x0, x1] at smooth-piece boundaries.

    Each segment is ``(lo, hi, constant level or None, profile or None)``.
    """
    cuts = sorted({x0, x1, *(p for p in spec.breakpoints() if x0 < p < x1)})
    segments = []
    for lo, hi in zip(cuts, cuts[1:]):
        piece = spec.piece_at(0.5 * (lo + hi))
        if piece is None:
            segments.append((lo, hi, 0.0, None))
            continue
        level = piece.profile.constant_value()
        if level is not None:
            segments.append((lo, hi, spec.amplitude * level, None))
        else:
            segments.append((lo, hi, None, piece.profile))
    return segments


def smooth_propagator(
    omega: Frequency, spec: PotentialSpec, x0: float, x1: float, closed_form: bool = True
) -> Mat2:
    """Propagator through ``[x0, x1]`` of the smooth part of one period.

    Constant segments use :func:`constant_propagator` unless ``closed_form`` is
    False; everything else is integrated with DOP853, retrying with tighter
    tolerances when the result misses the requested accuracy.

    Raises:
        DomainError: If the interval leaves [0, L] or contains a delta offset.
        AccuracyError: If every retry fails to reach the tolerance.
    """
    w = check_frequency(omega)
    if not (0.0 <= x0 <= x1 <= spec.period):
        raise DomainError(f"Interval [{x0}, {x1}] is not inside [0, {spec.period}]")
    inner = [d.offset for d in spec.deltas if x0 < d.offset < x1]
    if inner:
        raise DomainError(f"Interval [{x0}, {x1}] contains delta offsets {inner}")

    M = Mat2.identity()
    for lo, hi, level, profile in _smooth_segments(spec, x0, x1):
        if level is not None and closed_form:
            segment = constant_propagator(w, level, hi - lo)
        else:
            if profile is None:
                q = (lambda x, value=level: value)
            else:
                q = (lambda x, p=profile: spec.amplitude * float(p(x)))
            segment = _integrate_with_retries(w, q, lo, hi)
        M = _guard(segment @ M, "smooth_propagator")
    return M


def _integrate_with_retries(w: complex, q: Callable[[float], float], lo: float, hi: float) -> Mat2:
    rtol = config.get("transfer.ode_rtol")
    atol = config.get("transfer.ode_atol")
    retrying = Retrying(
        stop=stop_after_attempt(max(1, config.get("transfer.ode_retries"))),
        retry=retry_if_exception_type(AccuracyError),
        before_sleep=before_sleep_log(logger, logging.WARNING),
        reraise=True,
    )
    for attempt in retrying:
        with attempt:
            # Each retry tightens both tolerances tenfold.
            tighten = 10.0 ** (1 - attempt.retry_state.attempt_number)
            return _integrate_segment(w, q, lo, hi, rtol * tighten, atol * tighten)


def propagator(omega: Frequency, spec: PotentialSpec, x0: float, x1: float) -> Mat2:
    """Propagator ``T(x0, x1)`` within one period, deltas included.

    A delta sitting at ``x0`` acts on the incoming data; one at ``x1`` is left
    for the next segment.

    Raises:
        DomainError: If the interval is not inside [0, L].
    """
    w = check_frequency(omega)
    if not (0.0 <= x0 <= x1 <= spec.period):
        raise DomainError(f"Interval [{x0}, {x1}] is not inside [0, {spec.period}]")

    M = Mat2.identity()
    cursor = x0
    for offset, strength in spec.effective_deltas():
        if not (x0 <= offset < x1):
            continue
        if offset > cursor:
            M = smooth_propagator(w, spec, cursor, offset) @ M
        M = _guard(delta_jump(w, strength) @ M, "propagator")
        cursor = offset
    if x1 > cursor:
        M = smooth_propagator(w, spec, cursor, x1) @ M
    return _guard(M, "propagator")


def monodromy(omega: Frequency, spec: PotentialSpec) -> Mat2:
    """Monodromy matrix ``M = T(0, L)`` of one period.

    Raises:
        AccuracyError: If ``|det M - 1|`` exceeds ``transfer.det_tol`` (relative to the entry scale).
    """
    M = propagator(omega, spec, 0.0, spec.period)
    defect = abs(M.det() - 1.0) / max(1.0, M.max_abs() ** 2)
    requested = config.get("transfer.det_tol")
    if spec.smooth and any(p.profile.constant_value() is None for p in spec.smooth):
        requested = max(requested, 10.0 * config.get("transfer.ode_rtol"))
    if defect > requested:
        raise AccuracyError("Monodromy matrix is not unimodular", requested=requested, achieved=defect)
    return M


def chebyshev_pair(F: complex, m: int) -> Tuple[complex, complex]:
    """Return ``(U_m(F), U_{m-1}(F))`` from the three-term recurrence.

    ``U_{-1} = 0`` and ``U_0 = 1``; ``U_m = sin((m+1)k)/sin(k)`` when ``cos k = F``.

    Raises:
        DomainError: If ``m < -1``.
        ScaleExceededError: If the values overflow the configured guard.
    """
    if m < -1:
        raise DomainError(f"Chebyshev index must be >= -1, got {m}")
    if m == -1:
        return 0j, 0j
    limit = config.get("transfer.overflow")
    two_f = 2.0 * complex(F)
    current, previous = 1.0 + 0j, 0j
    for _ in range(m):
        current, previous = two_f * current - previous, current
        if abs(current) > limit:
            raise ScaleExceededError(f"Chebyshev value U_{m}({F}) exceeds {limit:.3g}")
    return current, previous


def chebyshev_u(F: complex, m: int) -> complex:
    """Chebyshev value ``U_m(F)`` of the second kind."""
    return chebyshev_pair(F, m)[0]


def chebyshev_t(F: complex, N: int) -> complex:
    """``T_N(F) = cos(N k)`` computed as ``F U_{N-1} - U_{N-2}``."""
    if N < 0:
        raise DomainError(f"Chebyshev index must be non-negative, got {N}")
    if N == 0:
        return 1.0 + 0j
    u1, u2 = chebyshev_pair(F, N - 1)
    return complex(F) * u1 - u2


def sine_ratio(k: complex, N: int) -> complex:
    """Quotient ``sin(N k)/sin(k)``, only for cross-checks away from band edges.

    Raises:
        SingularityError: If ``sin k`` vanishes.
    """
    s = complex(np.sin(k))
    if abs(s) < 1e-12:
        raise SingularityError(f"sin(k) vanishes at k = {k}")
    return complex(np.sin(N * k)) / s


def monodromy_power(M: Mat2, F: complex, N: int) -> Mat2:
    """``M**N = U_{N-1}(F) M - U_{N-2}(F) I`` for a unimodular M with ``F = tr(M)/2``.

    Raises:
        DomainError: If ``N < 1`` or ``M`` is not unimodular.
    """
    if N < 1:
        raise DomainError(f"Power must be >= 1, got {N}")
    defect = abs(M.det() - 1.0) / max(1.0, M.max_abs() ** 2)
    if defect > max(config.get("transfer.det_tol"), 10.0 * config.get("transfer.ode_rtol")):
        raise DomainError(f"Matrix is not unimodular (|det - 1| = {defect:.3g})")
    u1, u2 = chebyshev_pair(F, N - 1)
    return _guard(Mat2(u1 * M.a - u2, u1 * M.b, u1 * M.c, u1 * M.d - u2), "monodromy_power")


def repeated_product(M: Mat2, N: int) -> Mat2:
    """``M**N`` by plain repeated multiplication."""
    if N < 1:
        raise DomainError(f"Power must be >= 1, got {N}")
    result = M
    for _ in range(N - 1):
        result = _guard(M @ result, "repeated_product")
    return result


def transfer_over_slab(omega: Frequency, spec: PotentialSpec, N: int) -> Mat2:
    """Transfer matrix ``T(0, NL) = M**N`` of an N-period slab."""
    M = monodromy(omega, spec)
    return monodromy_power(M, M.half_trace(), N)


def hs_norm_sq(M: Mat2) -> float:
    """Squared Hilbert-Schmidt norm ``|a|^2 + |b|^2 + |c|^2 + |d|^2``."""
    return float(abs(M.a) ** 2 + abs(M.b) ** 2 + abs(M.c) ** 2 + abs(M.d) ** 2)


def hs_excess(M: Mat2) -> complex:
    """``(a - d)**2 + (b + c)**2``.

    Equals ``hs_norm_sq(M) - 2`` for a real unimodular M, without the
    cancellation of subtracting 2 from a norm near 2.
    """
    return (M.a - M.d) ** 2 + (M.b + M.c) ** 2
