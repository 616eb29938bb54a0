"""One-period potential profiles and their N-period truncations.

A potential is stored as exact delta terms plus piecewise smooth pieces, all
scaled by an explicit amplitude A, so that A-sweeps reuse one spec.
"""

import json
import math
from dataclasses import dataclass, field, replace
from typing import Any, Dict, List, Sequence, Tuple, Union

import jsonschema
import numpy as np

from .base import ArrayLike, Profile
from .exceptions import DomainError, InvalidSpecError
from .implementations.profiles import ConstProfile, profile_from_dict
from .logger import get_logger
from .resources.schemas import POTENTIAL_SPEC_SCHEMA

logger = get_logger(__name__)


@dataclass(frozen=True)
class DeltaTerm:
    """``strength * delta(x - offset)`` inside one period."""

    offset: float
    strength: float

    def __post_init__(self) -> None:
        if not math.isfinite(self.strength) or self.strength == 0.0:
            raise InvalidSpecError(f"Delta strength must be finite and nonzero, got {self.strength}")
        if not math.isfinite(self.offset):
            raise InvalidSpecError(f"Delta offset must be finite, got {self.offset}")


@dataclass(frozen=True)
class SmoothPiece:
    """Profile v(x) on the closed interval [lo, hi] of one period."""

    lo: float
    hi: float
    profile: Profile

    def __post_init__(self) -> None:
        if not (self.lo < self.hi):
            raise InvalidSpecError(f"Smooth piece needs lo < hi, got ({self.lo}, {self.hi})")
        ends = self.profile(np.array([self.lo, self.hi]))
        if not np.all(np.isfinite(ends)):
            raise InvalidSpecError(f"Profile is not finite on [{self.lo}, {self.hi}]")

    def contains(self, x: float) -> bool:
        return self.lo <= x <= self.hi


@dataclass(frozen=True)
class PotentialSpec:
    """One period of q(x) = A * (sum of smooth pieces + sum of deltas)."""

    period: float
    amplitude: float = 1.0
    deltas: Tuple[DeltaTerm, ...] = field(default_factory=tuple)
    smooth: Tuple[SmoothPiece, ...] = field(default_factory=tuple)

    def __post_init__(self) -> None:
        # Normalize lists to tuples so specs stay hashable and immutable.
        object.__setattr__(self, "deltas", tuple(self.deltas))
        object.__setattr__(self, "smooth", tuple(self.smooth))

        if not (math.isfinite(self.period) and self.period > 0):
            raise InvalidSpecError(f"Period must be positive, got {self.period}")
        if not math.isfinite(self.amplitude):
            raise InvalidSpecError(f"Amplitude must be finite, got {self.amplitude}")

        offsets = [d.offset for d in self.deltas]
        for offset in offsets:
            if not (0.0 <= offset < self.period):
                raise InvalidSpecError(f"Delta offset {offset} outside [0, {self.period})")
        if any(b <= a for a, b in zip(offsets, offsets[1:])):
            raise InvalidSpecError(f"Delta offsets must be strictly increasing, got {offsets}")

        pieces = sorted(self.smooth, key=lambda p: p.lo)
        for piece in pieces:
            if piece.lo < 0.0 or piece.hi > self.period:
                raise InvalidSpecError(f"Smooth piece ({piece.lo}, {piece.hi}) outside [0, {self.period}]")
        for left, right in zip(pieces, pieces[1:]):
            if right.lo < left.hi:
                raise InvalidSpecError(
                    f"Smooth pieces ({left.lo}, {left.hi}) and ({right.lo}, {right.hi}) overlap"
                )
        object.__setattr__(self, "smooth", tuple(pieces))

    @property
    def is_free(self) -> bool:
        """True for the free medium q = 0."""
        return not self.deltas and not self.smooth

    def effective_deltas(self) -> List[Tuple[float, float]]:
        """Return ``(offset, amplitude * strength)`` for every delta term."""
        return [(d.offset, self.amplitude * d.strength) for d in self.deltas]

    def with_amplitude(self, amplitude: float) -> "PotentialSpec":
        """Return a copy with a different amplitude A."""
        return replace(self, amplitude=amplitude)

    def breakpoints(self) -> List[float]:
        """Sorted points of [0, L] where the integrator must stop."""
        points = {0.0, self.period}
        points.update(d.offset for d in self.deltas)
        for piece in self.smooth:
            points.update((piece.lo, piece.hi))
        return sorted(points)

    def piece_at(self, x: float) -> Union[SmoothPiece, None]:
        """Return the smooth piece containing x (the later one at shared endpoints)."""
        found = None
        for piece in self.smooth:
            if piece.contains(x):
                found = piece
        return found


@dataclass(frozen=True)
class Truncation:
    """Number of periods kept in a finite slab."""

    periods: int

    def __post_init__(self) -> None:
        if isinstance(self.periods, bool) or not isinstance(self.periods, (int, np.integer)) or self.periods < 1:
            raise InvalidSpecError(f"Truncation needs a positive integer period count, got {self.periods!r}")


class TruncatedPotential:
    """q_N: the periodic potential on [0, NL], zero outside."""

    def __init__(self, spec: PotentialSpec, periods: Union[int, Truncation]) -> None:
        self.spec = spec
        self.truncation = periods if isinstance(periods, Truncation) else Truncation(periods)

    @property
    def periods(self) -> int:
        return int(self.truncation.periods)

    @property
    def length(self) -> float:
        return self.periods * self.spec.period

    def delta_positions(self) -> List[Tuple[float, float]]:
        """Absolute ``(position, effective strength)`` of every delta in [0, NL)."""
        L = self.spec.period
        return [(n * L + offset, strength) for n in range(self.periods) for offset, strength in self.spec.effective_deltas()]

    def evaluate_smooth(self, x: ArrayLike) -> ArrayLike:
        """Smooth part of q_N at any real x (vectorized)."""
        xs = np.asarray(x, dtype=float)
        L = self.spec.period
        inside = (xs >= 0.0) & (xs <= self.length)
        # Fold into one period; the right end NL maps to L, not 0.
        local = np.where(xs >= self.length, L, np.mod(xs, L))
        values = np.zeros_like(xs)
        for i in np.flatnonzero(inside.ravel()):
            values.flat[i] = evaluate_smooth(self.spec, float(local.flat[i]))
        return float(values) if values.ndim == 0 else values


def make_single_delta_comb(A: float, L: float) -> PotentialSpec:
    """Comb ``A * sum_n delta(x - nL)``: one unit delta at offset 0, amplitude A.

    Raises:
        InvalidSpecError: If ``L <= 0`` or ``A == 0``.
    """
    if A == 0:
        raise InvalidSpecError("Comb amplitude A must be nonzero")
    if not L > 0:
        raise InvalidSpecError(f"Comb period must be positive, got {L}")
    return PotentialSpec(period=float(L), amplitude=float(A), deltas=(DeltaTerm(0.0, 1.0),))


def make_alternating_delta_comb(A: float, l: float) -> PotentialSpec:
    """Alternating comb with period 2l: +A at offset 0 and -A at offset l.

    Raises:
        InvalidSpecError: If ``l <= 0`` or ``A == 0``.
    """
    if A == 0:
        raise InvalidSpecError("Comb amplitude A must be nonzero")
    if not l > 0:
        raise InvalidSpecError(f"Half period l must be positive, got {l}")
    return PotentialSpec(
        period=2.0 * float(l),
        amplitude=float(A),
        deltas=(DeltaTerm(0.0, 1.0), DeltaTerm(float(l), -1.0)),
    )


def make_scaled_smooth(v: Sequence[SmoothPiece], A: float, L: float) -> PotentialSpec:
    """Smooth potential ``A * v(x)`` with no deltas.

    Raises:
        InvalidSpecError: If pieces leave [0, L] or overlap.
    """
    return PotentialSpec(period=float(L), amplitude=float(A), smooth=tuple(v))


def make_constant_pieces(levels: Sequence[Tuple[float, float, float]], A: float, L: float) -> PotentialSpec:
    """Convenience wrapper: ``levels`` are ``(lo, hi, value)`` constant pieces."""
    return make_scaled_smooth([SmoothPiece(lo, hi, ConstProfile(value)) for lo, hi, value in levels], A, L)


def evaluate_smooth(spec: PotentialSpec, x: float) -> float:
    """Smooth part ``A * v(x)`` at a point of one period.

    Raises:
        DomainError: If x lies outside [0, L].
    """
    if not (0.0 <= x <= spec.period):
        raise DomainError(f"x = {x} outside [0, {spec.period}]")
    piece = spec.piece_at(x)
    if piece is None:
        return 0.0
    return spec.amplitude * float(piece.profile(x))


def spec_from_dict(data: Dict[str, Any]) -> PotentialSpec:
    """Build a spec from its JSON form after schema validation.

    Raises:
        InvalidSpecError: On schema violations or invalid values.
    """
    try:
        jsonschema.validate(instance=data, schema=POTENTIAL_SPEC_SCHEMA)
    except jsonschema.ValidationError as e:
        raise InvalidSpecError(f"Potential spec does not match schema: {e.message}")

    deltas = tuple(DeltaTerm(float(d["offset"]), float(d["strength"])) for d in data.get("deltas", []))
    smooth = tuple(
        SmoothPiece(float(p["lo"]), float(p["hi"]), profile_from_dict(p["profile"])) for p in data.get("smooth", [])
    )
    spec = PotentialSpec(
        period=float(data["period"]),
        amplitude=float(data.get("amplitude", 1.0)),
        deltas=deltas,
        smooth=smooth,
    )
    logger.debug(f"Loaded spec: period={spec.period}, amplitude={spec.amplitude}, {len(deltas)} deltas, {len(smooth)} pieces")
    return spec


def spec_to_dict(spec: PotentialSpec) -> Dict[str, Any]:
    """Serialize a spec to its JSON form."""
    return {
        "period": spec.period,
        "amplitude": spec.amplitude,
        "deltas": [{"offset": d.offset, "strength": d.strength} for d in spec.deltas],
        "smooth": [{"lo": p.lo, "hi": p.hi, "profile": p.profile.to_dict()} for p in spec.smooth],
    }


def load_spec(source: str) -> PotentialSpec:
    """Load a spec from inline JSON or from a JSON file path.

    Raises:
        InvalidSpecError: If the source is neither valid JSON nor a readable file.
    """
    try:
        return spec_from_dict(json.loads(source))
    except json.JSONDecodeError:
        try:
            with open(source, "r", encoding="utf-8") as f:
                return spec_from_dict(json.load(f))
        except (IOError, json.JSONDecodeError) as e:
            raise InvalidSpecError(f"Failed to load potential spec: {str(e)}")
