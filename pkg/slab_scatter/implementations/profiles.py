"""Concrete smooth profiles: constant, polynomial, tabulated and callable."""

from dataclasses import dataclass
from typing import Any, Callable, Dict, Optional, Tuple

import numpy as np
from numpy.polynomial import polynomial as P

from ..base import ArrayLike, Profile
from ..exceptions import InvalidSpecError


@dataclass(frozen=True)
class ConstProfile(Profile):
    """v(x) = value."""

    value: float

    def __post_init__(self) -> None:
        if not np.isfinite(self.value):
            raise InvalidSpecError(f"Constant profile must be finite, got {self.value}")

    def __call__(self, x: ArrayLike) -> ArrayLike:
        if np.ndim(x) == 0:
            return float(self.value)
        return np.full(np.shape(x), float(self.value))

    def to_dict(self) -> Dict[str, Any]:
        return {"kind": "const", "value": self.value}

    def constant_value(self) -> Optional[float]:
        return float(self.value)


@dataclass(frozen=True)
class PolyProfile(Profile):
    """v(x) = sum_j coefficients[j] * x**j, x absolute within the period."""

    coefficients: Tuple[float, ...]

    def __post_init__(self) -> None:
        if not self.coefficients:
            raise InvalidSpecError("Polynomial profile needs at least one coefficient")
        if not all(np.isfinite(c) for c in self.coefficients):
            raise InvalidSpecError("Polynomial coefficients must be finite")

    def __call__(self, x: ArrayLike) -> ArrayLike:
        value = P.polyval(x, self.coefficients)
        return float(value) if np.ndim(x) == 0 else value

    def to_dict(self) -> Dict[str, Any]:
        return {"kind": "poly", "coefficients": list(self.coefficients)}

    def constant_value(self) -> Optional[float]:
        if all(c == 0.0 for c in self.coefficients[1:]):
            return float(self.coefficients[0])
        return None


@dataclass(frozen=True)
class TableProfile(Profile):
    """Linearly interpolated table of (x, v) samples."""

    xs: Tuple[float, ...]
    values: Tuple[float, ...]

    def __post_init__(self) -> None:
        if len(self.xs) < 2 or len(self.xs) != len(self.values):
            raise InvalidSpecError("Table profile needs at least two (x, value) pairs of equal length")
        if any(b <= a for a, b in zip(self.xs, self.xs[1:])):
            raise InvalidSpecError("Table profile abscissae must be strictly increasing")
        if not all(np.isfinite(v) for v in self.values):
            raise InvalidSpecError("Table profile values must be finite")

    def __call__(self, x: ArrayLike) -> ArrayLike:
        value = np.interp(x, self.xs, self.values)
        return float(value) if np.ndim(x) == 0 else value

    def to_dict(self) -> Dict[str, Any]:
        return {"kind": "table", "xs": list(self.xs), "values": list(self.values)}

    def constant_value(self) -> Optional[float]:
        if all(v == self.values[0] for v in self.values):
            return float(self.values[0])
        return None


@dataclass(frozen=True)
class CallableProfile(Profile):
    """Wraps an in-process real function; not serializable."""

    fn: Callable[[ArrayLike], ArrayLike]
    name: str = "callable"

    def __call__(self, x: ArrayLike) -> ArrayLike:
        return self.fn(x)

    def to_dict(self) -> Dict[str, Any]:
        raise InvalidSpecError(f"Profile '{self.name}' wraps a Python callable and has no JSON form")


def profile_from_dict(data: Dict[str, Any]) -> Profile:
    """Build a profile from its JSON form.

    Args:
        data: Mapping with a ``kind`` of ``const``, ``poly`` or ``table``.

    Returns:
        The corresponding profile.

    Raises:
        InvalidSpecError: If the kind is unknown or fields are missing.
    """
    kind = data.get("kind")
    try:
        if kind == "const":
            return ConstProfile(float(data["value"]))
        if kind == "poly":
            return PolyProfile(tuple(float(c) for c in data["coefficients"]))
        if kind == "table":
            return TableProfile(tuple(float(x) for x in data["xs"]), tuple(float(v) for v in data["values"]))
    except KeyError as e:
        raise InvalidSpecError(f"Profile of kind '{kind}' is missing field {str(e)}")
    raise InvalidSpecError(f"Unknown profile kind: {kind!r}")
