"""Exception classes for the slab scattering library."""

from typing import Any, Dict, List, Optional, Tuple


class SlabScatterError(Exception):
    """Base exception class for all slab-scatter errors."""

    pass


class InvalidSpecError(SlabScatterError):
    """Raised when a potential specification is malformed."""

    pass


class ConfigurationError(SlabScatterError):
    """Raised when a run or pulse configuration is invalid."""

    pass


class NumericError(SlabScatterError):
    """Base class for failures of a numerical computation."""

    pass


class DomainError(NumericError):
    """Raised when an argument lies outside the domain of an operation."""

    pass


class SingularityError(NumericError):
    """Raised when a formula is evaluated at a singular point (e.g. omega = 0)."""

    pass


class AccuracyError(NumericError):
    """Raised when a numerical method cannot reach the requested accuracy."""

    def __init__(self, message: str, requested: float = float("nan"), achieved: float = float("nan")) -> None:
        super().__init__(f"{message} (requested {requested:.3g}, achieved {achieved:.3g})")
        self.requested = requested
        self.achieved = achieved


class ScaleExceededError(NumericError):
    """Raised when intermediate values exceed the double-precision guard."""

    pass


class NumericDegeneracyError(NumericError):
    """Raised when a denominator that should never vanish does."""

    pass


class EdgeSingularityError(NumericError):
    """Raised when a quantity is requested exactly at a band edge where it is singular."""

    pass


class NearEdgeError(NumericError):
    """Raised when a band-interior quantity is requested too close to an edge."""

    pass


class RefinementError(NumericError):
    """Raised when a root search cannot resolve the requested structure."""

    pass


class StabilityError(NumericError):
    """Raised when the time stepper becomes unstable."""

    def __init__(self, message: str, bound: str) -> None:
        super().__init__(f"{message}; violated bound: {bound}")
        self.bound = bound


class DomainSizeError(NumericError):
    """Raised when a simulated wave reaches the computational boundary."""

    pass


class ClassificationError(NumericError):
    """Raised when a band edge has the wrong kind for the requested operation."""

    pass


class AmbiguousClassificationError(ClassificationError):
    """Raised when edge diagnostics contradict each other."""

    def __init__(self, message: str, diagnostics: Optional[Dict[str, Any]] = None) -> None:
        super().__init__(message)
        self.diagnostics = diagnostics or {}


class UnderResolutionWarning(UserWarning):
    """Warned when a band scan grid may have missed narrow structure."""

    def __init__(self, message: str, intervals: List[Tuple[float, float]]) -> None:
        super().__init__(message)
        self.intervals = intervals
