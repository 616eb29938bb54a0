"""Base abstract class for smooth potential profiles."""

from abc import ABC, abstractmethod
from typing import Any, Dict, Optional, Union

import numpy as np

ArrayLike = Union[float, np.ndarray]


class Profile(ABC):
    """Abstract base class for the real profile v(x) of a smooth potential piece."""

    @abstractmethod
    def __call__(self, x: ArrayLike) -> ArrayLike:
        """Evaluate the profile.

        Args:
            x: Position(s) in the absolute coordinate of one period.

        Returns:
            Profile value(s), same shape as ``x``.
        """
        pass

    @abstractmethod
    def to_dict(self) -> Dict[str, Any]:
        """Serialize the profile to its JSON form.

        Raises:
            InvalidSpecError: If the profile has no JSON representation.
        """
        pass

    def constant_value(self) -> Optional[float]:
        """Return the value if the profile is constant, otherwise None.

        Constant pieces are propagated in closed form instead of by the
        adaptive integrator.
        """
        return None
