"""Utility functions for the slab scattering library."""

import json
import math
from concurrent.futures import ThreadPoolExecutor
from enum import Enum
from typing import Any, Callable, Dict, Iterable, List, Sequence, TypeVar

import numpy as np

from .config import config

T = TypeVar("T")
R = TypeVar("R")


def richardson_derivative(f: Callable[[float], float], x: float, h0: float, order: int = 1, levels: int = 2) -> float:
    """Central-difference derivative with Richardson extrapolation.

    Args:
        f: Real function of one real variable.
        x: Point of differentiation.
        h0: Initial step.
        order: 1 for the first derivative, 2 for the second.
        levels: Number of extrapolation levels on top of the plain difference.

    Returns:
        Extrapolated derivative estimate.
    """
    if order not in (1, 2):
        raise ValueError(f"Unsupported derivative order: {order}")

    f0 = f(x) if order == 2 else 0.0

    def difference(h: float) -> float:
        if order == 1:
            return (f(x + h) - f(x - h)) / (2.0 * h)
        return (f(x + h) - 2.0 * f0 + f(x - h)) / (h * h)

    # Both stencils have an error series in even powers of h.
    table = [difference(h0 / 2**i) for i in range(levels + 1)]
    for level in range(1, levels + 1):
        factor = 4.0**level
        table = [(factor * table[i + 1] - table[i]) / (factor - 1.0) for i in range(len(table) - 1)]
    return table[0]


def parallel_map(fn: Callable[[T], R], items: Iterable[T]) -> List[R]:
    """Map ``fn`` over ``items`` keeping input order.

    Uses up to ``SCATTER_THREADS`` worker threads; results are independent of
    the thread count because ``Executor.map`` preserves ordering.
    """
    items = list(items)
    if config.threads <= 1 or len(items) < 2:
        return [fn(item) for item in items]
    with ThreadPoolExecutor(max_workers=config.threads) as pool:
        return list(pool.map(fn, items))


def format_number(value: Any) -> str:
    """Format a number for CSV output with 17 significant digits."""
    if isinstance(value, Enum):
        return str(value.value)
    if isinstance(value, bool):
        return "1" if value else "0"
    if isinstance(value, int):
        return str(value)
    if isinstance(value, float):
        if math.isnan(value):
            return "nan"
        return f"{value:.17g}"
    return str(value)


def to_jsonable(value: Any) -> Any:
    """Convert numpy scalars, complex numbers and tuples to JSON-friendly values."""
    if isinstance(value, complex):
        return {"re": value.real, "im": value.imag}
    if isinstance(value, dict):
        return {str(k): to_jsonable(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [to_jsonable(v) for v in value]
    if isinstance(value, np.ndarray):
        return to_jsonable(value.tolist())
    if isinstance(value, np.generic):
        return to_jsonable(value.item())
    if isinstance(value, Enum):
        return value.value
    return value


def dumps_json(data: Dict[str, Any]) -> str:
    """Serialize a result dictionary with full float precision."""
    return json.dumps(to_jsonable(data), indent=2, allow_nan=True)


def log_log_slope(xs: Sequence[float], ys: Sequence[float]) -> float:
    """Least-squares slope of log(y) against log(x)."""
    slope, _ = np.polyfit(np.log(np.asarray(xs, dtype=float)), np.log(np.asarray(ys, dtype=float)), 1)
    return float(slope)
