"""Configuration management for the slab scattering library."""

import os
from contextlib import contextmanager
from typing import Any, Dict, Iterator, Mapping

from dotenv import load_dotenv

from .exceptions import ConfigurationError

ENV_PREFIX = "SCATTER_"

# Namespaced tolerances. Keys are "<module>.<name>".
DEFAULTS: Dict[str, Any] = {
    # transfer
    "transfer.det_tol": 1e-10,
    "transfer.ode_rtol": 1e-10,
    "transfer.ode_atol": 1e-12,
    "transfer.ode_retries": 3,
    "transfer.overflow": 1e300,
    # spectrum
    "spectrum.edge_tol": 1e-9,
    "spectrum.branch_tol": 1e-9,
    "spectrum.nudges": (1e-4, 1e-6, 1e-8),
    "spectrum.richardson_step": 1e-4,
    "spectrum.tol_der": 1e-6,
    "spectrum.tol_mat": 1e-6,
    "spectrum.interior_margin": 1e-6,
    "spectrum.bisect_rtol": 1e-12,
    "spectrum.densify_min": 16,
    "spectrum.densify_max_points": 4096,
    "spectrum.weyl_tol": 1e-8,
    # scattering
    "scattering.conservation_tol": 1e-9,
    "scattering.formula_tol": 1e-9,
    "scattering.transparency_tol": 1e-9,
    "scattering.underflow": 1e-280,
    # timedomain
    "timedomain.courant": 0.9,
    "timedomain.growth_limit": 10.0,
    "timedomain.check_every": 100,
    "timedomain.boundary_tol": 1e-10,
    "timedomain.oracle_tol": 1e-3,
    # verify (acceptance bounds)
    "verify.det_tol": 1e-8,
    "verify.chebyshev_tol": 1e-8,
    "verify.rnr_tol": 1e-9,
    "verify.tnt_tol": 1e-10,
    "verify.conservation_tol": 1e-9,
    "verify.edge_ep_tol": 1e-10,
    "verify.vg_slope_tol": 0.05,
    "verify.degenerate_tol": 1e-8,
    "verify.decay_tol": 0.02,
    "verify.geometric_ratio": 0.9,
    "verify.drift_tol": 1e-3,
    "verify.oracle_rel_tol": 0.10,
}


class Config:
    """Configuration management for numerical tolerances and runtime settings."""

    def __init__(self) -> None:
        """Initialize configuration from the environment (and a .env file, if present)."""
        load_dotenv()

        self._overrides: Dict[str, Any] = {}

        # General settings
        self.threads = max(1, int(os.getenv("SCATTER_THREADS", "1")))
        self.log_level = os.getenv("SCATTER_LOG_LEVEL", "WARNING").upper()
        self.log_file = os.getenv("SCATTER_LOG_FILE") or None

    @staticmethod
    def env_name(key: str) -> str:
        """Return the environment variable consulted for a namespaced key.

        Args:
            key: Namespaced key such as ``transfer.det_tol``.

        Returns:
            Environment variable name such as ``SCATTER_TRANSFER_DET_TOL``.
        """
        return ENV_PREFIX + key.upper().replace(".", "_")

    def _check_key(self, key: str) -> None:
        if key not in DEFAULTS:
            raise ConfigurationError(f"Unknown configuration key: {key}")

    def get(self, key: str) -> Any:
        """Resolve a setting: override, then environment, then default.

        Args:
            key: Namespaced key.

        Returns:
            The resolved value, coerced to the type of its default.

        Raises:
            ConfigurationError: If the key is unknown or the value cannot be parsed.
        """
        self._check_key(key)
        if key in self._overrides:
            return self._overrides[key]
        raw = os.getenv(self.env_name(key))
        if raw is None:
            return DEFAULTS[key]
        return self._coerce(key, raw)

    def set(self, key: str, value: Any) -> None:
        """Override a setting for the rest of the process.

        Args:
            key: Namespaced key.
            value: New value; strings are parsed to the type of the default.
        """
        self._check_key(key)
        self._overrides[key] = self._coerce(key, value) if isinstance(value, str) else value

    def reset(self) -> None:
        """Drop every override."""
        self._overrides.clear()

    @contextmanager
    def overridden(self, mapping: Mapping[str, Any]) -> Iterator["Config"]:
        """Temporarily apply overrides.

        Args:
            mapping: Keys and values to override inside the ``with`` block.
        """
        saved = dict(self._overrides)
        try:
            for key, value in mapping.items():
                self.set(key, value)
            yield self
        finally:
            self._overrides = saved

    def as_dict(self) -> Dict[str, Any]:
        """Return every setting with its resolved value."""
        return {key: self.get(key) for key in DEFAULTS}

    @staticmethod
    def _coerce(key: str, raw: Any) -> Any:
        default = DEFAULTS[key]
        try:
            if isinstance(default, tuple):
                if isinstance(raw, str):
                    return tuple(float(part) for part in raw.split(",") if part.strip())
                return tuple(float(part) for part in raw)
            if isinstance(default, int) and not isinstance(default, bool):
                return int(raw)
            return float(raw)
        except (TypeError, ValueError) as e:
            raise ConfigurationError(f"Invalid value for {key}: {raw!r} ({str(e)})")


# Create a default configuration instance
config = Config()
