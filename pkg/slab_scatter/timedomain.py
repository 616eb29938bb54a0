"""Leapfrog simulation of a pulse hitting an N-period delta comb.

Solves ``u_tt = u_xx - q_N(x) u`` with ``q_N = A sum_{m<N} delta(x - mL)`` on
a grid whose spacing divides L, so every delta sits on a node. The field is
complex; energies use squared moduli.
"""

import logging
import math
from dataclasses import dataclass, replace
from functools import lru_cache
from typing import Any, Dict, List, Optional, Tuple

import jsonschema
import numpy as np
from numpy.polynomial.legendre import leggauss
from scipy.integrate import simpson
from tenacity import Retrying, before_sleep_log, retry_if_exception_type, stop_after_attempt

from .config import config
from .exceptions import AccuracyError, ConfigurationError, DomainSizeError, StabilityError
from .logger import get_logger
from .potentials import PotentialSpec, make_single_delta_comb
from .resources.schemas import PULSE_CONFIG_SCHEMA
from .scattering import transmission_amplitudes

logger = get_logger(__name__)

# Nodes checked at each wall by the domain-size guard.
_WALL_NODES = 8
_GAUSS_NODES = 400


def envelope(s: Any) -> np.ndarray:
    """Bump ``exp(1 - 1/(1 - (2s + 1)**2))`` supported on ``(-1, 0)``, peak 1 at ``s = -1/2``."""
    s = np.asarray(s, dtype=float)
    z = 2.0 * s + 1.0
    inside = np.abs(z) < 1.0
    gap = np.where(inside, 1.0 - z * z, 1.0)
    return np.where(inside, np.exp(1.0 - 1.0 / gap), 0.0)


def envelope_derivative(s: Any) -> np.ndarray:
    s = np.asarray(s, dtype=float)
    z = 2.0 * s + 1.0
    inside = np.abs(z) < 1.0
    gap = np.where(inside, 1.0 - z * z, 1.0)
    return np.where(inside, envelope(s) * (-4.0 * z / (gap * gap)), 0.0)


@dataclass(frozen=True)
class PulseConfig:
    """Parameters of one pulse run.

    The carrier is ``omega0 = (n pi / L)(1 - theta / (A L))``; ``theta = 2``
    puts it at the centre of band n of the single comb.
    """

    amplitude: float
    periods: int
    width: float
    band_index: int = 1
    theta: float = 2.0
    period: float = 1.0
    cells_per_period: int = 64
    margin: float = 10.0
    t_end: Optional[float] = None
    scale: complex = 1.0
    record_every: int = 10

    def __post_init__(self) -> None:
        if not self.amplitude >= 0:
            raise ConfigurationError(f"Comb amplitude must be non-negative, got {self.amplitude}")
        if self.periods < 1:
            raise ConfigurationError(f"Period count must be >= 1, got {self.periods}")
        if not self.width > 0:
            raise ConfigurationError(f"Pulse width must be positive, got {self.width}")
        if self.band_index < 1:
            raise ConfigurationError(f"Band index must be >= 1, got {self.band_index}")
        if not 0 < self.theta < 4:
            raise ConfigurationError(f"theta must lie in (0, 4), got {self.theta}")
        if not self.period > 0:
            raise ConfigurationError(f"Period must be positive, got {self.period}")
        if self.cells_per_period < 2:
            raise ConfigurationError(f"Need at least 2 cells per period, got {self.cells_per_period}")
        if self.margin < 0:
            raise ConfigurationError(f"Margin must be non-negative, got {self.margin}")
        if self.t_end is not None and not self.t_end > 0:
            raise ConfigurationError(f"t_end must be positive, got {self.t_end}")
        if self.record_every < 1:
            raise ConfigurationError(f"record_every must be >= 1, got {self.record_every}")
        if self.amplitude > 0 and self.theta >= self.amplitude * self.period:
            raise ConfigurationError("Carrier frequency would be non-positive; increase A or decrease theta")

    @classmethod
    def desk_scale(cls, amplitude: float, periods: int = 7, **overrides: Any) -> "PulseConfig":
        """Desk-scale defaults: ``B = A**1.2`` and an odd N so the band centre is not a transparency point."""
        width = overrides.pop("width", amplitude**1.2 if amplitude > 0 else 50.0)
        return cls(amplitude=float(amplitude), periods=periods, width=float(width), **overrides)

    @property
    def h(self) -> float:
        return self.period / self.cells_per_period

    @property
    def omega0(self) -> float:
        base = self.band_index * math.pi / self.period
        if self.amplitude == 0:
            return base
        return base * (1.0 - self.theta / (self.amplitude * self.period))

    @property
    def dt(self) -> float:
        return config.get("timedomain.courant") * self.h / math.sqrt(1.0 + self.amplitude * self.h / 4.0)

    @property
    def slab_length(self) -> float:
        return self.periods * self.period

    @property
    def transit_time(self) -> float:
        """Slab crossing time at the group velocity of the carrier."""
        if self.amplitude == 0:
            return self.slab_length
        root = math.sqrt(4.0 * self.theta - self.theta**2)
        return self.amplitude * self.periods * self.period**2 / (self.band_index * math.pi * root)

    @property
    def resolved_t_end(self) -> float:
        if self.t_end is not None:
            return float(self.t_end)
        return self.width + 1.5 * self.transit_time + self.slab_length

    def stability_bound(self) -> str:
        return f"dt <= {config.get('timedomain.courant')} * h / sqrt(1 + A h / 4) = {self.dt:.6g}"

    def spec(self) -> PotentialSpec:
        if self.amplitude == 0:
            return PotentialSpec(period=self.period)
        return make_single_delta_comb(self.amplitude, self.period)

    def regime(self) -> Dict[str, float]:
        """Exponents ``log B / log A`` and ``log N / log A`` approximated by this run."""
        if self.amplitude <= 1.0:
            return {"width_exponent": float("nan"), "periods_exponent": float("nan")}
        log_a = math.log(self.amplitude)
        return {
            "width_exponent": math.log(self.width) / log_a,
            "periods_exponent": math.log(self.periods) / log_a,
        }

    def as_dict(self) -> Dict[str, Any]:
        return {
            "amplitude": self.amplitude,
            "periods": self.periods,
            "width": self.width,
            "band_index": self.band_index,
            "theta": self.theta,
            "period": self.period,
            "cells_per_period": self.cells_per_period,
            "margin": self.margin,
            "t_end": self.resolved_t_end,
            "record_every": self.record_every,
        }


def pulse_config_from_dict(data: Dict[str, Any]) -> PulseConfig:
    """Build a pulse configuration from JSON after schema validation.

    Raises:
        ConfigurationError: On schema violations.
    """
    try:
        jsonschema.validate(instance=data, schema=PULSE_CONFIG_SCHEMA)
    except jsonschema.ValidationError as e:
        raise ConfigurationError(f"Pulse configuration does not match schema: {e.message}")
    values = dict(data)
    return PulseConfig.desk_scale(values.pop("amplitude"), values.pop("periods"), **values)


@dataclass(frozen=True)
class Grid:
    x: np.ndarray
    h: float
    dt: float
    origin: int
    slab_end: int
    delta_nodes: np.ndarray
    delta_coupling: float

    @property
    def courant_sq(self) -> float:
        return (self.dt / self.h) ** 2


def build_grid(cfg: PulseConfig) -> Grid:
    """Hard-walled grid ``[-(B + t_end + margin), NL + t_end + margin]`` with nodes at every ``mL``."""
    return _build_grid(cfg, config.get("timedomain.courant"))


@lru_cache(maxsize=8)
def _build_grid(cfg: PulseConfig, courant: float) -> Grid:
    h = cfg.h
    t_end = cfg.resolved_t_end
    left = int(math.ceil((cfg.width + t_end + cfg.margin) / h))
    right = int(math.ceil((cfg.slab_length + t_end + cfg.margin) / h))
    x = np.arange(-left, right + 1, dtype=float) * h
    deltas = left + cfg.cells_per_period * np.arange(cfg.periods)
    dt = cfg.dt
    return Grid(
        x=x,
        h=h,
        dt=dt,
        origin=left,
        slab_end=left + cfg.cells_per_period * cfg.periods,
        delta_nodes=deltas,
        delta_coupling=dt * dt * cfg.amplitude / h,
    )


@dataclass(frozen=True)
class FieldState:
    """Two consecutive time levels; ``current`` is at time ``t``.

    ``norm_mark`` is the field norm at the last growth checkpoint.
    """

    previous: np.ndarray
    current: np.ndarray
    t: float
    dt: float
    direction: int = 1
    steps: int = 0
    norm_mark: float = float("nan")


@dataclass(frozen=True)
class EnergySnapshot:
    t: float
    total: float
    left: float
    slab: float
    right: float


def initial_profile(cfg: PulseConfig, x: np.ndarray) -> np.ndarray:
    """``u0(x) = scale B^{-1/2} alpha(x/B) exp(i omega0 x)``."""
    B = cfg.width
    return cfg.scale * envelope(x / B) * np.exp(1j * cfg.omega0 * x) / math.sqrt(B)


def pulse_energy(cfg: PulseConfig) -> float:
    """Exact ``2 int |u0'|^2 = 2 |scale|^2 (omega0^2 |alpha|^2 + |alpha'|^2 / B^2)``."""
    s, weights = leggauss(_GAUSS_NODES)
    s = 0.5 * (s - 1.0)
    weights = 0.5 * weights
    alpha_sq = float(np.sum(weights * envelope(s) ** 2))
    slope_sq = float(np.sum(weights * envelope_derivative(s) ** 2))
    return 2.0 * abs(cfg.scale) ** 2 * (cfg.omega0**2 * alpha_sq + slope_sq / cfg.width**2)


def make_initial_pulse(cfg: PulseConfig) -> FieldState:
    """Levels ``u(x, -dt) = u0(x + dt)`` and ``u(x, 0) = u0(x)`` of the right-moving pulse.

    Raises:
        ConfigurationError: If the pulse support does not fit left of the slab.
    """
    grid = build_grid(cfg)
    if grid.x[0] > -cfg.width - grid.dt:
        raise ConfigurationError(f"Pulse support [-{cfg.width}, 0] does not fit in the domain")
    current = initial_profile(cfg, grid.x)
    previous = initial_profile(cfg, grid.x + grid.dt)
    if np.any(np.abs(current[grid.origin:]) > 0):
        raise ConfigurationError("Initial pulse overlaps the slab [0, NL]")
    return FieldState(
        previous=previous, current=current, t=0.0, dt=grid.dt, norm_mark=float(np.linalg.norm(current))
    )


def _advance(old: np.ndarray, cur: np.ndarray, grid: Grid, mirror: bool = False) -> np.ndarray:
    new = np.empty_like(cur)
    new[1:-1] = 2.0 * cur[1:-1] - old[1:-1] + grid.courant_sq * (cur[2:] - 2.0 * cur[1:-1] + cur[:-2])
    if mirror:
        new[grid.origin] = 0.0
    else:
        new[grid.delta_nodes] -= grid.delta_coupling * cur[grid.delta_nodes]
    new[0] = 0.0
    new[-1] = 0.0
    return new


def step(state: FieldState, cfg: PulseConfig) -> FieldState:
    """One leapfrog step ``u+ = 2u - u- + (dt/h)^2 D2 u - dt^2 q u``.

    Every ``timedomain.check_every`` steps the field norm is compared with
    the previous checkpoint.

    Raises:
        StabilityError: If the new level is not finite, or its norm grew by
            more than ``timedomain.growth_limit`` since the last checkpoint.
    """
    grid = build_grid(cfg)
    new = _advance(state.previous, state.current, grid)
    steps = state.steps + 1
    t = state.t + state.direction * state.dt
    if not np.all(np.isfinite(new)):
        raise StabilityError(f"Field became non-finite at t = {t:.6g}", cfg.stability_bound())

    mark = state.norm_mark
    check_every = config.get("timedomain.check_every")
    if steps % check_every == 0:
        norm = float(np.linalg.norm(new))
        growth_limit = config.get("timedomain.growth_limit")
        if mark > 0 and norm > growth_limit * mark:
            raise StabilityError(f"Field norm grew {norm / mark:.3g}x over {check_every} steps", cfg.stability_bound())
        mark = norm
    return FieldState(
        previous=state.current,
        current=new,
        t=t,
        dt=state.dt,
        direction=state.direction,
        steps=steps,
        norm_mark=mark,
    )


def reverse(state: FieldState) -> FieldState:
    """Swap the two levels so that stepping runs backwards in time."""
    return FieldState(
        previous=state.current,
        current=state.previous,
        t=state.t - state.direction * state.dt,
        dt=state.dt,
        direction=-state.direction,
        steps=state.steps,
        norm_mark=state.norm_mark,
    )


def _inner(u: np.ndarray, v: np.ndarray) -> np.ndarray:
    return np.real(np.conj(u) * v)


def _energy_parts(old: np.ndarray, cur: np.ndarray, grid: Grid) -> Tuple[float, float, float, float]:
    """Staggered energy ``|D_t u|^2 + <u^n, L u^{n-1}>`` between the two levels.

    This is the quantity the leapfrog scheme conserves exactly (up to
    rounding) while the Courant bound holds. Node terms and edge terms are
    split at ``x = 0`` and ``x = NL``; the delta term is
    ``A u^n u^{n-1}`` at each delta node.
    """
    velocity = _inner(cur - old, cur - old) / grid.dt**2
    gradient = _inner(np.diff(cur), np.diff(old)) / grid.h**2
    weight = grid.delta_coupling * grid.h / grid.dt**2
    delta = weight * float(np.sum(_inner(cur[grid.delta_nodes], old[grid.delta_nodes])))

    o, s = grid.origin, grid.slab_end
    left = grid.h * (float(np.sum(velocity[:o])) + float(np.sum(gradient[:o])))
    slab = grid.h * (float(np.sum(velocity[o : s + 1])) + float(np.sum(gradient[o:s]))) + delta
    right = grid.h * (float(np.sum(velocity[s + 1 :])) + float(np.sum(gradient[s:])))
    return left + slab + right, left, slab, right


def total_energy(state: FieldState, cfg: PulseConfig) -> EnergySnapshot:
    """Discrete energy of the step ending at ``state.t``, split at ``x = 0`` and ``x = NL``."""
    grid = build_grid(cfg)
    total, left, slab, right = _energy_parts(state.previous, state.current, grid)
    return EnergySnapshot(state.t, total, left, slab, right)


@dataclass
class EnergyReport:
    """Energy time series of a run plus the reflected remainder ``g`` on ``x < 0``.

    ``g`` is the difference between the field and a reference run on the
    same grid with a perfect mirror at ``x = 0``; ``g_energy_analytic`` uses
    the continuum mirror solution ``u0(x - t) - u0(-x - t)`` instead.
    """

    config: PulseConfig
    times: np.ndarray
    total: np.ndarray
    left: np.ndarray
    slab: np.ndarray
    right: np.ndarray
    initial_energy: float
    g_x: np.ndarray
    g: np.ndarray
    g_energy: float
    g_energy_analytic: float
    final_state: Optional[FieldState] = None

    @property
    def drift(self) -> float:
        """Largest relative deviation of the total energy from its first record."""
        return float(np.max(np.abs(self.total - self.total[0])) / self.total[0])

    def snapshot(self, index: int = -1) -> EnergySnapshot:
        return EnergySnapshot(
            float(self.times[index]),
            float(self.total[index]),
            float(self.left[index]),
            float(self.slab[index]),
            float(self.right[index]),
        )

    def energy_at(self, t: float) -> EnergySnapshot:
        """Last record at or before ``t``."""
        index = max(0, int(np.searchsorted(self.times, t, side="right")) - 1)
        return self.snapshot(index)

    def fractions(self, index: int = -1) -> Dict[str, float]:
        total = float(self.total[index])
        return {
            "reflected": float(self.left[index]) / total,
            "inside": float(self.slab[index]) / total,
            "transmitted": float(self.right[index]) / total,
        }

    def rows(self) -> List[Tuple[float, float, float, float, float]]:
        return [
            (float(t), float(e), float(l), float(s), float(r))
            for t, e, l, s, r in zip(self.times, self.total, self.left, self.slab, self.right)
        ]

    def summary(self) -> Dict[str, Any]:
        cfg = self.config
        pre_transit_time = 0.5 * cfg.transit_time
        pre = self.energy_at(pre_transit_time)
        final = self.fractions()
        return {
            "config": cfg.as_dict(),
            "omega0": cfg.omega0,
            "h": cfg.h,
            "dt": cfg.dt,
            "initial_energy": self.initial_energy,
            "final_energy": float(self.total[-1]),
            "drift": self.drift,
            "reflected_fraction": final["reflected"],
            "inside_fraction": final["inside"],
            "transmitted_fraction": final["transmitted"],
            "g_energy": self.g_energy,
            "g_energy_analytic": self.g_energy_analytic,
            "g_fraction": 2.0 * self.g_energy / self.initial_energy,
            "transit_time": cfg.transit_time,
            "pre_transit_time": pre.t,
            "pre_transit_right_fraction": pre.right / pre.total,
            "regime": cfg.regime(),
        }


def run(cfg: PulseConfig, t_end: Optional[float] = None, reference: bool = True) -> EnergyReport:
    """Evolve the pulse to ``t_end`` recording energies every ``record_every`` steps.

    Raises:
        StabilityError: If the field norm grows past ``timedomain.growth_limit`` per check window.
        DomainSizeError: If the wave reaches a wall.
    """
    if t_end is not None and t_end != cfg.resolved_t_end:
        cfg = replace(cfg, t_end=float(t_end))
    grid = build_grid(cfg)
    state = make_initial_pulse(cfg)
    horizon = cfg.resolved_t_end
    n_steps = int(math.ceil(horizon / grid.dt))

    check_every = config.get("timedomain.check_every")
    wall_limit = config.get("timedomain.boundary_tol") * float(np.max(np.abs(state.current)))

    ref_old, ref_cur = state.previous.copy(), state.current.copy()
    records: List[Tuple[float, float, float, float, float]] = []

    logger.info(
        f"Pulse run: A={cfg.amplitude}, N={cfg.periods}, B={cfg.width:.6g}, omega0={cfg.omega0:.10g}, "
        f"{grid.x.size} nodes, {n_steps} steps of dt={grid.dt:.6g}"
    )
    for n in range(n_steps + 1):
        if n % cfg.record_every == 0 or n == n_steps:
            parts = _energy_parts(state.previous, state.current, grid)
            records.append((n * grid.dt, *parts))
            logger.debug(f"t={n * grid.dt:.6g} E={parts[0]:.12g} left={parts[1]:.6g} slab={parts[2]:.6g} right={parts[3]:.6g}")
        if n == n_steps:
            break
        state = step(state, cfg)
        if reference:
            ref_old, ref_cur = ref_cur, _advance(ref_old, ref_cur, grid, mirror=True)

        if state.steps % check_every == 0:
            cur = state.current
            wall = max(float(np.max(np.abs(cur[:_WALL_NODES]))), float(np.max(np.abs(cur[-_WALL_NODES:]))))
            if wall > wall_limit:
                raise DomainSizeError(
                    f"Wave reached the wall at t = {state.t:.6g} (|u| = {wall:.3g}); enlarge the margin"
                )

    final_t = n_steps * grid.dt
    cur = state.current
    g_x = grid.x[: grid.origin]
    left_field = cur[: grid.origin]
    mirror_field = initial_profile(cfg, g_x - final_t) - initial_profile(cfg, -g_x - final_t)
    g = left_field - ref_cur[: grid.origin] if reference else left_field - mirror_field
    g_energy = grid.h * float(np.sum(np.abs(np.gradient(g, grid.h)) ** 2))
    g_analytic = left_field - mirror_field
    g_energy_analytic = grid.h * float(np.sum(np.abs(np.gradient(g_analytic, grid.h)) ** 2))

    table = np.array(records)
    report = EnergyReport(
        config=cfg,
        times=table[:, 0],
        total=table[:, 1],
        left=table[:, 2],
        slab=table[:, 3],
        right=table[:, 4],
        initial_energy=pulse_energy(cfg),
        g_x=g_x,
        g=g,
        g_energy=g_energy,
        g_energy_analytic=g_energy_analytic,
        final_state=state,
    )
    logger.info(
        f"Pulse run finished at t={final_t:.6g}: drift={report.drift:.3g}, "
        f"transmitted={report.fractions()['transmitted']:.6g}, g_energy={g_energy:.6g}"
    )
    return report


def envelope_transform(xi: np.ndarray, nodes: int = _GAUSS_NODES, chunk: int = 4096) -> np.ndarray:
    """``alpha~(xi) = int_{-1}^{0} alpha(s) exp(-i xi s) ds`` by Gauss-Legendre quadrature."""
    s, weights = leggauss(nodes)
    s = 0.5 * (s - 1.0)
    weighted = 0.5 * weights * envelope(s)
    xi = np.asarray(xi, dtype=float)
    out = np.empty(xi.shape, dtype=complex)
    flat_in, flat_out = xi.ravel(), out.ravel()
    for start in range(0, flat_in.size, chunk):
        block = flat_in[start : start + chunk]
        flat_out[start : start + chunk] = np.exp(-1j * np.outer(block, s)) @ weighted
    return flat_out.reshape(xi.shape)


def _oracle_estimates(cfg: PulseConfig, t: Optional[float], points: int, xi_max: float) -> Tuple[float, float]:
    """Transmitted energy on ``points`` and on ``points/2`` frequency intervals."""
    B = cfg.width
    half = xi_max / B
    lo = max(cfg.omega0 - half, 1e-6 * cfg.omega0)
    omegas = np.linspace(lo, cfg.omega0 + half, points + 1)
    spectrum = cfg.scale * math.sqrt(B) * envelope_transform(B * (omegas - cfg.omega0))
    amplitudes = transmission_amplitudes(cfg.spec(), cfg.periods, omegas)

    if t is None:
        integrand = omegas**2 * np.abs(amplitudes) ** 2 * np.abs(spectrum) ** 2
        fine = simpson(integrand, x=omegas) / math.pi
        coarse = simpson(integrand[::2], x=omegas[::2]) / math.pi
        return float(fine), float(coarse)

    def beyond_slab(stride: int) -> float:
        w = omegas[::stride]
        G = 1j * w * spectrum[::stride] * amplitudes[::stride]
        dw = w[1] - w[0]
        n = w.size
        ds = 2.0 * math.pi / (n * dw)
        # f'(s_j) = dw/(2 pi) sum_k G_k exp(i w_k s_j); the common phase drops out of |f'|.
        derivative = dw / (2.0 * math.pi) * n * np.fft.ifft(G)
        s = np.arange(n) * ds
        s = np.where(s >= 0.5 * n * ds, s - n * ds, s)
        mask = s >= cfg.slab_length - t
        return 2.0 * ds * float(np.sum(np.abs(derivative[mask]) ** 2))

    return beyond_slab(1), beyond_slab(2)


def freq_domain_oracle(cfg: PulseConfig, t: Optional[float] = None, points: int = 2**14, xi_max: float = 120.0) -> float:
    """Transmitted energy predicted from ``t_N(omega)`` and the pulse spectrum.

    With ``t=None`` this is ``(1/pi) int omega^2 |t_N|^2 |u0~|^2 d omega``,
    the total energy that eventually passes the slab. With a finite ``t`` it
    is the energy beyond ``x = NL`` at time ``t``, from Fourier synthesis of
    the transmitted wave. The frequency grid is doubled until halving it
    changes the result by less than ``timedomain.oracle_tol``.

    Raises:
        AccuracyError: If the quadrature does not converge.
    """
    tol = config.get("timedomain.oracle_tol")
    floor = 1e-6 * pulse_energy(cfg)
    retrying = Retrying(
        stop=stop_after_attempt(4),
        retry=retry_if_exception_type(AccuracyError),
        before_sleep=before_sleep_log(logger, logging.WARNING),
        reraise=True,
    )
    for attempt in retrying:
        with attempt:
            n = points * 2 ** (attempt.retry_state.attempt_number - 1)
            fine, coarse = _oracle_estimates(cfg, t, n, xi_max)
            change = abs(fine - coarse) / max(abs(fine), floor)
            if change > tol:
                raise AccuracyError(f"Oracle quadrature on {n} intervals has not converged", requested=tol, achieved=change)
            logger.debug(f"Oracle converged on {n} intervals: {fine:.12g}")
            return fine


def write_snapshot(path: str, state: FieldState, h: float) -> None:
    """Write the current level: int64 size, float64 h, float64 t, then (re, im) float64 pairs, little-endian."""
    values = np.asarray(state.current, dtype="<c16")
    with open(path, "wb") as f:
        f.write(np.array([values.size], dtype="<i8").tobytes())
        f.write(np.array([h, state.t], dtype="<f8").tobytes())
        f.write(values.tobytes())


def read_snapshot(path: str) -> Tuple[np.ndarray, float, float]:
    """Read a snapshot written by :func:`write_snapshot`; returns ``(values, h, t)``."""
    with open(path, "rb") as f:
        size = int(np.frombuffer(f.read(8), dtype="<i8")[0])
        h, t = np.frombuffer(f.read(16), dtype="<f8")
        values = np.frombuffer(f.read(16 * size), dtype="<c16")
    if values.size != size:
        raise ConfigurationError(f"Snapshot {path} is truncated: expected {size} values, read {values.size}")
    return values.astype(complex), float(h), float(t)
