"""Reference generators for the benchmark systems.

The stochastic models are written as explicit recurrences.
Every noise term ``N(0, s)`` is converted to a standard deviation with
``noise_notation``: ``"variance"`` (the default) reads ``s`` as a variance,
``"std"`` as a standard deviation.  Each noise term draws from its own
stream seeded from ``(seed, stream index)``, so ``stream_seeds`` can
re-seed one stream without touching the others.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Mapping, Sequence

import numpy as np

from .core import Dataset, NumericalError, ProcessSeries, ValidationError

__all__ = [
    "MODELS",
    "MODEL_NOISE",
    "SimConfig",
    "noise_std",
    "simulate_model",
    "rk4_step",
    "lorenz63_field",
    "coupled_lorenz_field",
    "simulate_lorenz63",
    "simulate_coupled_lorenz",
    "simulate_enso_like",
    "LORENZ_X0",
]

MODELS = ("1", "2", "3", "4", "5", "6", "confounder")

#: Reference noise parameters ``s`` of N(0, s), per model and noise stream.
MODEL_NOISE = {
    "1": {"x": 1e-4, "y": 1.0, "z": 1.0},
    "2": {"x": 1e-4, "y": 1.0, "z": 1.0},
    "3": {"x": 1e-4, "y": 1e-2, "z": 1.0},
    "4": {"x": 1e-4, "y": 1e-2, "z": 1e-2},
    "5": {"x": 1e-6, "y": 1e-4, "z": 1e-4},
    "6": {"x": 1e-4, "y": 1.0, "z": 1.0, "w": 1.0},
    "confounder": {"x": 1e-4, "y": 1e-2, "z": 1e-2},
}

# models 4, 5 and the confounder system carry memory and need a burn-in
MEMORY_MODELS = ("4", "5", "confounder")
DEFAULT_BURN_IN = 100

LORENZ_X0 = (1.50887, -1.531271, 25.46091)
BLOWUP_LIMIT = 1e6


@dataclass(frozen=True)
class SimConfig:
    """Settings for :func:`simulate_model`.

    ``noise`` overrides entries of :data:`MODEL_NOISE` (in the chosen
    notation); ``stream_seeds`` re-seeds individual noise streams.
    """

    model: str
    steps: int
    seed: int = 0
    noise_notation: str = "variance"
    noise: Mapping[str, float] = field(default_factory=dict)
    stream_seeds: Mapping[str, int] = field(default_factory=dict)
    burn_in: int | None = None

    def __post_init__(self):
        model = str(self.model)
        if model not in MODELS:
            raise ValidationError(f"unknown model {self.model!r}; choose from {MODELS}")
        object.__setattr__(self, "model", model)
        if int(self.steps) < 1:
            raise ValidationError("steps must be >= 1")
        if self.noise_notation not in ("variance", "std"):
            raise ValidationError(f"unknown noise notation {self.noise_notation!r}")
        unknown = set(self.noise) - set(MODEL_NOISE[model])
        if unknown:
            raise ValidationError(f"model {model} has no noise streams {sorted(unknown)}")
        if self.burn_in is not None and self.burn_in < 0:
            raise ValidationError("burn_in must be >= 0")

    @property
    def effective_burn_in(self) -> int:
        if self.burn_in is not None:
            return self.burn_in
        # memoryless models still need two leading samples for the lags
        return DEFAULT_BURN_IN if self.model in MEMORY_MODELS else 2


def noise_std(s: float, notation: str = "variance") -> float:
    """Standard deviation of N(0, s) under the given notation."""
    if s < 0:
        raise ValidationError("noise parameter must be non-negative")
    if notation == "variance":
        return math.sqrt(s)
    if notation == "std":
        return float(s)
    raise ValidationError(f"unknown noise notation {notation!r}")


def _streams(cfg: SimConfig, n: int) -> dict[str, np.ndarray]:
    levels = {**MODEL_NOISE[cfg.model], **cfg.noise}
    out = {}
    for index, name in enumerate(MODEL_NOISE[cfg.model]):
        seed = cfg.stream_seeds.get(name, cfg.seed)
        rng = np.random.default_rng([int(seed), index])
        out[name] = noise_std(levels[name], cfg.noise_notation) * rng.standard_normal(n)
    return out


def simulate_model(model, steps: int | None = None, seed: int = 0, **options) -> Dataset:
    """Simulate one of the benchmark models and return series x, y, z (and w).

    ``model`` is a model id (``"1"``..``"6"``, ``"confounder"``) or a
    :class:`SimConfig`; extra keyword options are passed to ``SimConfig``.
    """
    cfg = model if isinstance(model, SimConfig) else SimConfig(str(model), steps, seed, **options)
    burn = cfg.effective_burn_in
    n = cfg.steps + burn
    e = _streams(cfg, n)
    x = np.zeros(n)
    m = cfg.model
    if m == "1":
        y, z = e["y"], e["z"]
        x[1:] = 2 * y[:-1] + z[:-1] + e["x"][1:]
        series = {"x": x, "y": y, "z": z}
    elif m == "2":
        y = e["y"]
        z = np.zeros(n)
        z[1:] = y[:-1] + e["z"][1:]
        x[1:] = z[:-1] + e["x"][1:]
        series = {"x": x, "y": y, "z": z}
    elif m == "3":
        z = e["z"]
        y = np.zeros(n)
        y[1:] = z[:-1] + e["y"][1:]
        x[1:] = z[:-1] + e["x"][1:]
        series = {"x": x, "y": y, "z": z}
    elif m == "4":
        y, z = np.zeros(n), np.zeros(n)
        ex, ey, ez = e["x"].tolist(), e["y"].tolist(), e["z"].tolist()
        xs, ys, zs = [0.0] * n, [0.0] * n, [0.0] * n
        for i in range(1, n):
            zs[i] = 0.4 * zs[i - 1] + ez[i]
            ys[i] = 0.5 * ys[i - 1] + 0.5 * zs[i - 1] + ey[i]
            xs[i] = 0.4 * xs[i - 1] + 0.4 * zs[i - 1] + ex[i]
        series = {"x": np.array(xs), "y": np.array(ys), "z": np.array(zs)}
    elif m == "5":
        ex, ey, ez = e["x"].tolist(), e["y"].tolist(), e["z"].tolist()
        xs, ys, zs = [0.0] * n, [0.0] * n, [0.0] * n
        for i in range(1, n):
            ys[i] = 0.3 * ys[i - 1] + ey[i]
            zs[i] = ys[i - 1] + ez[i]
            xs[i] = 0.6 * xs[i - 1] + ys[i - 1] * zs[i - 1] + 0.3 * zs[i - 1] + ex[i]
        series = {"x": np.array(xs), "y": np.array(ys), "z": np.array(zs)}
    elif m == "6":
        y, z = e["y"], e["z"]
        w = np.zeros(n)
        w[1:] = y[:-1] + 4 * z[:-1] + e["w"][1:]
        x[2:] = w[1:-1] + 0.6 * y[:-2] + 0.4 * z[:-2] + e["x"][2:]
        series = {"x": x, "y": y, "z": z, "w": w}
    else:  # confounder: x = 2y + z + noise; y, z AR(1) driven by lagged noise
        ex, ey, ez = e["x"].tolist(), e["y"].tolist(), e["z"].tolist()
        xs, ys, zs = [0.0] * n, [0.0] * n, [0.0] * n
        for i in range(1, n):
            ys[i] = 0.3 * ys[i - 1] + ey[i - 1]
            zs[i] = 0.6 * zs[i - 1] + ez[i - 1]
            xs[i] = 2 * ys[i - 1] + zs[i - 1] + ex[i]
        series = {"x": np.array(xs), "y": np.array(ys), "z": np.array(zs)}
    return Dataset(tuple(ProcessSeries(k, v[burn:]) for k, v in series.items()))


def rk4_step(field: Callable[[Sequence[float]], Sequence[float]], state, dt: float) -> tuple:
    """One classical fourth-order Runge-Kutta step for an autonomous field."""
    k1 = field(state)
    k2 = field([s + 0.5 * dt * k for s, k in zip(state, k1)])
    k3 = field([s + 0.5 * dt * k for s, k in zip(state, k2)])
    k4 = field([s + dt * k for s, k in zip(state, k3)])
    return tuple(s + dt / 6.0 * (a + 2.0 * b + 2.0 * c + d)
                 for s, a, b, c, d in zip(state, k1, k2, k3, k4))


def lorenz63_field(sigma=10.0, rho=28.0, beta=8.0 / 3.0):
    def field(s):
        x, y, z = s
        return (sigma * (y - x), rho * x - x * z - y, x * y - beta * z)
    return field


def coupled_lorenz_field(eps, sigma=10.0, rho=28.0, beta=8.0 / 3.0):
    """Two Lorenz-63 systems; the second drives the first through ``eps * (x2 - x1)``."""
    def field(s):
        x1, y1, z1, x2, y2, z2 = s
        return (sigma * (y1 - x1) + eps * (x2 - x1), rho * x1 - x1 * z1 - y1, x1 * y1 - beta * z1,
                sigma * (y2 - x2), rho * x2 - x2 * z2 - y2, x2 * y2 - beta * z2)
    return field


def _integrate(field, state, dt, steps, spinup=0):
    state = tuple(float(v) for v in state)
    for _ in range(spinup):
        state = rk4_step(field, state, dt)
    out = np.empty((steps, len(state)))
    for i in range(steps):
        if not max(abs(v) for v in state) < BLOWUP_LIMIT:
            raise NumericalError(
                f"integration blew up at step {spinup + i} (|state| >= {BLOWUP_LIMIT:g}); "
                f"reduce dt={dt}")
        out[i] = state
        state = rk4_step(field, state, dt)
    return out


def simulate_lorenz63(steps: int, dt: float = 0.01, sigma: float = 10.0, rho: float = 28.0,
                      beta: float = 8.0 / 3.0, x0=LORENZ_X0, obs_noise_var: float = 0.01,
                      seed: int = 0, spinup: int = 0) -> Dataset:
    """Integrate Lorenz-63 with RK4 and add observational noise after integration.

    The first returned sample is the initial state (after ``spinup`` steps).
    """
    if steps < 1 or dt <= 0 or spinup < 0:
        raise ValidationError("need steps >= 1, dt > 0, spinup >= 0")
    if obs_noise_var < 0:
        raise ValidationError("obs_noise_var must be non-negative")
    traj = _integrate(lorenz63_field(sigma, rho, beta), x0, dt, steps, spinup)
    if obs_noise_var > 0:
        rng = np.random.default_rng(seed)
        traj = traj + math.sqrt(obs_noise_var) * rng.standard_normal(traj.shape)
    return Dataset(tuple(ProcessSeries(n, traj[:, j]) for j, n in enumerate("xyz")))


def simulate_coupled_lorenz(eps: float, steps: int, dt: float = 0.01, spinup: int = 10_000,
                            seed: int = 0, x0=None, obs_noise_var: float = 0.0,
                            sigma: float = 10.0, rho: float = 28.0,
                            beta: float = 8.0 / 3.0) -> Dataset:
    """Integrate the driven pair of Lorenz-63 systems (series x1..z1, x2..z2).

    Without ``x0`` both subsystems start from independent random
    perturbations of the reference initial state, drawn from ``seed``.
    """
    if not 0 <= eps <= 9:
        raise ValidationError("coupling eps must lie in [0, 9]")
    if steps < 1 or dt <= 0 or spinup < 0:
        raise ValidationError("need steps >= 1, dt > 0, spinup >= 0")
    rng = np.random.default_rng(seed)
    if x0 is None:
        base = np.array(LORENZ_X0)
        x0 = np.concatenate([base + rng.standard_normal(3), base + rng.standard_normal(3)])
    traj = _integrate(coupled_lorenz_field(eps, sigma, rho, beta), x0, dt, steps, spinup)
    if obs_noise_var > 0:
        traj = traj + math.sqrt(obs_noise_var) * rng.standard_normal(traj.shape)
    names = ("x1", "y1", "z1", "x2", "y2", "z2")
    return Dataset(tuple(ProcessSeries(n, traj[:, j]) for j, n in enumerate(names)))


def simulate_enso_like(steps: int = 492, seed: int = 0) -> Dataset:
    """Four coupled monthly-index-like series with lagged, interacting drivers.

    A synthetic stand-in for an ocean-atmosphere index set: ``HEAT`` and the
    low-level wind ``U850`` lead the target ``NINA34`` by 3-4 steps, with a
    multiplicative HEAT x U850 term, while ``U200`` responds to ``NINA34``.
    """
    rng = np.random.default_rng(seed)
    burn = 60
    n = steps + burn
    heat, u850, u200, nina = (np.zeros(n) for _ in range(4))
    noise = rng.standard_normal((n, 4))
    for t in range(4, n):
        heat[t] = 0.8 * heat[t - 1] - 0.2 * nina[t - 2] + 0.5 * noise[t, 0]
        u850[t] = 0.6 * u850[t - 1] + 0.3 * nina[t - 1] + 0.6 * noise[t, 1]
        u200[t] = 0.5 * u200[t - 1] - 0.4 * nina[t - 1] + 0.7 * noise[t, 2]
        nina[t] = (0.5 * nina[t - 1] + 0.35 * heat[t - 3] + 0.2 * u850[t - 4]
                   + 0.15 * heat[t - 4] * u850[t - 3] - 0.1 * u200[t - 3] + 0.4 * noise[t, 3])
    cols = {"NINA34": nina, "HEAT": heat, "U850": u850, "U200": u200}
    return Dataset(tuple(ProcessSeries(k, v[burn:]) for k, v in cols.items()))
