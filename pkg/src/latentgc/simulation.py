"""Synthetic bivariate AR(2) series with a delayed latent common input.

The target noise is built from the source innovation ``delay`` steps
earlier plus an independent part, which gives exactly the requested
correlation between ``eps_t`` and ``xi_{t-delay}`` while leaving both
noises free of autocorrelation.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

import numpy as np
from scipy.signal import lfilter

from .errors import StationarityError
from .timeseries import LagConfig, NoiseSpec, TimeSeriesPair, reparameterize

MODEL_IDS = ("a", "b", "c", "d")


@dataclass(frozen=True)
class SimModelSpec:
    a1: float
    a2: float
    b1: float
    b2: float
    c1: float
    c2: float
    noise: NoiseSpec
    burn_in: int = 1000
    T: int = 1000

    def companion(self) -> np.ndarray:
        """Transition matrix of the state ``(x_t, x_{t-1}, y_t, y_{t-1})``."""
        return np.array([
            [self.a1, self.a2, self.c1, self.c2],
            [1.0, 0.0, 0.0, 0.0],
            [0.0, 0.0, self.b1, self.b2],
            [0.0, 0.0, 1.0, 0.0],
        ])

    def spectral_radius(self) -> float:
        return float(np.max(np.abs(np.linalg.eigvals(self.companion()))))

    def is_stationary(self) -> bool:
        return self.spectral_radius() < 1.0

    @property
    def has_interaction(self) -> bool:
        return self.c1 != 0 or self.c2 != 0

    @property
    def has_noise_corr(self) -> bool:
        return self.noise.rho != 0

    def true_lags(self) -> LagConfig:
        """Lag orders of the generating equations; ``l_eta`` is at least 1."""
        return LagConfig(l_a=2, l_b=2, l_c=2, l_eta=max(self.noise.delay, 1))

    def with_delay(self, delay: int) -> "SimModelSpec":
        return replace(self, noise=replace(self.noise, delay=delay))

    def with_T(self, T: int) -> "SimModelSpec":
        return replace(self, T=T)


_PRESET_COUPLING = {
    "a": (0.0, 0.0, 0.0),
    "b": (0.0, 0.0, 0.4),
    "c": (0.16, -0.2, 0.0),
    "d": (0.16, -0.2, 0.4),
}


def preset(model: str) -> SimModelSpec:
    """One of the four benchmark models (a)-(d).

    (a) neither interaction nor common input, (b) delayed common input only,
    (c) interaction only, (d) both.
    """
    key = str(model).lower().strip("()")
    if key not in _PRESET_COUPLING:
        raise ValueError(f"unknown model {model!r}; expected one of {', '.join(MODEL_IDS)}")
    c1, c2, rho = _PRESET_COUPLING[key]
    noise = NoiseSpec(sigma_x=1.0, sigma_y=math.sqrt(0.7), rho=rho, delay=1)
    return SimModelSpec(a1=0.9, a2=-0.5, b1=0.5, b2=-0.2, c1=c1, c2=c2, noise=noise)


def make_rng(seed, *keys: int) -> np.random.Generator:
    """Philox stream keyed injectively by ``(seed, *keys)``."""
    if isinstance(seed, np.random.Generator):
        return seed
    return np.random.Generator(np.random.Philox(np.random.SeedSequence([int(seed), *map(int, keys)])))


def draw_noise(noise: NoiseSpec, n: int, rng: np.random.Generator) -> tuple[np.ndarray, np.ndarray]:
    """Draw ``n`` samples of ``(eps, xi)`` with ``corr(eps_t, xi_{t-delay}) == rho``."""
    rp = reparameterize(noise)
    xi_ext = rng.standard_normal(n + noise.delay) * noise.sigma_y
    w = rng.standard_normal(n)
    eps = rp.eta * xi_ext[:n] + rp.tau * w
    return eps, xi_ext[noise.delay:]


@dataclass(frozen=True)
class GeneratedSeries:
    pair: TimeSeriesPair
    eps: np.ndarray
    xi: np.ndarray


def generate_with_noise(spec: SimModelSpec, seed, T: int | None = None) -> GeneratedSeries:
    if not spec.is_stationary():
        raise StationarityError(f"spectral radius {spec.spectral_radius():.4f} >= 1")
    T = spec.T if T is None else int(T)
    n = spec.burn_in + T
    eps, xi = draw_noise(spec.noise, n, make_rng(seed))
    # lfilter starts from zero initial conditions
    y = lfilter([1.0], [1.0, -spec.b1, -spec.b2], xi)
    drive = lfilter([0.0, spec.c1, spec.c2], [1.0], y) + eps
    x = lfilter([1.0], [1.0, -spec.a1, -spec.a2], drive)
    keep = slice(spec.burn_in, n)
    return GeneratedSeries(TimeSeriesPair(x[keep], y[keep]), eps[keep], xi[keep])


def generate(spec: SimModelSpec, seed, T: int | None = None) -> TimeSeriesPair:
    """Simulate ``T`` samples (default ``spec.T``) after discarding the burn-in."""
    return generate_with_noise(spec, seed, T).pair
