"""Core value types: the observed series pair, lag orders and noise parameters."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DataError, DegenerateError


def _frozen_array(values) -> np.ndarray:
    arr = np.array(values, dtype=float)
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True, eq=False)
class TimeSeriesPair:
    """Aligned samples of the target ``x`` and the source ``y``.

    Samples are stored 0-based; sample ``t`` in 1-based notation lives at
    index ``t - 1``.
    """

    x: np.ndarray
    y: np.ndarray

    def __post_init__(self):
        x = _frozen_array(self.x)
        y = _frozen_array(self.y)
        if x.ndim != 1 or y.ndim != 1:
            raise DataError("x and y must be one-dimensional")
        if x.size != y.size:
            raise DataError(f"x and y differ in length ({x.size} != {y.size})")
        if x.size < 1:
            raise DataError("series must contain at least one sample")
        if not (np.all(np.isfinite(x)) and np.all(np.isfinite(y))):
            raise DataError("series contain NaN or infinite values")
        object.__setattr__(self, "x", x)
        object.__setattr__(self, "y", y)

    @property
    def T(self) -> int:
        return int(self.x.size)

    def __len__(self) -> int:
        return self.T

    def __eq__(self, other):
        if not isinstance(other, TimeSeriesPair):
            return NotImplemented
        return np.array_equal(self.x, other.x) and np.array_equal(self.y, other.y)

    def centered(self) -> "TimeSeriesPair":
        return TimeSeriesPair(self.x - self.x.mean(), self.y - self.y.mean())

    def scaled(self, sx: float, sy: float) -> "TimeSeriesPair":
        return TimeSeriesPair(self.x * sx, self.y * sy)


@dataclass(frozen=True)
class LagConfig:
    """Lag orders of the target self-term, source self-term, interaction and noise correlation."""

    l_a: int
    l_b: int
    l_c: int
    l_eta: int

    def __post_init__(self):
        for name in ("l_a", "l_b", "l_c", "l_eta"):
            value = getattr(self, name)
            if int(value) != value or value < 1:
                raise ValueError(f"{name} must be a positive integer, got {value!r}")
            object.__setattr__(self, name, int(value))

    @property
    def l_max(self) -> int:
        return max(self.l_a, self.l_c, self.l_b + self.l_eta)


@dataclass(frozen=True)
class NoiseSpec:
    """Noise of the two AR equations.

    ``rho`` is the correlation between the target noise at time t and the
    source noise at time ``t - delay``.
    """

    sigma_x: float
    sigma_y: float
    rho: float
    delay: int = 1

    def __post_init__(self):
        if not self.sigma_x > 0 or not math.isfinite(self.sigma_x):
            raise ValueError(f"sigma_x must be positive, got {self.sigma_x!r}")
        if not self.sigma_y >= 0 or not math.isfinite(self.sigma_y):
            raise ValueError(f"sigma_y must be non-negative, got {self.sigma_y!r}")
        if not -1.0 <= self.rho <= 1.0:
            raise ValueError(f"rho must lie in [-1, 1], got {self.rho!r}")
        if int(self.delay) != self.delay or self.delay < 0:
            raise ValueError(f"delay must be a non-negative integer, got {self.delay!r}")
        object.__setattr__(self, "delay", int(self.delay))

    @property
    def covariance(self) -> np.ndarray:
        sxy = self.rho * self.sigma_x * self.sigma_y
        return np.array([[self.sigma_x**2, sxy], [sxy, self.sigma_y**2]])


@dataclass(frozen=True)
class ReparameterizedNoise:
    """Noise written as ``eps_t = eta * xi_{t-delay} + omega_t`` with ``omega ~ N(0, tau^2)``."""

    tau: float
    eta: float
    sigma_y: float

    @property
    def covariance(self) -> np.ndarray:
        s2 = self.sigma_y**2
        return np.array([[self.tau**2 + self.eta**2 * s2, self.eta * s2], [self.eta * s2, s2]])


def reparameterize(noise: NoiseSpec) -> ReparameterizedNoise:
    if noise.sigma_y == 0:
        raise DegenerateError("sigma_y == 0: the source noise carries no information")
    eta = noise.rho * noise.sigma_x / noise.sigma_y
    # 1 - rho^2 can round to a tiny negative value only for |rho| == 1
    tau = noise.sigma_x * math.sqrt(max(1.0 - noise.rho**2, 0.0))
    return ReparameterizedNoise(tau=tau, eta=eta, sigma_y=noise.sigma_y)
