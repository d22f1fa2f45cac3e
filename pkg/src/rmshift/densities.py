"""Observation-time densities on [-1/2, 1/2] and additive noise laws.

Sampling functions are pure maps from uniform draws, so the caller owns the
random stream.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numba
import numpy as np

from .errors import DomainError

UNIFORM = 0
COSINE_BUMP = 1

_DENSITY_CODES = {"uniform": UNIFORM, "cosine_bump": COSINE_BUMP}
_TWO_PI = 2.0 * math.pi


@numba.njit(cache=True)
def density_value(code, amplitude, x):
    if code == UNIFORM:
        return 1.0
    return 1.0 + amplitude * math.cos(_TWO_PI * x)


@dataclass(frozen=True)
class DensityModel:
    """Density g(x) = 1 + a cos(2 pi x) on [-1/2, 1/2] (a = 0 for ``uniform``)."""

    family: str = "uniform"
    amplitude: float = 0.0

    def __post_init__(self):
        if self.family not in _DENSITY_CODES:
            raise DomainError(f"unknown density family {self.family!r}")
        if self.family == "uniform" and self.amplitude != 0.0:
            raise DomainError("uniform density takes no amplitude")
        if not -1.0 < self.amplitude < 1.0:
            raise DomainError("cosine_bump amplitude must lie in (-1, 1)")

    @property
    def code(self) -> int:
        return _DENSITY_CODES[self.family]

    @property
    def min_value(self) -> float:
        """C_g, the minimum of g on [-1/2, 1/2]."""
        return 1.0 - abs(self.amplitude)

    def pdf(self, x):
        x = np.asarray(x, dtype=float)
        out = 1.0 + self.amplitude * np.cos(_TWO_PI * x)
        return out if out.ndim else float(out)

    def cdf(self, x):
        x = np.asarray(x, dtype=float)
        out = x + 0.5 + self.amplitude / _TWO_PI * np.sin(_TWO_PI * x)
        return out if out.ndim else float(out)

    def ppf(self, u):
        """Inverse CDF by bracketed bisection to 1e-12 followed by Newton polish."""
        u = np.asarray(u, dtype=float)
        if np.any((u < 0.0) | (u > 1.0)) or not np.all(np.isfinite(u)):
            raise DomainError("uniform draw must lie in [0, 1]")
        if self.amplitude == 0.0:
            out = u - 0.5
            return out if out.ndim else float(out)
        lo = np.full(u.shape, -0.5)
        hi = np.full(u.shape, 0.5)
        # 40 halvings of a unit bracket reach width < 1e-12
        for _ in range(40):
            mid = 0.5 * (lo + hi)
            below = self.cdf(mid) < u
            lo = np.where(below, mid, lo)
            hi = np.where(below, hi, mid)
        x = 0.5 * (lo + hi)
        for _ in range(2):
            x = np.clip(x - (self.cdf(x) - u) / self.pdf(x), lo, hi)
        return x if x.ndim else float(x)


def density_eval(d: DensityModel, x: float) -> float:
    if not abs(x) <= 0.5:
        raise DomainError(f"density argument {x!r} outside [-1/2, 1/2]")
    return density_value(d.code, d.amplitude, float(x))


def sample_x(d: DensityModel, u):
    """Map uniform draw(s) ``u`` in [0, 1] to observation times with density g."""
    return d.ppf(u)


@dataclass(frozen=True)
class NoiseModel:
    """Centred noise with standard deviation ``sigma``."""

    family: str = "gaussian"
    sigma: float = 1.0

    def __post_init__(self):
        if self.family not in ("gaussian", "laplace"):
            raise DomainError(f"unknown noise family {self.family!r}")
        if not (math.isfinite(self.sigma) and self.sigma >= 0.0):
            raise DomainError("noise sigma must be finite and nonnegative")


def sample_noise(m: NoiseModel, u1, u2):
    """Turn a pair of uniform draws in [0, 1) into noise values.

    Gaussian uses Box-Muller; Laplace takes its magnitude from an exponential
    built on ``u1`` and its sign from ``u2``.
    """
    u1 = 1.0 - np.asarray(u1, dtype=float)  # (0, 1], keeps log finite
    u2 = np.asarray(u2, dtype=float)
    if m.sigma == 0.0:
        out = np.zeros(np.broadcast(u1, u2).shape)
    elif m.family == "gaussian":
        out = m.sigma * np.sqrt(-2.0 * np.log(u1)) * np.cos(_TWO_PI * u2)
    else:
        scale = m.sigma / math.sqrt(2.0)
        out = scale * -np.log(u1) * np.where(u2 < 0.5, 1.0, -1.0)
    return out if out.ndim else float(out)
