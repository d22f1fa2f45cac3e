"""Shape functions and the closed-form quantities of the shift model.

A shape is a finite cosine series f(x) = sum_k c_k cos(2 pi k x), k = 0, 1, ...,
which is symmetric, 1-periodic and smooth by construction.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numba
import numpy as np

from .densities import DensityModel
from .errors import AdmissibilityError, DomainError, NumericError
from .quadrature import quadrature

_TWO_PI = 2.0 * math.pi


@numba.njit(cache=True)
def cosine_series(coefficients, x):
    w = x - math.floor(x + 0.5)
    total = 0.0
    for k in range(coefficients.shape[0]):
        total += coefficients[k] * math.cos(_TWO_PI * k * w)
    return total


@dataclass(frozen=True)
class ShapeFunction:
    family: str
    coefficients: tuple[float, ...]

    def __post_init__(self):
        object.__setattr__(self, "coefficients",
                           tuple(float(c) for c in self.coefficients))
        if self.family not in ("cosine", "cosine_mix"):
            raise DomainError(f"unknown shape family {self.family!r}")
        if not self.coefficients:
            raise DomainError("shape needs at least one coefficient")
        if not all(math.isfinite(c) for c in self.coefficients):
            raise DomainError("shape coefficients must be finite")
        if self.family == "cosine" and len(self.coefficients) > 2:
            raise DomainError("'cosine' shape takes [c0, c1]; use 'cosine_mix'")

    @classmethod
    def cosine(cls, amplitude: float = 1.0) -> "ShapeFunction":
        return cls("cosine", (0.0, amplitude))

    @property
    def bound(self) -> float:
        return sum(abs(c) for c in self.coefficients)

    @property
    def array(self) -> np.ndarray:
        return np.asarray(self.coefficients, dtype=float)

    def __call__(self, x):
        x = np.asarray(x, dtype=float)
        w = x - np.floor(x + 0.5)
        k = np.arange(len(self.coefficients))
        out = np.cos(_TWO_PI * np.multiply.outer(w, k)) @ self.array
        return out if np.ndim(out) else float(out)


def shape_eval(f: ShapeFunction, x: float) -> float:
    """f(x), reducing x into [-1/2, 1/2) first."""
    if not math.isfinite(x):
        raise DomainError("shape argument must be finite")
    return cosine_series(f.array, float(x))


def fourier_first(f: ShapeFunction, tol: float = 1e-10) -> float:
    """First Fourier coefficient, integral of cos(2 pi x) f(x) over one period."""
    terms = list(enumerate(f.coefficients))
    f1 = quadrature(lambda x: math.cos(_TWO_PI * x)
                    * sum(c * math.cos(_TWO_PI * k * x) for k, c in terms), -0.5, 0.5, tol)
    closed = 0.5 * f.coefficients[1] if len(f.coefficients) > 1 else 0.0
    if abs(f1 - closed) > 1e-9:
        raise NumericError(f"quadrature f1={f1!r} disagrees with closed form {closed!r}",
                           partial=f1)
    return f1


def mean_field_phi(x: float, theta: float, f1: float) -> float:
    return math.sin(_TWO_PI * (theta - x)) * f1


def variance_functional(t: float, theta: float, f: ShapeFunction, g: DensityModel,
                        sigma: float, tol: float = 1e-10) -> float:
    """Integral of sin^2(2 pi (x - t)) (f^2(x - theta) + sigma^2) / g(x) over [-1/2, 1/2]."""
    if g.min_value <= 0:
        raise DomainError("density must be bounded away from zero")
    terms = list(enumerate(f.coefficients))
    s2 = sigma * sigma
    amp = g.amplitude

    def integrand(x):
        s = math.sin(_TWO_PI * (x - t))
        fx = sum(c * math.cos(_TWO_PI * k * (x - theta)) for k, c in terms)
        return s * s * (fx * fx + s2) / (1.0 + amp * math.cos(_TWO_PI * x))

    return quadrature(integrand, -0.5, 0.5, tol)


@dataclass(frozen=True)
class AsymptoticQuantities:
    f1: float
    phi_at_theta: float
    xi2: float


def asymptotic_variance(theta: float, f: ShapeFunction, g: DensityModel,
                        sigma: float) -> AsymptoticQuantities:
    """Limit variance of sqrt(n) (theta_hat - theta).

    Raises:
        AdmissibilityError: if 4 pi |f1| <= 1.
    """
    f1 = fourier_first(f)
    gap = 4.0 * math.pi * abs(f1) - 1.0
    if gap <= 0:
        raise AdmissibilityError(f"CLT condition violated: 4*pi*|f1| = {gap + 1:.6g} <= 1")
    phi = variance_functional(theta, theta, f, g, sigma)
    return AsymptoticQuantities(f1=f1, phi_at_theta=phi, xi2=phi / gap)
