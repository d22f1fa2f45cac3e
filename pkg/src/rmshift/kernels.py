"""Compactly supported smoothing kernels.

Both kernels live on [-1, 1]; bandwidth scaling is done by the caller.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numba
import numpy as np

from .errors import DomainError

EPANECHNIKOV = 0
TRIANGULAR = 1

_CODES = {"epanechnikov": EPANECHNIKOV, "triangular": TRIANGULAR}


@numba.njit(cache=True)
def kernel_value(code, u):
    """K(u) for the kernel identified by ``code``; zero outside [-1, 1]."""
    a = abs(u)
    if a > 1.0:
        return 0.0
    if code == EPANECHNIKOV:
        return 0.75 * (1.0 - a * a)
    return 1.0 - a


@dataclass(frozen=True)
class Kernel:
    """A symmetric, nonnegative, Lipschitz kernel supported on [-A, A].

    ``mu2`` is the integral of K squared and ``nu2`` is half the second moment.
    """

    family: str
    support_halfwidth: float
    mu2: float
    nu2: float
    lipschitz_bound: float

    @property
    def code(self) -> int:
        return _CODES[self.family]

    def __call__(self, x):
        x = np.asarray(x, dtype=float)
        if not np.all(np.isfinite(x)):
            raise DomainError("kernel argument must be finite")
        a = np.abs(x)
        if self.code == EPANECHNIKOV:
            out = 0.75 * (1.0 - a * a)
        else:
            out = 1.0 - a
        out = np.where(a > 1.0, 0.0, out)
        return out if out.ndim else float(out)


EPANECHNIKOV_KERNEL = Kernel("epanechnikov", 1.0, mu2=3.0 / 5.0, nu2=1.0 / 10.0,
                             lipschitz_bound=1.5)
TRIANGULAR_KERNEL = Kernel("triangular", 1.0, mu2=2.0 / 3.0, nu2=1.0 / 12.0,
                           lipschitz_bound=1.0)


def get_kernel(name: str) -> Kernel:
    """Look up a kernel by its config name."""
    try:
        return {"epanechnikov": EPANECHNIKOV_KERNEL,
                "triangular": TRIANGULAR_KERNEL}[name.lower()]
    except KeyError:
        raise DomainError(f"unknown kernel {name!r}; expected 'epanechnikov' or "
                          "'triangular'") from None


def kernel_eval(k: Kernel, x: float) -> float:
    if not math.isfinite(x):
        raise DomainError("kernel argument must be finite")
    return kernel_value(k.code, float(x))


def kernel_moments(k: Kernel) -> tuple[float, float]:
    """Return ``(mu2, nu2)``."""
    return k.mu2, k.nu2
