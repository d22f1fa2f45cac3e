"""Recursive Parzen-Rosenblatt density estimator with bandwidth h_i = i^-alpha.

The grid representation stores the unnormalised running sum
S_n(x) = sum_i K((X_i - x) / h_i) / h_i at equispaced nodes, so an update only
touches the nodes under the current kernel support and ghat_n = S_n / n.
"""
from __future__ import annotations

import math

import numba
import numpy as np

from .densities import DensityModel, density_value
from .errors import DomainError, StateError
from .kernels import EPANECHNIKOV_KERNEL, Kernel, kernel_value

DEFAULT_GRID_SIZE = 2048
DEFAULT_FLOOR_EPS = 1e-6


def bandwidth(n: int, alpha: float) -> float:
    if n < 1:
        raise DomainError("bandwidth index must be >= 1")
    if not 0.0 < alpha < 1.0:
        raise DomainError("alpha must lie in (0, 1)")
    return float(n) ** -alpha


@numba.njit(cache=True)
def grid_add(sums, grid, x, h, kcode, periodic):
    """Add K((x - node) / h) / h to every node under the kernel support."""
    size = grid.shape[0]
    lo = grid[0]
    dx = (grid[size - 1] - lo) / (size - 1)
    inv = 1.0 / h
    shifts = 2 if periodic else 0
    for k in range(-shifts, shifts + 1):
        c = x + k
        j0 = max(0, int(math.ceil((c - h - lo) / dx)) - 1)
        j1 = min(size - 1, int(math.floor((c + h - lo) / dx)) + 1)
        for j in range(j0, j1 + 1):
            sums[j] += inv * kernel_value(kcode, (c - grid[j]) * inv)


@numba.njit(cache=True)
def grid_interp(sums, grid, x):
    """Linear interpolation of the node values at x."""
    size = grid.shape[0]
    if x <= grid[0]:
        return sums[0]
    if x >= grid[size - 1]:
        return sums[size - 1]
    lo = grid[0]
    dx = (grid[size - 1] - lo) / (size - 1)
    t = (x - lo) / dx
    j = int(math.floor(t))
    if j < 0:
        j = 0
    elif j > size - 2:
        j = size - 2
    w = (x - grid[j]) / dx
    return (1.0 - w) * sums[j] + w * sums[j + 1]


@numba.njit(cache=True)
def grid_sup_error(sums, n, grid, dcode, amplitude):
    worst = 0.0
    for j in range(grid.shape[0]):
        err = abs(sums[j] / n - density_value(dcode, amplitude, grid[j]))
        if err > worst:
            worst = err
    return worst


class RecursiveKde:
    """Online estimate of the observation density on [-1/2, 1/2].

    Args:
        kernel: smoothing kernel.
        alpha: bandwidth exponent in (0, 1).
        grid_size: number of equispaced nodes (grid mode).
        floor_eps: lower bound applied by :meth:`evaluate`.
        mode: ``"grid"`` for O(support) updates with interpolated evaluation,
            ``"exact"`` to keep the observation history and evaluate the
            defining sum directly.
        boundary: ``"none"`` evaluates the estimator exactly as defined, so
            kernel mass falling past +-1/2 is lost. ``"periodic"`` wraps kernel
            mass around the unit circle.
    """

    def __init__(self, kernel: Kernel = EPANECHNIKOV_KERNEL, alpha: float = 0.4,
                 grid_size: int = DEFAULT_GRID_SIZE,
                 floor_eps: float = DEFAULT_FLOOR_EPS, mode: str = "grid",
                 boundary: str = "none"):
        if not 0.0 < alpha < 1.0:
            raise DomainError("alpha must lie in (0, 1)")
        if mode not in ("grid", "exact"):
            raise DomainError(f"unknown kde mode {mode!r}")
        if boundary not in ("none", "periodic"):
            raise DomainError(f"unknown boundary rule {boundary!r}")
        if grid_size < 2:
            raise DomainError("grid needs at least two nodes")
        if not floor_eps > 0:
            raise DomainError("floor_eps must be positive")
        self.kernel = kernel
        self.alpha = float(alpha)
        self.floor_eps = float(floor_eps)
        self.mode = mode
        self.boundary = boundary
        self.grid = np.linspace(-0.5, 0.5, grid_size)
        self.sums = np.zeros(grid_size)
        self.n = 0
        self.floor_hits = 0
        self.history_x: list[float] = []
        self.history_h: list[float] = []

    @property
    def periodic(self) -> bool:
        return self.boundary == "periodic"

    @property
    def spacing(self) -> float:
        return 1.0 / (self.grid.size - 1)

    @property
    def history(self) -> list[tuple[float, float]]:
        return list(zip(self.history_x, self.history_h))

    @property
    def values(self) -> np.ndarray:
        """Current estimate at the grid nodes."""
        if self.n == 0:
            return np.zeros_like(self.sums)
        if self.mode == "exact":
            return self._exact(self.grid)
        return self.sums / self.n

    def slope_bound(self) -> float:
        """Lipschitz constant of the current estimate (max_i L / h_i^2)."""
        if self.n == 0:
            return 0.0
        return self.kernel.lipschitz_bound / bandwidth(self.n, self.alpha) ** 2

    def update(self, x_obs: float) -> "RecursiveKde":
        if not abs(x_obs) <= 0.5:
            raise DomainError(f"observation {x_obs!r} outside [-1/2, 1/2]")
        h = bandwidth(self.n + 1, self.alpha)
        if self.mode == "grid":
            grid_add(self.sums, self.grid, float(x_obs), h, self.kernel.code, self.periodic)
        else:
            self.history_x.append(float(x_obs))
            self.history_h.append(h)
        self.n += 1
        return self

    def _exact(self, x):
        xs = np.asarray(self.history_x)
        hs = np.asarray(self.history_h)
        x = np.atleast_1d(np.asarray(x, dtype=float))
        diff = xs[None, :] - x[:, None]
        shifts = (-2, -1, 0, 1, 2) if self.periodic else (0,)
        total = np.zeros(x.shape)
        for k in shifts:
            total += (self.kernel((diff + k) / hs) / hs).sum(axis=1)
        return total / self.n

    def raw(self, x: float) -> float:
        """Unfloored estimate at x."""
        if self.n == 0:
            raise StateError("no observations absorbed")
        if not abs(x) <= 0.5:
            raise DomainError(f"evaluation point {x!r} outside [-1/2, 1/2]")
        if self.mode == "grid":
            return grid_interp(self.sums, self.grid, float(x)) / self.n
        return float(self._exact(x)[0])

    def evaluate(self, x: float) -> float:
        """Estimate at x, floored at ``floor_eps`` (each activation is counted)."""
        value = self.raw(x)
        if value < self.floor_eps:
            self.floor_hits += 1
            return self.floor_eps
        return value

    __call__ = evaluate

    def sup_error(self, truth: DensityModel) -> float:
        """Largest absolute deviation from ``truth`` over the grid nodes."""
        if self.n == 0:
            raise StateError("no observations absorbed")
        if self.mode == "grid":
            return grid_sup_error(self.sums, float(self.n), self.grid, truth.code,
                                  truth.amplitude)
        return float(np.max(np.abs(self.values - truth.pdf(self.grid))))


def kde_update(state: RecursiveKde, x_obs: float) -> RecursiveKde:
    return state.update(x_obs)


def kde_eval(state: RecursiveKde, x: float) -> float:
    return state.evaluate(x)


def kde_sup_error(state: RecursiveKde, truth: DensityModel) -> float:
    return state.sup_error(truth)
