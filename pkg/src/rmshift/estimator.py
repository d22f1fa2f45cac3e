"""Projected Robbins-Monro recursion for the shift parameter.

One step, with n observations already absorbed into the density estimate::

    T = sin(2 pi (X_{n+1} - theta_n)) Y_{n+1} / ghat_n(X_{n+1})
    theta_{n+1} = proj(theta_n + sign(f1) gamma_{n+1} T),   gamma_n = c / n

``ghat_n`` is evaluated at X_{n+1} *before* X_{n+1} is absorbed. The
known-density baseline uses the true g in place of ghat_n.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numba

from .densities import DensityModel, density_eval
from .errors import DomainError, StateError
from .kde import DEFAULT_FLOOR_EPS, RecursiveKde

BOUND = 0.25
PLUG_IN = "plug_in"
KNOWN_DENSITY = "known_density"
VARIANTS = (PLUG_IN, KNOWN_DENSITY)


@numba.njit(cache=True)
def project(x):
    if x >= BOUND:
        return BOUND
    if x <= -BOUND:
        return -BOUND
    return x


@numba.njit(cache=True)
def t_hat(x, y, theta_hat, g_at_x):
    return math.sin(2.0 * math.pi * (x - theta_hat)) * y / g_at_x


def project_C(x: float) -> float:
    """Clamp onto C = [-1/4, 1/4]."""
    if not math.isfinite(x):
        raise DomainError("cannot project a non-finite value")
    return project(float(x))


def gain(n: int, scale: float = 1.0) -> float:
    if n < 1:
        raise DomainError("gain index must be >= 1")
    return scale / n


def compute_T_hat(x: float, y: float, theta_hat: float, g_hat_at_x: float,
                  floor_eps: float = DEFAULT_FLOOR_EPS) -> float:
    if not g_hat_at_x >= floor_eps:
        raise DomainError(f"density value {g_hat_at_x!r} below floor {floor_eps!r}; "
                          "floor it before calling")
    return t_hat(float(x), float(y), float(theta_hat), float(g_hat_at_x))


@dataclass
class EstimatorState:
    """Mutable state of one recursion.

    ``step`` counts the observations seen so far, so the next update uses
    gain index ``step + 1``.
    """

    theta_hat: float = 0.0
    step: int = 0
    sign_f1: int = 1
    projection_events: int = 0
    last_projection_step: int = 0
    last_T_hat: float = 0.0
    variant: str = PLUG_IN
    gain_scale: float = 1.0

    def __post_init__(self):
        if self.sign_f1 not in (-1, 1):
            raise DomainError("sign_f1 must be -1 or +1")
        if self.variant not in VARIANTS:
            raise DomainError(f"unknown variant {self.variant!r}")
        if abs(self.theta_hat) > BOUND:
            raise DomainError("initial theta must lie in [-1/4, 1/4]")


def estimator_step(state: EstimatorState, x: float, y: float,
                   density: RecursiveKde | DensityModel) -> EstimatorState:
    """Advance ``state`` by one observation (in place) and return it.

    For the plug-in variant ``density`` is normally the running estimate, which
    must hold exactly ``state.step`` observations: the caller absorbs ``x``
    only after this call. Passing a :class:`DensityModel` substitutes the true
    density, which is what the known-density variant always does.
    """
    if not abs(x) <= 0.5:
        raise DomainError(f"observation {x!r} outside [-1/2, 1/2]")
    if isinstance(density, RecursiveKde):
        if state.variant == KNOWN_DENSITY:
            raise StateError("known-density variant needs the true density")
        if density.n == 0:
            raise StateError("density estimate not warmed up")
        if density.n != state.step:
            raise StateError(f"density estimate holds {density.n} observations but the "
                             f"recursion is at step {state.step}; evaluate before update")
        g_val = density.evaluate(x)
    else:
        g_val = density_eval(density, x)
    T = t_hat(float(x), float(y), state.theta_hat, g_val)
    pre = state.theta_hat + state.sign_f1 * gain(state.step + 1, state.gain_scale) * T
    state.step += 1
    state.last_T_hat = T
    if abs(pre) > BOUND:
        state.projection_events += 1
        state.last_projection_step = state.step
    state.theta_hat = project(pre)
    return state
