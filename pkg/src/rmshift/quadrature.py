"""Adaptive Simpson quadrature for the smooth integrals over one period."""
from __future__ import annotations

from typing import Callable

from .errors import DomainError, NumericError

DEFAULT_TOL = 1e-10
MAX_DEPTH = 40
_INITIAL_PANELS = 16


def _simpson(fa, fm, fb, width):
    return width / 6.0 * (fa + 4.0 * fm + fb)


def quadrature(fn: Callable[[float], float], a: float, b: float,
               tol: float = DEFAULT_TOL, max_depth: int = MAX_DEPTH) -> float:
    """Integrate ``fn`` over [a, b] by adaptive Simpson.

    The interval is first cut into 16 panels so that periodic integrands cannot
    alias the initial five-point sample. Each panel is bisected until the
    Richardson error estimate meets its share of ``tol``.

    Raises:
        NumericError: a panel hit ``max_depth`` before converging. The error's
            ``partial`` attribute holds the integral accumulated so far.
    """
    if not a < b:
        raise DomainError("quadrature requires a < b")
    if tol <= 0:
        raise DomainError("tolerance must be positive")

    total = 0.0
    failed = False
    width0 = (b - a) / _INITIAL_PANELS
    stack = []
    for i in range(_INITIAL_PANELS):
        lo = a + i * width0
        hi = b if i == _INITIAL_PANELS - 1 else lo + width0
        mid = 0.5 * (lo + hi)
        flo, fmid, fhi = fn(lo), fn(mid), fn(hi)
        stack.append((lo, hi, flo, fmid, fhi,
                      _simpson(flo, fmid, fhi, hi - lo), tol / _INITIAL_PANELS, 0))

    while stack:
        lo, hi, flo, fmid, fhi, whole, ptol, depth = stack.pop()
        mid = 0.5 * (lo + hi)
        lm, rm = 0.5 * (lo + mid), 0.5 * (mid + hi)
        flm, frm = fn(lm), fn(rm)
        left = _simpson(flo, flm, fmid, mid - lo)
        right = _simpson(fmid, frm, fhi, hi - mid)
        delta = left + right - whole
        if abs(delta) <= 15.0 * ptol:
            total += left + right + delta / 15.0
        elif depth + 1 >= max_depth:
            failed = True
            total += left + right + delta / 15.0
        else:
            stack.append((lo, mid, flo, flm, fmid, left, 0.5 * ptol, depth + 1))
            stack.append((mid, hi, fmid, frm, fhi, right, 0.5 * ptol, depth + 1))

    if failed:
        raise NumericError(f"adaptive Simpson exceeded depth {max_depth} on "
                           f"[{a}, {b}]", partial=total)
    return total
