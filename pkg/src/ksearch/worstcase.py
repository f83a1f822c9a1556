"""Optimal worst-case schedules for k-max and k-min search.

The best possible competitive ratio alpha* (max) solves

    (theta - 1) / (alpha - 1) = (1 + alpha/k)^k,

whose left side strictly decreases and right side strictly increases in
alpha on (1, theta), so bracketed bisection is exact enough.  The k-min
ratio phi* solves (1 - 1/theta) / (1 - 1/phi) = (1 + 1/(k*phi))^k, which is
equivalent to the strictly increasing fixed point
h(phi) = (1 - 1/phi)(1 + 1/(k*phi))^k = 1 - 1/theta.  The matching
schedules balance the per-interval worst-case ratio to exactly cr on every
one of the k+1 price intervals.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .core import PriceBounds, ProblemKind, ThresholdSchedule
from .errors import InvalidInputError

_BISECT_ITERS = 200
_RESIDUAL_TOL = 1e-10


@dataclass(frozen=True)
class WorstCaseSolution:
    """Optimal competitive ratio together with the schedule that attains it."""

    kind: ProblemKind
    cr: float
    schedule: ThresholdSchedule


def _check_k(k: int) -> None:
    if not isinstance(k, int) or isinstance(k, bool) or k < 1:
        raise InvalidInputError(f"k must be a positive integer, got {k!r}")


def _bisect(f, lo: float, hi: float) -> float:
    """Root of a sign-changing f on [lo, hi] via plain bisection."""
    flo = f(lo)
    fhi = f(hi)
    if flo == 0.0:
        return lo
    if fhi == 0.0:
        return hi
    assert flo * fhi < 0, "bisection bracket must straddle the root"
    for _ in range(_BISECT_ITERS):
        mid = 0.5 * (lo + hi)
        fm = f(mid)
        if fm == 0.0:
            return mid
        if flo * fm < 0:
            hi = mid
        else:
            lo, flo = mid, fm
        if hi - lo <= 1e-15 * max(1.0, abs(hi)):
            break
    return 0.5 * (lo + hi)


def solve_alpha_star(bounds: PriceBounds, k: int) -> float:
    """Optimal k-max competitive ratio for the given bounds."""
    _check_k(k)
    theta = bounds.theta
    if theta == 1.0:
        return 1.0

    def f(a: float) -> float:
        # product form of the balance equation; unlike the ratio form its
        # slope stays bounded as theta -> 1, so the residual check is
        # meaningful over the whole domain
        return (a - 1.0) * (1.0 + a / k) ** k - (theta - 1.0)

    root = _bisect(f, 1.0 + 1e-12, theta)
    residual = abs((root - 1.0) * (1.0 + root / k) ** k - (theta - 1.0))
    assert residual < _RESIDUAL_TOL * max(1.0, theta - 1.0)
    return root


def solve_phi_star(bounds: PriceBounds, k: int) -> float:
    """Optimal k-min competitive ratio for the given bounds."""
    _check_k(k)
    theta = bounds.theta
    if theta == 1.0:
        return 1.0

    target = 1.0 - 1.0 / theta

    def f(p: float) -> float:
        # strictly increasing in p, so the bracket (1, theta) works directly
        return (1.0 - 1.0 / p) * (1.0 + 1.0 / (k * p)) ** k - target

    root = _bisect(f, 1.0 + 1e-12, theta)
    residual = abs((1.0 - 1.0 / root) * (1.0 + 1.0 / (k * root)) ** k - target)
    assert residual < _RESIDUAL_TOL
    return root


def worst_case_thresholds(bounds: PriceBounds, k: int, kind: ProblemKind) -> WorstCaseSolution:
    """Schedule whose k+1 per-interval worst-case ratios all equal cr."""
    _check_k(k)
    if kind.is_max:
        cr = solve_alpha_star(bounds, k)
        growth = 1.0 + cr / k
        values = [
            bounds.clip(bounds.p_min * (1.0 + (cr - 1.0) * growth ** (i - 1)))
            for i in range(1, k + 1)
        ]
    else:
        cr = solve_phi_star(bounds, k)
        growth = 1.0 + 1.0 / (k * cr)
        values = [
            bounds.clip(bounds.p_max * (1.0 - (1.0 - 1.0 / cr) * growth ** (i - 1)))
            for i in range(1, k + 1)
        ]
    schedule = ThresholdSchedule(kind, tuple(values), bounds)
    return WorstCaseSolution(kind, cr, schedule)


def solve_cr(bounds: PriceBounds, k: int, kind: ProblemKind) -> float:
    """Kind-dispatching shorthand used throughout the package."""
    return solve_alpha_star(bounds, k) if kind.is_max else solve_phi_star(bounds, k)
