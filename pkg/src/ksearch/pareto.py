"""Consistency-robustness frontiers and the confidence-to-target mapping.

For k-max search no deterministic algorithm with robustness gamma can have
consistency better than

    Gamma(gamma) = theta / ([1 + (gamma-1)(1+gamma/k)^xi]/gamma
                            + (theta-1)(1 - xi/k)),

where xi = ceil(ln((theta-1)/(gamma-1)) / ln(1+gamma/k)) counts how many of
the k intervals an adversary can sweep before the robustness budget is
exhausted.  The k-min mirror is

    Lambda(gamma) = theta[gamma - (gamma-1)(1+1/(gamma k))^zeta]
                    - (theta-1)(1 - zeta/k),

with zeta the floor analogue.  A confidence lam in [0,1] is mapped linearly
onto gamma in [cr*, theta] and the frontier then fixes eta; lam=1 recovers
the worst-case optimum (cr*, cr*), lam=0 full trust (1, theta).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .core import ParetoPoint, PriceBounds, ProblemKind
from .errors import DomainError, InvalidInputError
from .worstcase import solve_cr

# integer cutoffs sit at exact balancing identities where the float log
# ratio lands within an ulp of an integer; nudge before rounding so the
# endpoint identities Gamma(alpha*)=alpha* and Lambda(phi*)=phi* are exact
# Absorbs float noise when a crossing is analytically integral (worst case
# ~1e-13 at k=1e4) without swallowing genuine sub-1e-9 fractional parts,
# which occur when gamma sits within float distance of the domain ends.
_CUT_EPS = 1e-11


@dataclass(frozen=True)
class FrontierSpec:
    """Frozen parameters of one frontier: bounds, budget, kind, and cr*."""

    bounds: PriceBounds
    k: int
    kind: ProblemKind
    cr_star: float

    def __post_init__(self):
        if not isinstance(self.k, int) or isinstance(self.k, bool) or self.k < 1:
            raise InvalidInputError(f"k must be a positive integer, got {self.k!r}")
        reference = solve_cr(self.bounds, self.k, self.kind)
        if abs(reference - self.cr_star) > 1e-9:
            raise InvalidInputError(
                f"cr_star={self.cr_star} does not match the solved ratio {reference}"
            )

    @classmethod
    def solve(cls, bounds: PriceBounds, k: int, kind: ProblemKind) -> "FrontierSpec":
        return cls(bounds, k, kind, solve_cr(bounds, k, kind))

    @property
    def theta(self) -> float:
        return self.bounds.theta


def _checked_gamma(gamma: float, spec: FrontierSpec) -> float:
    """Validate gamma against [cr*, theta] and snap float fuzz onto it."""
    tol = 1e-9 * max(1.0, spec.theta)
    if gamma < spec.cr_star - tol or gamma > spec.theta + tol:
        raise DomainError(
            f"gamma={gamma} outside the frontier domain [{spec.cr_star}, {spec.theta}]"
        )
    return min(max(gamma, spec.cr_star), spec.theta)


def _require(spec: FrontierSpec, kind: ProblemKind) -> None:
    if spec.kind is not kind:
        raise InvalidInputError(f"operation requires a {kind.value}-search spec")


def xi_star(gamma: float, spec: FrontierSpec) -> int:
    """Number of intervals the max-search adversary can sweep at robustness gamma."""
    _require(spec, ProblemKind.MAX)
    gamma = _checked_gamma(gamma, spec)
    theta, k = spec.theta, spec.k
    if theta == 1.0 or gamma >= theta:
        return 0
    raw = math.log((theta - 1.0) / (gamma - 1.0)) / math.log1p(gamma / k)
    return min(k, max(0, math.ceil(raw - _CUT_EPS)))


def lower_bound_max(gamma: float, spec: FrontierSpec) -> float:
    """Best consistency any gamma-robust deterministic k-max algorithm can reach."""
    _require(spec, ProblemKind.MAX)
    gamma = _checked_gamma(gamma, spec)
    theta, k = spec.theta, spec.k
    if theta == 1.0:
        return 1.0
    xi = xi_star(gamma, spec)
    denom = (1.0 + (gamma - 1.0) * (1.0 + gamma / k) ** xi) / gamma + (theta - 1.0) * (
        1.0 - xi / k
    )
    return min(max(theta / denom, 1.0), spec.cr_star)


def zeta_star(gamma: float, spec: FrontierSpec) -> int:
    """Min-search analogue of xi_star (floor instead of ceiling)."""
    _require(spec, ProblemKind.MIN)
    gamma = _checked_gamma(gamma, spec)
    theta, k = spec.theta, spec.k
    if theta == 1.0 or gamma >= theta:
        return 0
    raw = math.log((theta - 1.0) / (theta - theta / gamma)) / math.log1p(1.0 / (gamma * k))
    return min(k, max(0, math.floor(raw + _CUT_EPS)))


def lower_bound_min(gamma: float, spec: FrontierSpec) -> float:
    """Best consistency any gamma-robust deterministic k-min algorithm can reach.

    The bound counts how many reserve thresholds a gamma-robust schedule is
    forced to keep strictly above p_min; that count is the ceiling of the
    log ratio (the floor form of zeta_star under-counts by one whenever the
    crossing is not exactly integral, and the resulting consistency value is
    unattainable: with gamma < theta the first threshold alone already sits
    at p_max/gamma > p_min).  Evaluating at the ceiling makes the bound both
    valid and achieved exactly by the case-VI construction.
    """
    _require(spec, ProblemKind.MIN)
    gamma = _checked_gamma(gamma, spec)
    theta, k = spec.theta, spec.k
    if theta == 1.0:
        return 1.0
    if gamma >= theta:
        zeta = 0
    else:
        raw = math.log((theta - 1.0) / (theta - theta / gamma)) / math.log1p(
            1.0 / (gamma * k)
        )
        zeta = min(k, max(0, math.ceil(raw - _CUT_EPS)))
    # gamma - (gamma-1)*(1+1/(gamma*k))**zeta rewritten so the near-total
    # cancellation between the two terms (their difference can be ~1/gamma
    # of either operand) happens between exactly-computed quantities;
    # expm1/log1p keep the small factor at full precision.
    growth = math.expm1(zeta * math.log1p(1.0 / (gamma * k)))
    value = theta * (1.0 - (gamma - 1.0) * growth) - (theta - 1.0) * (1.0 - zeta / k)
    return min(max(value, 1.0), spec.cr_star)


def lower_bound(gamma: float, spec: FrontierSpec) -> float:
    return lower_bound_max(gamma, spec) if spec.kind.is_max else lower_bound_min(gamma, spec)


def target_point(lam: float, spec: FrontierSpec) -> ParetoPoint:
    """Map a confidence lam onto its Pareto-optimal (eta, gamma) target."""
    if not 0.0 <= lam <= 1.0:
        raise DomainError(f"confidence must lie in [0,1], got {lam}")
    cr, theta = spec.cr_star, spec.theta
    gamma = cr + (1.0 - lam) * (theta - cr)
    gamma = min(max(gamma, cr), theta)
    eta = lower_bound(gamma, spec)
    eta = min(max(eta, 1.0), gamma)
    return ParetoPoint(lam, eta, gamma)


def frontier_curve(spec: FrontierSpec, num_points: int) -> tuple[ParetoPoint, ...]:
    """target_point on a uniform lam grid from 1 (worst-case) down to 0 (full trust)."""
    if num_points < 2:
        raise InvalidInputError(f"need at least 2 points, got {num_points}")
    steps = num_points - 1
    return tuple(target_point(1.0 - i / steps, spec) for i in range(num_points))
