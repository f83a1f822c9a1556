"""Core domain types and the threshold-based selection engine.

The online k-search setting: T prices arrive one by one, each in
[p_min, p_max], and the algorithm must pick exactly k of them — maximizing
the total for max-search, minimizing it for min-search.  A deterministic
threshold algorithm keeps a non-decreasing (max) or non-increasing (min)
schedule of k reservation prices and accepts the t-th arrival whenever it
meets the threshold indexed by the number of items already taken.  Once the
number of remaining arrivals equals the remaining budget, selection becomes
compulsory regardless of the schedule.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field

import numpy as np

from .errors import InvalidInputError


class ProblemKind(enum.Enum):
    """Which extreme the searcher is after."""

    MAX = "max"
    MIN = "min"

    @property
    def is_max(self) -> bool:
        return self is ProblemKind.MAX


@dataclass(frozen=True)
class PriceBounds:
    """Known price support [p_min, p_max] with fluctuation ratio theta."""

    p_min: float
    p_max: float

    def __post_init__(self):
        if not (self.p_min > 0 and math.isfinite(self.p_min)):
            raise InvalidInputError(f"p_min must be positive and finite, got {self.p_min}")
        if not (self.p_max >= self.p_min and math.isfinite(self.p_max)):
            raise InvalidInputError(
                f"p_max must satisfy p_max >= p_min > 0, got [{self.p_min}, {self.p_max}]"
            )

    @property
    def theta(self) -> float:
        """Fluctuation ratio p_max / p_min (always derived, never stored)."""
        return self.p_max / self.p_min

    def contains(self, price: float) -> bool:
        return self.p_min <= price <= self.p_max

    def clip(self, price: float) -> float:
        return min(max(price, self.p_min), self.p_max)


@dataclass(frozen=True)
class SearchInstance:
    """A full arrival sequence together with the budget k and its bounds."""

    prices: tuple[float, ...]
    k: int
    bounds: PriceBounds

    def __post_init__(self):
        prices = tuple(float(p) for p in self.prices)
        object.__setattr__(self, "prices", prices)
        if not prices:
            raise InvalidInputError("instance needs at least one price")
        if not (1 <= self.k <= len(prices)):
            raise InvalidInputError(
                f"budget k={self.k} must lie in [1, T={len(prices)}]"
            )
        lo, hi = min(prices), max(prices)
        if lo < self.bounds.p_min or hi > self.bounds.p_max:
            raise InvalidInputError(
                f"prices span [{lo}, {hi}], outside bounds "
                f"[{self.bounds.p_min}, {self.bounds.p_max}]"
            )

    @property
    def horizon(self) -> int:
        return len(self.prices)


@dataclass(frozen=True)
class ThresholdSchedule:
    """k reservation prices, monotone in the direction dictated by the kind.

    Index convention follows the interval analysis: thresholds are 1-based
    ``value_at(1..k)`` with sentinels ``value_at(0)`` / ``value_at(k+1)``
    pinned to the price bounds (p_min and p_max for max-search, swapped for
    min-search).
    """

    kind: ProblemKind
    values: tuple[float, ...]
    bounds: PriceBounds

    def __post_init__(self):
        values = tuple(float(v) for v in self.values)
        object.__setattr__(self, "values", values)
        if not values:
            raise InvalidInputError("schedule needs at least one threshold")
        lo, hi = min(values), max(values)
        if lo < self.bounds.p_min or hi > self.bounds.p_max:
            raise InvalidInputError(
                f"thresholds span [{lo}, {hi}], outside bounds "
                f"[{self.bounds.p_min}, {self.bounds.p_max}]"
            )
        pairs = zip(values, values[1:])
        if self.kind.is_max:
            ok = all(a <= b for a, b in pairs)
        else:
            ok = all(a >= b for a, b in pairs)
        if not ok:
            raise InvalidInputError(f"thresholds not monotone for {self.kind}")

    @property
    def k(self) -> int:
        return len(self.values)

    def value_at(self, i: int) -> float:
        """Threshold i in 1..k, with the conventional sentinels at 0 and k+1."""
        if i == 0:
            return self.bounds.p_min if self.kind.is_max else self.bounds.p_max
        if i == self.k + 1:
            return self.bounds.p_max if self.kind.is_max else self.bounds.p_min
        if not 1 <= i <= self.k:
            raise InvalidInputError(f"threshold index {i} outside [0, {self.k + 1}]")
        return self.values[i - 1]


@dataclass(frozen=True)
class Decision:
    """One step of a run: was the arrival taken, and was it forced?"""

    selected: bool
    price: float
    compulsory: bool


@dataclass(frozen=True)
class RunTrace:
    """Complete record of one algorithm run on one instance."""

    decisions: tuple[Decision, ...]
    total_value: float
    num_selected: int

    @property
    def num_compulsory(self) -> int:
        return sum(1 for d in self.decisions if d.compulsory)


@dataclass(frozen=True)
class ParetoPoint:
    """A (consistency, robustness) pair indexed by the confidence lam in [0,1]."""

    lam: float
    eta: float
    gamma: float

    def __post_init__(self):
        if not 0.0 <= self.lam <= 1.0:
            raise InvalidInputError(f"confidence must lie in [0,1], got {self.lam}")
        if not (1.0 - 1e-9 <= self.eta <= self.gamma + 1e-9):
            raise InvalidInputError(
                f"need 1 <= eta <= gamma, got eta={self.eta}, gamma={self.gamma}"
            )


def run_ota(schedule: ThresholdSchedule, instance: SearchInstance) -> RunTrace:
    """Run the online threshold algorithm and return the full decision trace.

    At a step where m items are already selected the arrival is taken iff it
    meets threshold m+1 (>= for max-search, <= for min-search; equality
    selects).  The compulsory rule: once the remaining arrivals equal the
    remaining budget, everything left is selected unconditionally.
    """
    if instance.k != schedule.k:
        raise InvalidInputError(
            f"instance budget k={instance.k} != schedule length {schedule.k}"
        )
    if instance.bounds != schedule.bounds:
        raise InvalidInputError("instance and schedule disagree on price bounds")

    is_max = schedule.kind.is_max
    values = schedule.values
    k = schedule.k
    T = instance.horizon
    m = 0
    total = 0.0
    decisions: list[Decision] = []
    for t, price in enumerate(instance.prices):
        forced = (T - t) == (k - m)
        if forced:
            selected = True
        elif m < k:
            selected = price >= values[m] if is_max else price <= values[m]
        else:
            selected = False
        if selected:
            m += 1
            total += price
        decisions.append(Decision(selected, price, forced))
    assert m == k, "compulsory rule guarantees a full budget"
    return RunTrace(tuple(decisions), total, m)


def ota_total(schedule: ThresholdSchedule, prices: np.ndarray) -> tuple[float, int]:
    """Total value and voluntary-selection count of a run, without the trace.

    Equivalent to ``run_ota`` (property-tested) but skips per-step Python
    objects: voluntary selection times are found by jump-scanning for the
    next qualifying price, then the earliest step where the compulsory rule
    fires is located on the resulting selection-count staircase.
    """
    arr = np.asarray(prices, dtype=float)
    vals = np.asarray(schedule.values, dtype=float)
    if not schedule.kind.is_max:
        # min-search is max-search on negated prices/thresholds
        arr, vals = -arr, -vals
    T = arr.shape[0]
    k = vals.shape[0]
    if T < k:
        raise InvalidInputError(f"horizon {T} shorter than budget {k}")

    sel_times: list[int] = []
    t = 0
    for m in range(k):
        if t >= T:
            break
        hits = arr[t:] >= vals[m]
        j = int(hits.argmax())
        if not hits[j]:
            break
        t += j
        sel_times.append(t)
        t += 1

    n_vol = len(sel_times)
    comp_start = -1
    m_before = 0
    for m in range(n_vol + 1):
        tc = T - k + m
        if tc >= T:
            break
        lo = sel_times[m - 1] + 1 if m > 0 else 0
        hi = sel_times[m] if m < n_vol else T - 1
        if lo <= tc <= hi:
            comp_start = tc
            m_before = m
            break

    if comp_start < 0:
        assert n_vol == k, "no compulsion implies the budget filled voluntarily"
        total = float(arr[sel_times].sum())
        voluntary = k
    else:
        total = float(arr[sel_times[:m_before]].sum() + arr[comp_start:].sum())
        voluntary = m_before
    if not schedule.kind.is_max:
        total = -total
    return total, voluntary


def offline_opt(instance: SearchInstance, kind: ProblemKind) -> float:
    """Clairvoyant optimum: sum of the k largest (max) or smallest (min) prices."""
    ordered = sorted(instance.prices, reverse=kind.is_max)
    return float(sum(ordered[: instance.k]))


def empirical_ratio(trace: RunTrace, opt: float, kind: ProblemKind) -> float:
    """Per-instance performance ratio, oriented so that >= 1 means suboptimal."""
    if opt <= 0 or trace.total_value <= 0:
        raise InvalidInputError(
            f"ratios need positive totals, got opt={opt}, alg={trace.total_value}"
        )
    if kind.is_max:
        return opt / trace.total_value
    return trace.total_value / opt
