"""Prediction-augmented threshold designs for k-max and k-min search.

Given a target consistency/robustness pair (eta, gamma) and a predicted
extreme price P, the schedule is stitched together from up to three pieces:

- a robustness prefix ``z`` of gamma-balanced thresholds covering prices far
  below (max) / above (min) the prediction, so a wildly wrong prediction
  cannot cost more than gamma;
- a consistency block ``c`` around the prediction — a flat run at P followed
  by a pivot and an eta-balanced geometric continuation — which keeps the
  ratio at eta whenever the prediction is accurate;
- a robustness tail ``r`` of thresholds reserved for prices beyond the
  consistency region, shaped so every remaining interval ratio stays at or
  below gamma.

Which pieces appear depends on where P falls relative to the two boundary
prices p~1 (end of the flat-free region) and p~2 (where the robustness
prefix becomes necessary): cases I/II/III for max-search and IV/V/VI for
min-search.  Every constructed schedule is re-verified numerically; a
verification failure raises ConstructionError and indicates an infeasible
target rather than a tolerable degradation.
"""

from __future__ import annotations

import bisect
import functools
import math
from dataclasses import dataclass

import numpy as np

from .core import ParetoPoint, PriceBounds, ProblemKind, ThresholdSchedule
from .errors import ConstructionError, DomainError, InvalidInputError
from .pareto import FrontierSpec, target_point

_RATIO_TOL = 1e-9
# scan conditions hold with exact equality at balanced endpoints (lambda=1),
# so comparisons carry a hair of relative slack
_SCAN_SLACK = 1e-9

# Nudge for integer crossings that are analytically exact; must stay above
# float noise (~1e-13) but below genuine fractional parts near domain ends.
_CROSS_EPS = 1e-11


# --------------------------------------------------------------------------
# per-interval worst-case ratios


def ratio_alpha(schedule: ThresholdSchedule, i: int) -> float:
    """Worst-case ratio of price interval i in 1..k+1 for a max-search schedule.

    An adversary that sweeps prices up to just below threshold i forces the
    algorithm to bank thresholds 1..i-1 plus compulsory p_min fills while the
    optimum collects k prices at the top of the interval.
    """
    if not schedule.kind.is_max:
        raise InvalidInputError("ratio_alpha needs a max-search schedule")
    k = schedule.k
    if not 1 <= i <= k + 1:
        raise DomainError(f"interval index {i} outside [1, {k + 1}]")
    banked = sum(schedule.values[: i - 1])
    denom = banked + (k - i + 1) * schedule.bounds.p_min
    return k * schedule.value_at(i) / denom


def ratio_beta(schedule: ThresholdSchedule, i: int) -> float:
    """Min-search mirror of ratio_alpha (Psi_{k+1} read as p_min)."""
    if schedule.kind.is_max:
        raise InvalidInputError("ratio_beta needs a min-search schedule")
    k = schedule.k
    if not 1 <= i <= k + 1:
        raise DomainError(f"interval index {i} outside [1, {k + 1}]")
    banked = sum(schedule.values[: i - 1])
    numer = banked + (k - i + 1) * schedule.bounds.p_max
    return numer / (k * schedule.value_at(i))


def interval_ratios(schedule: ThresholdSchedule) -> np.ndarray:
    """All k+1 per-interval ratios of a schedule in one vectorized sweep."""
    k = schedule.k
    values = np.asarray(schedule.values, dtype=float)
    extended = np.append(values, schedule.value_at(k + 1))
    banked = np.concatenate(([0.0], np.cumsum(values)))
    remaining = k - np.arange(k + 1)
    if schedule.kind.is_max:
        return k * extended / (banked + remaining * schedule.bounds.p_min)
    return (banked + remaining * schedule.bounds.p_max) / (k * extended)


def prediction_ratio(schedule: ThresholdSchedule, prediction: float) -> float:
    """Worst-case ratio over instances whose true extreme equals the prediction.

    The binding adversary triggers every threshold the predicted price can
    reach (banking exactly the threshold values), then offers the extreme k
    times so the optimum collects k*P while the algorithm declines, and
    finally forces compulsory fills at the far bound.  This is the quantity
    the consistency guarantee bounds by eta.
    """
    k = schedule.k
    bounds = schedule.bounds
    prediction = _snap_prediction(prediction, bounds)
    if schedule.kind.is_max:
        reached = bisect.bisect_right(schedule.values, prediction)
        banked = sum(schedule.values[:reached]) + (k - reached) * bounds.p_min
        return k * prediction / banked
    descending = [-v for v in schedule.values]
    reached = bisect.bisect_right(descending, -prediction)
    banked = sum(schedule.values[:reached]) + (k - reached) * bounds.p_max
    return banked / (k * prediction)


# --------------------------------------------------------------------------
# design containers and shared helpers


@dataclass(frozen=True)
class AugmentedDesign:
    """A designed schedule plus the structural indices that shaped it."""

    schedule: ThresholdSchedule
    case_label: str
    j_star: int
    m_star: int
    i_star: int
    sigma_star: int
    p_tilde_1: float
    p_tilde_2: float
    target: ParetoPoint
    prediction: float

    def __post_init__(self):
        k = self.schedule.k
        if not 0 <= self.j_star <= self.m_star <= self.i_star <= k:
            raise InvalidInputError(
                f"index chain violated: j*={self.j_star} m*={self.m_star} "
                f"i*={self.i_star} k={k}"
            )
        if self.case_label not in {"I", "II", "III", "IV", "V", "VI"}:
            raise InvalidInputError(f"unknown case label {self.case_label!r}")

    def segment_labels(self) -> tuple[str, ...]:
        """Per-threshold provenance: robustness prefix z, consistency block c, tail r."""
        labels = []
        for i in range(1, self.schedule.k + 1):
            if i <= self.j_star:
                labels.append("z")
            elif i <= self.i_star:
                labels.append("c")
            else:
                labels.append("r")
        return tuple(labels)


@functools.lru_cache(maxsize=256)
def _frontier(bounds: PriceBounds, k: int, kind: ProblemKind) -> FrontierSpec:
    return FrontierSpec.solve(bounds, k, kind)


def _snap_monotone(values: list[float], ascending: bool, scale: float) -> list[float]:
    """Remove float-noise inversions; larger ones indicate a real bug."""
    out = list(values)
    for idx in range(1, len(out)):
        prev, cur = out[idx - 1], out[idx]
        bad = cur < prev if ascending else cur > prev
        if bad:
            if abs(cur - prev) > 1e-9 * scale:
                raise ConstructionError(
                    f"designed thresholds not monotone at index {idx + 1}: "
                    f"{prev} -> {cur}"
                )
            out[idx] = prev
    return out


def _verify(design: AugmentedDesign) -> AugmentedDesign:
    """Re-check both guarantees on the finished schedule.

    Robustness: every interval ratio at most gamma.  Consistency: the
    accurate-prediction worst case at most eta, and the eta-balanced block
    (pivot through i*) individually at most eta.
    """
    target = design.target
    # nominal tolerance plus an ulp-scale cushion: summing k thresholds for a
    # ratio carries relative rounding noise, which matters when the margin is
    # an exact equality (e.g. degenerate spans where theta - 1 == _RATIO_TOL)
    gamma_cap = target.gamma + _RATIO_TOL + 1e-11 * target.gamma
    eta_cap = target.eta + _RATIO_TOL + 1e-11 * target.eta
    ratios = interval_ratios(design.schedule)
    worst = float(ratios.max())
    if worst > gamma_cap:
        raise ConstructionError(
            f"robustness violated: max ratio {worst} > gamma {target.gamma} "
            f"(case {design.case_label}, P={design.prediction})"
        )
    at_prediction = prediction_ratio(design.schedule, design.prediction)
    if at_prediction > eta_cap:
        raise ConstructionError(
            f"consistency violated: accurate-prediction ratio {at_prediction} > "
            f"eta {target.eta} (case {design.case_label}, P={design.prediction})"
        )
    if design.case_label in ("I", "IV"):
        covering = range(1, design.i_star + 1)
    else:
        covering = range(design.m_star + 2, design.i_star + 1)
    for i in covering:
        if ratios[i - 1] > eta_cap:
            raise ConstructionError(
                f"consistency violated on interval {i}: ratio {ratios[i - 1]} > "
                f"eta {target.eta} (case {design.case_label})"
            )
    return design


def _snap_prediction(prediction: float, bounds: PriceBounds) -> float:
    """Clamp roundoff-level boundary overshoot; reject anything larger."""
    tol = 1e-12 * bounds.p_max
    if bounds.p_max < prediction <= bounds.p_max + tol:
        return bounds.p_max
    if bounds.p_min - tol <= prediction < bounds.p_min:
        return bounds.p_min
    if not bounds.contains(prediction):
        raise InvalidInputError(
            f"prediction {prediction} outside [{bounds.p_min}, {bounds.p_max}]"
        )
    return prediction


def _resolve_target(
    prediction: float, lam: float, bounds: PriceBounds, k: int, kind: ProblemKind
) -> ParetoPoint:
    _snap_prediction(prediction, bounds)
    return target_point(lam, _frontier(bounds, k, kind))


# --------------------------------------------------------------------------
# max-search construction (cases I-III)


def _junction_slack(gamma: float, k: int, sigma: int) -> float:
    """Float-noise allowance for the block/tail junction ratio test.

    Noise excess must be accepted (at k=1 every on-frontier target makes the
    junction test an exact equality) but genuine excess must not be: the
    balanced tail shape is a repelling fixed point, so a junction overshoot
    grows by up to ~exp(gamma*(k-sigma)/k) on its way to the sentinel.
    Dividing the allowance by that growth bound keeps whatever slips through
    below the 1e-9 guarantee tolerance even after amplification; the 8e-10
    cap keeps the un-amplified (sigma = k) pass-through below it too.
    """
    amp = math.exp(min(50.0, gamma * (k - sigma) / k))
    return min(gamma * 1e-11 + 1e-12, 8e-10) / amp


def sigma_star_max(target: ParetoPoint, bounds: PriceBounds, k: int) -> int:
    """Largest flat-free consistency block length compatible with gamma.

    sigma counts how many eta-balanced thresholds can precede the robustness
    tail; the tested quantity is exactly "the first tail ratio stays at or
    below gamma".
    """
    eta, gamma = target.eta, target.gamma
    theta = bounds.theta
    for sigma in range(k, 0, -1):
        ratio = (
            eta
            * (1.0 + (theta - 1.0) / (1.0 + gamma / k) ** (k - sigma))
            / (1.0 + (eta - 1.0) * (1.0 + eta / k) ** sigma)
        )
        if ratio <= gamma + _junction_slack(gamma, k, sigma):
            return sigma
    raise ConstructionError(
        f"no feasible consistency block: target eta={eta}, gamma={gamma} "
        f"is below the achievable frontier"
    )


def design_max_for_target(
    prediction: float, target: ParetoPoint, bounds: PriceBounds, k: int
) -> AugmentedDesign:
    """Build and verify the max-search schedule for an explicit (eta, gamma)."""
    prediction = _snap_prediction(prediction, bounds)
    p_min, p_max = bounds.p_min, bounds.p_max
    eta, gamma = target.eta, target.gamma

    # Degenerate span: when theta - 1 is at or below the verification
    # tolerance every case boundary collapses to within float noise, and the
    # flat schedule already meets every bound (no ratio can exceed theta).
    if p_max <= p_min * (1.0 + _RATIO_TOL):
        schedule = ThresholdSchedule(ProblemKind.MAX, (p_min,) * k, bounds)
        design = AugmentedDesign(
            schedule, "I", 0, 0, k, k, p_min, p_min, target, prediction
        )
        return _verify(design)

    sigma = sigma_star_max(target, bounds, k)
    grow_eta = 1.0 + eta / k
    grow_gamma = 1.0 + gamma / k
    tilde_1 = p_min + p_min * (eta - 1.0) * grow_eta ** (sigma - 1)
    tilde_2 = max(tilde_1, gamma * p_min)

    def tail(i: int) -> float:
        # reserve thresholds so interval ratios decay onto gamma at the top
        return p_min + (p_max - p_min) / grow_gamma ** (k - i + 1)

    if prediction <= tilde_1:
        label, j_star, m_star = "I", 0, 0
        i_star = sigma
        values = [
            p_min + p_min * (eta - 1.0) * grow_eta ** (i - 1) for i in range(1, sigma + 1)
        ]
        values += [tail(i) for i in range(sigma + 1, k + 1)]
    else:
        if prediction <= tilde_2:
            label, j_star = "II", 0
            prefix: list[float] = []
        else:
            label = "III"
            raw = math.log((prediction / p_min - 1.0) / (gamma - 1.0)) / math.log1p(
                gamma / k
            )
            j_star = min(k, max(1, math.ceil(raw - _CROSS_EPS)))
            prefix = [
                p_min + p_min * (gamma - 1.0) * grow_gamma ** (i - 1)
                for i in range(1, j_star + 1)
            ]
        prefix_sum = sum(prefix)
        if label == "II":
            span = k * prediction / eta - k * p_min
        else:
            # the display folds the prefix sum into closed form via the
            # extended z value at j*+1; both agree by the balancing identity
            z_next = p_min * (1.0 + (gamma - 1.0) * grow_gamma**j_star)
            span = k * prediction / eta - k * z_next / gamma
        m_star = j_star + math.ceil(span / (prediction - p_min))
        m_star = min(max(m_star, j_star), k)

        pivot = eta * (prefix_sum + (m_star - j_star) * prediction + (k - m_star) * p_min) / k
        if pivot < prediction:
            if pivot < prediction * (1.0 - 1e-9):
                raise ConstructionError(
                    f"pivot {pivot} fell below the prediction {prediction}"
                )
            pivot = prediction

        def block(i: int) -> float:
            if i <= m_star:
                return prediction
            return p_min + (pivot - p_min) * grow_eta ** (i - m_star - 1)

        # largest i whose successor ratio still meets the robustness budget
        i_star = -1
        running = prefix_sum
        block_values: list[float] = []
        for i in range(j_star, k + 1):
            succ = p_max if i == k else tail(i + 1)
            if k * succ <= (gamma + _RATIO_TOL / 2) * (running + (k - i) * p_min):
                i_star = i
            if i < k:
                nxt = block(i + 1)
                block_values.append(nxt)
                running += nxt
        if i_star < j_star:
            raise ConstructionError(
                f"no feasible consistency endpoint for eta={eta}, gamma={gamma}, "
                f"P={prediction}"
            )
        m_star = min(m_star, i_star)
        values = prefix + block_values[: i_star - j_star]
        values += [tail(i) for i in range(i_star + 1, k + 1)]

    clipped = [bounds.clip(v) for v in values]
    clipped = _snap_monotone(clipped, ascending=True, scale=p_max)
    schedule = ThresholdSchedule(ProblemKind.MAX, tuple(clipped), bounds)
    design = AugmentedDesign(
        schedule, label, j_star, m_star, i_star, sigma, tilde_1, tilde_2, target, prediction
    )
    return _verify(design)


def design_max(prediction: float, lam: float, bounds: PriceBounds, k: int) -> AugmentedDesign:
    """Max-search design at the Pareto target implied by confidence lam."""
    target = _resolve_target(prediction, lam, bounds, k, ProblemKind.MAX)
    return design_max_for_target(prediction, target, bounds, k)


# --------------------------------------------------------------------------
# min-search construction (cases IV-VI)


def sigma_star_min(target: ParetoPoint, bounds: PriceBounds, k: int) -> int:
    """Min-search mirror of sigma_star_max."""
    eta, gamma = target.eta, target.gamma
    theta = bounds.theta
    for sigma in range(k, 0, -1):
        # numer = 1 - (1-1/eta)*(1+1/(eta*k))**sigma and
        # denom = 1 - (1-1/theta)/(1+1/(gamma*k))**(k-sigma), each rewritten
        # so the subtraction happens between exactly-computed quantities
        # (both differences can be tiny relative to their operands).
        numer = 1.0 / eta - (1.0 - 1.0 / eta) * math.expm1(
            sigma * math.log1p(1.0 / (eta * k))
        )
        tail_decay = math.exp(-(k - sigma) * math.log1p(1.0 / (gamma * k)))
        denom = -math.expm1(-(k - sigma) * math.log1p(1.0 / (gamma * k))) + (
            tail_decay / theta
        )
        if eta * numer / denom <= gamma + _junction_slack(gamma, k, sigma):
            return sigma
    raise ConstructionError(
        f"no feasible consistency block: target eta={eta}, gamma={gamma} "
        f"is below the achievable frontier"
    )


def design_min_for_target(
    prediction: float, target: ParetoPoint, bounds: PriceBounds, k: int
) -> AugmentedDesign:
    """Build and verify the min-search schedule for an explicit (eta, gamma)."""
    prediction = _snap_prediction(prediction, bounds)
    p_min, p_max = bounds.p_min, bounds.p_max
    eta, gamma = target.eta, target.gamma

    if p_max <= p_min * (1.0 + _RATIO_TOL):
        schedule = ThresholdSchedule(ProblemKind.MIN, (p_max,) * k, bounds)
        design = AugmentedDesign(
            schedule, "IV", 0, 0, k, k, p_max, p_max, target, prediction
        )
        return _verify(design)

    sigma = sigma_star_min(target, bounds, k)
    grow_eta = 1.0 + 1.0 / (eta * k)
    grow_gamma = 1.0 + 1.0 / (gamma * k)
    tilde_1 = p_max - p_max * (1.0 - 1.0 / eta) * grow_eta ** (sigma - 1)
    tilde_2 = min(tilde_1, p_max / gamma)

    def tail(i: int) -> float:
        return p_max - (p_max - p_min) / grow_gamma ** (k - i + 1)

    if prediction > tilde_1:
        label, j_star, m_star = "IV", 0, 0
        i_star = sigma
        values = [
            p_max - p_max * (1.0 - 1.0 / eta) * grow_eta ** (i - 1)
            for i in range(1, sigma + 1)
        ]
        values += [tail(i) for i in range(sigma + 1, k + 1)]
    else:
        if prediction > tilde_2:
            label, j_star = "V", 0
            prefix: list[float] = []
        else:
            label = "VI"
            ratio = (1.0 - prediction / p_max) / (1.0 - 1.0 / gamma)
            if ratio <= 1.0:
                j_star = 0
            else:
                raw = math.log(ratio) / math.log1p(1.0 / (gamma * k))
                j_star = min(k, max(0, math.ceil(raw - _CROSS_EPS)))
            prefix = [
                p_max - p_max * (1.0 - 1.0 / gamma) * grow_gamma ** (i - 1)
                for i in range(1, j_star + 1)
            ]
        prefix_sum = sum(prefix)
        # smallest flat-block end making the pivot drop to the prediction:
        # the closed form for case V is division-degenerate at P=p_max, and
        # the case VI display is garbled, so both use the defining property
        m_star = -1
        for m in range(j_star, k + 1):
            lhs = prefix_sum + (m - j_star) * prediction + (k - m) * p_max
            if lhs <= eta * k * prediction * (1.0 + _SCAN_SLACK):
                m_star = m
                break
        if m_star < 0:
            raise ConstructionError(
                f"no feasible flat block for eta={eta}, gamma={gamma}, P={prediction}"
            )

        pivot = (prefix_sum + (m_star - j_star) * prediction + (k - m_star) * p_max) / (
            eta * k
        )
        if pivot > prediction:
            if pivot > prediction * (1.0 + 1e-9):
                raise ConstructionError(
                    f"pivot {pivot} rose above the prediction {prediction}"
                )
            pivot = prediction

        def block(i: int) -> float:
            if i <= m_star:
                return prediction
            return p_max - (p_max - pivot) * grow_eta ** (i - m_star - 1)

        i_star = -1
        running = prefix_sum
        block_values: list[float] = []
        for i in range(j_star, k + 1):
            succ = p_min if i == k else tail(i + 1)
            if running + (k - i) * p_max <= (gamma + _RATIO_TOL / 2) * k * succ:
                i_star = i
            if i < k:
                nxt = block(i + 1)
                block_values.append(nxt)
                running += nxt
        if i_star < j_star:
            raise ConstructionError(
                f"no feasible consistency endpoint for eta={eta}, gamma={gamma}, "
                f"P={prediction}"
            )
        m_star = min(m_star, i_star)
        values = prefix + block_values[: i_star - j_star]
        values += [tail(i) for i in range(i_star + 1, k + 1)]

    clipped = [bounds.clip(v) for v in values]
    clipped = _snap_monotone(clipped, ascending=False, scale=p_max)
    schedule = ThresholdSchedule(ProblemKind.MIN, tuple(clipped), bounds)
    design = AugmentedDesign(
        schedule, label, j_star, m_star, i_star, sigma, tilde_1, tilde_2, target, prediction
    )
    return _verify(design)


def design_min(prediction: float, lam: float, bounds: PriceBounds, k: int) -> AugmentedDesign:
    """Min-search design at the Pareto target implied by confidence lam."""
    target = _resolve_target(prediction, lam, bounds, k, ProblemKind.MIN)
    return design_min_for_target(prediction, target, bounds, k)


def design(
    prediction: float, lam: float, bounds: PriceBounds, k: int, kind: ProblemKind
) -> AugmentedDesign:
    """Kind-dispatching entry point used by the harness and CLI."""
    if kind.is_max:
        return design_max(prediction, lam, bounds, k)
    return design_min(prediction, lam, bounds, k)


# --------------------------------------------------------------------------
# proposition predicates (internal verification helpers)


def check_prop_end_max(schedule: ThresholdSchedule, i_star: int) -> bool:
    """Do all ratios after a reserve tail stay within the tail's own budget?

    The tail shape pins its robustness parameter (recoverable from the last
    threshold), and the chained-inequality argument says every ratio past
    i*+1 stays below it whenever the ratio at i*+1 does.
    """
    if not schedule.kind.is_max:
        raise InvalidInputError("check_prop_end_max needs a max-search schedule")
    k = schedule.k
    if not 0 <= i_star <= k:
        raise DomainError(f"i_star {i_star} outside [0, {k}]")
    if i_star >= k or schedule.bounds.theta == 1.0:
        return True
    p_min, p_max = schedule.bounds.p_min, schedule.bounds.p_max
    last = schedule.values[-1]
    if last <= p_min:
        return True
    gamma = k * ((p_max - p_min) / (last - p_min) - 1.0)
    budget = gamma * (1.0 + 1e-9) + _RATIO_TOL
    return all(
        ratio_alpha(schedule, i) <= budget for i in range(i_star + 2, k + 2)
    )


def check_prop_beg_max(schedule: ThresholdSchedule) -> bool:
    """Does a geometric prefix keep every ratio within its implied budget?

    A prefix of the standard robustness shape starts at gamma*p_min, so the
    first threshold reveals gamma; the recurrence then caps every later
    ratio at gamma as long as the shape is respected.
    """
    if not schedule.kind.is_max:
        raise InvalidInputError("check_prop_beg_max needs a max-search schedule")
    gamma = schedule.values[0] / schedule.bounds.p_min
    budget = gamma * (1.0 + 1e-9) + _RATIO_TOL
    return all(ratio_alpha(schedule, i) <= budget for i in range(1, schedule.k + 1))


def check_prop_end_min(schedule: ThresholdSchedule, i_star: int) -> bool:
    """Min-search mirror of check_prop_end_max."""
    if schedule.kind.is_max:
        raise InvalidInputError("check_prop_end_min needs a min-search schedule")
    k = schedule.k
    if not 0 <= i_star <= k:
        raise DomainError(f"i_star {i_star} outside [0, {k}]")
    if i_star >= k or schedule.bounds.theta == 1.0:
        return True
    p_min, p_max = schedule.bounds.p_min, schedule.bounds.p_max
    last = schedule.values[-1]
    if last >= p_max or last <= p_min:
        return True
    gamma = 1.0 / (k * ((p_max - p_min) / (p_max - last) - 1.0))
    budget = gamma * (1.0 + 1e-9) + _RATIO_TOL
    return all(
        ratio_beta(schedule, i) <= budget for i in range(i_star + 2, k + 2)
    )


def check_prop_beg_min(schedule: ThresholdSchedule) -> bool:
    """Min-search mirror of check_prop_beg_max (gamma read off psi_1)."""
    if schedule.kind.is_max:
        raise InvalidInputError("check_prop_beg_min needs a min-search schedule")
    gamma = schedule.bounds.p_max / schedule.values[0]
    budget = gamma * (1.0 + 1e-9) + _RATIO_TOL
    return all(ratio_beta(schedule, i) <= budget for i in range(1, schedule.k + 1))
