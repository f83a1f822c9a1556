"""Shared hypothesis strategies for the test suite."""

import hypothesis.strategies as st

from ksearch import PriceBounds, ProblemKind, SearchInstance, ThresholdSchedule

kinds = st.sampled_from([ProblemKind.MAX, ProblemKind.MIN])


@st.composite
def price_bounds(draw, max_theta=50.0):
    p_min = draw(st.floats(min_value=0.5, max_value=200.0))
    theta = draw(st.floats(min_value=1.0, max_value=max_theta))
    return PriceBounds(p_min, p_min * theta)


@st.composite
def schedule_and_instance(draw, max_k=6, max_horizon=40):
    """A consistent (schedule, instance, kind) triple sharing one bounds object."""
    kind = draw(kinds)
    bounds = draw(price_bounds())
    k = draw(st.integers(min_value=1, max_value=max_k))
    in_range = st.floats(min_value=bounds.p_min, max_value=bounds.p_max)
    raw = draw(st.lists(in_range, min_size=k, max_size=k))
    ordered = sorted(raw, reverse=not kind.is_max)
    schedule = ThresholdSchedule(kind, tuple(ordered), bounds)
    horizon = draw(st.integers(min_value=k, max_value=max_horizon))
    prices = draw(st.lists(in_range, min_size=horizon, max_size=horizon))
    instance = SearchInstance(tuple(prices), k, bounds)
    return schedule, instance, kind
