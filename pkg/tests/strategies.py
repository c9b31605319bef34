"""Hypothesis strategies shared by the property tests."""

from hypothesis import strategies as st

from relmetrics.extended_space import INF, ExtendedPoint

coord = st.floats(min_value=-5.0, max_value=5.0, allow_nan=False, allow_infinity=False)


def finite_points(n=2):
    return st.tuples(*[coord] * n).map(ExtendedPoint)


def extended_points(n=2):
    return st.one_of(finite_points(n), st.just(INF))
