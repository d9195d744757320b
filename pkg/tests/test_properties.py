import math

import numpy as np
import pytest
from hypothesis import HealthCheck, given, settings
from hypothesis import strategies as st

import oracles
from mdpcurve.certify import curve_length, evaluate_bounds
from mdpcurve.curve_builder import Curve
from mdpcurve.geom import Segment, convex_hull, diameter_pair, min_width_strip, point_in_hull
from mdpcurve.multiscale import truncated_square_sum

coord = st.floats(min_value=0.0, max_value=1.0, allow_nan=False, allow_infinity=False, allow_subnormal=False)
point = st.tuples(coord, coord)
point_sets = st.lists(point, min_size=1, max_size=25)
radii = st.sampled_from([0.3, 0.1, 0.04])

fast = settings(max_examples=40, deadline=None, suppress_health_check=[HealthCheck.too_slow])


@fast
@given(point_sets)
def test_hull_contains_all_points(pts):
    h = convex_hull(pts)
    for p in pts:
        assert point_in_hull(p, h, 1e-9)
    assert set(h.vertices) <= set(map(tuple, pts))


@fast
@given(point_sets)
def test_diameter_is_max_pairwise(pts):
    assert diameter_pair(convex_hull(pts))[2] == pytest.approx(oracles.diameter(pts), rel=1e-12, abs=1e-15)


@fast
@given(point_sets)
def test_strip_width_oracle(pts):
    assert min_width_strip(pts).half_width == pytest.approx(oracles.strip_half_width(pts), abs=1e-9)


@fast
@given(st.lists(st.tuples(point, point), min_size=1, max_size=12))
def test_union_length_between_max_and_sum(segs):
    c = Curve()
    for p, q in segs:
        c.add_segment(Segment(p, q), "s", "")
    L = curve_length(c)
    lengths = [math.dist(p, q) for p, q in segs]
    assert max(lengths) - 1e-9 <= L <= sum(lengths) + 1e-9


@fast
@given(point_sets, st.sampled_from(["Q", "3Q"]))
def test_sum_monotone_in_r(pts, variant):
    a = truncated_square_sum(pts, 0.02, variant).total
    b = truncated_square_sum(pts, 0.1, variant).total
    assert a >= b - 1e-15


@fast
@given(point_sets, radii, st.integers(min_value=-2, max_value=2))
def test_dyadic_scaling(pts, r, m):
    # x -> 2^m x maps dyadic cubes to dyadic cubes, so the sum scales by 2^m
    s = truncated_square_sum(pts, r, "Q").total
    t = truncated_square_sum(np.asarray(pts) * 2.0 ** m, r * 2.0 ** m, "Q").total
    assert t == pytest.approx(s * 2.0 ** m, rel=1e-9, abs=1e-12)


@settings(max_examples=25, deadline=None, suppress_health_check=[HealthCheck.too_slow])
@given(st.lists(point, min_size=1, max_size=15), radii)
def test_pipeline_candidate_curve(pts, r):
    rep = evaluate_bounds(pts, r, oracle=False)
    assert rep.checks["coverage"].passed
    assert rep.checks["connectivity"].passed
    assert rep.checks["K_split"].passed and rep.checks["seven_bound"].passed
    assert rep.lower <= rep.curve_length + 2 * r + 1e-9
