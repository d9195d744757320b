import math

import numpy as np
import pytest

import oracles
from mdpcurve import generators
from mdpcurve.multiscale import (
    BetaCache,
    DyadicCube,
    PointSet,
    beta_of_cube,
    classical_jones_sum,
    lower_bound,
    minimizer_is_point,
    scale_of_side,
    truncated_square_sum,
)

SQUARE = np.array([[0.5, 0.5], [1.5, 0.5], [0.5, 1.5], [1.5, 1.5]])


def test_pointset_dedup_and_errors():
    E = PointSet([(0, 0), (0, 0), (1, 0)])
    assert len(E) == 2 and E.diameter == 1.0
    with pytest.raises(ValueError):
        PointSet(np.zeros((0, 2)))
    with pytest.raises(ValueError):
        PointSet([(0.0, float("nan"))])


@pytest.mark.parametrize("side,n", [(1.0, 0), (0.75, 0), (0.5, 1), (0.51, 0), (3.0, -2), (2.0 ** -10, 10)])
def test_scale_of_side(side, n):
    assert scale_of_side(side) == n
    assert 2.0 ** -n / 2 < side <= 2.0 ** -n


def test_cube_geometry():
    Q = DyadicCube(1, 1, 0)
    assert Q.bounds("Q") == (0.5, 0.0, 1.0, 0.5)
    assert Q.bounds("3Q") == (0.0, -0.5, 1.5, 1.0)
    assert Q.diam == pytest.approx(math.sqrt(2) / 2)
    assert Q.region_diam("3Q") == pytest.approx(3 * Q.diam)
    pts = np.array([[0.5, 0.0], [1.0, 0.25], [1.5, 1.0], [1.5000001, 1.0]])
    assert Q.contains(pts, "Q").tolist() == [True, False, False, False]
    assert Q.contains(pts, "3Q").tolist() == [True, True, True, False]


def test_beta_of_cube_small_counts():
    E = [(0.1, 0.1), (0.3, 0.4)]
    res = beta_of_cube(E, DyadicCube(0, 0, 0))
    assert res.count == 2 and res.r_value == 0.0 and res.beta == 0.0


def test_beta_of_cube_square():
    res = beta_of_cube(SQUARE, DyadicCube(-1, 0, 0))
    assert res.count == 4
    assert res.r_value == pytest.approx(0.5)
    assert res.beta == pytest.approx(0.5 / (2 * math.sqrt(2)))


def test_beta_of_cube_against_oracle():
    E = np.random.default_rng(4).uniform(size=(40, 2))
    for Q in [DyadicCube(0, 0, 0), DyadicCube(1, 0, 1), DyadicCube(2, 1, 2)]:
        for region in ("Q", "3Q"):
            sub = E[Q.contains(E, region)]
            assert beta_of_cube(E, Q, region).r_value == pytest.approx(oracles.strip_half_width(sub), abs=1e-12)


def test_cache_matches_direct():
    E = PointSet(generators.koch(2))
    cache = BetaCache(E, threads=2)
    cubes = cache.cubes(3, "3Q")
    for Q, res in zip(cubes, cache.get_many(cubes, "3Q")):
        assert res.r_value == pytest.approx(beta_of_cube(E, Q, "3Q").r_value, abs=1e-15)


def test_square_sum_closed_form():
    # every nonzero term sits on the chain of ancestors of the side-2 cube,
    # each worth (w - r)^2 / |Q|; the geometric series gives 2 (w - r)^2 / |Q_-1|
    s = truncated_square_sum(SQUARE, 0.3, "Q")
    assert s.total == pytest.approx(0.04 / math.sqrt(2), rel=1e-9)
    assert s.upward_truncation_bound < 1e-11


@pytest.mark.parametrize("variant", ["Q", "3Q"])
@pytest.mark.parametrize("r", [0.2, 0.05])
def test_sum_matches_oracle(variant, r):
    E = generators.koch(2)
    s = truncated_square_sum(E, r, variant)
    ref = oracles.truncated_sum(E, r, variant, s.n_top, s.n_bottom)
    assert s.total == pytest.approx(ref, rel=1e-12, abs=1e-15)


def test_sum_zero_for_flat_sets():
    E = [(x, 0.5) for x in np.linspace(0, 1, 30)]
    for v in ("Q", "3Q"):
        s = truncated_square_sum(E, 0.01, v)
        assert s.total == 0.0 and s.upward_truncation_bound == 0.0


def test_sum_rejects_zero_radius():
    with pytest.raises(ValueError, match="classical"):
        truncated_square_sum(SQUARE, 0.0)


def test_classical_sum_dominates():
    E = generators.koch(2)
    c = classical_jones_sum(E)
    for r in (0.2, 0.05, 0.01):
        s = truncated_square_sum(E, r, "3Q")
        assert s.total <= c.total + s.upward_truncation_bound


def test_classical_sum_two_points_is_zero():
    assert classical_jones_sum([(0, 0), (1, 1)]).total == 0.0


def test_lower_bound_two_points():
    assert lower_bound([(0, 0), (1, 0)], 0.2) == pytest.approx(0.6, abs=1e-12)
    assert minimizer_is_point([(0, 0), (1, 0)], 0.6)
    assert not minimizer_is_point([(0, 0), (1, 0)], 0.5)


def test_enumerate_cubes_examples():
    from mdpcurve.multiscale import enumerate_cubes

    assert enumerate_cubes([(0.1, 0.1)], 0) == [DyadicCube(0, 0, 0)]
    assert sorted(enumerate_cubes([(0.1, 0.1), (1.5, 0.2)], 0)) == [DyadicCube(0, 0, 0), DyadicCube(0, 1, 0)]
    assert enumerate_cubes([(0.5, 0.5)], 1) == [DyadicCube(1, 1, 1)]


def test_classical_sum_square_corners_brute_force():
    E = [(0, 0), (1, 0), (1, 1), (0, 1)]
    c = classical_jones_sum(E)
    window = sum(partial for n, partial, _ in c.per_scale if -6 <= n <= 6)
    assert window == pytest.approx(oracles.truncated_sum(E, 0.0, "3Q", -6, 6), abs=1e-9)
    # scales above -6 still carry about 3e-3, so the full total needs the wider range
    assert c.total == pytest.approx(oracles.truncated_sum(E, 0.0, "3Q", c.n_top, c.n_bottom), abs=1e-9)


def test_sum_vanishes_for_large_radius():
    E = generators.random_uniform(30, 1)
    assert truncated_square_sum(E, PointSet(E).diameter, "3Q").total == 0.0


def test_lower_bound_single_point():
    assert lower_bound([(0.3, 0.3)], 0.1) == pytest.approx(-0.2)
    assert minimizer_is_point([(0.3, 0.3)], 0.1)


def test_terms_recompute_from_stored_results():
    s = truncated_square_sum(generators.koch(2), 0.05, "3Q")
    for Q, res, t in s.terms:
        assert t == max(res.beta - 0.05 / Q.region_diam("3Q"), 0.0) ** 2 * Q.diam
    assert sum(t for _, _, t in s.terms) == pytest.approx(s.total, rel=1e-12)
