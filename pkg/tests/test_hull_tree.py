import math

import numpy as np
import pytest

from mdpcurve import generators
from mdpcurve.geom import point_in_hull
from mdpcurve.hull_tree import (
    BAD,
    CONSTANTS,
    GOOD,
    P1,
    P2,
    associated_cubes,
    build_tree,
    classify,
    compute_constants,
    make_root,
    point_scale,
    split_node,
)
from mdpcurve.multiscale import PointSet


def test_constants():
    m0 = math.ceil(math.log((1 / 1024) * math.sqrt(17 / 576)) / math.log(35 / 36))
    assert (CONSTANTS.m0, CONSTANTS.M) == (m0, 3 * (m0 + 1)) == (309, 930)
    assert CONSTANTS.K == 1350 and CONSTANTS.K1 == 0.5
    assert compute_constants() == CONSTANTS


def test_split_p1_shares_point():
    E = PointSet([(0, 0), (1, 0), (0.45, 0.1), (0.6, -0.1)])
    root = make_root(E)
    c0, c1, bridge, case = split_node(root)
    assert case == P1
    assert bridge.length == 0.0 and bridge.e0 == (0.45, 0.1)
    assert root.z_param == pytest.approx(0.45)
    shared = set(c0.points.tolist()) & set(c1.points.tolist())
    assert len(shared) == 1
    assert len(c0.points) + len(c1.points) == len(E) + 1


def test_split_p2_thirds_and_bridge():
    E = PointSet([(0, 0), (0.2, 0.05), (0.8, 0.05), (1, 0)])
    c0, c1, bridge, case = split_node(make_root(E))
    assert case == P2
    assert sorted(map(tuple, c0.coords.tolist())) == [(0.0, 0.0), (0.2, 0.05)]
    assert bridge.e0 == (0.2, 0.05) and bridge.e1 == (0.8, 0.05)
    assert bridge.length == pytest.approx(0.6)


def test_split_leaf_raises():
    with pytest.raises(ValueError):
        split_node(make_root(PointSet([(0.3, 0.3)])))


def test_associated_cubes_scale():
    root = make_root(PointSet([(0.1, 0.1), (0.4, 0.3)]))
    cubes = associated_cubes(root)
    assert cubes
    for Q in cubes:
        assert Q.side / 2 < root.diam <= Q.side


def test_classify_single_point_is_good():
    node = make_root(PointSet([(0.3, 0.7)]))
    assert classify(node, PointSet([(0.3, 0.7)]), 0.01) == GOOD
    assert node.good_cube.n == point_scale(0.01) == math.floor(math.log2(math.sqrt(2) / 0.01))


def test_two_points_good_at_root():
    tree = build_tree([(0, 0), (1, 0)], 0.2)
    assert len(tree.nodes) == 1 and tree.root.label == GOOD
    assert tree.root.chord.length == pytest.approx(1.0)


def test_square_corners_split():
    tree = build_tree([(0, 0), (1, 0), (1, 1), (0, 1)], 0.01)
    assert tree.root.label == BAD
    assert all(n.label == GOOD for n in tree.leaves())


def test_tree_invariants_koch():
    tree = build_tree(generators.koch(3), 0.05)
    nodes = tree.by_sigma()
    for n in tree.splits():
        assert n.label == BAD and n.split_case in (P1, P2)
        for c in tree.children(n):
            assert c.sigma[:-1] == n.sigma
            assert set(c.points.tolist()) <= set(n.points.tolist())
            for v in c.hull.vertices:
                assert point_in_hull(v, n.hull, 1e-9)
    for leaf in tree.leaves():
        assert leaf.label == GOOD
    assert tree.N == max(len(s) for s in nodes)


def test_zero_radius_rejected():
    with pytest.raises(ValueError, match="r = 0"):
        build_tree([(0, 0), (1, 0)], 0.0)


def test_to_dict_roundtrip_fields():
    d = build_tree(generators.koch(1), 0.05).to_dict()
    assert d["M"] == 930 and d["nodes"][0]["sigma"] == ""
    assert {"vertices", "case", "label", "bridge"} <= set(d["nodes"][0])
