import pytest

from mdpcurve import generators
from mdpcurve.curve_builder import Curve, assemble, good_hull_piece, termination_bound
from mdpcurve.geom import Segment
from mdpcurve.hull_tree import BAD, build_tree, make_root
from mdpcurve.multiscale import PointSet


def test_curve_degenerate_segment_becomes_point():
    c = Curve()
    c.add_segment(Segment((1.0, 1.0), (1.0, 1.0)), "bridge", "")
    assert c.segments == [] and c.isolated_points == [(1.0, 1.0)]


def test_curve_dict_roundtrip():
    c = Curve()
    c.add_segment(Segment((0.0, 0.0), (1.0, 0.5)), "chord", "01")
    c.isolated_points.append((2.0, 2.0))
    d = Curve.from_dict(c.to_dict())
    assert d.segments == c.segments and d.isolated_points == c.isolated_points
    assert d.provenance == [("chord", "01")]


def test_two_point_curve():
    curve, trace = assemble(build_tree([(0, 0), (1, 0)], 0.2))
    assert trace.N == 0
    kinds = [k for k, _ in curve.provenance]
    assert "chord" in kinds and "boundary" in kinds


def test_unlabeled_tree_rejected():
    tree = build_tree([(0, 0), (1, 0)], 0.2)
    tree.nodes[0].label = "unlabeled"
    with pytest.raises(ValueError, match="classification"):
        assemble(tree)


def test_good_piece_rejects_bad():
    node = make_root(PointSet([(0, 0), (1, 0)]))
    node.label = BAD
    with pytest.raises(ValueError):
        good_hull_piece(node)


def test_generations_partition_leaves_and_bridges():
    tree = build_tree(generators.koch(3), 0.05)
    curve, trace = assemble(tree, trace_snapshots=True)
    assert len(trace.generations) == tree.N + 1
    assert sum(len(g.good) for g in trace.generations) == len(tree.leaves())
    assert sum(len(g.bridges) for g in trace.generations) == len(tree.splits())
    assert len(trace.snapshots) == tree.N + 1
    assert trace.snapshots[-1].segments


def test_termination_bound():
    assert termination_bound([(0, 0), (1, 0)], 0.2, 930) == 930 * 5  # ceil(log2 15) + 1
    assert termination_bound([(0, 0)], 0.2, 930) == 930
    with pytest.raises(ValueError):
        termination_bound([(0, 0)], 0.0, 930)
