"""Covering curves for the maximum distance problem, with multiscale bounds."""

from .certify import (
    BoundsReport,
    CheckResult,
    connectivity_check,
    coverage_check,
    curve_length,
    evaluate_bounds,
    hausdorff_distance,
    run_pipeline,
)
from .curve_builder import Curve, assemble, termination_bound
from .geom import Hull, Segment, StripFit, convex_hull, diameter_pair, min_width_strip
from .hull_tree import CONSTANTS, HullTree, build_tree
from .multiscale import (
    DyadicCube,
    PointSet,
    beta_of_cube,
    classical_jones_sum,
    lower_bound,
    truncated_square_sum,
)

__version__ = "0.1.0"
