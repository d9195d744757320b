"""
The nested family of convex hulls.

Each node holds a subset of ``E`` (by index), its hull, a fixed diameter
segment and the split that produced its children.  A node whose points
project into the open middle third of its diameter splits at one of those
points (case ``P1``); otherwise it splits into the two outer thirds and the
children are joined by the shortest bridge between them (case ``P2``).

Nodes are classified against dyadic cubes of matching size: a node is good
when some associated cube has a triple of small flatness ``r_E(3Q) < 2r``.
Good nodes and single-point nodes stop the recursion.
"""

from collections import deque
from dataclasses import dataclass, field
from math import ceil, log, log2, sqrt
from typing import Dict, List, Optional, Tuple

import numpy as np

from .geom import (
    EPS,
    Hull,
    Point,
    Segment,
    clip_line_to_hull,
    convex_hull,
    diameter_pair,
    hull_beta_hat,
    hull_intersects_box,
    project_params,
)
from .multiscale import SQRT2, BetaCache, DyadicCube, as_point_set, scale_of_side

P1, P2, LEAF = "P1", "P2", "leaf"
GOOD, BAD, UNLABELED = "good", "bad", "unlabeled"


@dataclass(frozen=True)
class Constants:
    M: int
    K: float
    K1: float
    m0: int


def compute_constants() -> Constants:
    """Halving depth from the area-decay argument, plus the split constant."""
    m0 = int(ceil(log((1.0 / 1024.0) * sqrt(17.0 / 576.0)) / log(35.0 / 36.0)))
    K1 = 0.5
    K = max(2.0 * (36.0 ** 2 * K1 + 12.0), 1350.0)
    return Constants(M=3 * (m0 + 1), K=K, K1=K1, m0=m0)


CONSTANTS = compute_constants()


@dataclass
class Bridge:
    e0: Point
    e1: Point

    @property
    def length(self) -> float:
        return Segment(self.e0, self.e1).length


@dataclass
class HullNode:
    sigma: str
    points: np.ndarray  # indices into E.points
    coords: np.ndarray = field(repr=False)
    hull: Hull
    diam: float
    diam_segment: Segment
    beta_hat: float
    split_case: str = LEAF
    z_param: Optional[float] = None
    children: Optional[Tuple[int, int]] = None
    bridge: Optional[Bridge] = None
    label: str = UNLABELED
    good_cube: Optional[DyadicCube] = None
    chord: Optional[Segment] = None
    parent: Optional[int] = None
    cubes: List[DyadicCube] = field(default_factory=list)

    @property
    def depth(self) -> int:
        return len(self.sigma)

    @property
    def is_leaf(self) -> bool:
        return self.children is None

    def to_dict(self) -> dict:
        return {
            "sigma": self.sigma,
            "vertices": [list(v) for v in self.hull.vertices],
            "rank": self.hull.rank,
            "diam": self.diam,
            "beta_hat": self.beta_hat,
            "case": self.split_case,
            "z_param": self.z_param,
            "label": self.label,
            "bridge": None if self.bridge is None else [list(self.bridge.e0), list(self.bridge.e1)],
            "chord": None if self.chord is None else [list(self.chord.p), list(self.chord.q)],
            "good_cube": None if self.good_cube is None else [self.good_cube.n, self.good_cube.k, self.good_cube.j],
            "points": len(self.points),
        }


def _node_from_indices(E, idx: np.ndarray, sigma: str, parent: Optional[int]) -> HullNode:
    pts = E.points[idx]
    h = convex_hull(pts)
    a, b, d = diameter_pair(h)
    return HullNode(sigma, idx, pts, h, d, Segment(a, b), hull_beta_hat(h), parent=parent)


def _child(node: HullNode, mask: np.ndarray, bit: str) -> HullNode:
    pts = node.coords[mask]
    h = convex_hull(pts)
    a, b, d = diameter_pair(h)
    return HullNode(node.sigma + bit, node.points[mask], pts, h, d, Segment(a, b), hull_beta_hat(h))


def make_root(E) -> HullNode:
    E = as_point_set(E)
    return _node_from_indices(E, np.arange(len(E)), "", None)


def split_node(node: HullNode) -> Tuple[HullNode, HullNode, Bridge, str]:
    """Split a node along its diameter segment.

    In case P1 the split point is the projected point closest to the
    middle of the segment (ties to the smaller parameter); points projecting
    exactly onto it go to both children.
    """
    if node.diam <= 0.0 or len(node.points) < 2:
        raise ValueError("leaf node")
    idx = node.points
    pts = node.coords
    t = project_params(pts, node.diam_segment)
    mid = (t > 1.0 / 3.0) & (t < 2.0 / 3.0)
    case = P2
    if mid.any():
        cand = np.nonzero(mid)[0]
        # closest to 1/2, ties to smaller t, then lower index
        order = sorted(cand.tolist(), key=lambda i: (abs(t[i] - 0.5), t[i], i))
        iz = order[0]
        z = float(t[iz])
        left = t <= z
        right = t >= z
        if left.all() or right.all():
            mid[:] = False
        else:
            case = P1
    if case == P1:
        zpt = tuple(pts[iz].tolist())
        bridge = Bridge(zpt, zpt)
    else:
        z = None
        left = t <= 1.0 / 3.0
        right = t >= 2.0 / 3.0
    c0 = _child(node, left, "0")
    c1 = _child(node, right, "1")
    if case == P2:
        p0 = c0.coords
        p1 = c1.coords
        d2 = ((p0[:, None, :] - p1[None, :, :]) ** 2).sum(axis=2)
        i, j = np.unravel_index(int(np.argmin(d2)), d2.shape)
        bridge = Bridge(tuple(p0[i].tolist()), tuple(p1[j].tolist()))
    node.split_case = case
    node.z_param = z
    node.bridge = bridge
    return c0, c1, bridge, case


def associated_cubes(node: HullNode) -> List[DyadicCube]:
    """Cubes ``Q`` with ``side/2 < |C| <= side`` whose closure meets the hull."""
    if node.diam <= 0.0:
        raise ValueError("single-point hulls have no associated scale")
    n = scale_of_side(node.diam)
    s = 2.0 ** (-n)
    v = node.hull.as_array()
    lo = np.floor(v.min(axis=0) / s).astype(int) - 1
    hi = np.floor(v.max(axis=0) / s).astype(int)
    out = []
    for k in range(lo[0], hi[0] + 1):
        for j in range(lo[1], hi[1] + 1):
            box_lo = (k * s, j * s)
            box_hi = ((k + 1) * s, (j + 1) * s)
            if hull_intersects_box(node.hull, box_lo, box_hi):
                out.append(DyadicCube(n, k, j))
    return out


def point_scale(r: float) -> int:
    """Finest scale of the truncated sum; used for single-point hulls."""
    return int(np.floor(log2(SQRT2 / r)))


def classify(node: HullNode, E, r: float, cache: Optional[BetaCache] = None) -> str:
    """Label a node good or bad and, when good, fix its cube and chord."""
    E = as_point_set(E)
    cache = cache or BetaCache(E)
    if node.diam <= 0.0:
        p = node.hull.vertices[0]
        n = point_scale(r)
        s = 2.0 ** (-n)
        node.good_cube = DyadicCube(n, int(np.floor(p[0] / s)), int(np.floor(p[1] / s)))
        node.cubes = [node.good_cube]
        node.label = GOOD
        node.chord = None
        return GOOD
    node.cubes = associated_cubes(node)
    for Q in node.cubes:
        res = cache.get(Q, "3Q")
        if res.r_value < 2.0 * r:
            node.label = GOOD
            node.good_cube = Q
            node.chord = clip_line_to_hull(res.fit.anchor, res.fit.direction, node.hull)
            return GOOD
    node.label = BAD
    return BAD


@dataclass
class HullTree:
    E: object
    r: float
    nodes: List[HullNode]
    constants: Constants
    cache: BetaCache = field(repr=False)

    @property
    def root(self) -> HullNode:
        return self.nodes[0]

    @property
    def N(self) -> int:
        return max(n.depth for n in self.nodes)

    def children(self, node: HullNode) -> List[HullNode]:
        return [] if node.children is None else [self.nodes[i] for i in node.children]

    def leaves(self) -> List[HullNode]:
        return [n for n in self.nodes if n.is_leaf]

    def splits(self) -> List[HullNode]:
        return [n for n in self.nodes if not n.is_leaf]

    def generation(self, k: int) -> List[HullNode]:
        return [n for n in self.nodes if n.depth == k]

    def by_sigma(self) -> Dict[str, HullNode]:
        return {n.sigma: n for n in self.nodes}

    def to_dict(self) -> dict:
        return {
            "r": self.r,
            "M": self.constants.M,
            "K": self.constants.K,
            "N": self.N,
            "nodes": [n.to_dict() for n in self.nodes],
        }


def build_tree(E, r: float, cache: Optional[BetaCache] = None) -> HullTree:
    """Breadth-first construction: bad nodes split, good ones stop."""
    if r <= 0:
        raise ValueError("construction does not terminate at r = 0")
    E = as_point_set(E)
    cache = cache or BetaCache(E)
    root = make_root(E)
    nodes = [root]
    queue = deque([0])
    while queue:
        i = queue.popleft()
        node = nodes[i]
        if classify(node, E, r, cache) == GOOD:
            continue
        c0, c1, _, _ = split_node(node)
        c0.parent = c1.parent = i
        nodes.extend([c0, c1])
        node.children = (len(nodes) - 2, len(nodes) - 1)
        queue.extend(node.children)
    return HullTree(E, r, nodes, CONSTANTS, cache)
