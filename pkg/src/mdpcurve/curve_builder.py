"""
Assembly of the candidate curve from a labeled hull tree.

Good leaves contribute their boundary polygon and chord, every split
contributes its bridge.  Zero-length pieces are kept as isolated points
only when they come from rank-0 leaves; zero-length bridges (case P1) add
nothing.
"""

from dataclasses import dataclass, field
from math import ceil, log2
from typing import List, Optional, Tuple

from .geom import Point, Segment
from .hull_tree import BAD, GOOD, UNLABELED, HullNode, HullTree
from .multiscale import as_point_set


@dataclass
class Curve:
    segments: List[Segment] = field(default_factory=list)
    isolated_points: List[Point] = field(default_factory=list)
    provenance: List[Tuple[str, str]] = field(default_factory=list)

    def add_segment(self, s: Segment, kind: str, sigma: str):
        if s.is_degenerate():
            self.isolated_points.append(s.p)
        else:
            self.segments.append(s)
            self.provenance.append((kind, sigma))

    def extend(self, pieces: List[Segment], kind: str, sigma: str):
        for s in pieces:
            self.add_segment(s, kind, sigma)

    def is_empty(self) -> bool:
        return not self.segments and not self.isolated_points

    def to_dict(self) -> dict:
        return {
            "segments": [
                {"p": list(s.p), "q": list(s.q), "kind": k, "sigma": sig}
                for s, (k, sig) in zip(self.segments, self.provenance)
            ],
            "isolated_points": [list(p) for p in self.isolated_points],
        }

    @classmethod
    def from_dict(cls, d: dict) -> "Curve":
        c = cls()
        for rec in d.get("segments", []):
            c.add_segment(Segment(tuple(rec["p"]), tuple(rec["q"])), rec.get("kind", "segment"), rec.get("sigma", ""))
        for p in d.get("isolated_points", []):
            c.isolated_points.append(tuple(p))
        return c


@dataclass
class Generation:
    good: List[str]
    bad: List[str]
    bridges: List[Tuple[str, float]]


@dataclass
class AssemblyTrace:
    N: int
    generations: List[Generation]
    snapshots: Optional[List[Curve]] = None

    def good_sum(self, tree: HullTree) -> float:
        sig = tree.by_sigma()
        return sum(sig[s].diam for g in self.generations for s in g.good)

    def bridge_sum(self) -> float:
        return sum(L for g in self.generations for _, L in g.bridges)

    def bad_beta_sum(self, tree: HullTree) -> float:
        sig = tree.by_sigma()
        return sum(sig[s].beta_hat ** 2 * sig[s].diam for g in self.generations for s in g.bad)


def good_hull_piece(node: HullNode) -> List[Segment]:
    """Boundary of a good hull plus its chord.

    A rank-0 hull gives one degenerate segment, which the curve stores as an
    isolated point.
    """
    if node.label != GOOD:
        raise ValueError(f"node {node.sigma!r} is not good")
    h = node.hull
    if h.rank == 0:
        p = h.vertices[0]
        return [Segment(p, p)]
    pieces = h.edges()
    if node.chord is not None:
        pieces.append(node.chord)
    return pieces


def _bad_outline(node: HullNode) -> List[Segment]:
    # rendering convention for intermediate snapshots: solid hulls drawn by outline
    h = node.hull
    if h.rank == 0:
        return [Segment(h.vertices[0], h.vertices[0])]
    return h.edges()


def assemble(tree: HullTree, trace_snapshots: bool = False) -> Tuple[Curve, AssemblyTrace]:
    if any(n.label == UNLABELED for n in tree.nodes):
        raise ValueError("classification incomplete")
    N = tree.N
    gens = []
    for k in range(N + 1):
        nodes = tree.generation(k)
        good = [n.sigma for n in nodes if n.label == GOOD]
        bad = [n.sigma for n in nodes if n.label == BAD]
        bridges = [(n.sigma, n.bridge.length) for n in nodes if n.label == BAD]
        gens.append(Generation(good, bad, bridges))
    curve = Curve()
    for n in tree.nodes:
        if n.label == GOOD:
            pieces = good_hull_piece(n)
            if n.hull.rank == 0:
                curve.isolated_points.append(n.hull.vertices[0])
                continue
            curve.extend(pieces[: len(pieces) - (n.chord is not None)], "boundary", n.sigma)
            if n.chord is not None:
                curve.add_segment(n.chord, "chord", n.sigma)
        elif n.bridge is not None and n.bridge.length > 0.0:
            curve.add_segment(Segment(n.bridge.e0, n.bridge.e1), "bridge", n.sigma)
    snaps = None
    if trace_snapshots:
        snaps = [_snapshot(tree, j) for j in range(N + 1)]
    return curve, AssemblyTrace(N, gens, snaps)


def _snapshot(tree: HullTree, j: int) -> Curve:
    c = Curve()
    for n in tree.nodes:
        if n.depth > j:
            continue
        if n.label == GOOD:
            c.extend(good_hull_piece(n), "boundary", n.sigma)
        elif n.depth == j:
            c.extend(_bad_outline(n), "hull", n.sigma)
        elif n.bridge is not None and n.bridge.length > 0.0:
            c.add_segment(Segment(n.bridge.e0, n.bridge.e1), "bridge", n.sigma)
    return c


def termination_bound(E, r: float, M: int) -> int:
    """Upper bound on the number of generations before every hull is good."""
    if r <= 0:
        raise ValueError("r must be positive")
    d = as_point_set(E).diameter
    steps = 0 if d == 0.0 else max(0, int(ceil(log2(3.0 * d / r))))
    return M * (steps + 1)
