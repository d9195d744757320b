"""
Planar primitives used by the construction: convex hulls, diameter pairs,
minimum-width strips, projections, distances and areas.

Points are plain ``(x, y)`` float tuples at the public surface; heavier
routines accept anything ``numpy.asarray`` turns into an ``(n, 2)`` array.
Tolerances are ``EPS`` times the extent of the input, so results do not
depend on the overall scale of the data.
"""

from dataclasses import dataclass
from math import hypot, sqrt
from typing import List, Optional, Tuple

import numpy as np

EPS = 1e-9
SQRT3_2 = sqrt(3.0) / 2.0

Point = Tuple[float, float]


class GeometryError(ValueError):
    pass


@dataclass(frozen=True)
class Segment:
    p: Point
    q: Point

    @property
    def length(self) -> float:
        return hypot(self.q[0] - self.p[0], self.q[1] - self.p[1])

    def is_degenerate(self) -> bool:
        return self.p == self.q


@dataclass(frozen=True)
class Hull:
    """Convex hull stored as counterclockwise extreme vertices.

    ``rank`` is 0 for a point, 1 for a segment (two vertices) and 2 for a
    polygon with nonzero area.
    """

    vertices: Tuple[Point, ...]
    rank: int

    def as_array(self) -> np.ndarray:
        return np.asarray(self.vertices, dtype=float).reshape(-1, 2)

    def edges(self) -> List[Segment]:
        v = self.vertices
        if self.rank == 0:
            return []
        if self.rank == 1:
            return [Segment(v[0], v[1])]
        return [Segment(v[i], v[(i + 1) % len(v)]) for i in range(len(v))]

    @property
    def diameter(self) -> float:
        return diameter_pair(self)[2]

    @property
    def scale(self) -> float:
        return _extent(self.as_array())


@dataclass(frozen=True)
class StripFit:
    """Minimal strip around a point set.

    ``direction`` is the unit direction of the center line, ``anchor`` a
    point on it, and ``width`` the full width of the strip.
    """

    direction: Point
    anchor: Point
    width: float

    @property
    def half_width(self) -> float:
        return self.width / 2.0

    @property
    def normal(self) -> Point:
        return (-self.direction[1], self.direction[0])

    def distances(self, points) -> np.ndarray:
        pts = as_array(points)
        return np.abs((pts - np.array(self.anchor)) @ np.array(self.normal))


def as_array(points) -> np.ndarray:
    arr = np.asarray(points, dtype=float)
    if arr.size == 0:
        return arr.reshape(0, 2)
    return arr.reshape(-1, 2)


def _extent(arr: np.ndarray) -> float:
    if len(arr) == 0:
        return 0.0
    return float(np.max(arr.max(axis=0) - arr.min(axis=0)))


def _cross(o, a, b) -> float:
    return (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0])


def convex_hull(points) -> Hull:
    """Monotone-chain hull followed by a collinearity clean-up.

    The chain uses the plain sign of the cross product; afterwards any
    vertex lying within ``EPS * extent`` of the chord joining its two
    neighbours is removed, so nearly collinear inputs collapse to rank 1
    instead of producing sliver polygons.
    """
    arr = as_array(points)
    if len(arr) == 0:
        raise GeometryError("empty point set")
    if not np.all(np.isfinite(arr)):
        raise GeometryError("non-finite coordinates")
    pts = sorted(set(map(tuple, arr.tolist())))
    if len(pts) == 1:
        return Hull((pts[0],), 0)
    tol = EPS * _extent(arr)

    def chain(seq):
        out = []
        for p in seq:
            while len(out) >= 2 and _cross(out[-2], out[-1], p) <= 0.0:
                out.pop()
            out.append(p)
        return out

    lower = chain(pts)
    upper = chain(reversed(pts))
    exact = lower[:-1] + upper[:-1]
    verts = list(exact)
    changed = True
    while changed and len(verts) > 2:
        changed = False
        m = len(verts)
        for i in range(m):
            a, b, c = verts[i - 1], verts[i], verts[(i + 1) % m]
            if dist_point_segment(b, Segment(a, c)) <= tol:
                del verts[i]
                changed = True
                break
    if len(verts) <= 2:
        a, b, _ = diameter_pair(Hull(tuple(exact), 2 if len(exact) > 2 else 1))
        return Hull((a, b), 1)
    return Hull(tuple(verts), 2)


def diameter_pair(h: Hull) -> Tuple[Point, Point, float]:
    """Farthest pair of hull vertices.

    Ties (within a relative 1e-12) go to the lexicographically smallest
    ``(a, b)`` with ``a < b``.
    """
    v = h.vertices
    if len(v) == 1:
        return v[0], v[0], 0.0
    arr = h.as_array()
    d = np.sqrt(((arr[:, None, :] - arr[None, :, :]) ** 2).sum(axis=2))
    dmax = float(d.max())
    best = None
    ii, jj = np.nonzero(d >= dmax * (1.0 - 1e-12))
    for i, j in zip(ii.tolist(), jj.tolist()):
        a, b = v[i], v[j]
        if a < b and (best is None or (a, b) < best):
            best = (a, b)
    a, b = best
    return a, b, hypot(b[0] - a[0], b[1] - a[1])


def diameter_pairs(h: Hull, rel_tol: float = EPS) -> List[Tuple[Point, Point]]:
    """All vertex pairs whose distance is within ``rel_tol`` of the diameter."""
    v = h.vertices
    if len(v) == 1:
        return [(v[0], v[0])]
    arr = h.as_array()
    d = np.sqrt(((arr[:, None, :] - arr[None, :, :]) ** 2).sum(axis=2))
    dmax = float(d.max())
    ii, jj = np.nonzero(d >= dmax * (1.0 - rel_tol))
    return sorted((v[i], v[j]) for i, j in zip(ii.tolist(), jj.tolist()) if v[i] < v[j])


def _strip_along(arr: np.ndarray, u: np.ndarray) -> Tuple[float, float, float]:
    n = np.array([-u[1], u[0]])
    s = arr @ n
    lo, hi = float(s.min()), float(s.max())
    return hi - lo, lo, hi


def min_width_strip(points) -> StripFit:
    """Narrowest strip containing the points.

    The optimal direction of a convex polygon's supporting strip is parallel
    to one of its edges, so only hull edge directions are tried; each is
    evaluated against every input point.
    """
    arr = as_array(points)
    if len(arr) == 0:
        raise GeometryError("empty point set")
    h = convex_hull(arr)
    if h.rank == 0:
        p = h.vertices[0]
        return StripFit((1.0, 0.0), p, 0.0)
    hv = h.as_array()
    if h.rank == 1:
        # collinear within tolerance: the hull segment itself is the fit
        d = hv[1] - hv[0]
        u = d / hypot(d[0], d[1])
        return StripFit((float(u[0]), float(u[1])), h.vertices[0], 0.0)
    dirs = [hv[(i + 1) % len(hv)] - hv[i] for i in range(len(hv))]
    best = None
    for d in dirs:
        u = d / hypot(d[0], d[1])
        w, lo, hi = _strip_along(arr, u)
        if best is None or w < best[0]:
            best = (w, u, lo, hi)
    w, u, lo, hi = best
    n = np.array([-u[1], u[0]])
    c = 0.5 * (lo + hi)
    t0 = float(hv[0] @ u)
    anchor = c * n + t0 * u
    return StripFit((float(u[0]), float(u[1])), (float(anchor[0]), float(anchor[1])), float(w))


def dist_point_segment(x: Point, s: Segment) -> float:
    px, py = s.p
    dx, dy = s.q[0] - px, s.q[1] - py
    L2 = dx * dx + dy * dy
    if L2 == 0.0:
        return hypot(x[0] - px, x[1] - py)
    t = ((x[0] - px) * dx + (x[1] - py) * dy) / L2
    t = min(1.0, max(0.0, t))
    return hypot(x[0] - px - t * dx, x[1] - py - t * dy)


def dist_points_segments(points, seg_p, seg_q) -> np.ndarray:
    """Distance matrix of shape (len(points), len(segments))."""
    X = as_array(points)[:, None, :]
    P = as_array(seg_p)[None, :, :]
    D = as_array(seg_q)[None, :, :] - P
    L2 = (D ** 2).sum(axis=2)
    safe = np.where(L2 > 0.0, L2, 1.0)
    t = np.clip(((X - P) * D).sum(axis=2) / safe, 0.0, 1.0)
    t = np.where(L2 > 0.0, t, 0.0)
    diff = X - P - t[..., None] * D
    return np.sqrt((diff ** 2).sum(axis=2))


def segment_segment_distance(s1: Segment, s2: Segment) -> float:
    if _segments_intersect(s1, s2):
        return 0.0
    return min(
        dist_point_segment(s1.p, s2),
        dist_point_segment(s1.q, s2),
        dist_point_segment(s2.p, s1),
        dist_point_segment(s2.q, s1),
    )


def _segments_intersect(s1: Segment, s2: Segment) -> bool:
    a, b, c, d = s1.p, s1.q, s2.p, s2.q
    d1 = _cross(c, d, a)
    d2 = _cross(c, d, b)
    d3 = _cross(a, b, c)
    d4 = _cross(a, b, d)
    return ((d1 > 0) != (d2 > 0)) and ((d3 > 0) != (d4 > 0)) and d1 != 0 and d2 != 0 and d3 != 0 and d4 != 0


def hull_area(h: Hull) -> float:
    if h.rank < 2:
        return 0.0
    v = h.as_array()
    x, y = v[:, 0], v[:, 1]
    return 0.5 * abs(float(np.dot(x, np.roll(y, -1)) - np.dot(y, np.roll(x, -1))))


def hull_beta_hat_abs(h: Hull) -> float:
    """Sup over diameter segments of the largest vertex distance to it."""
    if h.rank < 2:
        return 0.0
    best = 0.0
    for a, b in diameter_pairs(h):
        s = Segment(a, b)
        best = max(best, max(dist_point_segment(y, s) for y in h.vertices))
    return best


def hull_beta_hat(h: Hull) -> float:
    """Flatness of a hull relative to its diameter chord, divided by ``|C|``."""
    if h.rank < 2:
        return 0.0
    return hull_beta_hat_abs(h) / diameter_pair(h)[2]


def project_onto_segment_line(x: Point, s: Segment) -> float:
    dx, dy = s.q[0] - s.p[0], s.q[1] - s.p[1]
    L2 = dx * dx + dy * dy
    if L2 == 0.0:
        raise GeometryError("projection undefined")
    return ((x[0] - s.p[0]) * dx + (x[1] - s.p[1]) * dy) / L2


def project_params(points, s: Segment) -> np.ndarray:
    """Vectorized ``project_onto_segment_line``."""
    p = np.array(s.p)
    d = np.array(s.q) - p
    L2 = float(d @ d)
    if L2 == 0.0:
        raise GeometryError("projection undefined")
    return ((as_array(points) - p) @ d) / L2


def point_in_hull(x: Point, h: Hull, tol: float = 0.0) -> bool:
    """Closed membership test with an absolute distance tolerance."""
    if h.rank == 0:
        v = h.vertices[0]
        return hypot(x[0] - v[0], x[1] - v[1]) <= tol
    if h.rank == 1:
        return dist_point_segment(x, h.edges()[0]) <= tol
    v = h.vertices
    for i in range(len(v)):
        a, b = v[i], v[(i + 1) % len(v)]
        L = hypot(b[0] - a[0], b[1] - a[1])
        if _cross(a, b, x) < -tol * L:
            return False
    return True


def hull_intersects_box(h: Hull, lo: Point, hi: Point, tol: float = 0.0) -> bool:
    """Separating-axis test between a hull and the closed box ``[lo, hi]``."""
    v = h.as_array()
    if v[:, 0].max() < lo[0] - tol or v[:, 0].min() > hi[0] + tol:
        return False
    if v[:, 1].max() < lo[1] - tol or v[:, 1].min() > hi[1] + tol:
        return False
    if h.rank == 0:
        return True
    corners = np.array([[lo[0], lo[1]], [hi[0], lo[1]], [hi[0], hi[1]], [lo[0], hi[1]]])
    for e in h.edges():
        d = np.array(e.q) - np.array(e.p)
        n = np.array([-d[1], d[0]]) / hypot(d[0], d[1])
        hv = v @ n
        cv = corners @ n
        if hv.max() < cv.min() - tol or cv.max() < hv.min() - tol:
            return False
    return True


def clip_line_to_hull(anchor: Point, direction: Point, h: Hull, tol: float = 0.0) -> Optional[Segment]:
    """Intersection of an infinite line with a hull, or ``None`` if empty.

    The result may be degenerate (a single touching point).
    """
    a = np.array(anchor, dtype=float)
    u = np.array(direction, dtype=float)
    u = u / hypot(u[0], u[1])
    n = np.array([-u[1], u[0]])
    v = h.as_array()
    off = (v - a) @ n
    if off.min() > tol or off.max() < -tol:
        return None
    if h.rank == 0:
        p = h.vertices[0]
        return Segment(p, p)
    if h.rank == 1:
        p, q = v
        if abs(off[0]) <= tol and abs(off[1]) <= tol:
            return Segment(h.vertices[0], h.vertices[1])
        t = off[0] / (off[0] - off[1]) if off[0] != off[1] else 0.0
        t = min(1.0, max(0.0, t))
        x = p + t * (q - p)
        pt = (float(x[0]), float(x[1]))
        return Segment(pt, pt)
    # rank 2: intersect with each inward half-plane, parameterized along u
    lo, hi = -np.inf, np.inf
    m = len(v)
    for i in range(m):
        p, q = v[i], v[(i + 1) % m]
        e = q - p
        L = hypot(e[0], e[1])
        nin = np.array([-e[1], e[0]]) / L
        # inside: (x - p) . nin >= -tol, x = a + s u
        c0 = float((a - p) @ nin)
        c1 = float(u @ nin)
        if abs(c1) < 1e-15:
            if c0 < -tol:
                return None
            continue
        s = (-tol - c0) / c1
        if c1 > 0:
            lo = max(lo, s)
        else:
            hi = min(hi, s)
    if lo > hi:
        if lo - hi > tol:
            return None
        lo = hi = 0.5 * (lo + hi)
    x0 = a + lo * u
    x1 = a + hi * u
    return Segment((float(x0[0]), float(x0[1])), (float(x1[0]), float(x1[1])))


def polygon_distance(h1: Hull, h2: Hull) -> float:
    """Distance between two convex hulls (0 if they overlap)."""
    if any(point_in_hull(p, h2) for p in h1.vertices) or any(point_in_hull(p, h1) for p in h2.vertices):
        return 0.0
    e1 = h1.edges() or [Segment(h1.vertices[0], h1.vertices[0])]
    e2 = h2.edges() or [Segment(h2.vertices[0], h2.vertices[0])]
    return min(segment_segment_distance(a, b) for a in e1 for b in e2)
