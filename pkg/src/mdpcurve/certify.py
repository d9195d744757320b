"""
Verification of a constructed curve and evaluation of every inequality the
construction is supposed to satisfy.

``run_pipeline`` builds everything for one ``(E, r)``; ``evaluate_bounds``
returns only its ``BoundsReport``.  Each named check records whether it
passed and the largest signed residual (left side minus right side, so
``<= tol`` passes).
"""

from collections import Counter
from dataclasses import dataclass, field
from math import inf, sqrt
from typing import Dict, List, Optional

import numpy as np
from scipy.sparse import coo_matrix
from scipy.sparse.csgraph import connected_components

from .curve_builder import AssemblyTrace, Curve, assemble, good_hull_piece, termination_bound
from .geom import (
    EPS,
    SQRT3_2,
    Point,
    Segment,
    as_array,
    convex_hull,
    dist_points_segments,
    hull_area,
    point_in_hull,
    polygon_distance,
    project_params,
)
from .hull_tree import BAD, GOOD, P2, HullTree, build_tree
from .multiscale import BetaCache, DyadicCube, SumReport, as_point_set, truncated_square_sum

REQUIRED_CHECKS = (
    "coverage",
    "connectivity",
    "K_split",
    "seven_bound",
    "area_sandwich",
    "multiplicity",
    "telescoping",
    "lemma_288M",
)


@dataclass
class CheckResult:
    passed: bool
    residual: float
    detail: str = ""

    def to_dict(self) -> dict:
        return {"pass": self.passed, "residual": self.residual, "detail": self.detail}


@dataclass
class CoverageResult:
    ok: bool
    worst_point: Optional[Point]
    worst_residual: float


@dataclass
class BoundsReport:
    r: float
    diameter: float
    lower: float
    truncated_sum_Q: float
    truncated_sum_3Q: float
    curve_length: float
    N: int
    checks: Dict[str, CheckResult]
    extras: Dict[str, object] = field(default_factory=dict)

    @property
    def all_passed(self) -> bool:
        return all(c.passed for c in self.checks.values())

    def failed(self) -> List[str]:
        return [k for k, c in self.checks.items() if not c.passed]

    def to_dict(self) -> dict:
        return {
            "schema": 1,
            "r": self.r,
            "diameter": self.diameter,
            "lower": self.lower,
            "truncated_sum_Q": self.truncated_sum_Q,
            "truncated_sum_3Q": self.truncated_sum_3Q,
            "curve_length": self.curve_length,
            "N": self.N,
            "checks": {k: c.to_dict() for k, c in self.checks.items()},
            "extras": self.extras,
        }


def _curve_scale(curve: Curve) -> float:
    pts = [p for s in curve.segments for p in (s.p, s.q)] + list(curve.isolated_points)
    if not pts:
        return 1.0
    arr = as_array(pts)
    ext = float(np.max(arr.max(axis=0) - arr.min(axis=0)))
    return ext if ext > 0 else 1.0


def _endpoints(curve: Curve):
    P = [s.p for s in curve.segments] + list(curve.isolated_points)
    Q = [s.q for s in curve.segments] + list(curve.isolated_points)
    return as_array(P), as_array(Q)


def coverage_check(E, curve: Curve, r: float, tol: Optional[float] = None) -> CoverageResult:
    """Largest distance from a point of ``E`` to the curve, minus ``r``."""
    E = as_point_set(E)
    if tol is None:
        tol = EPS * max(E.diameter, 1.0)
    if curve.is_empty():
        return CoverageResult(False, tuple(E.points[0].tolist()), inf)
    P, Q = _endpoints(curve)
    worst = np.empty(len(E))
    for lo in range(0, len(E), 256):
        worst[lo:lo + 256] = dist_points_segments(E.points[lo:lo + 256], P, Q).min(axis=1)
    i = int(np.argmax(worst))
    res = float(worst[i]) - r
    return CoverageResult(res <= tol, tuple(E.points[i].tolist()), res)


def _cross2(a, b):
    return a[..., 0] * b[..., 1] - a[..., 1] * b[..., 0]


def _pairwise_segment_distance(P1, Q1, P2, Q2) -> np.ndarray:
    """Distance matrix between two families of (possibly degenerate) segments."""
    d = np.minimum(
        np.minimum(dist_points_segments(P1, P2, Q2), dist_points_segments(Q1, P2, Q2)),
        np.minimum(dist_points_segments(P2, P1, Q1).T, dist_points_segments(Q2, P1, Q1).T),
    )
    a, b = P1[:, None, :], Q1[:, None, :]
    c, e = P2[None, :, :], Q2[None, :, :]
    d1 = _cross2(e - c, a - c)
    d2 = _cross2(e - c, b - c)
    d3 = _cross2(b - a, c - a)
    d4 = _cross2(b - a, e - a)
    crossing = (d1 * d2 < 0) & (d3 * d4 < 0)
    return np.where(crossing, 0.0, d)


def connectivity_check(curve: Curve, tol: Optional[float] = None) -> bool:
    return _components(curve, tol) == 1


def _components(curve: Curve, tol: Optional[float] = None) -> int:
    if tol is None:
        tol = EPS * _curve_scale(curve)
    P, Q = _endpoints(curve)
    m = len(P)
    if m == 0:
        return 0
    rows, cols = [], []
    for lo in range(0, m, 256):
        D = _pairwise_segment_distance(P[lo:lo + 256], Q[lo:lo + 256], P, Q)
        i, j = np.nonzero(D <= tol)
        rows.append(i + lo)
        cols.append(j)
    rows = np.concatenate(rows)
    cols = np.concatenate(cols)
    g = coo_matrix((np.ones(len(rows)), (rows, cols)), shape=(m, m))
    n, _ = connected_components(g, directed=False)
    return int(n)


def curve_length(curve: Curve, tol: Optional[float] = None) -> float:
    """One-dimensional measure of the union of the curve's segments.

    Segments on a common supporting line are merged as intervals first;
    crossings between different lines cost nothing.
    """
    segs = curve.segments
    if not segs:
        return 0.0
    if tol is None:
        tol = EPS * _curve_scale(curve)
    P = as_array([s.p for s in segs])
    Q = as_array([s.q for s in segs])
    D = Q - P
    L = np.hypot(D[:, 0], D[:, 1])
    U = D / L[:, None]
    Nrm = np.stack([-U[:, 1], U[:, 0]], axis=1)
    # endpoint offsets of segment j from the line of segment i
    offP = np.abs(((P[None, :, :] - P[:, None, :]) * Nrm[:, None, :]).sum(axis=2))
    offQ = np.abs(((Q[None, :, :] - P[:, None, :]) * Nrm[:, None, :]).sum(axis=2))
    same = (offP <= tol) & (offQ <= tol)
    same = same & same.T
    n, lab = connected_components(coo_matrix(same), directed=False)
    total = 0.0
    for g in range(n):
        idx = np.nonzero(lab == g)[0]
        ref = idx[np.argmax(L[idx])]
        u, p0 = U[ref], P[ref]
        a = (P[idx] - p0) @ u
        b = (Q[idx] - p0) @ u
        iv = sorted(zip(np.minimum(a, b).tolist(), np.maximum(a, b).tolist()))
        cur_lo, cur_hi = iv[0]
        for lo, hi in iv[1:]:
            if lo > cur_hi:
                total += cur_hi - cur_lo
                cur_lo, cur_hi = lo, hi
            else:
                cur_hi = max(cur_hi, hi)
        total += cur_hi - cur_lo
    return float(total)


def two_point_oracle(d: float, r: float) -> float:
    """Exact minimal length for two points at distance ``d``."""
    return d - 2.0 * r if d > 2.0 * r else 0.0


def _sample_curve(curve: Curve, step: float) -> np.ndarray:
    out = [np.asarray(p, dtype=float)[None, :] for p in curve.isolated_points]
    for s in curve.segments:
        k = max(1, int(np.ceil(s.length / step)))
        t = np.linspace(0.0, 1.0, k + 1)[:, None]
        out.append(np.asarray(s.p) + t * (np.asarray(s.q) - np.asarray(s.p)))
    return np.concatenate(out, axis=0)


def _directed_hausdorff(samples: np.ndarray, curve: Curve) -> float:
    P, Q = _endpoints(curve)
    best = 0.0
    for lo in range(0, len(samples), 512):
        best = max(best, float(dist_points_segments(samples[lo:lo + 512], P, Q).min(axis=1).max()))
    return best


def hausdorff_distance(c1: Curve, c2: Curve, step: Optional[float] = None) -> float:
    """Sampled symmetric Hausdorff distance; accurate to about ``step``."""
    if c1.is_empty() or c2.is_empty():
        raise ValueError("empty curve")
    if step is None:
        step = 1e-3 * max(_curve_scale(c1), _curve_scale(c2))
    return max(_directed_hausdorff(_sample_curve(c1, step), c2), _directed_hausdorff(_sample_curve(c2, step), c1))


def brute_force_r(points) -> float:
    """Half the narrowest strip, trying the line through every pair of hull vertices."""
    pts = as_array(points)
    if len(pts) <= 2:
        return 0.0
    v = convex_hull(pts).as_array()
    if len(v) < 2:
        return 0.0
    i, j = np.triu_indices(len(v), k=1)
    d = v[j] - v[i]
    n = np.stack([-d[:, 1], d[:, 0]], axis=1) / np.hypot(d[:, 0], d[:, 1])[:, None]
    s = pts @ n.T
    return float((s.max(axis=0) - s.min(axis=0)).min()) / 2.0


@dataclass
class Pipeline:
    E: object
    r: float
    variant: str
    tree: HullTree
    curve: Curve
    trace: AssemblyTrace
    sum_Q: SumReport
    sum_3Q: SumReport
    report: BoundsReport


def _check(residual: float, tol: float, detail: str = "") -> CheckResult:
    return CheckResult(bool(residual <= tol), float(residual), detail)


def run_pipeline(E, r: float, variant: str = "Q", eps_top: Optional[float] = None,
                 threads: int = 1, oracle: bool = True, snapshots: bool = False) -> Pipeline:
    if r <= 0:
        raise ValueError("r must be positive")
    E = as_point_set(E)
    cache = BetaCache(E, threads=threads)
    sum_Q = truncated_square_sum(E, r, "Q", eps_top, cache)
    sum_3Q = truncated_square_sum(E, r, "3Q", eps_top, cache)
    tree = build_tree(E, r, cache)
    curve, trace = assemble(tree, snapshots)
    diam = E.diameter
    scale = max(diam, 1e-300)
    tol = EPS * max(diam, 1.0)
    length = curve_length(curve, EPS * scale)
    sums = {"Q": sum_Q, "3Q": sum_3Q}
    lower = diam - 2.0 * r + sums[variant].total
    C = tree.constants
    checks: Dict[str, CheckResult] = {}

    cov = coverage_check(E, curve, r, tol)
    checks["coverage"] = CheckResult(cov.ok, cov.worst_residual, f"worst point {list(cov.worst_point)}")
    ncomp = _components(curve, EPS * scale)
    checks["connectivity"] = CheckResult(ncomp == 1, float(ncomp - 1), f"{ncomp} component(s)")

    nodes = tree.nodes
    splits = tree.splits()
    good = [n for n in nodes if n.label == GOOD]
    bad = [n for n in nodes if n.label == BAD]

    res = -inf
    for n in splits:
        c0, c1 = tree.children(n)
        lhs = c0.diam + 0.5 * n.bridge.length + c1.diam
        res = max(res, lhs - (n.diam + C.K * n.beta_hat ** 2 * n.diam))
    checks["K_split"] = _check(res if splits else 0.0, tol, f"{len(splits)} splits, K={C.K:g}")

    res = -inf
    for n in good:
        piece = Curve()
        piece.extend(good_hull_piece(n), "piece", n.sigma)
        res = max(res, curve_length(piece, EPS * scale) - 7.0 * n.diam)
    checks["seven_bound"] = _check(res, tol, f"{len(good)} good hulls")

    res = -inf
    count = 0
    for n in nodes:
        if n.hull.rank == 2:
            count += 1
            a = hull_area(n.hull)
            lo = 0.5 * n.beta_hat * n.diam ** 2
            hi = 2.0 * n.beta_hat * n.diam ** 2
            res = max(res, lo - a, a - hi)
    checks["area_sandwich"] = _check(res if count else 0.0, tol * scale, f"{count} rank-2 hulls")

    mult = Counter()
    for n in nodes:
        if n.diam <= 0.0:
            continue
        for Q in n.cubes:
            inside = Q.contains(n.coords, "Q")
            for i in n.points[inside].tolist():
                mult[(Q, i)] += 1
    worst_mult = max(mult.values()) if mult else 0
    checks["multiplicity"] = _check(float(worst_mult - C.M), 0.0, f"max {worst_mult} hulls per cube and point, M={C.M}")

    halving, observed = _halving(tree, C.M, tol)
    checks["diameter_halving"] = halving

    E_diam = tree.root.diam
    good_sum = trace.good_sum(tree)
    bridge_sum = trace.bridge_sum()
    bad_sum = trace.bad_beta_sum(tree)
    checks["telescoping"] = _check(good_sum + 0.5 * bridge_sum - (E_diam + bad_sum), tol)
    checks["telescoping_K"] = _check(good_sum + 0.5 * bridge_sum - (E_diam + C.K * bad_sum), tol)
    checks["length_chain"] = _check(length - 7.0 * (good_sum + 0.5 * bridge_sum), tol)
    checks["upper_chain"] = _check(length - 7.0 * (E_diam + bad_sum), tol)

    lemma, corollary, n_bad_cubes = _cube_lemmas(tree, cache, r)
    big = (288.0 * C.M) ** 2
    checks["lemma_288M"] = _check(lemma, tol, f"{n_bad_cubes} bad cubes, (288M)^2={big:.6g}")
    checks["corollary_288M"] = _check(corollary, tol, f"{n_bad_cubes} bad cubes")

    tb = termination_bound(E, r, C.M)
    checks["termination"] = _check(float(tree.N - tb), 0.0, f"N={tree.N}, bound={tb}")

    checks["c1_coverage"] = _c1(tree, len(E))
    checks["child_containment"] = _containment(tree, tol)
    checks["p2_separation"] = _separation(tree, tol)
    checks["projection_containment"] = _projection(tree)
    res = max((n.beta_hat - SQRT3_2 for n in nodes), default=0.0)
    low = min((n.beta_hat for n in nodes), default=0.0)
    checks["beta_hat_range"] = _check(max(res, -low - SQRT3_2), EPS)
    checks["chord_strip"] = _chord_strip(tree, r, tol)
    if oracle:
        checks["beta_oracle"] = _beta_oracle(cache, EPS * scale)

    checks["diameter_gap"] = _check(diam - 2.0 * r - length, tol)
    checks["lambda_lower"] = _check(lower - (length + 2.0 * r), tol)
    if len(E) == 2:
        checks["two_point_oracle"] = _check(abs(lower - two_point_oracle(diam, r)) if diam > 2 * r else 0.0, 1e-12)

    extras = {
        "variant": variant,
        "points": len(E),
        "upward_truncation_bound_Q": sum_Q.upward_truncation_bound,
        "upward_truncation_bound_3Q": sum_3Q.upward_truncation_bound,
        "termination_bound": tb,
        "nodes": len(nodes),
        "good_hulls": len(good),
        "bad_hulls": len(bad),
        "segments": len(curve.segments),
        "isolated_points": len(curve.isolated_points),
        "good_diameter_sum": good_sum,
        "bridge_sum": bridge_sum,
        "bad_beta_hat_sum": bad_sum,
        "observed_halving_depth": observed,
        "minimizer_is_point": bool(diam < 2.0 * r),
        "M": C.M,
        "K": C.K,
    }
    report = BoundsReport(r, diam, lower, sum_Q.total, sum_3Q.total, length, tree.N, checks, extras)
    return Pipeline(E, r, variant, tree, curve, trace, sum_Q, sum_3Q, report)


def evaluate_bounds(E, r: float, variant: str = "Q", eps_top: Optional[float] = None,
                    threads: int = 1, oracle: bool = True) -> BoundsReport:
    return run_pipeline(E, r, variant, eps_top, threads, oracle).report


def _descendants_at(tree: HullTree, node, depth: int):
    level = [node]
    for _ in range(depth):
        level = [c for n in level for c in tree.children(n)]
        if not level:
            break
    return level


def _halving(tree: HullTree, M: int, tol: float):
    """Check the halving lemma at depth ``M`` and measure the depth actually needed."""
    res = -inf
    pairs = 0
    depth = tree.N
    for n in tree.nodes:
        for d in _descendants_at(tree, n, M) if n.depth + M <= depth else []:
            pairs += 1
            res = max(res, d.diam - 0.5 * n.diam)
    # smallest m such that every descendant m generations down has at most half the diameter
    observed = 0
    for n in tree.nodes:
        level, m = [n], 0
        while level and any(c.diam > 0.5 * n.diam + tol for c in level):
            level = [c for x in level for c in tree.children(x)]
            m += 1
        if level:
            observed = max(observed, m)
    check = _check(res if pairs else 0.0, tol, f"{pairs} node pairs at depth gap M={M}")
    return check, observed


def _cube_lemmas(tree: HullTree, cache: BetaCache, r: float):
    members: Dict[DyadicCube, List] = {}
    for n in tree.nodes:
        if n.diam <= 0.0:
            continue
        for Q in n.cubes:
            members.setdefault(Q, []).append(n)
    big = (288.0 * tree.constants.M) ** 2
    lemma = corollary = -inf
    nbad = 0
    for Q in sorted(members):
        res = cache.get(Q, "3Q")
        if res.r_value < 2.0 * r:
            continue
        nbad += 1
        lhs = sum(n.beta_hat ** 2 * n.diam for n in members[Q])
        lemma = max(lemma, lhs - big * res.beta ** 2 * Q.diam)
        corollary = max(corollary, lhs - big * (res.beta - r / Q.region_diam("3Q")) ** 2 * Q.diam)
    if nbad == 0:
        lemma = corollary = 0.0
    return lemma, corollary, nbad


def _c1(tree: HullTree, npts: int) -> CheckResult:
    missing = 0
    for k in range(tree.N + 1):
        covered = set()
        for n in tree.nodes:
            if n.depth == k or (n.depth < k and n.is_leaf):
                covered.update(n.points.tolist())
        missing = max(missing, npts - len(covered))
    return CheckResult(missing == 0, float(missing), f"at most {missing} point(s) missing from a generation")


def _containment(tree: HullTree, tol: float) -> CheckResult:
    bad = 0
    for n in tree.splits():
        for c in tree.children(n):
            bad += sum(not point_in_hull(v, n.hull, tol) for v in c.hull.vertices)
    return CheckResult(bad == 0, float(bad), "child vertices outside parent hull")


def _separation(tree: HullTree, tol: float) -> CheckResult:
    res = -inf
    count = 0
    for n in tree.splits():
        if n.split_case != P2:
            continue
        count += 1
        c0, c1 = tree.children(n)
        res = max(res, n.diam_segment.length / 3.0 - polygon_distance(c0.hull, c1.hull))
    return _check(res if count else 0.0, tol, f"{count} P2 splits")


def _projection(tree: HullTree) -> CheckResult:
    res = -inf
    for n in tree.nodes:
        if n.diam <= 0.0:
            continue
        t = project_params(n.hull.as_array(), n.diam_segment)
        res = max(res, float(-t.min()), float(t.max() - 1.0))
    return _check(res if res > -inf else 0.0, 1e-9)


def _chord_strip(tree: HullTree, r: float, tol: float) -> CheckResult:
    res = -inf
    for n in tree.nodes:
        if n.label != GOOD or n.diam <= 0.0:
            continue
        fit = tree.cache.get(n.good_cube, "3Q").fit
        res = max(res, float(fit.distances(n.coords).max()) - 2.0 * r)
    return _check(res if res > -inf else 0.0, tol)


def _beta_oracle(cache: BetaCache, tol: float) -> CheckResult:
    res = 0.0
    seen = {}
    for (Q, region), br in list(cache._results.items()):
        if br.count <= 2:
            continue
        key = tuple(cache.indices(Q, region).tolist())
        if key not in seen:
            seen[key] = brute_force_r(cache.E.points[list(key)])
        res = max(res, abs(br.r_value - seen[key]))
    return _check(res, tol, f"{len(seen)} distinct point subsets re-checked")
