"""
Dyadic-cube machinery: flatness numbers of a point set inside cubes and
their triples, the finite-scale square sum, the classical Jones sum, and
the lower bound built from them.

Cubes live on the absolute dyadic grid ``[k 2^-n, (k+1) 2^-n) x [j 2^-n,
(j+1) 2^-n)``; ``|Q|`` always means the diameter ``sqrt(2) * side``.
"""

from collections import defaultdict
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from math import ceil, floor, inf, log2, sqrt
from typing import Dict, List, Optional, Tuple

import numpy as np

from .geom import StripFit, as_array, convex_hull, diameter_pair, min_width_strip

SQRT2 = sqrt(2.0)
REGIONS = ("Q", "3Q")


class PointSet:
    """Finite planar set with exact duplicates removed (lexicographic order)."""

    def __init__(self, points):
        arr = as_array(points)
        if len(arr) == 0:
            raise ValueError("empty point set")
        if not np.all(np.isfinite(arr)):
            raise ValueError("non-finite coordinates")
        self.points = np.unique(arr, axis=0)
        self._diam = None

    def __len__(self):
        return len(self.points)

    def __iter__(self):
        return iter(map(tuple, self.points.tolist()))

    @property
    def diameter(self) -> float:
        if self._diam is None:
            self._diam = diameter_pair(convex_hull(self.points))[2]
        return self._diam

    @property
    def extent(self) -> float:
        return float(np.max(self.points.max(axis=0) - self.points.min(axis=0)))


def as_point_set(E) -> PointSet:
    return E if isinstance(E, PointSet) else PointSet(E)


@dataclass(frozen=True, order=True)
class DyadicCube:
    n: int
    k: int
    j: int

    @property
    def side(self) -> float:
        return 2.0 ** (-self.n)

    @property
    def diam(self) -> float:
        return SQRT2 * self.side

    def bounds(self, region: str = "Q") -> Tuple[float, float, float, float]:
        s = self.side
        if region == "Q":
            return self.k * s, self.j * s, (self.k + 1) * s, (self.j + 1) * s
        return (self.k - 1) * s, (self.j - 1) * s, (self.k + 2) * s, (self.j + 2) * s

    def region_diam(self, region: str) -> float:
        return self.diam if region == "Q" else 3.0 * self.diam

    def contains(self, points, region: str = "Q") -> np.ndarray:
        """Membership mask: half-open for ``Q``, closed for ``3Q``."""
        pts = as_array(points)
        x0, y0, x1, y1 = self.bounds(region)
        x, y = pts[:, 0], pts[:, 1]
        if region == "Q":
            return (x >= x0) & (x < x1) & (y >= y0) & (y < y1)
        return (x >= x0) & (x <= x1) & (y >= y0) & (y <= y1)


@dataclass
class BetaResult:
    cube: DyadicCube
    region: str
    count: int
    r_value: float
    beta: float
    fit: Optional[StripFit]


@dataclass
class SumReport:
    r: float
    variant: str
    total: float
    per_scale: List[Tuple[int, float, int]]
    n_top: int
    n_bottom: int
    upward_truncation_bound: float
    terms: List[Tuple[DyadicCube, BetaResult, float]] = field(default_factory=list, repr=False)

    def to_dict(self) -> dict:
        return {
            "r": self.r,
            "variant": self.variant,
            "total": self.total,
            "per_scale": [list(t) for t in self.per_scale],
            "n_top": self.n_top,
            "n_bottom": self.n_bottom,
            "upward_truncation_bound": self.upward_truncation_bound,
        }


def scale_of_side(side: float) -> int:
    """Exponent ``n`` with ``2^-n / 2 < side <= 2^-n``."""
    m, e = np.frexp(side)
    return -(int(e) - 1) if m == 0.5 else -int(e)


def enumerate_cubes(E, n: int) -> List[DyadicCube]:
    E = as_point_set(E)
    idx = np.floor(np.ldexp(E.points, n)).astype(np.int64)
    keys = sorted(set(map(tuple, idx.tolist())))
    return [DyadicCube(n, k, j) for k, j in keys]


def triple_cubes(E, n: int) -> List[DyadicCube]:
    """Scale-``n`` cubes whose closed triple meets ``E``."""
    E = as_point_set(E)
    s = np.ldexp(E.points, n)
    lo = np.ceil(s - 2.0).astype(np.int64)
    hi = np.floor(s + 1.0).astype(np.int64)
    keys = set()
    for (k0, j0), (k1, j1) in zip(lo.tolist(), hi.tolist()):
        for k in range(k0, k1 + 1):
            for j in range(j0, j1 + 1):
                keys.add((k, j))
    return [DyadicCube(n, k, j) for k, j in sorted(keys)]


def _r_of_points(pts: np.ndarray) -> Tuple[float, Optional[StripFit]]:
    if len(pts) == 0:
        return 0.0, None
    if len(pts) <= 2:
        return 0.0, _line_through(pts)
    fit = min_width_strip(pts)
    return fit.half_width, fit


def _line_through(pts: np.ndarray) -> StripFit:
    p = tuple(pts[0].tolist())
    if len(pts) == 1 or np.array_equal(pts[0], pts[-1]):
        return StripFit((1.0, 0.0), p, 0.0)
    d = pts[-1] - pts[0]
    d = d / np.hypot(d[0], d[1])
    return StripFit((float(d[0]), float(d[1])), p, 0.0)


def beta_of_cube(E, Q: DyadicCube, region: str = "Q") -> BetaResult:
    """Flatness of ``E`` in ``Q`` or its closed triple.

    ``r_value`` is the inf over lines of the sup distance, ``beta`` divides
    it by the diameter of the region.
    """
    if region not in REGIONS:
        raise ValueError(f"unknown region {region!r}")
    E = as_point_set(E)
    pts = E.points[Q.contains(E.points, region)]
    r_val, fit = _r_of_points(pts)
    return BetaResult(Q, region, len(pts), r_val, r_val / Q.region_diam(region), fit)


class BetaCache:
    """Per-scale bucketing of a point set plus memoized ``BetaResult``s.

    Results for identical point subsets are shared, which makes dense fine
    scales cheap: most triples there hold one or two points.
    """

    def __init__(self, E, threads: int = 1):
        self.E = as_point_set(E)
        self.threads = max(1, int(threads))
        self._buckets: Dict[int, Dict[Tuple[int, int], np.ndarray]] = {}
        self._results: Dict[Tuple[DyadicCube, str], BetaResult] = {}
        self._by_subset: Dict[Tuple[int, ...], Tuple[float, Optional[StripFit]]] = {}

    def buckets(self, n: int) -> Dict[Tuple[int, int], np.ndarray]:
        b = self._buckets.get(n)
        if b is None:
            idx = np.floor(np.ldexp(self.E.points, n)).astype(np.int64)
            groups = defaultdict(list)
            for i, key in enumerate(map(tuple, idx.tolist())):
                groups[key].append(i)
            b = {key: np.array(v, dtype=np.int64) for key, v in groups.items()}
            self._buckets[n] = b
        return b

    def indices(self, Q: DyadicCube, region: str) -> np.ndarray:
        b = self.buckets(Q.n)
        if region == "Q":
            return b.get((Q.k, Q.j), np.empty(0, dtype=np.int64))
        parts = [b[key] for key in ((k, j) for k in range(Q.k - 1, Q.k + 3) for j in range(Q.j - 1, Q.j + 3)) if key in b]
        if not parts:
            return np.empty(0, dtype=np.int64)
        cand = np.sort(np.concatenate(parts))
        mask = Q.contains(self.E.points[cand], "3Q")
        return cand[mask]

    def get(self, Q: DyadicCube, region: str = "Q") -> BetaResult:
        key = (Q, region)
        res = self._results.get(key)
        if res is not None:
            return res
        idx = self.indices(Q, region)
        sub = tuple(idx.tolist())
        if len(sub) <= 2:
            # at most two points are always collinear
            r_val = 0.0
            fit = _line_through(self.E.points[idx]) if sub else None
        else:
            cached = self._by_subset.get(sub)
            if cached is None:
                cached = _r_of_points(self.E.points[idx])
                self._by_subset[sub] = cached
            r_val, fit = cached
        res = BetaResult(Q, region, len(sub), r_val, r_val / Q.region_diam(region), fit)
        self._results[key] = res
        return res

    def get_many(self, cubes, region: str) -> List[BetaResult]:
        if self.threads > 1 and len(cubes) > 64:
            with ThreadPoolExecutor(self.threads) as ex:
                return list(ex.map(lambda Q: self.get(Q, region), cubes))
        return [self.get(Q, region) for Q in cubes]

    def cubes(self, n: int, region: str) -> List[DyadicCube]:
        if region == "Q":
            return [DyadicCube(n, k, j) for k, j in sorted(self.buckets(n))]
        return triple_cubes(self.E, n)


def _whole_r(E: PointSet) -> float:
    return min_width_strip(E.points).half_width


def _coarsest_single_scale(E: PointSet) -> int:
    """Finest scale whose side is at least the coordinate extent of ``E``."""
    ext = E.extent
    if ext == 0.0:
        return 0
    return int(floor(-log2(ext)))


# cubes per scale once side >= extent: 2x2 for Q, 5x5 for closed triples
_COARSE_COUNT = {"Q": 4, "3Q": 25}
_REGION_FACTOR = {"Q": 1.0, "3Q": 3.0}


def _upward_tail(excess: float, variant: str, n: int) -> float:
    # sum over scales m < n of count * excess^2 / (f^2 |Q_m|)
    c = _COARSE_COUNT[variant]
    f = _REGION_FACTOR[variant]
    return c * excess * excess / (f * f * SQRT2) * 2.0 ** n


def _choose_top(E: PointSet, excess: float, variant: str, eps_top: float, n_start: int) -> int:
    n = min(_coarsest_single_scale(E), n_start)
    while excess > 0.0 and _upward_tail(excess, variant, n) >= eps_top:
        n -= 1
    return n


def _default_eps(E: PointSet) -> float:
    return 1e-12 * max(E.diameter, np.finfo(float).tiny)


def truncated_square_sum(E, r: float, variant: str = "Q", eps_top: Optional[float] = None,
                         cache: Optional[BetaCache] = None) -> SumReport:
    """Sum of ``max(beta - r/|region|, 0)^2 |Q|`` over the dyadic grid.

    Scales finer than ``|region| < r`` are skipped (every term there is
    zero because ``r_E(region) <= |region|``); coarse scales are cut once
    the geometric tail bound drops below ``eps_top``.
    """
    if r <= 0:
        raise ValueError("use classical_jones_sum for r = 0")
    if variant not in REGIONS:
        raise ValueError(f"unknown variant {variant!r}")
    E = as_point_set(E)
    cache = cache or BetaCache(E)
    eps_top = _default_eps(E) if eps_top is None else eps_top
    f = _REGION_FACTOR[variant]
    n_bottom = int(floor(log2(f * SQRT2 / r)))
    w = _whole_r(E)
    excess = max(w - r, 0.0)
    n_top = _choose_top(E, excess, variant, eps_top, n_bottom)
    bound = _upward_tail(excess, variant, n_top)
    if excess == 0.0:
        # r_E(region) <= r_E(E) <= r everywhere: every term vanishes
        return SumReport(r, variant, 0.0, [], n_top, n_bottom, 0.0)
    total = 0.0
    per_scale = []
    terms = []
    for n in range(n_top, n_bottom + 1):
        partial = 0.0
        cubes = cache.cubes(n, variant)
        for Q, res in zip(cubes, cache.get_many(cubes, variant)):
            t = max(res.beta - r / Q.region_diam(variant), 0.0) ** 2 * Q.diam
            partial += t
            terms.append((Q, res, t))
        per_scale.append((n, partial, len(cubes)))
        total += partial
    return SumReport(r, variant, total, per_scale, n_top, n_bottom, bound, terms)


def classical_jones_sum(E, eps_top: Optional[float] = None, cache: Optional[BetaCache] = None,
                        max_scale: int = 60) -> SumReport:
    """Sum of ``beta(3Q)^2 |Q|`` over the dyadic grid.

    Descends until every triple at the current scale holds at most two
    points; triples of finer cubes sit inside their parents' triples, so
    all remaining terms are zero.
    """
    E = as_point_set(E)
    cache = cache or BetaCache(E)
    eps_top = _default_eps(E) if eps_top is None else eps_top
    w = _whole_r(E)
    n_start = _coarsest_single_scale(E)
    n_top = _choose_top(E, w, "3Q", eps_top, n_start)
    bound = _upward_tail(w, "3Q", n_top)
    if w == 0.0:
        return SumReport(0.0, "3Q", 0.0, [], n_top, n_top, 0.0)
    total = 0.0
    per_scale = []
    terms = []
    n = n_top
    while True:
        cubes = cache.cubes(n, "3Q")
        results = cache.get_many(cubes, "3Q")
        partial = 0.0
        for Q, res in zip(cubes, results):
            t = res.beta ** 2 * Q.diam
            partial += t
            terms.append((Q, res, t))
        per_scale.append((n, partial, len(cubes)))
        total += partial
        if max(res.count for res in results) <= 2 or n >= max_scale:
            break
        n += 1
    return SumReport(0.0, "3Q", total, per_scale, n_top, n, bound, terms)


def lower_bound(E, r: float, variant: str = "Q", eps_top: Optional[float] = None,
                cache: Optional[BetaCache] = None) -> float:
    """``|E| - 2r`` plus the truncated square sum; negative when ``|E| < 2r``."""
    E = as_point_set(E)
    if r <= 0:
        raise ValueError("r must be positive")
    s = truncated_square_sum(E, r, variant, eps_top, cache)
    return E.diameter - 2.0 * r + s.total


def minimizer_is_point(E, r: float) -> bool:
    return as_point_set(E).diameter < 2.0 * r
