"""
Command line front end.

    mdpcurve gen koch --level 3 > koch3.csv
    mdpcurve bounds koch3.csv --r 0.05
    mdpcurve curve koch3.csv --r 0.05 --out report.json
    mdpcurve verify koch3.csv report.json
    mdpcurve svg koch3.csv --r 0.05 --out koch3.svg

Reports are canonical JSON: sorted keys, floats with 17 significant digits,
and a top-level ``"schema": 1``.  Any failed check makes the command exit
with status 1 and names the check on stderr.
"""

import argparse
import math
import sys
from dataclasses import dataclass
from typing import List, Optional, Sequence, Tuple

import numpy as np

from . import generators
from .certify import (
    Curve,
    _components,
    coverage_check,
    curve_length,
    run_pipeline,
)
from .geom import EPS
from .multiscale import BetaCache, PointSet, as_point_set, classical_jones_sum, truncated_square_sum

SCHEMA = 1


class InputError(ValueError):
    pass


# ---------------------------------------------------------------- points


def parse_points(path, notices: Optional[List[str]] = None) -> PointSet:
    """Read ``x,y`` lines; ``#`` starts a comment line, blank lines are skipped."""
    notices = notices if notices is not None else []
    rows = []
    with open(path) as fh:
        for lineno, line in enumerate(fh, 1):
            s = line.strip()
            if not s or s.startswith("#"):
                continue
            parts = [p.strip() for p in s.split(",")]
            if len(parts) != 2:
                raise InputError(f"line {lineno}: expected 'x,y', got {s!r}")
            try:
                x, y = float(parts[0]), float(parts[1])
            except ValueError:
                raise InputError(f"line {lineno}: cannot parse {s!r}") from None
            if not (math.isfinite(x) and math.isfinite(y)):
                raise InputError(f"line {lineno}: non-finite coordinate")
            rows.append((x, y))
    if not rows:
        raise InputError(f"{path}: no points")
    E = PointSet(rows)
    if len(E) < len(rows):
        notices.append(f"removed {len(rows) - len(E)} duplicate point(s)")
    return E


def format_points(points) -> str:
    return "".join(f"{x!r},{y!r}\n" for x, y in np.asarray(points, dtype=float).tolist())


@dataclass(frozen=True)
class Transform:
    """``x -> scale * x + offset``."""

    scale: float
    offset: Tuple[float, float]

    def apply(self, pts) -> np.ndarray:
        return self.scale * np.asarray(pts, dtype=float) + np.asarray(self.offset)

    def to_dict(self) -> dict:
        return {"scale": self.scale, "offset": list(self.offset)}


def normalize(E, margin: float = 1.0 / 16.0) -> Tuple[PointSet, Transform]:
    """Similarity map of the bounding box into ``[margin, 1 - margin]^2``.

    Sets already inside ``[0, 1)^2`` are left alone, a single point is only
    translated.  Lengths scale by ``transform.scale``, so ``r`` must too.
    """
    E = as_point_set(E)
    P = E.points
    lo, hi = P.min(axis=0), P.max(axis=0)
    if lo.min() >= 0.0 and hi.max() < 1.0:
        return E, Transform(1.0, (0.0, 0.0))
    ext = float((hi - lo).max())
    scale = 1.0 if ext == 0.0 else (1.0 - 2.0 * margin) / ext
    off = margin - scale * lo
    t = Transform(scale, (float(off[0]), float(off[1])))
    return PointSet(t.apply(P)), t


# ---------------------------------------------------------------- json


def _fmt_float(x: float) -> str:
    if math.isnan(x):
        return '"NaN"'
    if math.isinf(x):
        return '"Infinity"' if x > 0 else '"-Infinity"'
    return "%.17g" % x


def canonical_json(obj) -> str:
    """Deterministic JSON text; non-finite floats become strings."""
    import json

    def enc(o):
        if o is None or isinstance(o, (bool, np.bool_)):
            return json.dumps(bool(o) if o is not None else None)
        if isinstance(o, (int, np.integer)):
            return str(int(o))
        if isinstance(o, (float, np.floating)):
            return _fmt_float(float(o))
        if isinstance(o, str):
            return json.dumps(o)
        if isinstance(o, dict):
            items = sorted((str(k), v) for k, v in o.items())
            return "{" + ",".join(json.dumps(k) + ":" + enc(v) for k, v in items) + "}"
        if isinstance(o, (list, tuple, np.ndarray)):
            return "[" + ",".join(enc(v) for v in o) + "]"
        raise TypeError(f"cannot serialize {type(o).__name__}")

    return enc(obj) + "\n"


def _write(text: str, out: Optional[str]):
    if out is None or out == "-":
        sys.stdout.write(text)
    else:
        with open(out, "w") as fh:
            fh.write(text)


# ---------------------------------------------------------------- svg


def render_svg(pipe, size: int = 640, disk_samples: int = 24) -> str:
    """SVG 1.1 drawing with one group per generation of the hull tree."""
    E = pipe.E.points
    r = pipe.r
    segs = pipe.curve.segments
    allpts = [E] + [np.array([s.p, s.q]) for s in segs]
    P = np.vstack(allpts)
    lo = P.min(axis=0) - 1.5 * r
    hi = P.max(axis=0) + 1.5 * r
    ext = float((hi - lo).max()) or 1.0
    k = size / ext

    def xy(p):
        return "%.6f,%.6f" % ((p[0] - lo[0]) * k, size - (p[1] - lo[1]) * k)

    def line(p, q, extra=""):
        a, b = xy(p).split(","), xy(q).split(",")
        return f'<line x1="{a[0]}" y1="{a[1]}" x2="{b[0]}" y2="{b[1]}"{extra}/>'

    out = [
        '<?xml version="1.0" encoding="UTF-8"?>',
        f'<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{size}" height="{size}" '
        f'viewBox="0 0 {size} {size}">',
        f'<rect width="{size}" height="{size}" fill="white"/>',
    ]
    tree = pipe.tree
    for g in range(tree.N + 1):
        out.append(f'<g id="generation-{g}" fill="none" stroke="#7a7a9a" stroke-width="0.6">')
        for n in tree.generation(g):
            v = n.hull.vertices
            cls = n.label
            if len(v) == 1:
                out.append(f'<circle class="{cls}" cx="{xy(v[0]).split(",")[0]}" cy="{xy(v[0]).split(",")[1]}" r="1.5"/>')
            else:
                pts = " ".join(xy(p) for p in v)
                out.append(f'<polygon class="{cls}" points="{pts}"/>')
            if n.bridge is not None and n.bridge.length > 0.0:
                out.append(line(n.bridge.e0, n.bridge.e1, ' stroke="#c04040"'))
        out.append("</g>")
    out.append('<g id="disks" fill="#4060c0" fill-opacity="0.06" stroke="none">')
    for s in segs:
        m = max(1, int(math.ceil(s.length / max(r, 1e-300))))
        for t in np.linspace(0.0, 1.0, min(m, disk_samples) + 1):
            p = (s.p[0] + t * (s.q[0] - s.p[0]), s.p[1] + t * (s.q[1] - s.p[1]))
            c = xy(p).split(",")
            out.append(f'<circle cx="{c[0]}" cy="{c[1]}" r="{r * k:.6f}"/>')
    out.append("</g>")
    out.append('<g id="curve" stroke="black" stroke-width="1.2">')
    for s in segs:
        out.append(line(s.p, s.q))
    for p in pipe.curve.isolated_points:
        c = xy(p).split(",")
        out.append(f'<circle cx="{c[0]}" cy="{c[1]}" r="2" fill="black"/>')
    out.append("</g>")
    out.append('<g id="points" fill="#d07000">')
    for p in E:
        c = xy(p).split(",")
        out.append(f'<circle cx="{c[0]}" cy="{c[1]}" r="1.2"/>')
    out.append("</g>")
    out.append("</svg>")
    return "\n".join(out) + "\n"


# ---------------------------------------------------------------- commands


def _variant(v: str) -> str:
    return {"q": "Q", "3q": "3Q"}[v.lower()]


def _load(args, notices: List[str]):
    E = parse_points(args.input, notices)
    r = args.r
    t = None
    if args.normalize:
        E, t = normalize(E)
        if r is not None:
            r = r * t.scale
    return E, r, t


def _report_failures(names: Sequence[str]) -> int:
    if names:
        print("failed checks: " + ", ".join(names), file=sys.stderr)
        return 1
    return 0


def cmd_gen(args) -> int:
    pts = generators.generate(args.kind, level=args.level, n=args.n, seed=args.seed)
    _write(format_points(pts), args.out)
    return 0


def cmd_bounds(args, parser) -> int:
    notices: List[str] = []
    E, r, t = _load(args, notices)
    cache = BetaCache(E, threads=args.threads)
    doc = {"schema": SCHEMA, "points": len(E), "diameter": E.diameter}
    if args.classical:
        doc["classical"] = classical_jones_sum(E, args.eps_top, cache).to_dict()
    if r is not None:
        if r <= 0:
            parser.error("--r must be positive; use --classical for the classical Jones sum (r = 0)")
        s = truncated_square_sum(E, r, _variant(args.variant), args.eps_top, cache)
        doc["r"] = r
        doc["sum"] = s.to_dict()
        doc["lower"] = E.diameter - 2.0 * r + s.total
    elif not args.classical:
        parser.error("--r is required (or pass --classical)")
    if t is not None:
        doc["transform"] = t.to_dict()
    for m in notices:
        print(m, file=sys.stderr)
    _write(canonical_json(doc), args.out)
    return 0


def _pipeline(args, parser, notices):
    E, r, t = _load(args, notices)
    if r is None or r <= 0:
        parser.error("--r must be positive")
    pipe = run_pipeline(E, r, _variant(args.variant), args.eps_top, args.threads,
                        snapshots=args.snapshots)
    return pipe, t


def cmd_curve(args, parser) -> int:
    notices: List[str] = []
    pipe, t = _pipeline(args, parser, notices)
    doc = pipe.report.to_dict()
    doc["curve"] = pipe.curve.to_dict()
    if args.snapshots:
        doc["snapshots"] = [c.to_dict() for c in pipe.trace.snapshots]
    if args.tree:
        doc["tree"] = pipe.tree.to_dict()
    if t is not None:
        doc["transform"] = t.to_dict()
    for m in notices:
        print(m, file=sys.stderr)
    _write(canonical_json(doc), args.out)
    return _report_failures(pipe.report.failed())


def verify_curve(E, curve: Curve, r: float, claimed_length: Optional[float] = None) -> dict:
    """Re-run coverage, connectivity and (if given) the length of a stored curve."""
    E = as_point_set(E)
    tol = EPS * max(E.diameter, 1.0)
    cov = coverage_check(E, curve, r, tol)
    ncomp = _components(curve, EPS * max(E.diameter, 1e-300)) if not curve.is_empty() else 0
    L = curve_length(curve, EPS * max(E.diameter, 1e-300))
    checks = {
        "coverage": {"pass": bool(cov.ok), "residual": cov.worst_residual},
        "connectivity": {"pass": ncomp == 1, "residual": float(ncomp - 1)},
    }
    if claimed_length is not None:
        d = abs(L - claimed_length)
        checks["length"] = {"pass": bool(d <= tol), "residual": d}
    return {"schema": SCHEMA, "r": r, "curve_length": L, "checks": checks}


def cmd_verify(args, parser) -> int:
    import json

    notices: List[str] = []
    E, r, t = _load(args, notices)
    with open(args.report) as fh:
        doc = json.load(fh)
    if "curve" not in doc:
        parser.error(f"{args.report}: no 'curve' field")
    r = r if r is not None else doc.get("r")
    if r is None or r <= 0:
        parser.error("--r must be positive")
    curve = Curve.from_dict(doc["curve"])
    out = verify_curve(E, curve, float(r), doc.get("curve_length"))
    _write(canonical_json(out), args.out)
    return _report_failures([k for k, c in out["checks"].items() if not c["pass"]])


def cmd_svg(args, parser) -> int:
    notices: List[str] = []
    pipe, _ = _pipeline(args, parser, notices)
    _write(render_svg(pipe), args.out)
    return 0


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="mdpcurve", description="Covering curves and multiscale bounds for planar point sets.")
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp, need_input=True):
        if need_input:
            sp.add_argument("input", help="CSV file with one 'x,y' per line")
        sp.add_argument("--r", type=float, default=None, help="covering radius")
        sp.add_argument("--variant", choices=["q", "3q", "Q", "3Q"], default="q")
        sp.add_argument("--eps-top", type=float, default=None, dest="eps_top")
        sp.add_argument("--normalize", action="store_true", help="rescale into the unit square first")
        sp.add_argument("--threads", type=int, default=1)
        sp.add_argument("--seed", type=int, default=0)
        sp.add_argument("--out", default=None, help="output path (default stdout)")

    sp = sub.add_parser("bounds", help="truncated square sums and the lower bound")
    common(sp)
    sp.add_argument("--classical", action="store_true", help="also report the untruncated Jones sum")

    sp = sub.add_parser("curve", help="build the covering curve and check every bound")
    common(sp)
    sp.add_argument("--snapshots", action="store_true")
    sp.add_argument("--tree", action="store_true", help="include the hull tree in the report")

    sp = sub.add_parser("verify", help="re-check a curve stored in a report")
    common(sp)
    sp.add_argument("report")

    sp = sub.add_parser("svg", help="draw points, hulls by generation, curve and r-disks")
    common(sp)
    sp.add_argument("--snapshots", action="store_true")

    sp = sub.add_parser("gen", help="write a generated point set as CSV")
    sp.add_argument("kind", choices=generators.KINDS)
    sp.add_argument("--level", type=int, default=3)
    sp.add_argument("--n", type=int, default=64)
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--out", default=None)
    return p


def run(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        if args.command == "gen":
            return cmd_gen(args)
        handler = {"bounds": cmd_bounds, "curve": cmd_curve, "verify": cmd_verify, "svg": cmd_svg}[args.command]
        return handler(args, parser)
    except (InputError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


def main():
    sys.exit(run())
