"""Stokes graphs, sectors, point classification and canonical paths.

Lines are traced in arc length along the direction field on which
``Re(e^{i phi} W)`` stays constant, with a Newton re-projection after every
classical RK4 step.  Sectors are the wedges between the asymptotic Stokes
directions, labelled anticlockwise starting from the wedge that contains
the direction theta = 0.
"""
from __future__ import annotations

import cmath
import logging
import math
from dataclasses import dataclass, field, replace

import numpy as np

from .errors import (CanonicityError, InputError, MultipleTurningPointError, NumericError,
                     StepCollapseError, TurningPointProximityError)
from .path import (OrientedPath, Segment, arc_segment, continue_branch, is_canonical, action)
from .potential import Characteristic, turning_points as find_turning_points

log = logging.getLogger(__name__)

CAPTURE = 1e-6
LINE_TOL = 1e-7
MAX_STEPS = 20000
_GL_A = 0.5 - math.sqrt(15) / 10
_GL_B = 0.5 + math.sqrt(15) / 10


# ---------------------------------------------------------------------------
# scalar helpers (plain Python complex arithmetic is much faster for tracing)


class _Scalar:
    """Horner evaluation on Python complex scalars (ascending coefficients)."""

    def __init__(self, q):
        c = [complex(v) for v in (q.coeffs if hasattr(q, "coeffs") else q)]
        self.desc = c[::-1]

    def __call__(self, x: complex) -> complex:
        acc = 0j
        for a in self.desc:
            acc = acc * x + a
        return acc


def _match(s: complex, ref: complex) -> complex:
    return s if abs(s - ref) <= abs(s + ref) else -s


# ---------------------------------------------------------------------------
# data types


@dataclass(frozen=True)
class StokesLine:
    origin: int
    polyline: np.ndarray = field(repr=False)
    terminus: tuple  # ("tp", index) or ("inf", sector boundary index)
    phase: float
    drift: float = 0.0

    @property
    def finite(self) -> bool:
        return self.terminus[0] == "tp"

    @property
    def end_angle(self) -> float:
        return float(np.angle(self.polyline[-1]))

    def to_json(self) -> dict:
        return {
            "origin": self.origin,
            "terminus": list(self.terminus),
            "polyline": [[z.real, z.imag] for z in self.polyline],
            "drift": self.drift,
        }


@dataclass(frozen=True)
class Sector:
    index: int
    direction_interval: tuple  # (theta_lo, theta_hi), anticlockwise, radians
    signature: int
    bounding_lines: tuple
    attached_turning_point: int
    anchor: complex
    anchor_sqrt: complex

    @property
    def bisector(self) -> float:
        return 0.5 * (self.direction_interval[0] + self.direction_interval[1])

    def contains_angle(self, theta: float) -> bool:
        lo, hi = self.direction_interval
        t = lo + (theta - lo) % (2 * np.pi)
        return lo < t < hi

    def sqrt_anchor(self, point: complex, graph: "StokesGraph") -> complex:
        """Branch value of sqrt(q) at a far point inside this sector."""
        return graph.sqrt_far(point)

    def to_json(self) -> dict:
        return {
            "index": self.index,
            "interval": list(self.direction_interval),
            "signature": self.signature,
            "bounding_lines": list(self.bounding_lines),
            "turning_point": self.attached_turning_point,
            "anchor": [self.anchor.real, self.anchor.imag],
        }


@dataclass(frozen=True)
class StokesGraph:
    characteristic: Characteristic
    turning_points: object
    lines: tuple
    sectors: tuple
    phase: float
    R_infinity: float
    directions: tuple = ()
    cut_angle: float = 0.0
    branch_sign: int = 1

    @property
    def n_sectors(self) -> int:
        return len(self.sectors)

    @property
    def scale(self) -> float:
        locs = self.turning_points.locations
        return 1.0 + (float(np.max(np.abs(locs))) if locs.size else 0.0)

    def sector(self, k: int) -> Sector:
        n = len(self.sectors)
        return self.sectors[(k - 1) % n]

    def sector_of_angle(self, theta: float) -> Sector:
        for s in self.sectors:
            if s.contains_angle(theta):
                return s
        # exactly on a direction: take the anticlockwise wedge
        for s in self.sectors:
            if abs((theta - s.direction_interval[0] + np.pi) % (2 * np.pi) - np.pi) < 1e-12:
                return s
        raise NumericError(f"angle {theta} not in any sector")

    def sqrt_far(self, y: complex) -> complex:
        """sqrt(q) far out, continued anticlockwise from sector 1."""
        q = self.characteristic
        n = q.degree
        lead = complex(q.coeffs[-1])
        theta = self.cut_angle + (float(np.angle(y)) - self.cut_angle) % (2 * np.pi)
        asym = self.branch_sign * cmath.sqrt(lead) * abs(y) ** (n / 2) * cmath.exp(0.5j * n * theta)
        return _match(cmath.sqrt(_Scalar(q)(complex(y))), asym)

    def to_json(self) -> dict:
        locs = self.turning_points.locations
        return {
            "phase": self.phase,
            "R_infinity": self.R_infinity,
            "turning_points": [[z.real, z.imag] for z in locs],
            "directions": list(self.directions),
            "lines": [ln.to_json() for ln in self.lines],
            "sectors": [s.to_json() for s in self.sectors],
        }


# ---------------------------------------------------------------------------
# tracing


def _trace(qs: _Scalar, tps: np.ndarray, i: int, theta0: float, phi: float, R_inf: float,
           cap: float, dq: complex):
    """Trace one Stokes line from turning point ``i`` leaving at angle ``theta0``."""
    xi = complex(tps[i])
    others = np.delete(tps, i)
    d_other = float(np.min(np.abs(others - xi))) if others.size else 1.0
    eps = 1e-4 * min(1.0, d_other)
    x = xi + eps * cmath.exp(1j * theta0)
    s = _match(cmath.sqrt(qs(x)), cmath.sqrt(dq) * math.sqrt(eps) * cmath.exp(0.5j * theta0))
    W = 2.0 / 3.0 * s * (x - xi)
    ephi = cmath.exp(1j * phi)
    emphi = cmath.exp(-1j * phi)
    d0 = 1j * emphi * s.conjugate() / abs(s)
    sgn = 1.0 if (d0 * cmath.exp(-1j * theta0)).real > 0 else -1.0
    pts = [xi, x]
    tlist = [complex(t) for t in tps]

    def field(z, ref):
        r = _match(cmath.sqrt(qs(z)), ref)
        return sgn * 1j * emphi * r.conjugate() / abs(r), r

    drift = 0.0
    for _ in range(MAX_STEPS):
        dists = [abs(x - t) for t in tlist]
        h = 0.2 * min(dists)
        k1, r1 = field(x, s)
        k2, r2 = field(x + 0.5 * h * k1, r1)
        k3, _ = field(x + 0.5 * h * k2, r2)
        k4, _ = field(x + h * k3, r2)
        xn = x + h * (k1 + 2 * k2 + 2 * k3 + k4) / 6.0
        # three-point Gauss-Legendre on the chord for the action increment
        dx = xn - x
        g1 = _match(cmath.sqrt(qs(x + _GL_A * dx)), s)
        g2 = _match(cmath.sqrt(qs(x + 0.5 * dx)), g1)
        g3 = _match(cmath.sqrt(qs(x + _GL_B * dx)), g2)
        sn = _match(cmath.sqrt(qs(xn)), g3)
        W = W + (5 * g1 + 8 * g2 + 5 * g3) * dx / 18.0
        # Newton re-projection onto Re(e^{i phi} W) = 0
        res = (ephi * W).real
        drift = max(drift, abs(res))
        if sn != 0:
            delta = -res * (ephi * sn).conjugate() / abs(sn) ** 2
            xn += delta
            W += sn * delta
            sn = _match(cmath.sqrt(qs(xn)), sn)
        x, s = xn, sn
        pts.append(x)
        for j, t in enumerate(tlist):
            if j != i and abs(x - t) < cap:
                pts.append(t)
                return np.array(pts), ("tp", j), drift
        if abs(x) > R_inf:
            return np.array(pts), ("inf", -1), drift
    raise StepCollapseError(f"Stokes line tracer stalled near x = {x:.6g}")


def asymptotic_directions(q: Characteristic, phi: float) -> np.ndarray:
    """Asymptotic Stokes directions in [0, 2 pi), sorted."""
    n = q.degree
    lead = complex(q.coeffs[-1])
    base = (np.pi / 2 - phi - 0.5 * np.angle(lead)) * 2.0 / (n + 2)
    th = (base + np.arange(n + 2) * 2 * np.pi / (n + 2)) % (2 * np.pi)
    th[np.abs(th - 2 * np.pi) < 1e-12] = 0.0
    return np.sort(th)


def build_graph(q: Characteristic, arg_lambda: float = 0.0, R_infinity: float | None = None,
                capture: float = CAPTURE) -> StokesGraph:
    """Trace the Stokes graph of ``q`` for the phase ``arg_lambda``.

    Raises
    ------
    MultipleTurningPointError
        If some turning point is not simple.
    StepCollapseError
        If a line cannot be traced to its end.
    """
    if q.degree < 1:
        raise InputError("the characteristic must have degree at least 1")
    tpset = find_turning_points(q)
    if not tpset.all_simple:
        bad = [p.location for p in tpset if p.multiplicity > 1]
        raise MultipleTurningPointError(f"multiple turning point(s) at {bad}")
    tps = tpset.locations
    scale = 1.0 + float(np.max(np.abs(tps)))
    R_inf = R_infinity if R_infinity is not None else 10.0 * scale
    cap = capture * scale
    qs = _Scalar(q)
    c = np.asarray(q.coeffs, dtype=complex)
    dqs = _Scalar(c[1:] * np.arange(1, c.size))
    phi = float(arg_lambda)
    lines = []
    for i, xi in enumerate(tps):
        dq = dqs(complex(xi))
        for k in range(3):
            theta0 = (np.pi / 2 + k * np.pi - phi - 0.5 * cmath.phase(dq)) * 2.0 / 3.0
            pts, term, drift = _trace(qs, tps, i, theta0, phi, R_inf, cap, dq)
            lines.append(StokesLine(i, pts, term, phi, drift))

    dirs = asymptotic_directions(q, phi)
    m = dirs.size
    # attach infinite lines to the nearest asymptotic direction
    fixed = []
    covered = set()
    for ln in lines:
        if ln.finite:
            fixed.append(ln)
            continue
        ang = ln.end_angle % (2 * np.pi)
        gap = np.abs((ang - dirs + np.pi) % (2 * np.pi) - np.pi)
        j = int(np.argmin(gap))
        covered.add(j)
        fixed.append(replace(ln, terminus=("inf", j)))
    if len(covered) != m:
        raise NumericError(
            f"traced lines reach {len(covered)} of {m} asymptotic Stokes directions")
    lines = fixed

    # sector 1 is the wedge containing theta = 0 (or starting at it)
    if dirs[0] < 1e-12:
        start = 0
    else:
        start = m - 1
    cut = float(dirs[start]) if start == 0 else float(dirs[start] - 2 * np.pi)
    sectors = []
    graph = StokesGraph(q, tpset, tuple(lines), (), phi, R_inf, tuple(float(d) for d in dirs), cut, 1)
    # fix the overall sign so that sqrt(q) at the sector-1 bisector is the principal root
    width1 = (float(dirs[(start + 1) % m]) - cut) % (2 * np.pi)
    y1 = R_inf * cmath.exp(1j * (cut + 0.5 * width1))
    principal = cmath.sqrt(complex(q(y1)))
    sign = 1 if (graph.sqrt_far(y1) / principal).real > 0 else -1
    graph = replace(graph, branch_sign=sign)

    ephi = cmath.exp(1j * phi)
    for idx in range(m):
        j_lo = (start + idx) % m
        j_hi = (j_lo + 1) % m
        lo = cut + ((float(dirs[j_lo]) - cut) % (2 * np.pi))
        if idx == 0:
            lo = cut
        hi = lo + ((float(dirs[j_hi]) - lo) % (2 * np.pi))
        if hi <= lo:
            hi += 2 * np.pi
        mid = 0.5 * (lo + hi)
        anchor = R_inf * cmath.exp(1j * mid)
        root = graph.sqrt_far(anchor)
        sigma = -1 if (ephi * root * anchor).real > 0 else 1
        bound = [li for li, ln in enumerate(lines) if not ln.finite and ln.terminus[1] in (j_lo, j_hi)]
        # the attached turning point: origin of the boundary line closest to the wedge interior
        best, best_gap = None, np.inf
        for li in bound:
            ln = lines[li]
            if ln.terminus[1] != j_lo:
                continue
            gap = (ln.end_angle - lo) % (2 * np.pi)
            gap = gap if gap < np.pi else gap - 2 * np.pi
            if best is None or -gap < best_gap:
                best, best_gap = li, -gap
        if best is None:
            best = bound[0]
        sectors.append(Sector(idx + 1, (lo, hi), sigma, tuple(bound), lines[best].origin,
                              anchor, root))
    log.debug("graph: %d turning points, %d lines, %d sectors", len(tps), len(lines), m)
    return replace(graph, sectors=tuple(sectors))


def rotate(graph: StokesGraph, delta_phi: float) -> StokesGraph:
    """Rebuild the graph at phase ``graph.phase + delta_phi``."""
    if delta_phi == 0:
        return graph
    return build_graph(graph.characteristic, graph.phase + delta_phi, graph.R_infinity)


# ---------------------------------------------------------------------------
# geometry queries


def _segments_of_lines(graph: StokesGraph):
    a, b, idx = [], [], []
    for li, ln in enumerate(graph.lines):
        p = ln.polyline
        a.append(p[:-1])
        b.append(p[1:])
        idx.append(np.full(p.size - 1, li))
    return np.concatenate(a), np.concatenate(b), np.concatenate(idx)


def _point_segment_distance(x, a, b):
    ab = b - a
    denom = np.abs(ab) ** 2
    t = np.clip(((x - a) * ab.conjugate()).real / np.where(denom > 0, denom, 1), 0, 1)
    return np.abs(x - (a + t * ab))


def distance_to_lines(graph: StokesGraph, x: complex):
    """Distance from ``x`` to the traced lines, and the nearest line index."""
    a, b, idx = _segments_of_lines(graph)
    d = _point_segment_distance(complex(x), a, b)
    k = int(np.argmin(d))
    return float(d[k]), int(idx[k])


def _crosses(p0, p1, a, b):
    """Mask of segments (a, b) crossed by the chord p0 -> p1."""
    def cross(u, v):
        return u.real * v.imag - u.imag * v.real

    r = p1 - p0
    s = b - a
    den = cross(r, s)
    with np.errstate(divide="ignore", invalid="ignore"):
        t = cross(a - p0, s) / den
        u = cross(a - p0, r) / den
    return (den != 0) & (t >= 0) & (t <= 1) & (u >= 0) & (u <= 1)


@dataclass
class FlowResult:
    kind: str  # "escape", "line", "tp", "stall"
    points: np.ndarray
    line: int = -1
    angle: float = 0.0


def flow(graph: StokesGraph, x: complex, sign: float, angle: float = 0.0,
         stop_at_lines: bool = True, max_length: float | None = None, ref: complex | None = None,
         step: float = 0.2):
    """Follow a curve of constant arg(dW) from ``x``.

    The step direction is sign * e^{i angle} * conj(e^{i phi} sqrt q), so the
    image in the e^{i phi} W plane is a straight ray at ``angle`` from the
    gradient of Re(e^{i phi} W).  ``angle = 0`` gives the gradient curve and
    ``angle = +-pi/2`` a level curve.
    """
    qs = _Scalar(graph.characteristic)
    tps = [complex(t) for t in graph.turning_points.locations]
    ephi = cmath.exp(1j * graph.phase)
    cap = 1e-4 * graph.scale
    a, b, idx = _segments_of_lines(graph) if stop_at_lines else (None, None, None)
    s = cmath.sqrt(qs(x)) if ref is None else _match(cmath.sqrt(qs(x)), ref)
    turn = sign * cmath.exp(1j * angle)

    def fld(z, r):
        rr = _match(cmath.sqrt(qs(z)), r)
        return turn * (ephi * rr).conjugate() / abs(rr), rr

    pts = [x]
    length = 0.0
    for _ in range(MAX_STEPS):
        dmin = min(abs(x - t) for t in tps)
        if dmin < cap:
            return FlowResult("tp", np.array(pts))
        h = step * dmin
        if max_length is not None:
            h = min(h, max_length - length)
        k1, r1 = fld(x, s)
        k2, r2 = fld(x + 0.5 * h * k1, r1)
        k3, _ = fld(x + 0.5 * h * k2, r2)
        k4, _ = fld(x + h * k3, r2)
        xn = x + h * (k1 + 2 * k2 + 2 * k3 + k4) / 6.0
        if stop_at_lines:
            hit = _crosses(x, xn, a, b)
            if np.any(hit):
                pts.append(xn)
                return FlowResult("line", np.array(pts), int(idx[np.nonzero(hit)[0][0]]))
        s = _match(cmath.sqrt(qs(xn)), s)
        length += abs(xn - x)
        x = xn
        pts.append(x)
        if abs(x) > graph.R_infinity:
            return FlowResult("escape", np.array(pts), angle=float(np.angle(x)))
        if max_length is not None and length >= max_length - 1e-15:
            return FlowResult("stall", np.array(pts))
    return FlowResult("stall", np.array(pts))


@dataclass(frozen=True)
class PointClass:
    kind: str  # "sector", "strip", "finite-line", "infinite-line"
    sector: int | None
    distance: float
    line: int | None = None

    def to_json(self) -> dict:
        return {"kind": self.kind, "sector": self.sector, "distance": self.distance,
                "line": self.line}


def classify_point(graph: StokesGraph, x: complex, line_tol: float = LINE_TOL) -> PointClass:
    """Locate ``x`` relative to the Stokes graph.

    Raises
    ------
    TurningPointProximityError
        If ``x`` lies within the capture radius of a turning point.
    """
    x = complex(x)
    tps = graph.turning_points.locations
    if np.min(np.abs(tps - x)) < CAPTURE * graph.scale:
        raise TurningPointProximityError(f"x = {x} is a turning point")
    d, li = distance_to_lines(graph, x)
    if d < line_tol * (1 + abs(x)):
        kind = "finite-line" if graph.lines[li].finite else "infinite-line"
        return PointClass(kind, None, d, li)
    if abs(x) > graph.R_infinity:
        return PointClass("sector", graph.sector_of_angle(float(np.angle(x))).index, d)
    for sgn in (1.0, -1.0):
        res = flow(graph, x, sgn)
        if res.kind == "escape":
            return PointClass("sector", graph.sector_of_angle(res.angle).index, d)
    return PointClass("strip", None, d)


# ---------------------------------------------------------------------------
# canonical paths


def _simplify(points: np.ndarray, tps: np.ndarray, frac: float = 0.4, turn: float = 0.08):
    """Drop flow points while chords stay short and straight."""
    keep = [0]
    i = 0
    n = points.size
    while i < n - 1:
        j = i + 1
        while j + 1 < n:
            chord = points[j + 1] - points[i]
            d = float(np.min(np.abs(tps - points[i]))) if tps.size else np.inf
            mids = points[i + 1 : j + 1]
            dev = np.abs(((mids - points[i]) * np.conj(chord)).imag) / max(abs(chord), 1e-300)
            if abs(chord) > frac * d or np.any(dev > turn * abs(chord)):
                break
            j += 1
        keep.append(j)
        i = j
    return points[keep]


def _path_from_points(pts) -> OrientedPath:
    pts = [complex(p) for p in pts]
    clean = [pts[0]]
    for p in pts[1:]:
        if abs(p - clean[-1]) > 1e-14 * (1 + abs(p)):
            clean.append(p)
    segs = tuple(Segment(a, b) for a, b in zip(clean[:-1], clean[1:]))
    return OrientedPath(segs, from_infinity=True, ray_origin=0j)


def check_path(graph: StokesGraph, k: int, path: OrientedPath, mono_tol: float = 1e-9):
    """Continue the branch from the anchor and test canonicity for sector ``k``."""
    sec = graph.sector(k)
    ang = float(np.angle(path.start))
    if not sec.contains_angle(ang) or abs(path.start) < 0.5 * graph.R_infinity:
        return None, None
    root = graph.sqrt_far(path.start)
    try:
        br = continue_branch(graph.characteristic, path, root, graph.turning_points)
    except NumericError:
        return None, None
    ok = is_canonical(br, sec.signature, graph.phase, mono_tol)
    return ok, br


def sector_path_check(graph: StokesGraph, k: int, path: OrientedPath):
    ok, _ = check_path(graph, k, path)
    if not ok:
        where = "" if ok is None else f" (violation at {ok.violation_point})"
        raise CanonicityError(f"path is not canonical for sector {k}{where}")


def _candidate_from_flow(graph, k, res: FlowResult, prefix=None, margin: float = 1.0):
    if res.kind != "escape":
        return None
    pts = res.points[::-1]
    if prefix is not None:
        pts = np.concatenate([pts, prefix[1:]])
    simple = _simplify(pts, graph.turning_points.locations, turn=0.08 * min(1.0, margin))
    for cand in (simple, pts):
        path = _path_from_points(cand)
        ok, _ = check_path(graph, k, path)
        if ok:
            return path
    return None


def _clearance(path: OrientedPath, tps: np.ndarray) -> float:
    """Smallest distance from the path's chords to a turning point."""
    nodes = np.array(path.nodes)
    if tps.size == 0 or nodes.size < 2:
        return np.inf
    return float(min(np.min(_point_segment_distance(t, nodes[:-1], nodes[1:])) for t in tps))


def canonical_path(graph: StokesGraph, k: int, x: complex, tries: int = 6,
                   clearance: float | None = None) -> OrientedPath | None:
    """A canonical path from the anchor of sector ``k`` to ``x`` or None.

    Candidates are descent curves of sigma_k Re(e^{i phi} W) started at
    ``x`` and at points reached from ``x`` along level curves, where the
    value stays constant.  By default the first candidate that passes the
    monotonicity check wins.  With ``clearance`` set, the first candidate
    whose distance to the turning points is at least ``clearance`` times
    that of ``x`` wins, falling back to the candidate with the largest
    clearance; recursions that differentiate along the path lose digits
    near turning points.
    """
    x = complex(x)
    tps = graph.turning_points.locations
    if np.min(np.abs(tps - x)) < CAPTURE * graph.scale:
        return None
    if clearance is None:
        return next(_candidates(graph, k, x, tries), None)
    d_x = float(np.min(np.abs(tps - x)))
    best, best_c = None, -1.0
    for path in _candidates(graph, k, x, tries):
        c = _clearance(path, tps) / d_x
        if c >= clearance:
            return path
        if c > best_c:
            best, best_c = path, c
    return best


def _candidates(graph: StokesGraph, k: int, x: complex, tries: int):
    tps = graph.turning_points.locations
    sec = graph.sector(k)
    if abs(x) >= graph.R_infinity and sec.contains_angle(float(np.angle(x))):
        # far inside the sector: the radial ray itself
        path = _path_from_points([x * 1.0000001, x])
        ok, _ = check_path(graph, k, path)
        if ok:
            yield path
    # straight rays in the W plane: strictly monotone, so chords stay canonical
    for ang in (0.0, 0.35, -0.35, 0.7, -0.7, 1.05, -1.05, 1.35, -1.35):
        for sgn in (1.0, -1.0):
            res = flow(graph, x, sgn, angle=ang, stop_at_lines=False)
            path = _candidate_from_flow(graph, k, res)
            if path is not None:
                yield path
    # nearly level rays pass close to turning-point images; the step shrinks
    # with the tilt so that chords keep the sign of the monotone rate
    for tilt in (0.1, 0.03, 0.01):
        for ang in (np.pi / 2 - tilt, -np.pi / 2 + tilt):
            for sgn in (1.0, -1.0):
                res = flow(graph, x, sgn, angle=ang, stop_at_lines=False, step=min(0.2, 2.0 * tilt))
                path = _candidate_from_flow(graph, k, res, margin=tilt / 0.3)
                if path is not None:
                    yield path
    # slide along nearly level curves, then descend
    d0 = float(np.min(np.abs(tps - x)))
    for lsgn, ang in ((1.0, 1.45), (1.0, -1.45), (-1.0, 1.45), (-1.0, -1.45)):
        lev = flow(graph, x, lsgn, angle=ang, stop_at_lines=False,
                   max_length=2.0 * (d0 + abs(x)) + graph.scale, step=0.1)
        pts = lev.points
        if pts.size < 3:
            continue
        picks = np.unique(np.linspace(1, pts.size - 1, tries).astype(int))
        for p in picks:
            start = pts[p]
            for sgn in (1.0, -1.0):
                res = flow(graph, complex(start), sgn, stop_at_lines=False)
                path = _candidate_from_flow(graph, k, res, prefix=pts[: p + 1][::-1], margin=0.4)
                if path is not None:
                    yield path


def attached_action(graph: StokesGraph, k: int, x: complex, path: OrientedPath | None = None):
    """W_k(x): integral of sqrt(q) from the sector's turning point to ``x``.

    The branch is the one carried from the sector anchor along ``path``.
    """
    if path is None:
        path = canonical_path(graph, k, x)
        if path is None:
            raise CanonicityError(f"no canonical path from sector {k} to {x}")
    sec = graph.sector(k)
    tp = complex(graph.turning_points.locations[sec.attached_turning_point])
    # bounding line from the turning point out to the sector boundary
    line = None
    for li in sec.bounding_lines:
        ln = graph.lines[li]
        if ln.origin == sec.attached_turning_point:
            line = ln
            break
    pl = _simplify(line.polyline[1:], graph.turning_points.locations)
    # the first traced points hug the turning point; a chord from it is safer
    tps = graph.turning_points.locations
    others = np.delete(tps, sec.attached_turning_point)
    near = 0.05 * (float(np.min(np.abs(others - tp))) if others.size else graph.scale)
    keep = np.abs(pl - tp) > near
    keep[-1] = True
    pl = np.concatenate([[tp], pl[keep]])
    end = pl[-1]
    # arc at |end| to the anchor direction of the path, then radially to the anchor
    a0 = float(np.angle(end))
    a1 = float(np.angle(path.start))
    sweep = (a1 - a0 + np.pi) % (2 * np.pi) - np.pi
    segs = [Segment(complex(p), complex(q)) for p, q in zip(pl[:-1], pl[1:])]
    if abs(sweep) > 1e-14:
        segs.append(arc_segment(complex(end), 0j, sweep))
    z = segs[-1].end
    if abs(z - path.start) > 1e-12 * abs(path.start):
        segs.append(Segment(z, path.start))
    segs = segs + list(path.segments)
    full = OrientedPath(tuple(segs), endpoint_turning=(True, False))
    # carry the branch backwards from the anchor value
    rev = full.reversed()
    root_x = continue_branch(graph.characteristic, path, graph.sqrt_far(path.start),
                             graph.turning_points).final
    br = continue_branch(graph.characteristic, rev, root_x, graph.turning_points)
    return -action(br).value


def xi_of(graph: StokesGraph, k: int, x: complex, path: OrientedPath | None = None) -> complex:
    """Moving Borel singularity xi(x) = -sigma_k W_k(x) for sector ``k``."""
    return -graph.sector(k).signature * attached_action(graph, k, x, path)


# ---------------------------------------------------------------------------
# summability


def singularity_track(graph: StokesGraph, k: int, x: complex, path: OrientedPath | None = None):
    """Continuous argument of exp(i phase) xi(y) as y runs along the canonical path to ``x``.

    xi(y) is the moving Borel singularity of sector ``k``; it starts near
    the positive real direction at the sector's infinity.  The argument
    is returned unwrapped, one entry per branch sample of the path.
    """
    x = complex(x)
    if path is None:
        path = canonical_path(graph, k, x)
        if path is None:
            raise CanonicityError(f"no canonical path from sector {k} to {x}")
    sigma = graph.sector(k).signature
    br = continue_branch(graph.characteristic, path, graph.sqrt_far(path.start), graph.turning_points)
    pts, vals = [], []
    for seg, ts, vs in zip(path.segments, br.seg_params, br.seg_values):
        pts.append(seg.point(np.asarray(ts)))
        vals.append(np.asarray(vs))
    y = np.concatenate(pts)
    r = np.concatenate(vals)
    # trapezoid action from the path start; only its shape matters here
    W = np.concatenate([[0j], np.cumsum(0.5 * (r[1:] + r[:-1]) * np.diff(y))])
    xi_end = xi_of(graph, k, x, path)
    xi = xi_end + sigma * (W[-1] - W)
    return np.unwrap(np.angle(xi * np.exp(1j * graph.phase)))


def summation_ray(graph: StokesGraph, k: int, x: complex, path: OrientedPath | None = None,
                  margin: float = 0.1):
    """Laplace ray angle that returns sector ``k``'s chi-factor at ``x``, or None.

    The ray s = -t exp(i gamma) must not have been crossed by the moving
    singularity on its way from the sector's infinity to ``x``, and must
    keep the Laplace integral convergent (tilt below pi/2 from the
    default ray).  The default ray is returned whenever it qualifies with
    ``margin`` radians to spare; otherwise the middle of the admissible
    tilt range, which keeps the ray as far as possible from the moving
    singularity and from the edge of convergence.
    """
    alpha = singularity_track(graph, k, x, path)
    lo = max(float(np.max(alpha)) - np.pi, -np.pi / 2) + margin
    hi = min(float(np.min(alpha)) + np.pi, np.pi / 2) - margin
    if lo > hi:
        return None
    delta = 0.0 if lo <= 0.0 <= hi else 0.5 * (lo + hi)
    return -graph.phase + delta


def summable_set(graph: StokesGraph, x0: complex, margin: float = 0.1) -> list:
    """Sectors whose fundamental chi-factors are Borel summable at ``x0``.

    A sector qualifies when a canonical path reaches ``x0`` and some
    Laplace ray (a standard path in the Borel plane) within pi/2 of the
    default one is not crossed by the moving singularity along that path;
    see :func:`summation_ray`.

    Returns
    -------
    list of (index, signature) pairs.
    """
    x0 = complex(x0)
    cls = classify_point(graph, x0)
    out = []
    for sec in graph.sectors:
        path = canonical_path(graph, sec.index, x0)
        if path is None:
            continue
        if summation_ray(graph, sec.index, x0, path, margin) is None:
            continue
        out.append((sec.index, sec.signature))
    if not out:
        raise NumericError(f"empty summable set at x0 = {x0} ({cls.kind}); internal fault")
    return out
