"""Oriented contours in the x-plane with a continuously tracked branch of sqrt(q).

A path is a chain of straight segments and circular arcs.  The branch of
``sqrt(q)`` is carried along it by nearest-value continuation on samples
dense enough that the argument of ``sqrt(q)`` never jumps by more than a
small angle between neighbours.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import quadrature
from .errors import InputError, StepCollapseError, ToleranceNotMetError
from .potential import Characteristic

QUAD_TOL = 1e-12
# long legs out to the sector anchors carry large actions; their error is relative
REL_TOL = 1e-14
MONO_TOL = 1e-9


def default_exclusion_radius(turning_points) -> float:
    return 1e-3 * (turning_points.diameter() + 1.0)


@dataclass(frozen=True)
class Segment:
    start: complex
    end: complex
    kind: str = "line"
    center: complex = 0j
    sweep: float = 0.0

    def point(self, t):
        t = np.asarray(t, dtype=float)
        if self.kind == "line":
            return self.start + (self.end - self.start) * t
        r0 = self.start - self.center
        return self.center + r0 * np.exp(1j * self.sweep * t)

    def tangent(self, t):
        t = np.asarray(t, dtype=float)
        if self.kind == "line":
            return np.full(t.shape, self.end - self.start, dtype=complex)
        r0 = self.start - self.center
        return 1j * self.sweep * r0 * np.exp(1j * self.sweep * t)

    def length(self) -> float:
        if self.kind == "line":
            return abs(self.end - self.start)
        return abs(self.sweep) * abs(self.start - self.center)

    def reversed(self) -> "Segment":
        return Segment(self.end, self.start, self.kind, self.center, -self.sweep)


@dataclass(frozen=True)
class OrientedPath:
    """Piecewise contour made of line and arc segments.

    ``from_infinity`` marks a path whose first node is an anchor standing in
    for the infinity of a sector; the implicit ray from infinity to the
    anchor runs along ``arg(nodes[0] - ray_origin)``.
    """

    segments: tuple
    exclusion_radius: float = 0.0
    endpoint_turning: tuple = (False, False)
    from_infinity: bool = False
    ray_origin: complex = 0j

    @property
    def nodes(self) -> list:
        if not self.segments:
            return []
        return [self.segments[0].start] + [s.end for s in self.segments]

    @property
    def kinds(self) -> list:
        return [s.kind for s in self.segments]

    @property
    def start(self) -> complex:
        return self.segments[0].start

    @property
    def end(self) -> complex:
        return self.segments[-1].end

    def length(self) -> float:
        return sum(s.length() for s in self.segments)

    def reversed(self) -> "OrientedPath":
        return OrientedPath(
            tuple(s.reversed() for s in reversed(self.segments)),
            self.exclusion_radius,
            self.endpoint_turning[::-1],
        )

    def then(self, other: "OrientedPath") -> "OrientedPath":
        if abs(self.end - other.start) > 1e-12 * (1 + abs(self.end)):
            raise InputError("paths do not join")
        return OrientedPath(
            self.segments + other.segments,
            max(self.exclusion_radius, other.exclusion_radius),
            (self.endpoint_turning[0], other.endpoint_turning[1]),
            self.from_infinity,
            self.ray_origin,
        )

    def to_json(self) -> dict:
        out = {
            "nodes": [[z.real, z.imag] for z in self.nodes],
            "kinds": self.kinds,
        }
        if any(k == "arc" for k in self.kinds):
            out["centers"] = [[s.center.real, s.center.imag] for s in self.segments]
            out["sweeps"] = [s.sweep for s in self.segments]
        return out

    @classmethod
    def from_json(cls, obj) -> "OrientedPath":
        nodes = [complex(a, b) for a, b in obj["nodes"]]
        kinds = obj.get("kinds", ["line"] * (len(nodes) - 1))
        centers = [complex(a, b) for a, b in obj.get("centers", [[0, 0]] * len(kinds))]
        sweeps = obj.get("sweeps", [0.0] * len(kinds))
        segs = []
        for i, kind in enumerate(kinds):
            a, b = nodes[i], nodes[i + 1]
            if kind == "arc":
                segs.append(Segment(a, b, "arc", centers[i], float(sweeps[i])))
            elif kind == "line":
                segs.append(Segment(a, b))
            else:
                raise InputError(f"unknown segment kind {kind!r}")
        return cls(tuple(segs))

    def validate(self, turning_points=None):
        for s in self.segments:
            if s.kind == "line" and s.start == s.end:
                raise InputError("consecutive nodes must be distinct")
        if turning_points is None or self.exclusion_radius <= 0:
            return
        tps = turning_points.locations
        for i, s in enumerate(self.segments):
            t = np.linspace(0, 1, 201)
            z = s.point(t)
            d = np.min(np.abs(z[:, None] - tps[None, :]), axis=1)
            mask = np.ones_like(t, dtype=bool)
            # endpoints flagged as turning points are allowed to touch
            if i == 0 and self.endpoint_turning[0]:
                mask &= np.abs(z - s.start) > 2 * self.exclusion_radius
            if i == len(self.segments) - 1 and self.endpoint_turning[1]:
                mask &= np.abs(z - s.end) > 2 * self.exclusion_radius
            if np.any(d[mask] < self.exclusion_radius):
                raise InputError("path passes within the exclusion radius of a turning point")


def line_path(*points, exclusion_radius=0.0, endpoint_turning=(False, False)) -> OrientedPath:
    pts = [complex(p) for p in points]
    segs = tuple(Segment(a, b) for a, b in zip(pts[:-1], pts[1:]))
    return OrientedPath(segs, exclusion_radius, endpoint_turning)


def arc_segment(start: complex, center: complex, sweep: float) -> Segment:
    end = center + (start - center) * np.exp(1j * sweep)
    return Segment(complex(start), complex(end), "arc", complex(center), float(sweep))


def circle_path(center: complex, radius: float, turns: int = 1, start_angle: float = 0.0) -> OrientedPath:
    """Closed anticlockwise loop, split into quarter arcs."""
    start = center + radius * np.exp(1j * start_angle)
    segs = []
    z = start
    for _ in range(4 * turns):
        seg = arc_segment(z, center, np.pi / 2)
        segs.append(seg)
        z = seg.end
    return OrientedPath(tuple(segs))


def enclosing_contour(turning_points, odd_degree: bool | None = None, margin: float = 1.0) -> OrientedPath:
    """Contour encircling all turning points (twice for odd degree)."""
    z = turning_points.locations
    c = complex(np.mean(z))
    r = float(np.max(np.abs(z - c))) + margin
    n = sum(p.multiplicity for p in turning_points)
    if odd_degree is None:
        odd_degree = n % 2 == 1
    return circle_path(c, r, turns=2 if odd_degree else 1)


# ---------------------------------------------------------------------------
# branch continuation


@dataclass(frozen=True)
class BranchedRoot:
    """A path together with a continuous branch of sqrt(q) sampled on it."""

    q: Characteristic
    path: OrientedPath
    seg_params: tuple  # per segment: array of t samples
    seg_values: tuple  # per segment: array of sqrt(q) samples
    turning: np.ndarray = field(default=None)

    @property
    def samples(self) -> list:
        out = []
        for seg, ts, vs in zip(self.path.segments, self.seg_params, self.seg_values):
            for t, v in zip(ts, vs):
                out.append({"x": complex(seg.point(t)), "sqrt_q": complex(v)})
        return out

    @property
    def initial(self) -> complex:
        return complex(self.seg_values[0][0])

    @property
    def final(self) -> complex:
        return complex(self.seg_values[-1][-1])

    def sqrt_on_segment(self, i: int, t) -> np.ndarray:
        """Branch values at parameters ``t`` of segment ``i``."""
        seg = self.path.segments[i]
        t = np.asarray(t, dtype=float)
        ts = self.seg_params[i]
        vs = self.seg_values[i]
        x = seg.point(t)
        s = np.sqrt(self.q(x).astype(complex))
        idx = np.clip(np.searchsorted(ts, t), 0, len(ts) - 1)
        idx_lo = np.clip(idx - 1, 0, len(ts) - 1)
        pick = np.where(np.abs(ts[idx_lo] - t) < np.abs(ts[idx] - t), idx_lo, idx)
        ref = vs[pick]
        return np.where(np.abs(s - ref) <= np.abs(s + ref), s, -s)

    def sqrt_at_end(self) -> complex:
        return self.final


def _next_sqrt(qv, prev):
    s = np.sqrt(complex(qv))
    return s if abs(s - prev) <= abs(s + prev) else -s


def continue_branch(q: Characteristic, path: OrientedPath, initial: complex,
                    turning_points=None, max_samples: int = 200000) -> BranchedRoot:
    """Continue ``sqrt(q)`` along ``path`` starting from ``initial``.

    Step sizes adapt to the distance to the nearest turning point so that the
    argument of ``sqrt(q)`` changes by well under pi/2 between samples.

    Raises
    ------
    StepCollapseError
        When the refinement cannot keep argument jumps below pi/2, which
        signals a turning point touching the path.
    """
    initial = complex(initial)
    desc = [complex(v) for v in q.coeffs[::-1]]

    def qeval(z):
        # plain Horner: only the sign of sqrt(q) is tracked here
        acc = 0j
        for a in desc:
            acc = acc * z + a
        return acc

    q0 = complex(q(path.start))
    if path.endpoint_turning[0]:
        # at a turning point sqrt(q) vanishes; ``initial`` then only fixes the
        # sign by pointing along the branch value just off the start
        if initial == 0:
            raise InputError("a reference value is needed when starting at a turning point")
    elif abs(initial**2 - q0) > 1e-10 * max(1.0, abs(q0)):
        raise InputError("initial value is not a square root of q at the path start")
    if turning_points is None:
        from .potential import turning_points as _tp
        turning_points = _tp(q)
    tps = turning_points.locations
    excl = path.exclusion_radius or default_exclusion_radius(turning_points)
    n_seg = len(path.segments)
    params, values = [], []
    prev = initial
    total = 0
    for i, seg in enumerate(path.segments):
        ts = [0.0]
        vs = [prev]
        t = 0.0
        L = seg.length()
        end_is_tp = i == n_seg - 1 and path.endpoint_turning[1]
        start_is_tp = i == 0 and path.endpoint_turning[0]
        while t < 1.0:
            x = complex(seg.point(t))
            d = float(np.min(np.abs(tps - x))) if tps.size else np.inf
            dt = 1.0 if L == 0 else min(1.0 - t, 0.1 * max(d, 1e-300) / L)
            if (end_is_tp or start_is_tp) and d < excl:
                # near a flagged turning-point endpoint: take fixed small steps
                dt = min(1.0 - t, max(dt, 0.25 * excl / max(L, 1e-300)))
            elif dt * L < 1e-3 * excl and dt < 1.0 - t:
                raise StepCollapseError(
                    f"branch continuation stalled at x = {x:.6g} (distance {d:.3g})")
            tn = min(1.0, t + dt)
            xn = complex(seg.point(tn))
            qn = qeval(xn)
            if qn == 0:
                if tn == 1.0 and end_is_tp:
                    sn = vs[-1]
                else:
                    raise StepCollapseError(f"path hits a turning point at {xn}")
            else:
                sn = _next_sqrt(qn, vs[-1])
                if vs[-1] != 0 and abs(np.angle(sn / vs[-1])) >= np.pi / 2:
                    if dt * L < 1e-3 * excl and not (end_is_tp or start_is_tp):
                        raise StepCollapseError("argument jump could not be resolved")
            ts.append(tn)
            vs.append(sn)
            t = tn
            total += 1
            if total > max_samples:
                raise StepCollapseError("too many samples in branch continuation")
        params.append(np.array(ts))
        values.append(np.array(vs, dtype=complex))
        prev = vs[-1]
    return BranchedRoot(q, path, tuple(params), tuple(values))


# ---------------------------------------------------------------------------
# actions


@dataclass(frozen=True)
class ActionValue:
    value: complex
    start: complex
    end: complex
    error: float
    branch: BranchedRoot = field(repr=False, default=None)


def _segment_action(br: BranchedRoot, i: int, tp_start: bool, tp_end: bool, tol: float):
    seg = br.path.segments[i]

    def f(t):
        return br.sqrt_on_segment(i, t) * seg.tangent(t)

    if tp_start and tp_end:
        v1, e1 = _segment_action_sub(br, i, 0.0, 0.5, True, False, tol)
        v2, e2 = _segment_action_sub(br, i, 0.5, 1.0, False, True, tol)
        return v1 + v2, e1 + e2
    if tp_start or tp_end:
        return _segment_action_sub(br, i, 0.0, 1.0, tp_start, tp_end, tol)
    return quadrature.integrate(f, 0.0, 1.0, abs_tol=tol, rel_tol=REL_TOL)


def _segment_action_sub(br, i, a, b, tp_a, tp_b, tol):
    seg = br.path.segments[i]
    w = b - a
    if tp_a:
        # t = a + w u^2 removes the square-root endpoint singularity
        def g(u):
            t = a + w * u * u
            return br.sqrt_on_segment(i, t) * seg.tangent(t) * 2 * w * u
    else:
        def g(u):
            t = b - w * u * u
            return br.sqrt_on_segment(i, t) * seg.tangent(t) * 2 * w * u
    val, err = quadrature.integrate(g, 0.0, 1.0, abs_tol=tol, rel_tol=REL_TOL)
    return val, err


def action(branched: BranchedRoot, start: complex | None = None, end: complex | None = None,
           quad_tol: float = QUAD_TOL) -> ActionValue:
    """Integral of sqrt(q) dx along the branched path between two nodes.

    ``start`` and ``end`` default to the path ends and must be nodes.
    Endpoints flagged as simple turning points get the substitution
    t = u^2 that makes the integrand smooth.
    """
    nodes = branched.path.nodes
    i0 = 0 if start is None else _node_index(nodes, start)
    i1 = len(nodes) - 1 if end is None else _node_index(nodes, end)
    sign = 1.0
    if i1 < i0:
        i0, i1 = i1, i0
        sign = -1.0
    total, err, mag = 0j, 0.0, 0.0
    n_seg = len(branched.path.segments)
    tp_s = tp_e = False
    for i in range(i0, i1):
        tp_s = i == 0 and branched.path.endpoint_turning[0]
        tp_e = i == n_seg - 1 and branched.path.endpoint_turning[1]
        v, e = _segment_action(branched, i, tp_s, tp_e, quad_tol / max(1, i1 - i0))
        total += v
        err += e
        mag += abs(v)
    if err > max(quad_tol, 10 * REL_TOL * mag):
        raise ToleranceNotMetError("action quadrature", err)
    return ActionValue(sign * total, nodes[i0] if sign > 0 else nodes[i1],
                       nodes[i1] if sign > 0 else nodes[i0], err, branched)


def _node_index(nodes, z):
    d = [abs(n - z) for n in nodes]
    k = int(np.argmin(d))
    if d[k] > 1e-12 * (1 + abs(z)):
        raise InputError("action endpoints must be nodes of the path")
    return k


def cumulative_action(branched: BranchedRoot, quad_tol: float = QUAD_TOL) -> list:
    """Action from the path start to every node."""
    out = [0j]
    acc = 0j
    n_seg = len(branched.path.segments)
    for i in range(n_seg):
        tp_s = i == 0 and branched.path.endpoint_turning[0]
        tp_e = i == n_seg - 1 and branched.path.endpoint_turning[1]
        v, _ = _segment_action(branched, i, tp_s, tp_e, quad_tol / n_seg)
        acc += v
        out.append(acc)
    return out


def xi_value(sigma: int, action_from_tp: complex, arg_lambda: float = 0.0) -> complex:
    """xi = -sigma W, with W measured from the sector's turning point."""
    return -sigma * action_from_tp


# ---------------------------------------------------------------------------
# canonicity


@dataclass(frozen=True)
class CanonicityResult:
    ok: bool
    violation_arclength: float | None = None
    violation_point: complex | None = None

    def __bool__(self):
        return self.ok


def is_canonical(branched: BranchedRoot, sigma: int, arg_lambda: float = 0.0,
                 mono_tol: float = MONO_TOL, samples_per_segment: int = 400) -> CanonicityResult:
    """Check that sigma * Re(e^{i arg_lambda} W) never decreases along the path.

    The path runs from the sector side towards the evaluation point, so the
    pairwise ordering condition on nested integration variables is
    equivalent to the pointwise sign of the directional derivative.
    """
    phase = np.exp(1j * arg_lambda)
    s_acc = 0.0
    for i, seg in enumerate(branched.path.segments):
        t = np.linspace(0.0, 1.0, samples_per_segment)
        root = branched.sqrt_on_segment(i, t)
        tan = seg.tangent(t)
        rate = sigma * (phase * root * tan).real
        scale = np.abs(root * tan)
        bad = np.nonzero(rate < -mono_tol * np.maximum(scale, 1e-300))[0]
        if bad.size:
            k = bad[0]
            return CanonicityResult(False, s_acc + seg.length() * t[k], complex(seg.point(t[k])))
        s_acc += seg.length()
    return CanonicityResult(True)
