"""Direct numerical solutions used as ground truth.

The chi-factor of a WKB solution psi = q^{-1/4} exp(sigma lam W) chi obeys

    u (u chi)'' + 2 sigma lam chi' = 0,     u = q^{-1/4},

for psi'' = lam^2 q psi.  As a first-order system in (chi, chi') this reads

    chi'' = -2 sigma lam sqrt(q) chi' + q'/(2q) chi' + (q''/(4q) - 5 q'^2/(16 q^2)) chi.

Along a canonical path the fast mode chi' ~ exp(-2 sigma lam W) decays, so
an explicit integrator is stable in the direction of travel.
"""
from __future__ import annotations

import bisect
import cmath
import logging
import math
from dataclasses import dataclass, field

import numpy as np
from scipy.integrate import solve_ivp
from scipy.optimize import brentq

from . import borel as _borel
from . import series as _series
from .errors import (BracketExhaustedError, PoleOnRayError, CanonicityError, IllConditionedError, InputError,
                     NumericError, StiffnessError)
from .path import OrientedPath, Segment, continue_branch, line_path
from .potential import Polynomial, characteristic, turning_points as _turning_points

log = logging.getLogger(__name__)

ODE_TOL = 1e-10
ANCHOR_SCALE = 60.0
LAMBDA_MAX = 100.0


@dataclass
class ChiSample:
    x: complex
    chi: complex
    chi_prime: complex
    sigma: int
    lam: complex
    path: OrientedPath | None = field(default=None, repr=False)

    def to_json(self) -> dict:
        return {"x": [self.x.real, self.x.imag], "chi": [self.chi.real, self.chi.imag],
                "chi_prime": [self.chi_prime.real, self.chi_prime.imag], "sigma": self.sigma}


class _Coeffs:
    """q, q', q'' on Python complex scalars."""

    def __init__(self, q):
        c = [complex(v) for v in q.coeffs]
        self.c0 = c[::-1]
        d1 = [k * c[k] for k in range(1, len(c))] or [0j]
        self.c1 = d1[::-1]
        d2 = [k * d1[k] for k in range(1, len(d1))] or [0j]
        self.c2 = d2[::-1]

    @staticmethod
    def _h(desc, x):
        acc = 0j
        for a in desc:
            acc = acc * x + a
        return acc

    def all(self, x):
        return self._h(self.c0, x), self._h(self.c1, x), self._h(self.c2, x)


def _rhs_factory(coef: _Coeffs, sigma: int, lam: complex, seg: Segment, root_of_t):
    two_sl = 2.0 * sigma * lam
    line = seg.kind == "line"
    a, d = seg.start, seg.end - seg.start
    c, r0, sw = seg.center, seg.start - seg.center, seg.sweep

    def rhs(t, y):
        if line:
            x, dx = a + d * t, d
        else:
            e = cmath.exp(1j * sw * t)
            x, dx = c + r0 * e, 1j * sw * r0 * e
        qv, q1, q2 = coef.all(x)
        s = root_of_t(t, qv)
        chi, chip = y[0], y[1]
        chipp = (-two_sl * s + q1 / (2.0 * qv)) * chip + (q2 / (4.0 * qv) - 5.0 * q1 * q1 / (16.0 * qv * qv)) * chi
        return np.array([chip * dx, chipp * dx])

    return rhs


def solve_chi(q, sigma: int, lam: complex, path: OrientedPath, init, sqrt_start: complex,
              turning_points=None, rtol: float = ODE_TOL, atol: float = 1e-14,
              branch=None) -> list:
    """Integrate the chi-ODE along ``path`` from ``init = (chi, chi')`` at its start.

    Returns one ChiSample per path node (the start included).  The branch of
    sqrt(q) is continued from ``sqrt_start``.

    Raises
    ------
    StiffnessError
        When |lam| exceeds the supported range or the integrator's step
        underflows; the message names the arc position reached.
    """
    lam = complex(lam)
    if abs(lam) > LAMBDA_MAX:
        raise StiffnessError(f"|lambda| = {abs(lam):.3g} exceeds the supported {LAMBDA_MAX}")
    if turning_points is None:
        turning_points = _turning_points(q)
    br = branch if branch is not None else continue_branch(q, path, sqrt_start, turning_points)
    coef = _Coeffs(q)
    y = np.array([complex(init[0]), complex(init[1])])
    out = [ChiSample(complex(path.start), y[0], y[1], sigma, lam, path)]
    arc = 0.0
    for i, seg in enumerate(path.segments):
        ts = [float(v) for v in br.seg_params[i]]
        vs = [complex(v) for v in br.seg_values[i]]

        def root_of_t(t, qv, ts=ts, vs=vs):
            j = bisect.bisect_left(ts, t)
            if j == len(ts) or (j > 0 and t - ts[j - 1] < ts[j] - t):
                j -= 1
            r = cmath.sqrt(qv)
            ref = vs[j]
            return r if abs(r - ref) <= abs(r + ref) else -r

        rhs = _rhs_factory(coef, sigma, lam, seg, root_of_t)
        sol = solve_ivp(rhs, (0.0, 1.0), y, method="DOP853", rtol=rtol, atol=atol)
        if sol.status != 0:
            raise StiffnessError(f"chi integration failed at arc length {arc:.6g}: {sol.message}")
        y = sol.y[:, -1]
        arc += seg.length()
        out.append(ChiSample(complex(seg.end), complex(y[0]), complex(y[1]), sigma, lam, path))
    return out


def chi_residual(q, sigma, lam, x, chi_fn, h: float = 1e-2, sqrt_q=None) -> float:
    """Relative residual of the chi-ODE for a function sampled on a 5-point stencil.

    ``chi_fn`` maps an array of points to chi values; derivatives are
    central differences of fourth order along the real direction.
    """
    x = complex(x)
    pts = x + h * np.arange(-2, 3)
    v = np.asarray(chi_fn(pts), dtype=complex)
    d1 = (v[0] - 8 * v[1] + 8 * v[3] - v[4]) / (12 * h)
    d2 = (-v[0] + 16 * v[1] - 30 * v[2] + 16 * v[3] - v[4]) / (12 * h * h)
    qv, q1, q2 = _Coeffs(q).all(x)
    s = np.sqrt(qv) if sqrt_q is None else sqrt_q
    terms = [d2, (-2.0 * sigma * lam * s + q1 / (2 * qv)) * d1,
             (q2 / (4 * qv) - 5 * q1 * q1 / (16 * qv * qv)) * v[2]]
    res = terms[0] - terms[1] - terms[2]
    return float(abs(res) / max(sum(abs(t) for t in terms), 1e-300))


# ---------------------------------------------------------------------------
# fundamental solutions


def _split(path: OrientedPath, i: int, t: float):
    """Cut ``path`` at parameter ``t`` of segment ``i``; returns (prefix, suffix)."""
    seg = path.segments[i]
    # avoid slivers shorter than the branch tracker's minimum step
    L = seg.length()
    tiny = 1e-3 * (1.0 + abs(seg.start))
    if t * L < tiny and i > 0:
        t = 0.0
    elif (1.0 - t) * L < tiny:
        t = 1.0
    p = complex(seg.point(t))
    if seg.kind == "line":
        first, second = Segment(seg.start, p), Segment(p, seg.end)
    else:
        first = Segment(seg.start, p, "arc", seg.center, seg.sweep * t)
        second = Segment(p, seg.end, "arc", seg.center, seg.sweep * (1.0 - t))
    head = path.segments[:i] + ((first,) if t > 0 else ())
    tail = ((second,) if t < 1 else ()) + path.segments[i + 1:]
    prefix = OrientedPath(head, path.exclusion_radius, (path.endpoint_turning[0], False),
                          path.from_infinity, path.ray_origin)
    suffix = OrientedPath(tail, path.exclusion_radius, (False, path.endpoint_turning[1]))
    return prefix, suffix


def quarter_far(graph, y: complex) -> complex:
    """q^{1/4} far out, continued anticlockwise from the bisector of sector 1.

    Its square is ``graph.sqrt_far(y)``; at the sector-1 bisector it is the
    principal square root of that value.
    """
    y = complex(y)
    R = abs(y)
    cut = graph.cut_angle
    th1 = cut + (graph.sector(1).bisector - cut) % (2 * np.pi)
    thy = cut + (float(np.angle(y)) - cut) % (2 * np.pi)
    n = max(graph.characteristic.degree, 1)
    steps = int(16 * n * (1 + abs(thy - th1))) + 2
    r = cmath.sqrt(graph.sqrt_far(R * cmath.exp(1j * th1)))
    for th in np.linspace(th1, thy, steps)[1:]:
        z = R * cmath.exp(1j * th) if th != thy else y
        c = cmath.sqrt(graph.sqrt_far(z))
        r = c if abs(c - r) <= abs(c + r) else -c
    return r


def _continue_quarter(br, r0: complex) -> complex:
    r = r0
    for vals in br.seg_values:
        for s in vals:
            c = cmath.sqrt(complex(s))
            r = c if abs(c - r) <= abs(c + r) else -c
    return r


@dataclass
class FundamentalChi:
    """Value of the chi-factor of a sector solution, with what is needed for psi."""

    k: int
    x: complex
    lam: complex
    sigma: int
    chi: complex
    chi_prime: complex
    sqrt_q: complex
    quarter: complex  # q^{1/4} on the same branch, quarter**2 == sqrt_q
    xi: complex
    anchor: complex
    anchor_error: float
    path: OrientedPath = field(repr=False)

    @property
    def u(self) -> complex:
        return 1.0 / self.quarter

    def psi(self) -> complex:
        return self.u * cmath.exp(-self.lam * self.xi) * self.chi

    def psi_prime(self, q) -> complex:
        qv, q1, _ = _Coeffs(q).all(self.x)
        u = self.u
        du = -q1 / (4.0 * qv) * u
        e = cmath.exp(-self.lam * self.xi)
        return e * (du * self.chi + u * self.chi_prime + self.sigma * self.lam * self.sqrt_q * u * self.chi)

    def to_json(self) -> dict:
        return {"sector": self.k, "x": [self.x.real, self.x.imag], "lambda": [self.lam.real, self.lam.imag],
                "chi": [self.chi.real, self.chi.imag], "chi_prime": [self.chi_prime.real, self.chi_prime.imag],
                "xi": [self.xi.real, self.xi.imag], "anchor_error": self.anchor_error}


def _anchor_index(q, br, sigma, lam, xi_end, scale):
    """Sample (segment, t) nearest the end where |2 lam xi| still exceeds ``scale``."""
    xs, ss, idx = [], [], []
    for i, (ts, vs) in enumerate(zip(br.seg_params, br.seg_values)):
        seg = br.path.segments[i]
        for t, v in zip(ts, vs):
            xs.append(complex(seg.point(t)))
            ss.append(complex(v))
            idx.append((i, float(t)))
    xs, ss = np.array(xs), np.array(ss)
    W = np.concatenate([[0j], np.cumsum(0.5 * (ss[1:] + ss[:-1]) * np.diff(xs))])
    xi = xi_end + sigma * (W[-1] - W)
    big = np.nonzero(np.abs(2 * lam * xi) >= scale)[0]
    j = int(big[-1]) if big.size else 0
    j = max(j, 1)
    if j >= len(idx) - 1:
        j = len(idx) - 2
    return idx[j]


def fundamental_chi(graph, k: int, x: complex, lam: complex, path: OrientedPath | None = None,
                    N: int = 16, anchor_scale: float = ANCHOR_SCALE) -> FundamentalChi:
    """Chi-factor of the solution recessive in sector ``k``, evaluated at ``x``.

    The chi-ODE is started at the point of the canonical path closest to
    ``x`` where |2 lam xi| is still at least ``max(anchor_scale, 1.5 |2 lam xi(x)|)``;
    the initial data there are the optimally truncated asymptotic series.

    Raises
    ------
    CanonicityError
        If no canonical path from sector ``k`` reaches ``x``.
    """
    from .stokes import canonical_path, sector_path_check, xi_of
    x = complex(x)
    lam = complex(lam)
    q = graph.characteristic
    tps = graph.turning_points
    if path is None:
        path = canonical_path(graph, k, x)
        if path is None:
            raise CanonicityError(f"no canonical path from sector {k} to x = {x}")
    else:
        sector_path_check(graph, k, path)
    sec = graph.sector(k)
    sigma = sec.signature
    root0 = graph.sqrt_far(path.start)
    br = continue_branch(q, path, root0, tps)
    xi = complex(xi_of(graph, k, x, path))
    scale = max(anchor_scale, 1.5 * abs(2 * lam * xi))
    i, t = _anchor_index(q, br, sigma, lam, xi, scale)
    prefix, suffix = _split(path, i, t)
    ser = _series.chi_series_on_path(q, prefix, root0, sigma, N, tps, anchor=k)
    tt = ser.t(lam)
    terms = ser.coeffs * tt ** np.arange(ser.order + 1)
    mags = np.abs(terms)
    m = int(np.argmin(mags[1:]) + 1)
    chi0 = complex(np.sum(terms[:m]))
    dchi0 = complex(np.sum(ser.deriv[:m] * tt ** np.arange(m)))
    a_err = float(mags[m])
    sqrt_p = complex(br.sqrt_on_segment(i, t))
    if suffix.segments:
        samples = solve_chi(q, sigma, lam, suffix, (chi0, dchi0), sqrt_p, tps)
        chi, dchi = samples[-1].chi, samples[-1].chi_prime
    else:
        chi, dchi = chi0, dchi0
    quarter = _continue_quarter(br, quarter_far(graph, path.start))
    return FundamentalChi(k, x, lam, sigma, chi, dchi, br.final, quarter, xi, complex(prefix.end),
                          a_err, path)


def wronskian(q, f: FundamentalChi, g: FundamentalChi) -> complex:
    return f.psi() * g.psi_prime(q) - f.psi_prime(q) * g.psi()


def chi_transition(graph, a: int, b: int, lam: complex, x: complex) -> complex:
    """chi_{a->b} from the Wronskian of psi_a and psi_b evaluated at ``x``.

    Far inside sector b, psi_a is dominant and psi_b recessive, so
    W(psi_a, psi_b) = 2 sigma_b lam (u_a / u_b) exp(-lam (xi_a + xi_b)) chi_{a->b};
    both sides are constant in x.
    """
    q = graph.characteristic
    fa = fundamental_chi(graph, a, x, lam)
    fb = fundamental_chi(graph, b, x, lam)
    if not _branches_opposed(fa, fb):
        raise InputError(f"at x = {x} the branches reaching sectors {a} and {b} are not opposed; "
                         "pick a point joined to both without crossing their separating cut")
    return _transition_from(q, fa, fb)


def _branches_opposed(fa: FundamentalChi, fb: FundamentalChi) -> bool:
    # the asymptotic form holds where sigma_a sqrt(q)_a = -sigma_b sqrt(q)_b
    return abs(fa.sigma * fa.sqrt_q + fb.sigma * fb.sqrt_q) < 1e-8 * abs(fa.sqrt_q)


def _transition_from(q, fa: FundamentalChi, fb: FundamentalChi) -> complex:
    w = wronskian(q, fa, fb)
    return complex(w / (2.0 * fb.sigma * fa.lam * (fa.u / fb.u) * cmath.exp(-fa.lam * (fa.xi + fb.xi))))


def chi_transition_limit(graph, a: int, b: int, lam: complex, radius: float | None = None,
                         N: int = 16) -> complex:
    """chi_{a->b} as the limit of chi_a far inside sector b.

    Out there chi_a equals chi_{a->b} times the formal solution normalised
    at the infinity of sector b, written with the signature that matches
    chi_a's branch.
    """
    from .stokes import canonical_path
    R = radius if radius is not None else 0.5 * graph.R_infinity
    sec_b = graph.sector(b)
    x = R * cmath.exp(1j * sec_b.bisector)
    fa = fundamental_chi(graph, a, x, lam, N=N)
    pb = canonical_path(graph, b, x)
    if pb is None:
        raise CanonicityError(f"no canonical path from sector {b} to {x}")
    ser = _series.chi_series_on_path(graph.characteristic, pb, graph.sqrt_far(pb.start), sec_b.signature,
                                     N, graph.turning_points, anchor=b)
    # the series depends on sigma * sqrt(q) only
    sb = continue_branch(graph.characteristic, pb, graph.sqrt_far(pb.start), graph.turning_points).final
    eff = int(round((fa.sigma * fa.sqrt_q / sb).real))
    f, _ = _series.AsymptoticSeries(eff, ser.coeffs).optimal_value(lam)
    return complex(fa.chi / f)


# ---------------------------------------------------------------------------
# base pair and connection


def base_pair(q, x0: complex, sigma: int, lam: complex, path: OrientedPath | None = None,
              sqrt_x0: complex | None = None, x: complex | None = None):
    """Solutions with chi(x0) = 1, chi'(x0) = 0 and chi(x0) = 0, chi'(x0) = 1."""
    x0 = complex(x0)
    if path is None:
        if x is None:
            raise InputError("base_pair needs a path or an end point")
        path = line_path(x0, x)
    if sqrt_x0 is None:
        sqrt_x0 = cmath.sqrt(complex(q(x0)))
    tps = _turning_points(q)
    br = continue_branch(q, path, sqrt_x0, tps)
    one = solve_chi(q, sigma, lam, path, (1.0, 0.0), sqrt_x0, tps, branch=br)
    two = solve_chi(q, sigma, lam, path, (0.0, 1.0), sqrt_x0, tps, branch=br)
    return one, two


@dataclass
class ConnectionData:
    alpha: complex
    beta: complex
    basis: tuple
    source: int
    lam: complex
    residual: float
    condition: float
    chi_ab: complex
    chi_ab_spread: float
    probes: list = field(default_factory=list, repr=False)

    def to_json(self) -> dict:
        return {"source": self.source, "basis": list(self.basis),
                "lambda": [self.lam.real, self.lam.imag],
                "alpha": [self.alpha.real, self.alpha.imag], "beta": [self.beta.real, self.beta.imag],
                "residual": self.residual, "condition": self.condition,
                "chi_ab": [self.chi_ab.real, self.chi_ab.imag], "chi_ab_spread": self.chi_ab_spread,
                "probes": [[p.real, p.imag] for p in self.probes]}


def default_probes(graph, a: int, lam: complex, count: int = 8) -> list:
    """Points around the turning point attached to sector ``a``.

    The radius keeps |lam xi| near 1.5 so both exponentials stay moderate.
    """
    tps = graph.turning_points.locations
    i = graph.sector(a).attached_turning_point
    c = complex(tps[i])
    q = graph.characteristic
    dq = abs(complex(q.d1(c))) or 1.0
    rho = (2.25 / (abs(lam) * math.sqrt(dq))) ** (2.0 / 3.0)
    others = np.delete(tps, i)
    if others.size:
        rho = min(rho, 0.4 * float(np.min(np.abs(others - c))))
    return [c + rho * cmath.exp(1j * (2 * np.pi * j / count + np.pi / count)) for j in range(count)]


def connection(graph, source: int, basis: tuple, lam: complex, probes=None,
               cond_max: float = 1e8) -> ConnectionData:
    """Fit psi_source = alpha psi_a + beta psi_b over a probe set.

    Each probe contributes the value and the derivative; probes that a
    canonical path from one of the three sectors cannot reach are
    dropped.

    Raises
    ------
    IllConditionedError
        If the normalised Gram matrix has condition number above ``cond_max``
        or fewer than two probes remain.
    """
    a, b = basis
    lam = complex(lam)
    q = graph.characteristic
    if probes is None:
        probes = default_probes(graph, a, lam)
    rows, rhs, used, chis = [], [], [], []
    for p in probes:
        try:
            fs = fundamental_chi(graph, source, p, lam)
            fa = fundamental_chi(graph, a, p, lam)
            fb = fundamental_chi(graph, b, p, lam)
        except CanonicityError:
            continue
        ps = np.array([fs.psi(), fs.psi_prime(q) / lam])
        pa = np.array([fa.psi(), fa.psi_prime(q) / lam])
        pb = np.array([fb.psi(), fb.psi_prime(q) / lam])
        rows += [[pa[0], pb[0]], [pa[1], pb[1]]]
        rhs += [ps[0], ps[1]]
        used.append(complex(p))
        if _branches_opposed(fa, fb):
            chis.append(_transition_from(q, fa, fb))
    if len(used) < 2:
        raise IllConditionedError("fewer than two usable probes for the connection fit")
    A = np.array(rows)
    y = np.array(rhs)
    colscale = np.linalg.norm(A, axis=0)
    An = A / colscale
    cond = float(np.linalg.cond(An))
    if cond > cond_max:
        raise IllConditionedError(f"probe Gram condition {cond:.3e} exceeds {cond_max:.1e}")
    sol, *_ = np.linalg.lstsq(An, y, rcond=None)
    sol = sol / colscale
    res = float(np.linalg.norm(A @ sol - y) / np.linalg.norm(y))
    if chis:
        chis = np.array(chis)
        chi_ab = complex(np.median(chis.real) + 1j * np.median(chis.imag))
        spread = float(np.max(np.abs(chis - chi_ab)) / abs(chi_ab))
    else:
        chi_ab, spread = complex("nan"), float("nan")
    return ConnectionData(complex(sol[0]), complex(sol[1]), (a, b), source, lam, res, cond, chi_ab,
                          spread, used)


# ---------------------------------------------------------------------------
# eigenvalues


@dataclass
class EigenResult:
    E: complex
    wronskian_residual: float
    index_hint: int

    def to_json(self) -> dict:
        return {"E": [self.E.real, self.E.imag], "wronskian_residual": self.wronskian_residual,
                "index_hint": self.index_hint}


def _check_confining(V: Polynomial):
    c = V.coeffs
    if np.max(np.abs(c.imag)) > 0:
        raise InputError("eigenvalue search needs a real potential")
    if V.degree < 2 or V.degree % 2 or c[-1].real <= 0:
        raise InputError("eigenvalue search needs a potential confining on the real axis")


class _WronskianFunction:
    """E -> normalised Wronskian of the solutions decaying at real +inf and -inf."""

    def __init__(self, V: Polynomial, lam: float):
        from .stokes import build_graph
        self.V, self.lam = V, float(lam)
        self._build = build_graph

    def __call__(self, E: complex) -> complex:
        from .stokes import canonical_path
        q = characteristic(self.V, E)
        g = self._build(q, 0.0)
        kr = g.sector_of_angle(0.0).index
        kl = g.sector_of_angle(np.pi).index
        sc = g.scale
        for xm in (0.3j * sc, -0.3j * sc, 0.1j * sc, 0.7j * sc, 0.0):
            pr, pl = canonical_path(g, kr, xm), canonical_path(g, kl, xm)
            if pr is not None and pl is not None:
                break
        else:
            raise CanonicityError(f"no common matching point for E = {E}")
        fr = fundamental_chi(g, kr, xm, self.lam, path=pr)
        fl = fundamental_chi(g, kl, xm, self.lam, path=pl)
        # strip the exponential normalisation so the function is smooth in E
        w = wronskian(q, fr, fl) / (fr.u * fl.u * cmath.exp(-self.lam * (fr.xi + fl.xi)))
        return complex(w / self.lam)


def _secant(f, x0, x1, tol, maxit=40):
    f0, f1 = f(x0), f(x1)
    for _ in range(maxit):
        if f1 == f0:
            break
        x2 = x1 - f1 * (x1 - x0) / (f1 - f0)
        x0, f0 = x1, f1
        x1, f1 = x2, f(x2)
        if abs(x1 - x0) < tol * max(1.0, abs(x1)):
            return x1, f1
    return x1, f1


def eigenvalues(V: Polynomial, lam: float = 1.0, E_bracket=(0.0, 10.0), count: int = 1,
                step: float | None = None, tol: float = 1e-10) -> list:
    """Lowest ``count`` eigenvalues in the bracket from zeros of the Wronskian.

    The scan looks for sign changes of the real part of the Wronskian after
    removing its constant phase; secant iteration on the complex Wronskian
    then refines each bracket.

    Raises
    ------
    BracketExhaustedError
        If fewer than ``count`` zeros are found in the bracket.
    """
    if count == 0:
        return []
    _check_confining(V)
    f = _WronskianFunction(V, lam)
    lo, hi = map(float, E_bracket)
    h = step if step is not None else min(0.25, (hi - lo) / 10)
    grid = np.arange(lo + 0.5 * h, hi + h, h)
    vals = [f(E) for E in grid]
    phase = np.angle(vals[int(np.argmax(np.abs(vals)))])
    re = [(v * np.exp(-1j * phase)).real for v in vals]
    out = []
    for j in range(len(grid) - 1):
        if re[j] == 0 or re[j] * re[j + 1] < 0:
            E, w = _secant(f, complex(grid[j]), complex(grid[j + 1]), tol)
            if abs(E.imag) < 1e-6:
                E = complex(E.real)
            out.append(EigenResult(E, float(abs(w)), len(out)))
            if len(out) == count:
                return out
    raise BracketExhaustedError(f"found {len(out)} of {count} eigenvalues in [{lo}, {hi}]")


def shooting_eigenvalues(V: Polynomial, lam: float = 1.0, E_bracket=(0.0, 10.0), count: int = 1,
                         step: float = 0.1, match: float = 0.0) -> list:
    """Independent real-axis shooting: integrate psi from both far ends inward.

    The starting points lie where lam * int sqrt(q) beyond the outermost
    turning point exceeds 30; the initial log-derivative is the decaying
    WKB one.  Zeros of the normalised matching Wronskian are bracketed and
    polished with brentq.
    """
    if count == 0:
        return []
    _check_confining(V)
    cV = V.coeffs.real

    def qf(x, E):
        return 2.0 * np.polynomial.polynomial.polyval(x, cV) - 2.0 * E

    def dqf(x):
        return 2.0 * np.polynomial.polynomial.polyval(x, np.polynomial.polynomial.polyder(cV))

    def edge(E, sign):
        x = match
        while qf(x, E) <= 0:
            x += sign * 0.1
        acc = 0.0
        while acc < 30.0 / lam:
            acc += 0.05 * math.sqrt(max(qf(x, E), 0.0))
            x += sign * 0.05
        return x

    def side(E, sign):
        X = edge(E, sign)
        s = math.sqrt(qf(X, E))
        dlog = -sign * (lam * s + dqf(X) / (4 * qf(X, E)))
        y0 = np.array([1.0, dlog])

        def rhs(x, y):
            return [y[1], lam * lam * qf(x, E) * y[0]]

        sol = solve_ivp(rhs, (X, match), y0, method="DOP853", rtol=1e-12, atol=1e-300)
        y = sol.y[:, -1]
        return y / math.hypot(y[0], y[1] / lam)

    def g(E):
        r, l = side(E, 1.0), side(E, -1.0)
        return (l[0] * r[1] - l[1] * r[0]) / lam

    grid = np.arange(E_bracket[0] + 1e-3, E_bracket[1] + step, step)
    vals = [g(E) for E in grid]
    out = []
    for j in range(len(grid) - 1):
        if vals[j] * vals[j + 1] < 0:
            E = brentq(g, grid[j], grid[j + 1], xtol=1e-14, rtol=1e-15)
            out.append(EigenResult(complex(E), abs(g(E)), len(out)))
            if len(out) == count:
                return out
    raise BracketExhaustedError(f"found {len(out)} of {count} eigenvalues in {E_bracket}")


# ---------------------------------------------------------------------------
# Borel sums of fundamental and base-pair series


def borel_pade_sum(ser: _series.AsymptoticSeries, lam: complex, L: int = 10, M: int = 10,
                   ray_angle: float | None = None, lateral: float | None = 0.2):
    """Borel-Pade sum of an asymptotic series; returns (value, error estimate, approximant).

    When a genuine Pade pole sits on the requested ray and ``lateral`` is
    set, the median sum (mean of the two lateral sums at ``+-lateral``
    radians) is returned and half their difference is added to the error.
    """
    b = _borel.to_borel(ser)
    pa = _borel.pade(b, L, M)
    try:
        r = _borel.laplace_sum(pa, lam, ray_angle)
        return r.value, r.error, pa
    except PoleOnRayError:
        if lateral is None:
            raise
    g = _borel.default_ray(lam) if ray_angle is None else ray_angle
    up = _borel.laplace_sum(pa, lam, g + lateral)
    dn = _borel.laplace_sum(pa, lam, g - lateral)
    log.debug("median sum: pole on ray %.4g, lateral spread %.3g", g, abs(up.value - dn.value))
    value = 0.5 * (up.value + dn.value)
    return value, max(up.error, dn.error) + 0.5 * abs(up.value - dn.value), pa


def _c_series(rep: _series.ExponentialRep, sigma: int, N: int) -> np.ndarray:
    """t-series of exp(2 int rho^+) (only even powers of 1/lam)."""
    inv = np.zeros(N + 1, dtype=complex)
    for n, v in enumerate(rep.rho_plus_integral):
        if 2 * n + 2 <= N:
            inv[2 * n + 2] = 2.0 * v
    tpow = (-2.0 * sigma) ** np.arange(N + 1)
    return _series.series_exp(inv * tpow)


def _c_truncated(rep: _series.ExponentialRep, lam: complex) -> tuple:
    """exp(2 sum rho^+_n / lam^(2n+2)) summed to its smallest term."""
    terms = np.array([2.0 * v / lam ** (2 * n + 2) for n, v in enumerate(rep.rho_plus_integral)])
    if terms.size == 0:
        return 1.0 + 0j, 0.0
    mags = np.abs(terms)
    m = int(np.argmin(mags))
    return complex(np.exp(np.sum(terms[:m]))), float(mags[m])


@dataclass
class NonSummabilityReport:
    x: complex
    x0: complex
    rows: list
    slope_fit: float
    slope_expected: float
    bs_at_x0: complex
    c_at_x0: complex

    def to_json(self) -> dict:
        return {
            "x": [self.x.real, self.x.imag], "x0": [self.x0.real, self.x0.imag],
            "rows": self.rows, "slope_fit": self.slope_fit, "slope_expected": self.slope_expected,
            "bs_at_x0": [self.bs_at_x0.real, self.bs_at_x0.imag],
            "c_at_x0": [self.c_at_x0.real, self.c_at_x0.imag],
        }


def lemma3_experiment(graph, x: complex, x0: complex, lams, k: int = 1, b: int | None = None,
                      N: int = 20, L: int = 10, M: int = 10) -> NonSummabilityReport:
    """Borel sums of the standard series of the base-pair solution chi_1(x, x0).

    The standard series is C_a(x0) * sum_n I_n(x, x0) t^n with
    C_a = exp(2 int_{inf_a}^{x0} rho^+) as a formal series.  For each lam the
    report holds its Borel-Pade sum ``bs_value``, the oracle
    ``oracle_value`` = chi_1(x, x0) from the base pair, and ``rhs`` =
    C_a(x0) chi_a(x) / chi_a(x0) with C_a truncated at its smallest term and
    chi_a from the oracle.  ``exact_prefactor_gap`` is
    |chi_b'(x0) / (2 sigma lam sqrt(q(x0)) chi_b(x0))|, the relative amount by
    which the value-only matching misses the derivative condition at x0.
    """
    from .stokes import canonical_path, xi_of
    q = graph.characteristic
    tps = graph.turning_points
    sec = graph.sector(k)
    sigma = sec.signature
    x, x0 = complex(x), complex(x0)
    p0 = canonical_path(graph, k, x0)
    if p0 is None:
        raise CanonicityError(f"no canonical path from sector {k} to x0 = {x0}")
    root = graph.sqrt_far(p0.start)
    rep = _series.rho_pm(q, p0, root, sigma, N, tps)
    s0 = continue_branch(q, p0, root, tps).final
    seg = line_path(x0, x)
    I = _series.iterated_I(q, x, x0, seg, N, s0, tps)
    cser = _c_series(rep, sigma, N)
    std = _series.series_mul(_series.AsymptoticSeries(sigma, cser), _series.AsymptoticSeries(sigma, I))
    std = _series.AsymptoticSeries(sigma, std.coeffs[: N + 1])
    cx0 = _series.AsymptoticSeries(sigma, cser)
    if b is None:
        b = k % graph.n_sectors + 1
    xi_x, xi_x0 = xi_of(graph, k, x), xi_of(graph, k, x0, p0)
    rows = []
    for lam in lams:
        lam = complex(lam)
        bs, bs_err, _ = borel_pade_sum(std, lam, L, M)
        one, _ = base_pair(q, x0, sigma, lam, seg, s0)
        chi1 = one[-1].chi
        fa_x = fundamental_chi(graph, k, x, lam)
        fa_x0 = fundamental_chi(graph, k, x0, lam, path=p0)
        ctr, cerr = _c_truncated(rep, lam)
        rhs = ctr * fa_x.chi / fa_x0.chi
        try:
            fb = fundamental_chi(graph, b, x0, lam)
            gap = abs(fb.chi_prime / (2 * sigma * lam * fb.sqrt_q * fb.chi))
        except NumericError:
            gap = float("nan")
        rows.append({
            "lambda": [lam.real, lam.imag],
            "bs_value": [bs.real, bs.imag], "bs_err": bs_err,
            "oracle_value": [chi1.real, chi1.imag],
            "rhs_factorized": [rhs.real, rhs.imag], "c_trunc_err": cerr,
            "residuals": {
                "bs_vs_rhs": abs(bs - rhs) / abs(rhs),
                "bs_vs_oracle": abs(bs - chi1),
                "rhs_vs_oracle": abs(rhs - chi1),
            },
            "exact_prefactor_gap": gap,
        })
    lam_re = np.array([complex(*r["lambda"]).real for r in rows])
    dis = np.array([r["residuals"]["bs_vs_oracle"] for r in rows])
    slope = float(np.polyfit(lam_re, np.log(dis), 1)[0]) if len(rows) >= 2 else float("nan")
    expected = float(-2.0 * (xi_x0 - xi_x).real)
    lam_last = complex(lams[-1])
    bs0, _, _ = borel_pade_sum(cx0, lam_last, L, M)
    c0, _ = _c_truncated(rep, lam_last)
    return NonSummabilityReport(x, x0, rows, slope, expected, complex(bs0), c0)


def sector_probes(graph, k: int, count: int = 3, radius: float | None = None) -> list:
    """Points spread over the middle of sector ``k`` at a moderate radius."""
    lo, hi = graph.sector(k).direction_interval
    if radius is None:
        tps = graph.turning_points.locations
        radius = 1.2 * float(np.max(np.abs(tps))) + 0.8 if tps.size else 1.0
    fr = np.linspace(0.3, 0.7, count) if count > 1 else np.array([0.5])
    return [complex(radius * np.exp(1j * (lo + f * (hi - lo)))) for f in fr]


@dataclass
class SummationCheck:
    k: int
    x: complex
    lam: complex
    borel_sum: complex
    oracle: complex
    error: float

    @property
    def relative(self) -> float:
        return abs(self.borel_sum - self.oracle) / abs(self.oracle)

    def to_json(self) -> dict:
        return {"sector": self.k, "x": [self.x.real, self.x.imag],
                "lambda": [self.lam.real, self.lam.imag],
                "borel_sum": [self.borel_sum.real, self.borel_sum.imag],
                "oracle": [self.oracle.real, self.oracle.imag],
                "error": self.error, "relative": self.relative}


def summation_check(graph, k: int, x: complex, lams, N: int = 20, L: int = 10,
                    M: int = 10) -> list:
    """Borel-Pade sum of the order-N series of sector ``k`` at ``x`` against the oracle.

    The sum runs along :func:`~exactwkb.stokes.summation_ray`; the series
    and paths are computed once and reused for every lambda in ``lams``.
    """
    from .stokes import summation_ray
    x = complex(x)
    path = _canonical_or_raise(graph, k, x)
    ray0 = summation_ray(graph, k, x, path)
    if ray0 is None:
        raise CanonicityError(f"no admissible Laplace ray for sector {k} at x = {x}")
    ser = _series.chi_series(graph, k, x, N)
    out = []
    for lam in lams:
        lam = complex(lam)
        ray = ray0 + graph.phase - float(np.angle(lam))
        bs, err, _ = borel_pade_sum(ser, lam, L, M, ray, lateral=None)
        fc = fundamental_chi(graph, k, x, lam, path=path)
        out.append(SummationCheck(k, x, lam, complex(bs), fc.chi, float(err)))
    return out


def summed_chi_residual(graph, k: int, x: complex, lam: complex, h: float = 1e-2, N: int = 20,
                        L: int = 10, M: int = 10) -> float:
    """chi-ODE residual of the Borel-Pade sum of sector ``k``'s series on a 5-point stencil.

    The sum is evaluated independently at each stencil point along the
    ray admissible at ``x``, so the check does not reuse any derivative
    information from the series itself.
    """
    from .stokes import summation_ray
    sec = graph.sector(k)
    x = complex(x)
    lam = complex(lam)
    path = _canonical_or_raise(graph, k, x)
    ray0 = summation_ray(graph, k, x, path)
    if ray0 is None:
        raise CanonicityError(f"no admissible Laplace ray for sector {k} at x = {x}")
    ray = ray0 + graph.phase - float(np.angle(lam))

    def chi_fn(pts):
        out = []
        for p in pts:
            ser = _series.chi_series(graph, k, complex(p), N)
            out.append(borel_pade_sum(ser, lam, L, M, ray, lateral=None)[0])
        return np.array(out)

    root = continue_branch(graph.characteristic, path, graph.sqrt_far(path.start),
                           graph.turning_points).final
    return chi_residual(graph.characteristic, sec.signature, lam, x, chi_fn, h, sqrt_q=root)


def _canonical_or_raise(graph, k, x):
    from .stokes import canonical_path
    path = canonical_path(graph, k, x)
    if path is None:
        raise CanonicityError(f"no canonical path from sector {k} to x = {x}")
    return path
