"""Borel plane tools: Borel transform, Pade continuation, Laplace summation.

Conventions
-----------
For a chi-factor series ``sum c_n t^n`` with ``t = -sigma/(2 lam)`` the
Borel coefficients are ``b_n = c_n sigma^n / n!``.  For sigma = -1 this is
``c_n (-1)^n / n!``.  The Laplace transform

    2 lam * int e^{2 lam s} F(s) ds,   s = -t e^{i gamma},  t from inf to 0,

maps ``s^n`` to ``n! (-1/(2 lam))^n`` and therefore reproduces the series
term by term.  The moving singularity sits at ``xi = -sigma W`` for both
signatures.
"""
from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field

import numpy as np
from scipy import special

from . import quadrature
from .errors import (ContourSingularityError, DegenerateSystemError, DivergenceError, InputError,
                     PoleOnRayError)
from .series import AsymptoticSeries

log = logging.getLogger(__name__)

FD_REL = 1e-3


@dataclass
class BorelSeries:
    coeffs: np.ndarray
    sigma: int = -1
    radius_estimate: float = float("nan")
    source: AsymptoticSeries | None = field(default=None, repr=False)

    def __post_init__(self):
        self.coeffs = np.asarray(self.coeffs, dtype=complex)

    @property
    def order(self) -> int:
        return self.coeffs.size - 1

    def __call__(self, s):
        return np.polynomial.polynomial.polyval(np.asarray(s, dtype=complex), self.coeffs)

    def to_json(self) -> dict:
        return {
            "coeffs": [[c.real, c.imag] for c in self.coeffs],
            "sigma": self.sigma,
            "radius_estimate": self.radius_estimate,
        }


def _factorials(n):
    return np.array([math.factorial(k) for k in range(n + 1)], dtype=float)


def radius_estimate(b: np.ndarray) -> float:
    """Radius of convergence from the top third of the coefficients.

    Domb-Sykes: the ratios b_n / b_{n-1} are extrapolated linearly in 1/n.
    When the ratios oscillate (several singularities of similar modulus)
    a least-squares fit of log|b_n| = a - n log R + g log n is used.
    """
    b = np.asarray(b, dtype=complex)
    N = b.size - 1
    if N < 6:
        return float("nan")
    nz = np.nonzero(np.abs(b) > 0)[0]
    if nz.size < 4:
        return float("inf")
    lo = max(1, N - max(4, N // 3))
    n = np.arange(lo, N + 1)
    ok = np.abs(b[n - 1]) > 0
    if np.all(ok):
        r = b[n] / b[n - 1]
        A = np.stack([np.ones(n.size), 1.0 / n], axis=1)
        coef, *_ = np.linalg.lstsq(A, r, rcond=None)
        fit = A @ coef
        spread = np.max(np.abs(fit - r)) / max(np.max(np.abs(r)), 1e-300)
        if spread < 0.05 and abs(coef[0]) > 0:
            return float(1.0 / abs(coef[0]))
    m = np.arange(max(1, N - max(6, N // 2)), N + 1)
    m = m[np.abs(b[m]) > 0]
    A = np.stack([np.ones(m.size), m, np.log(m)], axis=1)
    coef, *_ = np.linalg.lstsq(A, np.log(np.abs(b[m])), rcond=None)
    return float(math.exp(-coef[1]))


def to_borel(a: AsymptoticSeries) -> BorelSeries:
    """Factorially scaled coefficients b_n = c_n sigma^n / n!."""
    if a.order < 1:
        raise InputError("the Borel transform needs at least order 1")
    n = np.arange(a.order + 1)
    b = a.coeffs * float(a.sigma) ** n / _factorials(a.order)
    return BorelSeries(b, a.sigma, radius_estimate(b), a)


def from_borel(b: BorelSeries) -> AsymptoticSeries:
    n = np.arange(b.order + 1)
    return AsymptoticSeries(b.sigma, b.coeffs * _factorials(b.order) / float(b.sigma) ** n)


def convolve(f: BorelSeries, g: BorelSeries) -> BorelSeries:
    """(f * g)(s) = d/ds int_0^s f(s') g(s - s') ds' at coefficient level.

    With s^a * s^b = a! b! / (a+b)! s^(a+b) the product of two Borel
    transforms is the transform of the Cauchy product.
    """
    n = min(f.order, g.order)
    fa = _factorials(n)
    F = f.coeffs[: n + 1] * fa
    G = g.coeffs[: n + 1] * fa
    out = np.array([np.dot(F[: k + 1], G[k::-1]) for k in range(n + 1)]) / fa
    return BorelSeries(out, f.sigma)


# ---------------------------------------------------------------------------
# Pade


@dataclass
class PadeApproximant:
    L: int
    M: int
    numerator: np.ndarray  # ascending, in z = s / rho
    denominator: np.ndarray  # ascending, denominator[0] = 1
    rho: float
    poles: np.ndarray
    residues: np.ndarray
    froissart: np.ndarray
    residual: float

    def __call__(self, s):
        z = np.asarray(s, dtype=complex) / self.rho
        P = np.polynomial.polynomial.polyval(z, self.numerator)
        Q = np.polynomial.polynomial.polyval(z, self.denominator)
        return P / Q

    @property
    def genuine_poles(self) -> np.ndarray:
        return self.poles[~self.froissart]

    def nearest_pole(self):
        g = self.genuine_poles
        if g.size == 0:
            return None
        return complex(g[np.argmin(np.abs(g))])

    def taylor(self, n: int) -> np.ndarray:
        """Taylor coefficients in s through order n."""
        P = np.zeros(n + 1, complex)
        P[: min(n + 1, self.numerator.size)] = self.numerator[: n + 1]
        Q = self.denominator
        out = np.zeros(n + 1, complex)
        for k in range(n + 1):
            acc = P[k]
            for j in range(1, min(k, Q.size - 1) + 1):
                acc -= Q[j] * out[k - j]
            out[k] = acc
        return out / self.rho ** np.arange(n + 1)

    def to_json(self) -> dict:
        return {
            "L": self.L,
            "M": self.M,
            "residual": self.residual,
            "poles": [
                {"pole": [p.real, p.imag], "residue": [r.real, r.imag], "froissart": bool(f)}
                for p, r, f in zip(self.poles, self.residues, self.froissart)
            ],
        }


def pade(b: BorelSeries, L: int, M: int, fd_tol: float | None = None,
         rank_tol: float = 1e-13) -> PadeApproximant:
    """[L/M] Pade approximant of the Borel series.

    The linear system is solved in the scaled variable z = s / rho with
    rho the radius estimate, which keeps the Hankel matrix balanced.  A
    numerically rank-deficient system lowers M until it is regular.
    Pole-zero pairs closer than ``fd_tol`` are flagged as Froissart
    doublets.

    Raises
    ------
    DegenerateSystemError
        If no regular system remains at M = 0 (only when L is invalid).
    """
    c = b.coeffs
    if L < 0 or M < 0 or L + M > b.order:
        raise InputError(f"[{L}/{M}] needs {L + M + 1} coefficients, have {b.order + 1}")
    rho = b.radius_estimate
    if not np.isfinite(rho) or rho <= 0:
        rho = 1.0
    a = c * rho ** np.arange(c.size)
    scale = np.max(np.abs(a[: L + M + 1]))
    if scale == 0:
        raise DegenerateSystemError("all Borel coefficients vanish")
    a = a / scale
    while M > 0:
        # rows k = L+1 .. L+M:  sum_{j=1}^{M} q_j a_{k-j} = -a_k
        A = np.array([[a[k - j] if k - j >= 0 else 0.0 for j in range(1, M + 1)]
                      for k in range(L + 1, L + M + 1)], dtype=complex)
        rhs = -a[L + 1 : L + M + 1]
        sv = np.linalg.svd(A, compute_uv=False)
        if sv[0] == 0 or sv[-1] / sv[0] < rank_tol:
            log.debug("pade: rank deficient at M=%d (%.1e), reducing", M, sv[-1] / max(sv[0], 1e-300))
            M -= 1
            continue
        qd = np.linalg.solve(A, rhs)
        break
    else:
        qd = np.zeros(0, complex)
    Q = np.concatenate([[1.0 + 0j], qd])
    P = np.array([sum(Q[j] * a[k - j] for j in range(0, min(k, M) + 1)) for k in range(L + 1)])
    P = P * scale
    # Taylor residual through L+M
    approx = PadeApproximant(L, M, P, Q, rho, np.zeros(0), np.zeros(0), np.zeros(0, bool), 0.0)
    tay = approx.taylor(L + M)
    ref = c[: L + M + 1]
    denom = np.max(np.abs(ref * rho ** np.arange(L + M + 1)))
    resid = float(np.max(np.abs((tay - ref) * rho ** np.arange(L + M + 1))) / denom)
    if M > 0:
        zp = np.roots(Q[::-1])
        zz = np.roots(P[::-1]) if L > 0 and np.any(P[1:] != 0) else np.zeros(0, complex)
        dQ = np.polynomial.polynomial.polyder(Q)
        res = np.polynomial.polynomial.polyval(zp, P) / np.polynomial.polynomial.polyval(zp, dQ)
        poles = zp * rho
        residues = res * rho
        tol = (fd_tol if fd_tol is not None else FD_REL * rho)
        fro = np.zeros(poles.size, bool)
        if zz.size:
            dist = np.min(np.abs(poles[:, None] - zz[None, :] * rho), axis=1)
            fro |= dist < tol
        fro |= np.abs(residues) < 1e-12 * max(1.0, float(np.max(np.abs(residues))))
    else:
        poles = np.zeros(0, complex)
        residues = np.zeros(0, complex)
        fro = np.zeros(0, bool)
    return PadeApproximant(L, M, P, Q, rho, poles, residues, fro, resid)


# ---------------------------------------------------------------------------
# singularities


@dataclass(frozen=True)
class SingularityForecast:
    moving: complex
    fixed: tuple

    def to_json(self) -> dict:
        return {"moving": [self.moving.real, self.moving.imag],
                "fixed": [[z.real, z.imag] for z in self.fixed]}


def turning_point_actions(graph) -> list:
    """Actions between turning points joined by lines or sharing a sector.

    Each is integrated along the straight segment when it keeps clear of
    the other turning points, otherwise along the traced Stokes lines.
    """
    from .path import action, continue_branch, line_path
    tps = graph.turning_points.locations
    q = graph.characteristic
    pairs = set()
    for ln in graph.lines:
        if ln.finite:
            pairs.add(tuple(sorted((ln.origin, ln.terminus[1]))))
    for sec in graph.sectors:
        origins = sorted({graph.lines[li].origin for li in sec.bounding_lines})
        for i in range(len(origins)):
            for j in range(i + 1, len(origins)):
                pairs.add((origins[i], origins[j]))
    out = []
    for i, j in sorted(pairs):
        a, b = complex(tps[i]), complex(tps[j])
        path = line_path(a, b, endpoint_turning=(True, True))
        ts = np.linspace(0, 1, 401)[1:-1]
        z = a + (b - a) * ts
        others = np.delete(tps, [i, j])
        if others.size and np.min(np.abs(z[:, None] - others[None, :])) < 1e-3 * graph.scale:
            continue
        ref = np.sqrt(complex(q(a + 1e-3 * (b - a))))
        br = continue_branch(q, path, ref, graph.turning_points)
        out.append(((i, j), action(br).value))
    return out


def predicted_singularities(graph, x: complex, k: int = 1, path=None) -> SingularityForecast:
    """Moving singularity xi(x) and the fixed first-sheet candidates."""
    from .stokes import xi_of
    xi = xi_of(graph, k, x, path)
    fixed = []
    for _, z in turning_point_actions(graph):
        fixed += [z, -z]
    return SingularityForecast(complex(xi), tuple(fixed))


# ---------------------------------------------------------------------------
# Laplace summation


@dataclass
class LaplaceResult:
    value: complex
    error: float
    lam: complex
    ray_angle: float

    def to_json(self) -> dict:
        return {"lambda": [self.lam.real, self.lam.imag], "ray": self.ray_angle,
                "value": [self.value.real, self.value.imag], "err": self.error}


def default_ray(lam: complex) -> float:
    return -float(np.angle(lam))


def _poles_of(f):
    if isinstance(f, PadeApproximant):
        return f.genuine_poles
    return np.zeros(0, complex)


def laplace_sum(f, lam: complex, ray_angle: float | None = None, ray_margin: float = 1e-3,
                tol: float = 1e-13) -> LaplaceResult:
    """2 lam * int e^{2 lam s} F(s) ds along s = -t e^{i ray_angle}, t >= 0.

    Raises
    ------
    DivergenceError
        If Re(lam e^{i ray_angle}) <= 0, so the kernel does not decay.
    PoleOnRayError
        If a genuine pole lies within ``ray_margin * (1 + |pole|)`` of the ray.
    """
    lam = complex(lam)
    gamma = default_ray(lam) if ray_angle is None else float(ray_angle)
    e = np.exp(1j * gamma)
    for p in sorted(_poles_of(f), key=abs):
        # distance from p to the ray {-t e}
        t = -(p * np.conj(e)).real
        d = abs(p) if t < 0 else abs(p + t * e)
        if d < ray_margin * (1 + abs(p)):
            raise PoleOnRayError(complex(p), gamma)
    rate = (lam * e).real
    if rate <= 0:
        raise DivergenceError(f"kernel does not decay along ray angle {gamma:.6g} for lambda = {lam}")
    k = 2.0 * rate

    def g(u):
        u = np.asarray(u, dtype=float)
        t = u / (1.0 - u) / k
        jac = 1.0 / ((1.0 - u) ** 2 * k)
        s = -t * e
        return np.exp(2.0 * lam * s) * f(s) * jac

    val, err = quadrature.integrate(g, 0.0, 1.0, abs_tol=tol, rel_tol=tol, raise_on_fail=False)
    scale = 2.0 * lam * e
    return LaplaceResult(complex(scale * val), float(abs(scale) * err), lam, gamma)


def laplace_cut_difference(f, lam: complex, gamma1: float, gamma2: float, radius: float,
                           tol: float = 1e-12) -> complex:
    """Difference of two ray sums via the closed contour between them.

    The contour runs out along ray 1 to ``radius``, along the arc to ray 2
    and back to the origin; the tails beyond ``radius`` are added from the
    ray integrals, so the result equals sum(gamma1) - sum(gamma2).
    """
    lam = complex(lam)
    e1, e2 = np.exp(1j * gamma1), np.exp(1j * gamma2)

    def seg(a, b):
        def h(t):
            s = a + (b - a) * t
            return np.exp(2 * lam * s) * f(s) * (b - a)
        return quadrature.integrate(h, 0.0, 1.0, abs_tol=tol, rel_tol=tol, raise_on_fail=False)[0]

    R = radius
    # path: 0 -> -R e1 is the reversed ray 1; arc from -R e1 to -R e2; -R e2 -> 0
    inner = -seg(0, -R * e1)
    sweep = gamma2 - gamma1

    def arc(t):
        ang = gamma1 + sweep * t
        s = -R * np.exp(1j * ang)
        return np.exp(2 * lam * s) * f(s) * (-R * 1j * sweep * np.exp(1j * ang))

    arcv = quadrature.integrate(arc, 0.0, 1.0, abs_tol=tol, rel_tol=tol, raise_on_fail=False)[0]
    back = seg(-R * e2, 0)
    # tails of the two rays beyond R
    def tail(e):
        def h(u):
            t = R + u / (1 - u)
            s = -t * e
            return np.exp(2 * lam * s) * f(s) * (-e) / (1 - u) ** 2
        return quadrature.integrate(h, 0.0, 1.0, abs_tol=tol, rel_tol=tol, raise_on_fail=False)[0]
    # ray_j integral (from inf to 0) = -(int_0^R + tail_j) in the -t e_j parametrisation
    # closed loop = ray1 part reversed + arc + ray2 part
    loop = inner + arcv + back
    diff = 2 * lam * (loop - tail(e1) + tail(e2))
    return complex(-diff)


# ---------------------------------------------------------------------------
# topological expansion, leading terms


@dataclass
class OmegaData:
    """Omega and xi at a point, with the machinery to shift xi."""

    graph: object
    k: int
    x: complex
    sqrt_x: complex
    Omega: complex
    xi: complex
    sigma: int


def _gl(n=24):
    t, w = np.polynomial.legendre.leggauss(n)
    return 0.5 * (t + 1), 0.5 * w


_GLT, _GLW = _gl()


def _segment_integrals(q, a, b, sqrt_a):
    """int_a^b sqrt(q) and int_a^b omega on straight chords (vectorised over b)."""
    from .potential import omega
    b = np.atleast_1d(np.asarray(b, dtype=complex))
    z = a + (b[:, None] - a) * _GLT[None, :]
    root = np.sqrt(np.asarray(q(z), dtype=complex))
    # branch by continuity from sqrt_a along each chord
    ref = np.full(b.shape, complex(sqrt_a))
    for j in range(z.shape[1]):
        flip = np.abs(root[:, j] - ref) > np.abs(root[:, j] + ref)
        root[:, j] = np.where(flip, -root[:, j], root[:, j])
        ref = root[:, j]
    dz = (b - a)[:, None]
    W = np.sum(root * dz * _GLW[None, :], axis=1)
    om = np.sum(omega(q, z, root) * dz * _GLW[None, :], axis=1)
    end_root = np.sqrt(np.asarray(q(b), dtype=complex))
    flip = np.abs(end_root - ref) > np.abs(end_root + ref)
    end_root = np.where(flip, -end_root, end_root)
    return W, om, end_root


def omega_data(graph, k: int, x: complex, path=None, tol: float = 1e-13) -> OmegaData:
    """Omega(xi(x)) = -sigma_k int_{inf_k}^x omega, integrated independently of the series."""
    from .path import continue_branch
    from .potential import omega
    from .stokes import canonical_path, xi_of
    from .errors import CanonicityError
    q = graph.characteristic
    if path is None:
        path = canonical_path(graph, k, x)
        if path is None:
            raise CanonicityError(f"no canonical path from sector {k} to {x}")
    sec = graph.sector(k)
    A = path.start
    rootA = graph.sqrt_far(A)
    # ray from infinity to the anchor: y = A / r^2, r in (0, 1]

    def ray(r):
        r = np.asarray(r, dtype=float)
        y = A / r**2
        root = np.sqrt(np.asarray(q(y), dtype=complex))
        # continue outward from the anchor: the leading term fixes the sign
        n = q.degree
        asym = rootA * (1.0 / r**2) ** (n / 2)
        root = np.where(np.abs(root - asym) <= np.abs(root + asym), root, -root)
        return omega(q, y, root) * (-2.0 * A / r**3)

    v_ray, _ = quadrature.integrate(ray, 0.0, 1.0, abs_tol=1e-300, rel_tol=tol, raise_on_fail=False)
    br = continue_branch(q, path, rootA, graph.turning_points)
    total = v_ray
    for i, seg in enumerate(path.segments):
        def f(t, i=i, seg=seg):
            return omega(q, seg.point(t), br.sqrt_on_segment(i, t)) * seg.tangent(t)
        v, _ = quadrature.integrate(f, 0.0, 1.0, abs_tol=1e-300, rel_tol=tol, raise_on_fail=False)
        total += v
    sigma = sec.signature
    xi = xi_of(graph, k, x, path)
    return OmegaData(graph, k, complex(x), complex(br.final), complex(-sigma * total), complex(xi), sigma)


def _shift(od: OmegaData, eta: np.ndarray, newton: int = 30):
    """Points x' with xi(x') = xi(x) - eta; returns (x', sqrt q(x'), Omega(x'))."""
    q = od.graph.characteristic
    eta = np.atleast_1d(np.asarray(eta, dtype=complex))
    target = od.sigma * eta  # W(x') - W(x)
    xp = od.x + target / od.sqrt_x
    for _ in range(newton):
        W, om, root = _segment_integrals(q, od.x, xp, od.sqrt_x)
        step = (W - target) / root
        xp = xp - step
        if np.max(np.abs(step)) < 1e-15 * (1 + abs(od.x)):
            break
    W, om, root = _segment_integrals(q, od.x, xp, od.sqrt_x)
    Om = od.Omega - od.sigma * om
    return xp, root, Om


def _I0(z):
    """I_0(sqrt(z)), entire in z."""
    return special.iv(0, np.sqrt(np.asarray(z, dtype=complex)))


def phi_topological(od: OmegaData, s: complex, order: int = 0, tol: float = 1e-10,
                    contour_margin: float = 1e-3) -> complex:
    """Leading terms of the topological expansion of the Borel function.

    order 0: I_0(sqrt(4 s Omega)).
    order 1: -int_0^s d eta int_0^eta d eta' w(xi - eta') Phi0(xi - eta', eta - eta')
             I_0(sqrt(-4 (s - eta)(Omega(xi) - Omega(xi - eta')))), with w = omega/sqrt(q),
    on straight contours.

    Raises
    ------
    ContourSingularityError
        When the straight contour to ``s`` passes within ``contour_margin``
        of the moving singularity's image (a turning point at eta = xi).
    """
    s = complex(s)
    if order == 0:
        return complex(_I0(4.0 * s * od.Omega))
    if order != 1:
        raise InputError("only orders 0 and 1 are implemented")
    if s == 0:
        return 0j
    # the shifted point reaches a turning point when eta' = xi
    xi = od.xi
    t = (xi * np.conj(s)).real / abs(s) ** 2
    d = abs(xi - np.clip(t, 0, 1) * s)
    if d < contour_margin * (1 + abs(xi)):
        raise ContourSingularityError(f"straight contour to s = {s} meets the singularity at {xi}")
    q = od.graph.characteristic
    Om = od.Omega

    def inner(u):
        # u: outer variable in [0,1]; eta = s u
        u = np.atleast_1d(u)
        out = np.empty(u.shape, dtype=complex)
        for idx, uu in enumerate(u):
            eta = s * uu

            def g(v):
                etap = eta * np.asarray(v)
                xp, root, Omp = _shift(od, etap)
                from .potential import omega
                w = omega(q, xp, root) / root
                phi0 = _I0(4.0 * (eta - etap) * Omp)
                kern = _I0(-4.0 * (s - eta) * (Om - Omp))
                return w * phi0 * kern * eta

            val, _ = quadrature.integrate(g, 0.0, 1.0, abs_tol=tol * 1e-3, rel_tol=tol,
                                          raise_on_fail=False)
            out[idx] = val
        return out * s

    val, _ = quadrature.integrate(inner, 0.0, 1.0, abs_tol=tol * 1e-3, rel_tol=tol,
                                  raise_on_fail=False)
    return complex(-val)
