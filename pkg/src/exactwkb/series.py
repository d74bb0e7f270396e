"""Semiclassical coefficients along paths and truncated series algebra.

The coefficients obey ``chi_n' = u (u chi_{n-1})''`` with ``u = q^{-1/4}``,
integrated from the infinity of a sector (``chi_n(inf) = 0`` for n >= 1)
or from a finite point.  Along a path the coefficients are carried on
Chebyshev nodes of first kind per piece; the local derivatives needed by
the recursion come from Taylor jets of the exact polynomial q, so no
numerical differentiation is involved.  Integration is spectral.

Series convention
-----------------
``AsymptoticSeries.coeffs[n]`` is the n-th coefficient produced by the
recursion above.  The factor it multiplies in the physical chi-factor of
a solution decaying with signature ``sigma`` is ``(-sigma / (2 lam))**n``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from numpy.polynomial import chebyshev as C

from . import jets, quadrature
from .errors import InputError, SpectralResolutionError
from .path import OrientedPath, continue_branch
from .potential import Characteristic

N_MAX = 24
CHEB_TOL = 1e-12
CHEB_M = 40
# preferred path clearance from turning points, relative to that of the end point
SERIES_CLEARANCE = 0.5


# ---------------------------------------------------------------------------
# data types


@dataclass
class AsymptoticSeries:
    """Truncated series sum_n coeffs[n] * (-sigma/(2 lam))**n.

    ``deriv`` optionally holds the x-derivatives of the coefficients at
    ``at_point`` (same indexing), ``deriv2`` the second derivatives.
    """

    sigma: int
    coeffs: np.ndarray
    at_point: complex | None = None
    anchor: object = None
    deriv: np.ndarray | None = field(default=None, repr=False)
    deriv2: np.ndarray | None = field(default=None, repr=False)

    def __post_init__(self):
        self.coeffs = np.asarray(self.coeffs, dtype=complex)

    @property
    def order(self) -> int:
        return self.coeffs.size - 1

    def t(self, lam) -> complex:
        return -self.sigma / (2.0 * lam)

    def value(self, lam, order: int | None = None) -> complex:
        n = self.order if order is None else order
        t = self.t(lam)
        return complex(np.sum(self.coeffs[: n + 1] * t ** np.arange(n + 1)))

    def optimal_value(self, lam):
        """Sum truncated before the smallest term; returns (value, last term)."""
        t = self.t(lam)
        terms = self.coeffs * t ** np.arange(self.order + 1)
        mags = np.abs(terms)
        k = int(np.argmin(mags[1:]) + 1) if self.order >= 1 else 0
        return complex(np.sum(terms[:k])), float(mags[k])

    def with_sigma(self, sigma: int) -> "AsymptoticSeries":
        """Same function written in the variable of the other signature."""
        if sigma == self.sigma:
            return self
        flip = (-1.0) ** np.arange(self.order + 1)
        return AsymptoticSeries(sigma, self.coeffs * flip, self.at_point, self.anchor,
                                None if self.deriv is None else self.deriv * flip,
                                None if self.deriv2 is None else self.deriv2 * flip)

    def truncate(self, order: int) -> "AsymptoticSeries":
        return AsymptoticSeries(self.sigma, self.coeffs[: order + 1].copy(), self.at_point, self.anchor)

    def to_json(self) -> dict:
        at = self.at_point
        return {
            "sigma": int(self.sigma),
            "coeffs": [[c.real, c.imag] for c in self.coeffs],
            "order": int(self.order),
            "at": None if at is None else [at.real, at.imag],
        }

    @classmethod
    def from_json(cls, obj) -> "AsymptoticSeries":
        at = obj.get("at")
        return cls(int(obj["sigma"]), [complex(a, b) for a, b in obj["coeffs"]],
                   None if at is None else complex(*at))


@dataclass
class ExponentialRep:
    """Odd/even parts of the logarithmic derivative of a chi-factor.

    ``rho_minus[n]`` multiplies ``lam**-(2n+1)`` and ``rho_plus[n]``
    multiplies ``lam**-(2n+2)``; ``*_integral`` hold the integrals of the
    same coefficient functions from the sector infinity to ``at_point``.
    """

    rho_minus: np.ndarray
    rho_plus: np.ndarray
    rho_minus_integral: np.ndarray
    rho_plus_integral: np.ndarray
    at_point: complex
    sigma: int

    def log_chi_coeffs_inv_lambda(self) -> np.ndarray:
        """Coefficients of log chi in powers of 1/lam (index = power)."""
        n = 2 * max(len(self.rho_minus), len(self.rho_plus)) + 1
        out = np.zeros(n, dtype=complex)
        for k, v in enumerate(self.rho_minus_integral):
            out[2 * k + 1] = -v if self.sigma < 0 else v
        for k, v in enumerate(self.rho_plus_integral):
            out[2 * k + 2] = v
        return out

    def chi_series(self, order: int) -> AsymptoticSeries:
        """Re-expand exp(log chi) into the recursion's normalisation."""
        inv = self.log_chi_coeffs_inv_lambda()[: order + 1]
        inv = np.pad(inv, (0, max(0, order + 1 - inv.size)))
        # 1/lam = -2 sigma t with t = -sigma/(2 lam)
        tpow = (-2.0 * self.sigma) ** np.arange(order + 1)
        return AsymptoticSeries(self.sigma, series_exp(inv * tpow), self.at_point)


# ---------------------------------------------------------------------------
# series algebra


def _cauchy(a, b, n):
    out = np.zeros(n + 1, dtype=complex)
    for k in range(n + 1):
        out[k] = np.dot(a[: k + 1], b[k::-1])
    return out


def series_mul(a: AsymptoticSeries, b: AsymptoticSeries) -> AsymptoticSeries:
    """Cauchy product truncated at the smaller order."""
    b = b.with_sigma(a.sigma)
    n = min(a.order, b.order)
    return AsymptoticSeries(a.sigma, _cauchy(a.coeffs, b.coeffs, n), a.at_point)


def series_reciprocal(a: AsymptoticSeries, method: str = "backsub") -> AsymptoticSeries:
    """1/a by triangular back-substitution or by the geometric expansion.

    The geometric form sums ``(c0 - a)^n / c0^(n+1)``; both agree to rounding.
    """
    c = a.coeffs
    if c[0] == 0:
        raise InputError("reciprocal of a series with zero leading coefficient")
    n = a.order
    if method == "geometric":
        d = -c.copy()
        d[0] = 0.0
        out = np.zeros(n + 1, dtype=complex)
        power = np.zeros(n + 1, dtype=complex)
        power[0] = 1.0
        for k in range(n + 1):
            out += power / c[0] ** (k + 1)
            power = _cauchy(power, d, n)
        return AsymptoticSeries(a.sigma, out, a.at_point)
    out = np.zeros(n + 1, dtype=complex)
    out[0] = 1.0 / c[0]
    for k in range(1, n + 1):
        out[k] = -np.dot(c[1 : k + 1], out[k - 1 :: -1][:k]) / c[0]
    return AsymptoticSeries(a.sigma, out, a.at_point)


def series_exp(a: np.ndarray) -> np.ndarray:
    """exp of a power series (any constant term)."""
    a = np.asarray(a, dtype=complex)
    n = a.size - 1
    out = np.zeros(n + 1, dtype=complex)
    out[0] = np.exp(a[0])
    for k in range(1, n + 1):
        j = np.arange(1, k + 1)
        out[k] = np.sum(j * a[j] * out[k - j]) / k
    return out


def series_log(a: np.ndarray) -> np.ndarray:
    a = np.asarray(a, dtype=complex)
    n = a.size - 1
    out = np.zeros(n + 1, dtype=complex)
    out[0] = np.log(a[0])
    for k in range(1, n + 1):
        j = np.arange(1, k)
        out[k] = (a[k] - np.sum(j * out[j] * a[k - j]) / k) / a[0]
    return out


# ---------------------------------------------------------------------------
# Chebyshev machinery


class _ChebRule:
    """Interpolation and cumulative integration on first-kind nodes."""

    def __init__(self, m: int):
        self.m = m
        k = np.arange(m)
        self.tau = -np.cos(np.pi * (k + 0.5) / m)  # ascending in [-1, 1]
        V = C.chebvander(self.tau, m - 1)
        self.to_coef = np.linalg.inv(V)
        integ_nodes = np.zeros((m, m))
        integ_end = np.zeros(m)
        for j in range(m):
            e = np.zeros(m)
            e[j] = 1.0
            ci = C.chebint(e, lbnd=-1)
            integ_nodes[:, j] = C.chebval(self.tau, ci)
            integ_end[j] = C.chebval(1.0, ci)
        self.cum = integ_nodes @ self.to_coef
        self.total = integ_end @ self.to_coef

    def tail(self, values: np.ndarray) -> np.ndarray:
        """Relative size of the last few Chebyshev coefficients per row."""
        coef = values @ self.to_coef.T
        top = np.max(np.abs(coef), axis=-1)
        tail = np.max(np.abs(coef[..., -4:]), axis=-1)
        return np.where(top > 0, tail / np.where(top > 0, top, 1), 0.0)


_RULES: dict = {}


def _rule(m: int) -> _ChebRule:
    if m not in _RULES:
        _RULES[m] = _ChebRule(m)
    return _RULES[m]


@dataclass
class _Piece:
    kind: str  # "ray" or "seg"
    index: int  # segment index (seg) or -1
    a: float
    b: float

    def split(self):
        mid = 0.5 * (self.a + self.b)
        return [_Piece(self.kind, self.index, self.a, mid), _Piece(self.kind, self.index, mid, self.b)]


class PathNodes:
    """Nodes, branch values and jets of u = q^{-1/4} along a path."""

    def __init__(self, q: Characteristic, path: OrientedPath, sqrt_start: complex,
                 L: int, turning_points=None, m: int = CHEB_M, pieces=None):
        self.q = q
        self.path = path
        self.L = L
        self.rule = _rule(m)
        if turning_points is None:
            from .potential import turning_points as _tp
            turning_points = _tp(q)
        self.tps = turning_points
        if len(path.segments):
            self.branch = continue_branch(q, path, sqrt_start, turning_points)
        else:
            self.branch = None
        self.sqrt_start = complex(sqrt_start)
        self.pieces = pieces if pieces is not None else self._initial_pieces()
        self._build()

    # -- geometry
    def _initial_pieces(self):
        pieces = []
        if self.path.from_infinity:
            pieces += [_Piece("ray", -1, 0.0, 0.5), _Piece("ray", -1, 0.5, 1.0)]
        tps = self.tps.locations
        for i, seg in enumerate(self.path.segments):
            # split so each piece is short compared with the distance to turning points
            stack = [_Piece("seg", i, 0.0, 1.0)]
            while stack:
                p = stack.pop()
                ts = np.linspace(p.a, p.b, 9)
                z = seg.point(ts)
                d = np.min(np.abs(z[:, None] - tps[None, :])) if tps.size else np.inf
                length = seg.length() * (p.b - p.a)
                if length > 0.6 * d and length > 1e-6:
                    stack.extend(p.split()[::-1])
                else:
                    pieces.append(p)
            # keep path order
        return self._order(pieces)

    def _order(self, pieces):
        rays = sorted([p for p in pieces if p.kind == "ray"], key=lambda p: p.a)
        segs = sorted([p for p in pieces if p.kind == "seg"], key=lambda p: (p.index, p.a))
        return rays + segs

    def _geometry(self, piece, tau):
        """Positions and d x / d tau for local tau in [-1, 1]."""
        s = 0.5 * (tau + 1.0)
        if piece.kind == "ray":
            A = self.path.start - self.path.ray_origin
            r = piece.a + (piece.b - piece.a) * s
            x = self.path.ray_origin + A / r**2
            dx = -2.0 * A / r**3 * 0.5 * (piece.b - piece.a)
            return x, dx
        seg = self.path.segments[piece.index]
        t = piece.a + (piece.b - piece.a) * s
        return seg.point(t), seg.tangent(t) * 0.5 * (piece.b - piece.a)

    def _sqrt(self, piece, tau, x):
        if piece.kind == "seg":
            s = 0.5 * (tau + 1.0)
            return self.branch.sqrt_on_segment(piece.index, piece.a + (piece.b - piece.a) * s)
        # along the ray: continue outward from the anchor by argument continuity
        order = np.argsort(-np.abs(x - self.path.ray_origin))[::-1]
        out = np.empty(x.shape, dtype=complex)
        ref = self.sqrt_start
        for j in order:
            v = np.sqrt(complex(self.q(x[j])))
            if (v / ref).real < 0:
                v = -v
            out[j] = v
            ref = v
        return out

    def _build(self):
        tau = self.rule.tau
        xs, dxs, roots = [], [], []
        for p in self.pieces:
            x, dx = self._geometry(p, tau)
            xs.append(x)
            dxs.append(dx)
            roots.append(self._sqrt(p, tau, x))
        self.x = np.array(xs)
        self.dx = np.array(dxs)
        self.root = np.array(roots)
        self.u_jets = u_jets(self.q, self.x, self.root, self.L)

    def end_data(self, sqrt_end=None):
        x = self.path.end
        if sqrt_end is None:
            sqrt_end = self.branch.final if self.branch is not None else self.sqrt_start
        return x, sqrt_end


def u_jets(q: Characteristic, x, sqrt_q, L):
    """Taylor jets of u = q^{-1/4} at ``x`` on the branch fixed by ``sqrt_q``."""
    x = np.asarray(x, dtype=complex)
    qj = jets.poly_jets(q.coeffs, x, L)
    u0 = 1.0 / np.sqrt(np.asarray(sqrt_q, dtype=complex))
    return jets.power(qj, -0.25, u0)


def _step(U, X):
    """G = U * (U * X)''."""
    return jets.mul(U, jets.deriv(jets.deriv(jets.mul(U, X))))


def _run_recursion(nodes: PathNodes, N: int, start_values: np.ndarray, end_x, end_sqrt):
    """Carry the recursion over all pieces and the end point.

    Returns ``(values_at_end, jets_at_end, max_tail)`` where ``jets_at_end``
    has shape (N+1, L) and holds the Taylor jets of every coefficient.
    """
    rule = nodes.rule
    P, M = nodes.x.shape
    L = nodes.L
    U = nodes.u_jets  # (P, M, L)
    Uend = u_jets(nodes.q, np.array([end_x]), np.array([end_sqrt]), L)[0]
    X = np.zeros((P, M, L), dtype=complex)
    X[..., 0] = 1.0
    Xend = np.zeros(L, dtype=complex)
    Xend[0] = 1.0
    end_vals = np.zeros(N + 1, dtype=complex)
    end_vals[0] = start_values[0] if start_values is not None and start_values[0] != 0 else 1.0
    if start_values is not None:
        X[..., 0] = start_values[0]
        Xend[0] = start_values[0]
    end_jets = np.zeros((N + 1, L), dtype=complex)
    end_jets[0] = Xend
    max_tail = 0.0
    for n in range(1, N + 1):
        G = _step(U, X)  # (P, M, L)
        g = G[..., 0] * nodes.dx
        finite = np.isfinite(g)
        g = np.where(finite, g, 0.0)
        scale = np.max(np.abs(g), axis=1, keepdims=True)
        tails = rule.tail(g)
        significant = scale[:, 0] > 1e-300
        if np.any(significant):
            # pieces whose contribution is negligible need no resolution
            weight = scale[:, 0] / max(np.max(scale), 1e-300)
            max_tail = max(max_tail, float(np.max(tails * (weight > 1e-14))))
        cum = g @ rule.cum.T
        tot = g @ rule.total
        start = 0.0 if start_values is None else start_values[n]
        piece_start = start + np.concatenate([[0.0], np.cumsum(tot)[:-1]])
        chi_nodes = piece_start[:, None] + cum
        chi_end = start + np.sum(tot)
        end_vals[n] = chi_end
        # jets of the new coefficient at nodes and at the end point
        Gend = _step(Uend[None], Xend[None])[0]
        X = jets.integ(G)
        X[..., 0] = chi_nodes
        Xend = jets.integ(Gend)
        Xend[0] = chi_end
        end_jets[n] = Xend
    return end_vals, end_jets, max_tail


def _series_on_path(q, path, sqrt_start, N, start_values=None, turning_points=None,
                    cheb_tol=CHEB_TOL, max_refine=6):
    L = N + 3
    nodes = PathNodes(q, path, sqrt_start, L, turning_points)
    end_x, end_sqrt = nodes.end_data()
    for _ in range(max_refine):
        vals, jts, tail = _run_recursion(nodes, N, start_values, end_x, end_sqrt)
        if tail <= cheb_tol:
            return vals, jts, nodes
        nodes = PathNodes(q, path, sqrt_start, L, nodes.tps,
                          pieces=[h for p in nodes.pieces for h in p.split()])
    raise SpectralResolutionError(
        f"Chebyshev tail {tail:.2e} exceeds cheb_tol {cheb_tol:.0e} after refinement")


def chi_series_on_path(q: Characteristic, path: OrientedPath, sqrt_anchor: complex,
                       sigma: int, N: int, turning_points=None, cheb_tol=CHEB_TOL,
                       anchor=None) -> AsymptoticSeries:
    """Coefficients chi_0..chi_N at the end of ``path``.

    ``path`` must start at a sector anchor with ``from_infinity`` set; the
    ray from infinity to the anchor is handled by the map x = A / r^2.
    ``sqrt_anchor`` fixes the branch of sqrt(q) at the anchor.
    """
    if N > N_MAX:
        raise InputError(f"order {N} exceeds N_max = {N_MAX}")
    if not path.from_infinity:
        raise InputError("chi_series needs a path anchored at a sector infinity")
    vals, jts, _ = _series_on_path(q, path, sqrt_anchor, N, None, turning_points, cheb_tol)
    out = AsymptoticSeries(sigma, vals, path.end, anchor)
    out.deriv = jts[:, 1].copy()
    out.deriv2 = 2.0 * jts[:, 2]
    return out


def chi_series(graph, k: int, x: complex, N: int = 20, path: OrientedPath | None = None,
               cheb_tol=CHEB_TOL) -> AsymptoticSeries:
    """Coefficients of the fundamental chi-factor of sector ``k`` at ``x``.

    Raises
    ------
    CanonicityError
        If no canonical path from the sector infinity to ``x`` is found or
        the supplied path violates the monotonicity condition.
    """
    from .stokes import canonical_path, sector_path_check
    if path is None:
        path = canonical_path(graph, k, x, clearance=SERIES_CLEARANCE)
        if path is None:
            from .errors import CanonicityError
            raise CanonicityError(f"no canonical path from sector {k} to x = {x}")
    else:
        sector_path_check(graph, k, path)
    sec = graph.sector(k)
    return chi_series_on_path(graph.characteristic, path, sec.sqrt_anchor(path.start, graph),
                              sec.signature, N, graph.turning_points, cheb_tol, anchor=k)


def iterated_I(q: Characteristic, x: complex, x0: complex, path: OrientedPath | None = None,
               N: int = 12, sqrt_x0: complex | None = None, turning_points=None,
               cheb_tol=CHEB_TOL) -> np.ndarray:
    """Nested integrals I_0..I_N(x, x0) along a path from x0 to x.

    I_0 = 1 and I_k(x0, x0) = 0 for k >= 1.
    """
    if path is None:
        from .path import line_path
        path = line_path(x0, x)
    if abs(path.start - x0) > 1e-12 * (1 + abs(x0)) or abs(path.end - x) > 1e-12 * (1 + abs(x)):
        raise InputError("path must run from x0 to x")
    if sqrt_x0 is None:
        sqrt_x0 = np.sqrt(complex(q(x0)))
    if abs(x - x0) == 0:
        out = np.zeros(N + 1, dtype=complex)
        out[0] = 1.0
        return out
    start = np.zeros(N + 1, dtype=complex)
    start[0] = 1.0
    vals, _, _ = _series_on_path(q, path, sqrt_x0, N, start, turning_points, cheb_tol)
    return vals


def chi_series_from_point(q, path, sqrt_start, start_coeffs, N, turning_points=None):
    """Continue given coefficient values from ``path.start`` to its end.

    Useful for paths that pass through an intermediate point: the values
    there become the integration constants for the next leg.
    """
    vals, jts, _ = _series_on_path(q, path, sqrt_start, N, np.asarray(start_coeffs, complex),
                                   turning_points)
    return vals, jts


# ---------------------------------------------------------------------------
# exponential representation from the Riccati equation


def riccati_jets(q: Characteristic, x, sqrt_q, K: int, sigma: int = 1):
    """Jets of y_0..y_K in the expansion of psi'/psi = sum_k lam^{1-k} y_k.

    y_0 = sigma sqrt(q), y_1 = -q'/(4q) and
    2 y_0 y_k = -y_{k-1}' - sum_{i=1}^{k-1} y_i y_{k-i}.
    Returns an array of shape x.shape + (K+1, 1) of values.
    """
    x = np.atleast_1d(np.asarray(x, dtype=complex))
    s = np.atleast_1d(np.asarray(sqrt_q, dtype=complex))
    L = K + 2
    qj = jets.poly_jets(q.coeffs, x, L)
    y0 = sigma * jets.power(qj, 0.5, s)
    inv2y0 = jets.power(y0 * 2.0, -1.0, 1.0 / (2.0 * y0[..., 0]))
    ys = [y0]
    # y_1 = -q'/(4q) = -(1/2) y0'/y0
    ys.append(-0.5 * jets.mul(jets.deriv(y0), jets.power(y0, -1.0, 1.0 / y0[..., 0])))
    for k in range(2, K + 1):
        acc = jets.deriv(ys[k - 1])
        for i in range(1, k):
            acc = acc + jets.mul(ys[i], ys[k - i])
        ys.append(-jets.mul(acc, inv2y0))
    return np.stack([y[..., 0] for y in ys], axis=-1)


def _riccati_integrals(q, path, sqrt_anchor, K, turning_points, tol=1e-13):
    """Integrals of y_2..y_K (sigma = +1 branch) from the sector infinity."""
    nodes = PathNodes(q, path, sqrt_anchor, 2, turning_points)
    total = np.zeros(K + 1, dtype=complex)

    for p in nodes.pieces:
        def f(tau, p=p):
            tau = np.asarray(tau)
            x, dx = nodes._geometry(p, tau)
            root = nodes._sqrt(p, tau, x)
            y = riccati_jets(q, x, root, K, 1)
            return y * dx[:, None]

        v, _ = quadrature.integrate(lambda t: f(t)[:, 2:], -1.0, 1.0,
                                    abs_tol=1e-300, rel_tol=tol, raise_on_fail=False)
        total[2:] += v
    return total


def rho_pm(q: Characteristic, path: OrientedPath, sqrt_anchor: complex, sigma: int,
           N: int, turning_points=None) -> ExponentialRep:
    """Exponential representation of a fundamental chi-factor at the path end.

    With psi'/psi expanded in 1/lam, the terms of odd power in 1/lam form
    rho^- and those of even power form rho^+; rho^+ is a total derivative.
    The sign convention makes ``chi = exp(-int rho^- + int rho^+)`` for
    sigma = -1 and ``exp(+int rho^- + int rho^+)`` for sigma = +1.
    """
    K = N + 1
    ints = _riccati_integrals(q, path, sqrt_anchor, K, turning_points)
    x_end = path.end
    nodes_branch = continue_branch(q, path, sqrt_anchor, turning_points) if path.segments else None
    s_end = nodes_branch.final if nodes_branch is not None else sqrt_anchor
    yv = riccati_jets(q, np.array([x_end]), np.array([s_end]), K, 1)[0]
    n_minus = (K - 2) // 2 + 1
    n_plus = (K - 3) // 2 + 1
    rho_minus = np.array([yv[2 * n + 2] for n in range(n_minus) if 2 * n + 2 <= K])
    rho_plus = np.array([yv[2 * n + 3] for n in range(n_plus) if 2 * n + 3 <= K])
    rmi = np.array([ints[2 * n + 2] for n in range(n_minus) if 2 * n + 2 <= K])
    rpi = np.array([ints[2 * n + 3] for n in range(n_plus) if 2 * n + 3 <= K])
    return ExponentialRep(rho_minus, rho_plus, rmi, rpi, x_end, sigma)


def rho_plus_loop_integrals(q: Characteristic, center: complex, radius: float, nmax: int = 3,
                            points: int = 512):
    """Integrals of rho^+_{2n+1}, n = 0..nmax, around a circle.

    The odd Riccati coefficients do not depend on the branch of sqrt(q),
    so the integrand is periodic on the circle and the trapezoidal rule
    converges geometrically.  Returns ``(integrals, scales)`` where
    ``scales`` holds the integrals of the absolute values, the natural
    yardstick for a vanishing result.
    """
    theta = 2.0 * np.pi * np.arange(points) / points
    x = center + radius * np.exp(1j * theta)
    root = np.sqrt(np.asarray(q(x), dtype=complex))
    K = 2 * nmax + 3
    y = riccati_jets(q, x, root, K, 1)[:, 3::2]
    dx = 1j * radius * np.exp(1j * theta) * (2.0 * np.pi / points)
    vals = np.sum(y * dx[:, None], axis=0)
    scales = np.sum(np.abs(y * dx[:, None]), axis=0)
    return vals, scales


# ---------------------------------------------------------------------------
# closed-form reference for q = x (used by tests and the CLI sanity checks)


def airy_u(k: int) -> float:
    """Coefficient u_k of the Airy asymptotic series (exact rational recurrence)."""
    u = 1.0
    for j in range(1, k + 1):
        u *= (6 * j - 5) * (6 * j - 3) * (6 * j - 1) / ((2 * j - 1) * 216 * j)
    return u


def airy_u_from_chi(coeff: complex, n: int, x: float) -> complex:
    """Map the n-th recursion coefficient for q = x to the Airy u_n.

    With zeta = lam W and W = (2/3) x^{3/2}, the decaying factor
    sum (-1)^n u_n zeta^{-n} equals sum c_n (1/(2 lam))^n, so
    u_n = (-1)^n c_n (W / 2)^n.
    """
    W = 2.0 / 3.0 * x**1.5
    return (-1) ** n * coeff * (W / 2.0) ** n


def factorial(n: int) -> float:
    return float(math.factorial(n))
