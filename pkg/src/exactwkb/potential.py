"""Polynomial potentials, the characteristic function q = 2V - 2E and its roots.

Coefficients are stored in ascending powers.  Square-root branches are never
implied: every function that needs ``sqrt(q)`` takes its value explicitly.
"""
from __future__ import annotations

import logging
import re
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .errors import (
    ConvergenceError,
    InputError,
    ParseError,
    TurningPointProximityError,
)

logger = logging.getLogger(__name__)

DEFAULT_ROOT_TOL = 1e-12


# ---------------------------------------------------------------------------
# compensated evaluation


def _two_sum(a, b):
    s = a + b
    bb = s - a
    return s, (a - (s - bb)) + (b - bb)


_SPLIT = 134217729.0  # 2**27 + 1


def _two_prod(a, b):
    p = a * b
    ca = _SPLIT * a
    ah = ca - (ca - a)
    al = a - ah
    cb = _SPLIT * b
    bh = cb - (cb - b)
    bl = b - bh
    return p, ((ah * bh - p) + ah * bl + al * bh) + al * bl


def horner(coeffs, x):
    """Compensated Horner evaluation of an ascending-coefficient polynomial.

    The rounding errors of every product and sum are captured with
    error-free transformations (real and imaginary parts separately) and
    accumulated in a correction polynomial, which roughly doubles the
    working precision.
    """
    x = np.asarray(x, dtype=complex)
    c = np.asarray(coeffs, dtype=complex)
    xr, xi = x.real, x.imag
    rr = np.full(x.shape, c[-1].real)
    ri = np.full(x.shape, c[-1].imag)
    er = np.zeros(x.shape)
    ei = np.zeros(x.shape)
    for a in c[-2::-1]:
        # (rr + i ri) * (xr + i xi)
        p1, e1 = _two_prod(rr, xr)
        p2, e2 = _two_prod(ri, xi)
        p3, e3 = _two_prod(rr, xi)
        p4, e4 = _two_prod(ri, xr)
        re_, e5 = _two_sum(p1, -p2)
        im_, e6 = _two_sum(p3, p4)
        re_, e7 = _two_sum(re_, a.real)
        im_, e8 = _two_sum(im_, a.imag)
        # correction term follows the same recurrence
        er, ei = (er * xr - ei * xi + e1 - e2 + e5 + e7,
                  er * xi + ei * xr + e3 + e4 + e6 + e8)
        rr, ri = re_, im_
    return (rr + er) + 1j * (ri + ei)


def naive_eval(coeffs, x):
    x = np.asarray(x, dtype=complex)
    return sum(c * x**k for k, c in enumerate(np.asarray(coeffs, dtype=complex)))


# ---------------------------------------------------------------------------
# data types


@dataclass(frozen=True)
class Polynomial:
    """Complex polynomial with ascending coefficients.

    Trailing zero coefficients are stripped on construction, so the degree
    is always that of a nonzero leading term.
    """

    coefficients: tuple

    def __post_init__(self):
        c = [complex(v) for v in self.coefficients]
        while len(c) > 1 and c[-1] == 0:
            c.pop()
        object.__setattr__(self, "coefficients", tuple(c))

    @property
    def coeffs(self) -> np.ndarray:
        return np.array(self.coefficients, dtype=complex)

    @property
    def degree(self) -> int:
        return len(self.coefficients) - 1

    @property
    def leading(self) -> complex:
        return self.coefficients[-1]

    def __call__(self, x):
        return horner(self.coefficients, x)

    def derivative(self, k: int = 1) -> "Polynomial":
        c = self.coeffs
        for _ in range(k):
            if c.size == 1:
                return Polynomial((0.0,))
            c = c[1:] * np.arange(1, c.size)
        return Polynomial(tuple(c))

    def to_json(self) -> dict:
        return {"coeffs": [[v.real, v.imag] for v in self.coefficients]}

    @classmethod
    def from_json(cls, obj) -> "Polynomial":
        try:
            return cls(tuple(complex(a, b) for a, b in obj["coeffs"]))
        except (KeyError, TypeError, ValueError) as exc:
            raise InputError(f"bad polynomial JSON: {exc}") from exc

    def __str__(self) -> str:
        return format_polynomial(self)


@dataclass(frozen=True)
class Characteristic:
    """q(x) = 2 V(x) - 2 E together with the data it came from."""

    base: Polynomial
    energy: complex
    potential: Polynomial | None = None

    @property
    def degree(self) -> int:
        return self.base.degree

    @property
    def coeffs(self) -> np.ndarray:
        return self.base.coeffs

    def __call__(self, x):
        return self.base(x)

    def d1(self, x):
        return self.base.derivative(1)(x)

    def d2(self, x):
        return self.base.derivative(2)(x)

    def scale(self) -> float:
        """Largest coefficient modulus, the reference for residual tests."""
        return float(np.max(np.abs(self.coeffs)))


@dataclass(frozen=True)
class TurningPoint:
    location: complex
    multiplicity: int = 1


@dataclass(frozen=True)
class TurningPointSet:
    points: tuple
    residuals: tuple = ()

    def __len__(self):
        return len(self.points)

    def __iter__(self):
        return iter(self.points)

    def __getitem__(self, i):
        return self.points[i]

    @property
    def locations(self) -> np.ndarray:
        return np.array([p.location for p in self.points], dtype=complex)

    @property
    def all_simple(self) -> bool:
        return all(p.multiplicity == 1 for p in self.points)

    def diameter(self) -> float:
        z = self.locations
        if z.size < 2:
            return 0.0
        return float(np.max(np.abs(z[:, None] - z[None, :])))

    def reconstruct(self, leading: complex) -> np.ndarray:
        c = np.array([leading], dtype=complex)
        for p in self.points:
            for _ in range(p.multiplicity):
                c = np.convolve(c, [-p.location, 1.0])
        return c


# ---------------------------------------------------------------------------
# parsing

_TOKEN = re.compile(
    r"\s*(?:(?P<num>\d+\.\d*(?:[eE][+-]?\d+)?|\.\d+(?:[eE][+-]?\d+)?|\d+(?:[eE][+-]?\d+)?)"
    r"|(?P<pow>\*\*|\^)|(?P<op>[-+*/()])|(?P<name>[A-Za-z_]\w*))"
)


class _Parser:
    """Recursive-descent parser producing coefficient lists.

    Grammar::

        expr   := term (("+" | "-") term)*
        term   := unary (("*" | "/") unary)*
        unary  := ("+" | "-") unary | power
        power  := atom (("^" | "**") unary)?
        atom   := number | "x" | "i" | "(" expr ")"
    """

    def __init__(self, text: str, var: str = "x"):
        self.text = text
        self.var = var
        self.tokens = []
        pos = 0
        while pos < len(text):
            if text[pos:].strip() == "":
                break
            m = _TOKEN.match(text, pos)
            if not m or m.end() == pos:
                raise ParseError("unexpected character", pos + _lead_ws(text, pos), text)
            kind = m.lastgroup
            start = m.start(kind)
            self.tokens.append((kind, m.group(kind), start))
            pos = m.end()
        self.i = 0

    def peek(self):
        return self.tokens[self.i] if self.i < len(self.tokens) else (None, None, len(self.text))

    def take(self):
        tok = self.peek()
        self.i += 1
        return tok

    def parse(self):
        if not self.tokens:
            raise ParseError("empty expression", 0, self.text)
        value = self.expr()
        kind, val, pos = self.peek()
        if kind is not None:
            raise ParseError(f"unexpected token {val!r}", pos, self.text)
        return value

    def expr(self):
        acc = self.term()
        while self.peek()[1] in ("+", "-"):
            _, op, _ = self.take()
            rhs = self.term()
            acc = _padd(acc, rhs if op == "+" else [-c for c in rhs])
        return acc

    def term(self):
        acc = self.unary()
        while self.peek()[1] in ("*", "/"):
            _, op, pos = self.take()
            rhs = self.unary()
            if op == "*":
                acc = _pmul(acc, rhs)
            else:
                if len(_trim(rhs)) > 1:
                    raise ParseError("division by non-constant", pos, self.text)
                if _trim(rhs)[0] == 0:
                    raise ParseError("division by zero", pos, self.text)
                acc = [c / rhs[0] for c in acc]
        return acc

    def unary(self):
        if self.peek()[1] in ("+", "-"):
            _, op, _ = self.take()
            val = self.unary()
            return val if op == "+" else [-c for c in val]
        return self.power()

    def power(self):
        base = self.atom()
        if self.peek()[0] == "pow":
            _, _, pos = self.take()
            exp_pos = self.peek()[2]
            e = _trim(self.unary())
            if len(e) > 1:
                raise ParseError("exponent must be a constant", exp_pos, self.text)
            ev = e[0]
            if ev.imag != 0:
                raise ParseError("complex exponent", exp_pos, self.text)
            if ev.real < 0:
                raise ParseError("negative exponent", exp_pos, self.text)
            if ev.real != int(ev.real):
                raise ParseError("fractional exponent", exp_pos, self.text)
            result = [Fraction(1)]
            for _ in range(int(ev.real)):
                result = _pmul(result, base)
            return result
        return base

    def atom(self):
        kind, val, pos = self.take()
        if kind == "num":
            return [_number(val)]
        if kind == "name":
            if val == self.var:
                return [Fraction(0), Fraction(1)]
            if val in ("i", "j", "I"):
                return [complex(0, 1)]
            raise ParseError(f"unknown name {val!r}", pos, self.text)
        if val == "(":
            inner = self.expr()
            k, v, p = self.take()
            if v != ")":
                raise ParseError("expected ')'", p, self.text)
            return inner
        if kind is None:
            raise ParseError("unexpected end of expression", pos, self.text)
        raise ParseError(f"unexpected token {val!r}", pos, self.text)


def _lead_ws(text, pos):
    return len(text[pos:]) - len(text[pos:].lstrip())


def _number(tok: str):
    # exact rationals keep "x^2/2" exactly 0.5 and avoid drift in products
    try:
        return Fraction(tok)
    except ValueError:
        return Fraction(float(tok))


def _trim(c):
    c = list(c)
    while len(c) > 1 and c[-1] == 0:
        c.pop()
    return c


def _padd(a, b):
    n = max(len(a), len(b))
    return [(a[k] if k < len(a) else 0) + (b[k] if k < len(b) else 0) for k in range(n)]


def _pmul(a, b):
    out = [Fraction(0)] * (len(a) + len(b) - 1)
    for i, ai in enumerate(a):
        if ai == 0:
            continue
        for j, bj in enumerate(b):
            out[i + j] = out[i + j] + ai * bj
    return out


def parse_polynomial(text: str, var: str = "x") -> Polynomial:
    """Parse an arithmetic expression in one variable into a Polynomial.

    Supports ``+ - * / ^ **``, parentheses, integer and decimal literals and
    the imaginary unit ``i``.  Division is only allowed by constants and
    exponents must be non-negative integers.

    Examples
    --------
    >>> parse_polynomial("x^4 - 2*x").coefficients
    (0j, (-2+0j), 0j, 0j, (1+0j))
    """
    coeffs = _trim(_Parser(text, var).parse())
    return Polynomial(tuple(complex(c) for c in coeffs))


def _fmt_real(v: float) -> str:
    return repr(float(v))


def format_polynomial(p: Polynomial, var: str = "x") -> str:
    """Render a polynomial so that ``parse_polynomial`` recovers it exactly."""
    parts = []
    for k, c in enumerate(p.coefficients):
        if c == 0 and p.degree > 0:
            continue
        if c.imag == 0:
            cs = _fmt_real(c.real)
        else:
            cs = f"({_fmt_real(c.real)}+({_fmt_real(c.imag)})*i)"
        if k == 0:
            parts.append(f"({cs})")
        elif k == 1:
            parts.append(f"({cs})*{var}")
        else:
            parts.append(f"({cs})*{var}^{k}")
    return " + ".join(parts) if parts else "0"


# ---------------------------------------------------------------------------
# characteristic and roots


def characteristic(V: Polynomial, E: complex) -> Characteristic:
    """Return q(x) = 2 V(x) - 2 E."""
    if V.degree < 1:
        raise InputError("potential must have degree >= 1")
    c = 2.0 * V.coeffs
    c[0] -= 2.0 * complex(E)
    return Characteristic(Polynomial(tuple(c)), complex(E), V)


def _aberth(coeffs, max_iter=500, tol=1e-15):
    """Simultaneous Aberth-Ehrlich iteration for all roots."""
    c = np.asarray(coeffs, dtype=complex)
    n = c.size - 1
    dc = c[1:] * np.arange(1, n + 1)
    # initial points on a circle inside the Cauchy bound, rotated off symmetry
    bound = 1.0 + np.max(np.abs(c[:-1] / c[-1]))
    radius = min(bound, np.max(np.abs(c[:-1] / c[-1])) ** (1.0 / n) + 0.5)
    z = radius * np.exp(2j * np.pi * (np.arange(n) + 0.25) / n + 0.4j)
    for it in range(max_iter):
        p = np.polyval(c[::-1], z)
        dp = np.polyval(dc[::-1], z)
        ratio = np.where(dp != 0, p / np.where(dp == 0, 1, dp), 0)
        diff = z[:, None] - z[None, :]
        np.fill_diagonal(diff, np.inf)
        s = np.sum(1.0 / diff, axis=1)
        w = ratio / (1.0 - ratio * s)
        z = z - w
        if np.all(np.abs(w) <= tol * np.maximum(1.0, np.abs(z))):
            return z, True, it
    return z, False, max_iter


def _newton_polish(poly: Polynomial, z: complex, order: int, steps=8):
    """Newton on the (order-1)-th derivative, which has a simple root."""
    f = poly.derivative(order - 1)
    df = f.derivative(1)
    for _ in range(steps):
        d = df(z)
        if d == 0:
            break
        step = f(z) / d
        z = z - step
        if abs(step) <= 1e-17 * max(1.0, abs(z)):
            break
    return complex(z)


def turning_points(q: Characteristic, root_tol: float = DEFAULT_ROOT_TOL) -> TurningPointSet:
    """All roots of q with multiplicities, polished by Newton iteration.

    Raises
    ------
    ConvergenceError
        If no method reaches the residual tolerance.
    """
    poly = q.base
    n = poly.degree
    if n < 1:
        raise InputError("q must be non-constant")
    c = poly.coeffs
    z, ok, _ = _aberth(c)
    if not ok or not np.all(np.isfinite(z)):
        logger.info("Aberth iteration did not converge; using companion matrix")
        z = np.roots(c[::-1])
    scale = q.scale()
    # cluster nearby roots: candidate radius for the largest possible multiplicity
    unassigned = list(range(n))
    points = []
    residuals = []
    root_scale = 1.0 + float(np.max(np.abs(z)))
    while unassigned:
        i = unassigned.pop(0)
        group = [i]
        for m in range(n, 1, -1):
            r = root_tol ** (1.0 / m) * root_scale
            cand = [j for j in unassigned if abs(z[j] - z[i]) < 2 * r]
            if len(cand) + 1 >= m:
                centre = np.mean(z[[i] + cand[: m - 1]])
                if all(abs(z[j] - centre) < r for j in [i] + cand[: m - 1]):
                    group = [i] + cand[: m - 1]
                    break
        for j in group[1:]:
            unassigned.remove(j)
        m = len(group)
        loc = _newton_polish(poly, complex(np.mean(z[group])), m)
        res = abs(poly(loc))
        points.append(TurningPoint(loc, m))
        residuals.append(res)
    if max(residuals) >= root_tol * scale:
        logger.info("Aberth roots failed the residual test; retrying from companion matrix")
        locs = [_newton_polish(poly, complex(v), 1) for v in np.roots(c[::-1])]
        res2 = [abs(poly(v)) for v in locs]
        if max(res2) >= root_tol * scale:
            raise ConvergenceError("root polishing failed", min(max(res2), max(residuals)))
        points = [TurningPoint(v, 1) for v in locs]
        residuals = res2
    order = np.lexsort((np.array([p.location.imag for p in points]),
                        np.array([p.location.real for p in points])))
    points = [points[k] for k in order]
    residuals = [residuals[k] for k in order]
    return TurningPointSet(tuple(points), tuple(residuals))


def _check_regular(q: Characteristic, qv, threshold):
    if np.any(np.abs(qv) < threshold):
        raise TurningPointProximityError("evaluation point too close to a turning point")


def omega(q: Characteristic, x, sqrt_q, threshold: float = 1e-10):
    """omega = q''/(4 q^{3/2}) - 5 q'^2 / (16 q^{5/2}) on the given branch.

    Parameters
    ----------
    q : Characteristic
    x : complex or array
    sqrt_q : complex or array
        The value of q^{1/2} at ``x`` selecting the branch.
    """
    qv = q(x)
    _check_regular(q, qv, threshold * q.scale())
    q1 = q.d1(x)
    q2 = q.d2(x)
    s = np.asarray(sqrt_q, dtype=complex)
    return 0.25 * q2 / (qv * s) - 5.0 / 16.0 * q1**2 / (qv * qv * s)


def omega_tilde(q: Characteristic, x, sqrt_q, threshold: float = 1e-10):
    """omega * q^{-1/2}, the integrand of Omega in the xi variable."""
    return omega(q, x, sqrt_q, threshold) / np.asarray(sqrt_q, dtype=complex)
