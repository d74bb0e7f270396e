"""Truncated Taylor series ("jets") with vectorised arithmetic.

A jet of length ``L`` stores the Taylor coefficients ``a_0 .. a_{L-1}`` of a
function around an expansion point, so ``f(x0 + h) = sum a_k h^k``.  Arrays
carry a leading batch axis, which lets one call process every node on a
path at once.  All operations are exact up to rounding; derivatives shorten
the trustworthy length by one, antiderivatives lengthen it by one.
"""
import numpy as np


def mul(a, b):
    """Cauchy product truncated to the common length."""
    L = min(a.shape[-1], b.shape[-1])
    out = np.zeros(a.shape[:-1] + (L,), dtype=complex)
    for i in range(L):
        out[..., i:] += a[..., i : i + 1] * b[..., : L - i]
    return out


def deriv(a):
    """d/dh, keeping the length (the last entry becomes zero)."""
    L = a.shape[-1]
    out = np.zeros_like(a)
    k = np.arange(1, L)
    out[..., :-1] = a[..., 1:] * k
    return out


def integ(a, const=0.0):
    """Antiderivative vanishing at h = 0 plus ``const`` (length kept)."""
    L = a.shape[-1]
    out = np.zeros_like(a)
    out[..., 1:] = a[..., :-1] / np.arange(1, L)
    out[..., 0] = const
    return out


def power(g, alpha, g0_alpha):
    """Jet of ``g**alpha`` given the chosen branch value ``g0_alpha``.

    Uses the recurrence obtained from ``g f' = alpha g' f``.
    """
    L = g.shape[-1]
    f = np.zeros_like(g, dtype=complex)
    f[..., 0] = g0_alpha
    g0 = g[..., 0]
    for k in range(1, L):
        j = np.arange(1, k + 1)
        coef = (alpha + 1.0) * j - k
        f[..., k] = np.sum(coef * g[..., j] * f[..., k - j], axis=-1) / (k * g0)
    return f


def poly_jets(coeffs, x0, L):
    """Taylor coefficients of a polynomial around each point of ``x0``.

    ``coeffs`` are ascending.  Returns shape ``x0.shape + (L,)``.
    """
    x0 = np.asarray(x0, dtype=complex)
    c = np.asarray(coeffs, dtype=complex)
    n = c.size
    out = np.zeros(x0.shape + (L,), dtype=complex)
    # repeated synthetic division gives the shifted coefficients
    work = np.broadcast_to(c, x0.shape + (n,)).copy()
    for k in range(min(L, n)):
        m = n - k
        acc = work[..., m - 1].copy()
        for j in range(m - 2, -1, -1):
            acc, work[..., j] = work[..., j] + x0 * acc, acc
        out[..., k] = acc
        # after the sweep work[..., :m-1] holds the quotient
    return out
