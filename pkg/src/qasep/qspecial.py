"""q-series special functions and the boundary-parameter algebra.

Every routine works in double precision.  Infinite products are cut once
the next factor differs from one by less than ``PRODUCT_CUTOFF``.
"""
from __future__ import annotations

from dataclasses import dataclass
import math

import numpy as np

from .config import BoundaryRates
from .errors import ConvergenceError, DomainError

PRODUCT_CUTOFF = 1e-17
MAX_FACTORS = 200_000


def qpoch(x, n, q):
    """q-Pochhammer symbol ``(x; q)_n``.

    ``n=None`` (or ``math.inf``) gives the infinite product.  ``x`` may be a
    scalar or an array; the result has the same shape and is complex.
    """
    x = np.asarray(x, dtype=complex)
    if n is not None and n != math.inf:
        n = int(n)
        if n < 0:
            raise DomainError(f"negative order n={n}")
        out = np.ones_like(x)
        qk = 1.0
        for _ in range(n):
            out = out * (1 - x * qk)
            qk *= q
        return out[()] if out.ndim == 0 else out
    if not abs(q) < 1:
        raise DomainError(f"infinite product needs |q| < 1, got q={q}")
    out = np.ones_like(x)
    term = x.copy()
    for _ in range(MAX_FACTORS):
        if np.all(np.abs(term) < PRODUCT_CUTOFF):
            break
        out = out * (1 - term)
        term = term * q
    else:
        raise ConvergenceError("infinite q-product did not settle")
    return out[()] if out.ndim == 0 else out


def qpoch_prod(args, n, q):
    """Product of ``(c; q)_n`` over every ``c`` in ``args``."""
    out = 1.0 + 0j
    for c in args:
        out = out * qpoch(c, n, q)
    return out


def euler_coefficients(c, q, n, *, inverse=False):
    """First ``n`` power-series coefficients of ``(c s)_inf`` in ``s``.

    With ``inverse=True`` the series of ``1/(c s)_inf`` is returned instead.
    Both follow from Euler's expansions.
    """
    k = np.arange(n)
    qq = np.array([qpoch(q, j, q) for j in range(n)])
    ck = np.asarray(c, dtype=complex) ** k
    if inverse:
        return ck / qq
    sign = (-1.0) ** k
    tri = np.asarray(q, dtype=float) ** (k * (k - 1) // 2)
    return sign * tri * ck / qq


def qseries_coefficients(num, den, q, n):
    """Power-series coefficients of ``prod (a s)_inf / prod (b s)_inf``.

    ``num`` and ``den`` are sequences of the arguments ``a`` and ``b``; the
    first ``n`` coefficients in ``s`` are returned.
    """
    out = np.zeros(n, dtype=complex)
    out[0] = 1.0
    for a in num:
        out = np.convolve(out, euler_coefficients(a, q, n))[:n]
    for b in den:
        out = np.convolve(out, euler_coefficients(b, q, n, inverse=True))[:n]
    return out


@dataclass(frozen=True)
class ABParameters:
    """Boundary combinations ``a``, ``a_tilde`` (left) and ``b``, ``b_tilde`` (right)."""

    a: complex
    a_tilde: complex
    b: complex
    b_tilde: complex

    def as_tuple(self):
        return (self.a, self.a_tilde, self.b, self.b_tilde)

    @property
    def max_current(self):
        return all(abs(c) < 1 for c in self.as_tuple())

    def require_max_current(self, what="this construction"):
        if not self.max_current:
            raise DomainError(
                f"{what} needs |a|, |a_tilde|, |b|, |b_tilde| < 1, got {self.as_tuple()}")
        return self

    @classmethod
    def zero(cls):
        return cls(0.0, 0.0, 0.0, 0.0)


def _real_if_close(z):
    z = complex(z)
    return z.real if abs(z.imag) <= 1e-15 * max(1.0, abs(z.real)) else z


def _radical_pair(r, s, q):
    # roots of r z^2 - (1 - q - r + s) z - s = 0, "+" root first
    c = 1 - q - r + s
    root = np.lib.scimath.sqrt(c * c + 4 * r * s)
    return _real_if_close((c + root) / (2 * r)), _real_if_close((c - root) / (2 * r))


def ab_from_rates(rates: BoundaryRates, q):
    """Map reservoir rates to ``(a, a_tilde, b, b_tilde)``."""
    if rates.alpha == 0:
        raise DomainError("alpha=0 is a pole of the boundary parameter map")
    if rates.beta == 0:
        raise DomainError("beta=0 is a pole of the boundary parameter map")
    a, at = _radical_pair(rates.alpha, rates.gamma, q)
    b, bt = _radical_pair(rates.beta, rates.delta, q)
    return ABParameters(a, at, b, bt)


def rates_from_ab(ab: ABParameters, q):
    """Inverse of :func:`ab_from_rates`."""
    a, at, b, bt = ab.as_tuple()
    if abs((1 + a) * (1 + at)) < 1e-300 or abs((1 + b) * (1 + bt)) < 1e-300:
        raise DomainError("a, a_tilde, b or b_tilde equal to -1 has no rate preimage")
    left = (1 - q) / ((1 + a) * (1 + at))
    right = (1 - q) / ((1 + b) * (1 + bt))
    vals = [_real_if_close(v) for v in (left, right, -a * at * left, -b * bt * right)]
    if any(isinstance(v, complex) for v in vals):
        raise DomainError(f"parameters {ab.as_tuple()} give complex rates {vals}")
    return BoundaryRates(*vals)


def hyper_2phi1(a, b, c, z, q, *, tol=1e-14, max_terms=20_000):
    """Basic hypergeometric series ``2phi1(a, b; c; z)`` summed term by term."""
    total = 1.0 + 0j
    term = 1.0 + 0j
    small = 0
    qn = 1.0
    for n in range(max_terms):
        den = (1 - q * qn) * (1 - c * qn)
        num = (1 - a * qn) * (1 - b * qn)
        if num == 0:
            return total
        if abs(den) < 1e-300:
            raise DomainError(f"c={c} hits a pole of the series at n={n + 1}")
        term = term * num / den * z
        total += term
        qn *= q
        if abs(term) <= tol * max(1.0, abs(total)):
            small += 1
            if small >= 3:
                return total
        else:
            small = 0
        if abs(z) >= 1 and n > 50 and abs(term) > 1e3 * max(1.0, abs(total)):
            break
    raise ConvergenceError(f"2phi1 series diverges or converges too slowly at z={z}")


def heine_transform(a, b, c, z, q):
    """Right-hand side of Heine's third transformation of ``2phi1(a, b; c; z)``."""
    w = z * a * b / c
    return qpoch(w, None, q) / qpoch(z, None, q) * hyper_2phi1(c / a, c / b, c, w, q)


def q_derivative(f, x, q, n=1):
    """``n``-th q-derivative ``D f(x) = (f(x) - f(q x)) / x`` of a callable."""
    if n == 0:
        return f(x)
    g = lambda t: (f(t) - f(q * t)) / t
    return q_derivative(g, x, q, n - 1)


def q_binomial(n, k, q):
    return qpoch(q, n, q) / (qpoch(q, k, q) * qpoch(q, n - k, q))


def hb(x, ab: ABParameters, q, mode="two-way"):
    """Normalization ``(x^2)_inf / prod (c x)_inf``.

    ``mode='one-way'`` uses only ``a`` and ``b``; ``mode='two-way'`` also
    includes ``a_tilde`` and ``b_tilde``.
    """
    if mode == "one-way":
        cs = (ab.a, ab.b)
    elif mode == "two-way":
        cs = ab.as_tuple()
    else:
        raise DomainError(f"unknown mode {mode!r}")
    den = qpoch_prod([c * x for c in cs], None, q)
    if np.any(np.abs(den) < 1e-14):
        raise DomainError(f"x={x} sits on a pole of the normalization")
    return qpoch(np.asarray(x) ** 2, None, q) / den


def eval_F(x, L, ab: ABParameters, q):
    """Boundary function of the open chain.

    ``(1+x)^L (1+1/x)^L (x^2, x^-2)_inf / prod_c (c x, c/x)_inf`` over
    ``c`` in ``(a, a_tilde, b, b_tilde)``.  Symmetric under ``x -> 1/x``.
    """
    x = np.asarray(x, dtype=complex)
    num = (1 + x) ** L * (1 + 1 / x) ** L * qpoch(x * x, None, q) * qpoch(1 / (x * x), None, q)
    den = qpoch_prod([c * x for c in ab.as_tuple()] + [c / x for c in ab.as_tuple()], None, q)
    if np.any(np.abs(den) < 1e-14):
        raise DomainError("argument sits on a pole of the boundary function")
    return num / den


def eval_h(x, L, N):
    """Ring analogue ``(1+x)^(L-N) (1+1/x)^N`` in the sector with ``N`` particles."""
    x = np.asarray(x, dtype=complex)
    return (1 + x) ** (L - N) * (1 + 1 / x) ** N
