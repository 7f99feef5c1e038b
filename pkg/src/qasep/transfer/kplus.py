"""Coefficients of the fused right boundary vector and their truncation pattern."""
from __future__ import annotations

import numpy as np

from ..errors import DomainError
from ..qspecial import ABParameters, qpoch
from .open import right_vector, right_vector_t


def _shifted_poch(c, z, q, n):
    # (z/c)_n c^n written as prod (c - z q^k), finite at c = 0
    out = 1.0 + 0j
    for k in range(n):
        out *= c - z * q ** k
    return out


def kplus_matrix(x, y, ab: ABParameters, q, n, mode="two-way"):
    """``K+_{i,j}(x, y)`` for ``0 <= i, j < n``; ``K+_{0,0} = 1``.

    ``mode='two-way'`` expands the generating function with both right
    parameters; ``mode='one-way'`` uses the closed product form valid when
    ``b_tilde = 0``.
    """
    if mode == "one-way":
        b = ab.b
        K = np.empty((n, n), dtype=complex)
        for i in range(n):
            for j in range(n):
                den = qpoch(q, i, q) * qpoch(y * y, i + j, q)
                if abs(den) < 1e-300:
                    raise DomainError(f"(y^2)_{i + j} vanishes at y={y}")
                K[i, j] = (qpoch(x * y * q ** j, i, q) * _shifted_poch(b, y, q, i)
                           * qpoch(b * y, j, q) / den)
        return K
    if mode != "two-way":
        raise DomainError(f"unknown mode {mode!r}")
    size = 2 * n + 4
    V = right_vector(x, ab, q, size)
    Vt = right_vector_t(y, ab, q, size)
    norm = np.ones(size, dtype=complex)
    for m in range(1, size):
        den = 1 - y * y * q ** (m - 1)
        if abs(den) < 1e-300:
            raise DomainError(f"(y^2)_{m} vanishes at y={y}")
        norm[m] = norm[m - 1] * (1 - q ** m) / den
    Vt = Vt * norm
    c = np.array([qpoch(y / x, k, q) / qpoch(q, k, q) * x ** k if x != 0 else float(k == 0)
                  for k in range(size)], dtype=complex)
    K = np.empty((n, n), dtype=complex)
    for i in range(n):
        for j in range(n):
            K[i, j] = sum(c[k] * V[i - k] * Vt[j + k] for k in range(i + 1))
    return K


def kplus_coeffs(i, j, x, y, ab: ABParameters, q, mode="two-way"):
    return kplus_matrix(x, y, ab, q, max(i, j) + 1, mode)[i, j]


def truncation_ratio(p, i, j, x, y, ab: ABParameters, q):
    """Predicted ``K+_{i+p,j+p}(x,y) / K+_{i,j}(q^p x, q^p y)`` when ``x y = q^(1-p)``."""
    b, bt = ab.b, ab.b_tilde
    pref = (_shifted_poch(b, x, q, p) * qpoch(x * b, p, q)
            * _shifted_poch(bt, y, q, p) * qpoch(y * bt, p, q)
            / qpoch(y * y, 2 * p, q) * (-y) ** p * q ** (p * (p - 1) / 2))
    return pref * qpoch(q ** (j + 1), p, q) / qpoch(q ** (i + 1), p, q)


def truncation_checks(p, y, ab: ABParameters, q, size=4, n=8):
    """Vanishing block and ratio law of ``K+`` at ``x = q^(1-p) / y``.

    Returns ``(largest |K+_{i,j}|`` with ``j < p <= i``, worst relative error
    of the ratio law over ``i, j < size)``.
    """
    x = q ** (1 - p) / y
    K = kplus_matrix(x, y, ab, q, n)
    Ks = kplus_matrix(q ** p * x, q ** p * y, ab, q, n)
    vanish = max(abs(K[i, j]) for i in range(p, n) for j in range(p))
    err = max(abs(K[i + p, j + p] / (Ks[i, j] * truncation_ratio(p, i, j, x, y, ab, q)) - 1)
              for i in range(size) for j in range(size))
    return float(vanish), float(err)
