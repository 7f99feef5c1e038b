"""Truncated auxiliary-space operators and block contractions.

The auxiliary space is spanned by ``|0>, |1>, ..., |N-1>``.  ``S`` raises,
``S^{-1}`` lowers and annihilates ``|0>``, ``A = diag(q^n)``.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..config import TruncationPolicy
from ..errors import DomainError

DEFAULT_POLICY = TruncationPolicy()


@dataclass(frozen=True)
class AuxOperator:
    tag: str
    matrix: np.ndarray

    @property
    def N(self):
        return self.matrix.shape[0]


def raising(N):
    return np.eye(N, k=-1, dtype=complex)


def lowering(N):
    return np.eye(N, k=1, dtype=complex)


def build_aux(tag, N, q, x=0.0, y=0.0, mu=0.0):
    """One of the named operators ``A, Splus, Sminus, d, e, Amu`` truncated to ``N``."""
    if N < 2:
        raise DomainError(f"truncation N={N} must be at least 2")
    n = np.arange(N)
    if tag == "A":
        m = np.diag(q ** n.astype(float)).astype(complex)
    elif tag == "Splus":
        m = raising(N)
    elif tag == "Sminus":
        m = lowering(N)
    elif tag == "d":
        m = np.diag(1 - q ** n[1:].astype(float), k=1).astype(complex)
    elif tag == "e":
        m = np.diag(1 - x * y * q ** n[:-1].astype(float), k=-1).astype(complex)
    elif tag == "Amu":
        m = np.diag(np.exp(-n * mu)).astype(complex)
    else:
        raise DomainError(f"unknown auxiliary operator {tag!r}")
    return AuxOperator(tag, m)


def x_blocks(N, q, x, y):
    """The 2x2 block matrix ``X(x, y)`` as an array of shape ``(2, 2, N, N)``.

    Block ``[s, t]`` maps local occupation ``t`` to ``s``: the diagonal blocks
    are ``1 + x A`` and ``1 + y A``, the off-diagonal ones ``e`` (creates a
    particle) and ``d`` (removes one).
    """
    A = build_aux("A", N, q).matrix
    I = np.eye(N)
    out = np.empty((2, 2, N, N), dtype=complex)
    out[0, 0] = I + x * A
    out[0, 1] = build_aux("e", N, q, x, y).matrix
    out[1, 0] = build_aux("d", N, q).matrix
    out[1, 1] = I + y * A
    return out


def x_hat_blocks(N, q, x, y):
    """Companion blocks ``(1-q)/2 [[1 - xA, e], [-d, -1 + yA]]``."""
    X = x_blocks(N, q, x, y)
    A = build_aux("A", N, q).matrix
    I = np.eye(N)
    out = np.empty_like(X)
    out[0, 0] = I - x * A
    out[0, 1] = X[0, 1]
    out[1, 0] = -X[1, 0]
    out[1, 1] = -I + y * A
    return (1 - q) / 2 * out


def algebra_residual(N, q, x, y):
    """Entrywise residuals of the defining relations on the untruncated corner.

    Returns the largest entry of ``de - q ed - (1-q)(1 - xy A^2)``,
    ``A e - q e A`` and ``d A - q A d`` over indices ``0..N-2``.
    """
    A = build_aux("A", N, q).matrix
    d = build_aux("d", N, q).matrix
    e = build_aux("e", N, q, x, y).matrix
    I = np.eye(N)
    k = slice(0, N - 1)
    r1 = d @ e - q * e @ d - (1 - q) * (I - x * y * A @ A)
    r2 = A @ e - q * e @ A
    r3 = d @ A - q * A @ d
    return max(np.abs(r[k, k]).max() for r in (r1, r2, r3))


def contract(left, blocks, L):
    """Multiply ``L`` copies of ``blocks`` between auxiliary row vectors or a matrix.

    ``left`` has shape ``(N,)`` or ``(K, N)``.  The result ``R`` has shape
    ``(2^L, 2^L, K, N)``; ``R[c2, c1]`` is ``left @ prod_i blocks[tau2_i, tau1_i]``
    with site 1 leftmost in the product and least significant in ``c``.
    ``blocks`` is either one ``(2, 2, N, N)`` array or a list of ``L`` of them.
    """
    left = np.atleast_2d(np.asarray(left, dtype=complex))
    R = left[None, None]
    per_site = blocks if isinstance(blocks, (list, tuple)) else [blocks] * L
    for X in per_site:
        P = R.shape[0]
        new = np.matmul(R[None, :, None, :], X[:, None, :, None])
        R = new.reshape((2 * P, 2 * P) + R.shape[2:])
    return R


def truncation_size(*ratios, policy=DEFAULT_POLICY):
    """Cutoff from the slowest geometric ratio among ``ratios``."""
    r = max(abs(complex(v)) for v in ratios)
    return policy.size(r)


def tail_extrapolate(build, N, mu):
    """Remove the ``e^{-N mu}`` truncation tail of a fugacity-weighted sum.

    ``build(N)`` must return the quantity truncated at ``N``.  The sum over
    the auxiliary index behaves like ``sum_n e^{-n mu} g_n`` with ``g_n``
    converging geometrically, so the missing tail is a geometric series with
    ratio ``e^{-mu}`` up to terms of order ``rho^N``.
    """
    r = np.exp(-mu)
    lo = build(N)
    hi = build(N + 1)
    return (hi - r * lo) / (1 - r)
