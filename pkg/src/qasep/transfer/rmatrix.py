"""Exchange operator on two auxiliary spaces.

Everything lives on the tensor product of two truncated Fock spaces with
index ``i * N + j`` (``i`` in space 1, ``j`` in space 2).  Infinite products
of the diagonal operators ``A_1, A_2`` are evaluated entrywise; those of the
nilpotent shifts ``S_1 S_2^{-1}`` and ``S_2 S_1^{-1}`` are finite sums.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..qspecial import ABParameters, qpoch
from .aux import x_blocks
from .open import right_vector, right_vector_t


def _levels(N):
    n = np.arange(N)
    i = np.repeat(n, N)
    j = np.tile(n, N)
    return i, j


def diag_ratio(num, den, q, N, space):
    """Diagonal of ``(num A_k)_inf / (den A_k)_inf`` for ``space`` k = 1 or 2."""
    i, j = _levels(N)
    power = q ** (i if space == 1 else j).astype(float)
    return qpoch(num * power, None, q) / qpoch(den * power, None, q)


def shift_ratio(num, den, q, N, raise_first=True):
    """``(num Z)_inf / (den Z)_inf`` for ``Z = S_1 S_2^{-1}`` (or its mirror).

    Expands as ``sum_m prod_{k<m}(den - num q^k) / (q)_m  Z^m``, which stays
    finite when ``den = 0``.
    """
    D = N * N
    out = np.zeros((D, D), dtype=complex)
    i, j = _levels(N)
    coef = 1.0 + 0j
    for m in range(N):
        if m > 0:
            coef = coef * (den - num * q ** (m - 1)) / (1 - q ** m)
        if raise_first:
            ok = (j >= m) & (i + m < N)
            rows = (i[ok] + m) * N + (j[ok] - m)
        else:
            ok = (i >= m) & (j + m < N)
            rows = (i[ok] - m) * N + (j[ok] + m)
        out[rows, np.flatnonzero(ok)] = coef
    return out


@dataclass
class RFactors:
    f_y: np.ndarray
    g_minus: np.ndarray
    f_y_inv: np.ndarray
    f_x: np.ndarray
    g_plus: np.ndarray
    f_x_inv: np.ndarray
    R_y: np.ndarray
    R_x: np.ndarray
    R: np.ndarray


def _R_y(x, y, xp, yp, q, N):
    f = diag_ratio(q, xp * yp, q, N, 2)
    g = shift_ratio(y, yp, q, N, raise_first=True)
    finv = diag_ratio(xp * y, q, q, N, 2)
    return f, g, finv, (f[:, None] * g) * finv[None, :]


def _R_x(x, y, xp, yp, q, N):
    f = diag_ratio(q, x * y, q, N, 1)
    g = shift_ratio(xp, x, q, N, raise_first=False)
    finv = diag_ratio(xp * y, q, q, N, 1)
    return f, g, finv, (f[:, None] * g) * finv[None, :]


def r_factors(x, y, xp, yp, q, N):
    """Factors of ``R(x, y; x', y') = R_y(x, y; x', y') R_x(x, y'; x', y)``."""
    fy, gm, fyi, Ry = _R_y(x, y, xp, yp, q, N)
    fx, gp, fxi, Rx = _R_x(x, yp, xp, y, q, N)
    return RFactors(np.diag(fy), gm, np.diag(fyi), np.diag(fx), gp, np.diag(fxi), Ry, Rx, Ry @ Rx)


def r_matrix(x, y, xp, yp, q, N):
    return r_factors(x, y, xp, yp, q, N).R


def paired_blocks(first, second, q, N):
    """Blocks of ``X_1(first) X_2(second)`` on the tensor space."""
    X1 = x_blocks(N, q, *first)
    X2 = x_blocks(N, q, *second)
    out = np.empty((2, 2, N * N, N * N), dtype=complex)
    for a in (0, 1):
        for b in (0, 1):
            out[a, b] = sum(np.kron(X1[a, s], X2[s, b]) for s in (0, 1))
    return out


def _sector_mask(N, top):
    i, j = _levels(N)
    return (i + j) <= top


def intertwining_residual(lhs_params, R, rhs_params, q, N):
    """``max |XX_lhs R - R XX_rhs| / max(1, |XX_lhs R|)`` on sectors ``i + j <= N - 2``."""
    mask = _sector_mask(N, N - 2)
    sel = np.ix_(mask, mask)
    L = paired_blocks(*lhs_params, q, N)
    Rr = paired_blocks(*rhs_params, q, N)
    worst = 0.0
    for a in (0, 1):
        for b in (0, 1):
            left = L[a, b] @ R
            diff = (left - R @ Rr[a, b])[sel]
            worst = max(worst, np.abs(diff).max() / max(1.0, np.abs(left[sel]).max()))
    return float(worst)


def exchange_residuals(x, y, xp, yp, q, N=24):
    """Residuals of the three intertwining relations.

    * ``R_y``: swaps ``y`` and ``y'``
    * ``R_x``: swaps ``x`` and ``x'``
    * ``R``: swaps both pairs
    """
    Ry = _R_y(x, y, xp, yp, q, N)[3]
    Rx = _R_x(x, y, xp, yp, q, N)[3]
    R = r_matrix(x, y, xp, yp, q, N)
    lhs = ((x, y), (xp, yp))
    return {
        "R_y": intertwining_residual(lhs, Ry, ((x, yp), (xp, y)), q, N),
        "R_x": intertwining_residual(lhs, Rx, ((xp, y), (x, yp)), q, N),
        "R": intertwining_residual(lhs, R, ((xp, yp), (x, y)), q, N),
    }


def boundary_action_residuals(x, y, ab: ABParameters, q, N=24):
    """Action of ``R^{-1}`` on products of right boundary vectors.

    ``R^{-1}(x,x;y,y) V(x) (x) V~(y) = V(y) (x) V~(x)`` and the mirrored
    ``R^{-1}(y,y;x,x) V~(y) (x) V(x) = V~(x) (x) V(y)``, compared on sectors
    ``i + j <= N - 1``.
    """
    mask = _sector_mask(N, N - 1)
    V = lambda z: right_vector(z, ab, q, N)
    Vt = lambda z: right_vector_t(z, ab, q, N)
    out = []
    for R, v, w in ((r_matrix(x, x, y, y, q, N), np.kron(V(x), Vt(y)), np.kron(V(y), Vt(x))),
                    (r_matrix(y, y, x, x, q, N), np.kron(Vt(y), V(x)), np.kron(Vt(x), V(y)))):
        got = np.linalg.solve(R, v)
        out.append(float(np.abs(got - w)[mask].max() / max(1.0, np.abs(w[mask]).max())))
    return tuple(out)
