"""Transfer matrices of the ring and the identities they satisfy."""
from __future__ import annotations

import numpy as np

from ..errors import DomainError
from ..markov_oracle import bond_operator, periodic_markov, sector_basis
from .aux import (build_aux, contract, tail_extrapolate, truncation_size,
                  x_blocks, x_hat_blocks)


def _check_mu(mu):
    if np.real(mu) <= 0:
        raise DomainError(
            f"mu={mu} must have a positive real part for the auxiliary trace to converge")


def particle_numbers(L):
    return np.array([bin(c).count("1") for c in range(2 ** L)])


def _trace_chain(x, y, mu, L, q, N):
    Amu = build_aux("Amu", N, q, mu=mu).matrix
    R = contract(Amu, x_blocks(N, q, x, y), L)
    return np.trace(R, axis1=2, axis2=3)


def periodic_transfer(x, y, mu, L, q, N=None, *, sector=None, extrapolate=True,
                      rescale=False):
    """``Tr[A_mu prod_i X_i(x, y)]`` on the full ``2^L`` space.

    ``sector`` restricts rows and columns to one particle number.
    ``rescale=True`` multiplies by ``1 - e^{-mu}``, the normalization used
    when studying ``mu -> 0``.
    """
    _check_mu(mu)
    if N is None:
        N = truncation_size(q, x, y, x * y)
    if extrapolate:
        T = tail_extrapolate(lambda n: _trace_chain(x, y, mu, L, q, n), N, mu)
    else:
        T = _trace_chain(x, y, mu, L, q, N)
    if rescale:
        T = (1 - np.exp(-mu)) * T
    if sector is not None:
        idx = sector_basis(L, sector)
        T = T[np.ix_(idx, idx)]
    return T


def eval_h_diag(x, L):
    """``h(x) = (1+x)^(L-N) (1+1/x)^N`` on every configuration."""
    n = particle_numbers(L)
    return (1 + x) ** (L - n) * (1 + 1 / x) ** n


def finite_t_periodic(k, x, mu, L, q):
    """Exact ``k``-dimensional transfer matrix at ``y = 1 / (q^(k-1) x)``."""
    if k < 1:
        raise DomainError(f"k={k} must be at least 1")
    y = 1 / (q ** (k - 1) * x)
    if k == 1:
        Amu = np.ones((1, 1), dtype=complex)
        X = x_blocks(2, q, x, y)[:, :, :1, :1]
    else:
        Amu = build_aux("Amu", k, q, mu=mu).matrix
        X = x_blocks(k, q, x, y)
    R = contract(Amu, X, L)
    return np.trace(R, axis1=2, axis2=3)


def fundamental_blocks(x, q):
    """The 2x2 blocks of the two-dimensional transfer matrix, entry by entry."""
    return x_blocks(2, q, x, 1 / (q * x))


def lax_matrix(lam, q):
    """Lax matrix on (site, auxiliary) pairs, index ``2 tau_site + tau_aux``."""
    return np.array([[1, 0, 0, 0],
                     [0, q * lam, 1 - lam, 0],
                     [0, 1 - q * lam, lam, 0],
                     [0, 0, 0, 1]], dtype=complex)


def lax_from_blocks(x, q):
    """``diag(1, x) . X_2(x) / (1 + x)`` rearranged as a 4x4 matrix.

    Rows and columns use the pair index ``2 s + a`` with ``s`` the site
    occupation and ``a`` the auxiliary state.
    """
    X = fundamental_blocks(x, q)
    out = np.zeros((4, 4), dtype=complex)
    for s2 in (0, 1):
        for s1 in (0, 1):
            w = x if s2 == 1 else 1.0
            for a2 in (0, 1):
                for a1 in (0, 1):
                    out[2 * s2 + a2, 2 * s1 + a1] = w * X[s2, s1][a2, a1] / (1 + x)
    return out


def lam_of_x(x, q):
    return (1 + q * x) / (q * (1 + x))


def x_of_lam(lam, q):
    return -(1 - q * lam) / (q * (1 - lam))


def decomposition_residual(k, x, mu, L, q, N=None):
    """``T(x, 1/(q^(k-1) x)) - t^[k](x) - e^{-k mu} T(q^k x, q/x)``, max norm."""
    y = 1 / (q ** (k - 1) * x)
    lhs = periodic_transfer(x, y, mu, L, q, N)
    rhs = finite_t_periodic(k, x, mu, L, q) + np.exp(-k * mu) * periodic_transfer(
        q ** k * x, q / x, mu, L, q, N)
    return np.abs(lhs - rhs).max() / max(1.0, np.abs(lhs).max())


def commutation_residual(x, y, mu, L, q, N=None, extrapolate=True):
    M = periodic_markov(L, q, mu)
    T = periodic_transfer(x, y, mu, L, q, N, extrapolate=extrapolate)
    return np.abs(M @ T - T @ M).max()


def local_commutator_residual(x, y, q, N=12):
    """Residual of ``[m, X X] = X_hat X - X X_hat`` for one bond.

    Compared on auxiliary indices ``0..N-3`` where truncation cannot enter.
    """
    X = x_blocks(N, q, x, y)
    Xh = x_hat_blocks(N, q, x, y)

    def pair(first, second):
        out = np.empty((4, 4, N, N), dtype=complex)
        for c2 in range(4):
            for c1 in range(4):
                out[c2, c1] = first[c2 & 1, c1 & 1] @ second[c2 >> 1, c1 >> 1]
        return out

    m = bond_operator(np.array([[0, 0, 0, 0], [0, -q, 1, 0], [0, q, -1, 0], [0, 0, 0, 0]]), 1, 2, 2)
    Y = pair(X, X)
    lhs = np.einsum("ab,bcij->acij", m, Y) - np.einsum("abij,bc->acij", Y, m)
    rhs = pair(Xh, X) - pair(X, Xh)
    k = slice(0, N - 2)
    return np.abs((lhs - rhs)[:, :, k, k]).max()


# ----------------------------------------------------------------------------
# Baxter Q operator and functional relations


def p_operator(x, mu, L, q, N=None):
    """``T(0,0)^{-1} T(x,0)``."""
    T0 = periodic_transfer(0.0, 0.0, mu, L, q, N)
    return np.linalg.solve(T0, periodic_transfer(x, 0.0, mu, L, q, N))


def q_operator(y, mu, L, q, N=None):
    """``T(0, y)``."""
    return periodic_transfer(0.0, y, mu, L, q, N)


def tq_residual(x, mu, L, q, N=None):
    """``t^[2](x) Q(1/x) - h(x) Q(1/(qx)) - e^{-mu} h(qx) Q(q/x)``."""
    t2 = finite_t_periodic(2, x, mu, L, q)
    Qa = q_operator(1 / x, mu, L, q, N)
    Qb = q_operator(1 / (q * x), mu, L, q, N)
    Qc = q_operator(q / x, mu, L, q, N)
    lhs = t2 @ Qa
    rhs = eval_h_diag(x, L)[:, None] * Qb + np.exp(-mu) * eval_h_diag(q * x, L)[:, None] * Qc
    return np.abs(lhs - rhs).max() / max(1.0, np.abs(lhs).max())


def tq_order_residual(k, x, mu, L, q, N=None):
    """General-order relation between ``t^[k]`` and products of ``Q``.

    ``t^[k]_0 prod_{l=0}^{k-2} Q_l = sum_{n=0}^{k-1} e^{-n mu} h_n
    prod_{l=-1}^{n-2} Q_l prod_{l=n+1}^{k-1} Q_l`` with
    ``Q_l = Q(1/(q^l x))`` and ``h_n = h(q^n x)``.
    """
    Q = {l: q_operator(1 / (q ** l * x), mu, L, q, N) for l in range(-1, k)}
    eye = np.eye(2 ** L, dtype=complex)

    def prod(ls):
        out = eye
        for l in ls:
            out = out @ Q[l]
        return out

    lhs = finite_t_periodic(k, x, mu, L, q) @ prod(range(0, k - 1))
    rhs = sum(np.exp(-n * mu) * eval_h_diag(q ** n * x, L)[:, None]
              * (prod(range(-1, n - 1)) @ prod(range(n + 1, k)))
              for n in range(k))
    return np.abs(lhs - rhs).max() / max(1.0, np.abs(lhs).max())


def fusion_residuals(k, x, mu, L, q):
    """Residuals of the three fusion identities among finite ``t^[k]``.

    ``t_l^[k]`` stands for ``t^[k](q^l x)``:

    * ``t2_0 tk_1 = h_1 t(k+1)_0 + e^{-mu} h_0 t(k-1)_2``
    * ``tk_0 t2_(k-1) = h_(k-1) t(k+1)_0 + e^{-mu} h_k t(k-1)_0``
    * ``t2_0 tk_1 t2_k`` expanded with both rules.
    """
    t = lambda kk, l: finite_t_periodic(kk, q ** l * x, mu, L, q)
    h = lambda l: np.diag(eval_h_diag(q ** l * x, L))
    em = np.exp(-mu)
    scale = lambda m: max(1.0, np.abs(m).max())
    lhs1 = t(2, 0) @ t(k, 1)
    r1 = lhs1 - h(1) @ t(k + 1, 0) - em * h(0) @ t(k - 1, 2)
    lhs2 = t(k, 0) @ t(2, k - 1)
    r2 = lhs2 - h(k - 1) @ t(k + 1, 0) - em * h(k) @ t(k - 1, 0)
    lhs3 = t(2, 0) @ t(k, 1) @ t(2, k)
    rhs3 = (h(1) @ h(k) @ t(k + 2, 0) + em * h(1) @ h(k + 1) @ t(k, 0)
            + em * h(0) @ h(k) @ t(k, 2))
    if k >= 3:
        # t^[0] vanishes, so the last term only appears from k = 3 on
        rhs3 = rhs3 + em * em * h(0) @ h(k + 1) @ t(k - 2, 2)
    return (np.abs(r1).max() / scale(lhs1), np.abs(r2).max() / scale(lhs2),
            np.abs(lhs3 - rhs3).max() / scale(lhs3))


def markov_from_t2(mu, L, q, point=-1.0, step=1e-6, sector=None):
    """Rebuild the generator from the log-derivative of ``t^[2]``.

    ``point=-1`` uses ``(1-q) d/dx log(t^[2](x) / h(qx))`` at ``x = -1``;
    ``point=-1/q`` uses ``(1-1/q) d/dx log(t^[2](x) / h(x))`` at ``x = -1/q``.
    Returns ``(matrix, residual against the direct construction)``.
    """
    if np.isclose(point, -1.0):
        x0, pref, shift = -1.0, 1 - q, q
    elif np.isclose(point, -1 / q):
        x0, pref, shift = -1 / q, 1 - 1 / q, 1.0
    else:
        raise DomainError(f"reconstruction point must be -1 or -1/q, got {point}")

    def G(x):
        return finite_t_periodic(2, x, mu, L, q) / eval_h_diag(shift * x, L)[:, None]

    M = periodic_markov(L, q, mu)
    rec = pref * log_derivative(G, x0, step)
    res = np.abs(rec - M).max()
    if res > 1e-4:
        rec = pref * log_derivative(G, x0, step, richardson=True)
        res = np.abs(rec - M).max()
    if sector is not None:
        idx = sector_basis(L, sector)
        rec = rec[np.ix_(idx, idx)]
    return rec, res


def log_derivative(G, x0, step, richardson=False):
    """``G(x0)^{-1} G'(x0)`` with a central difference (optionally extrapolated)."""
    def central(h):
        return (G(x0 + h) - G(x0 - h)) / (2 * h)
    d = central(step)
    if richardson:
        d = (4 * central(step / 2) - d) / 3
    return np.linalg.solve(G(x0), d)


def mu_zero_limit(x, y, mu, L, q, N=None):
    """Largest deviation of ``(1 - e^{-mu}) T`` from the all-ones sector blocks."""
    T = periodic_transfer(x, y, mu, L, q, N, rescale=True)
    n = particle_numbers(L)
    target = (n[:, None] == n[None, :]).astype(float)
    return np.abs(T - target).max()
