"""Open-chain transfer matrices, boundary vectors and Baxter operators."""
from __future__ import annotations

import numpy as np

from ..config import BoundaryRates
from ..errors import DomainError
from ..markov_oracle import open_markov
from ..qspecial import (ABParameters, ab_from_rates, eval_F, hb, qpoch,
                        qseries_coefficients)
from .aux import (build_aux, contract, tail_extrapolate, truncation_size,
                  x_blocks)
from .periodic import log_derivative


def _check_mu(mu):
    if np.real(mu) <= 0:
        raise DomainError(
            f"mu={mu} must have a positive real part for the boundary contraction to converge")


# ----------------------------------------------------------------------------
# boundary vectors (all normalized to a unit first coefficient)


def right_vector(x, ab: ABParameters, q, N):
    """Column vector of ``U``: series of ``(x s)(a_R x s) / ((b s)(b_tilde s))``, ``a_R = b b_tilde``."""
    return qseries_coefficients([x, ab.b * ab.b_tilde * x], [ab.b, ab.b_tilde], q, N)


def right_vector_t(y, ab: ABParameters, q, N):
    """Column vector of ``T``: series of ``(b y s)(b_tilde y s) / ((s)(b b_tilde s))``."""
    return qseries_coefficients([ab.b * y, ab.b_tilde * y], [1.0, ab.b * ab.b_tilde], q, N)


def _poch_ratio(z, q, N):
    # (q)_n / (z)_n for n < N
    out = np.ones(N, dtype=complex)
    for n in range(1, N):
        out[n] = out[n - 1] * (1 - q ** n) / (1 - z * q ** (n - 1))
    return out


def left_vector(x, ab: ABParameters, q, N):
    """Row vector of ``U``."""
    core = qseries_coefficients([x, ab.a * ab.a_tilde * x], [ab.a, ab.a_tilde], q, N)
    return core * _poch_ratio(x * x, q, N)


def left_vector_t(y, ab: ABParameters, q, N):
    """Row vector of ``T``."""
    core = qseries_coefficients([ab.a * y, ab.a_tilde * y], [1.0, ab.a * ab.a_tilde], q, N)
    return core * _poch_ratio(y * y, q, N)


def boundary_residuals(x, y, rates: BoundaryRates, q, N):
    """Residuals of the four boundary conditions on components ``0..N-2``.

    Returned in the order ``V, W, V_tilde, W_tilde``.
    """
    ab = ab_from_rates(rates, q)
    al, be, ga, de = rates.as_tuple()
    A = build_aux("A", N, q).matrix
    d = build_aux("d", N, q).matrix
    I = np.eye(N)
    k = slice(0, N - 1)
    ex = build_aux("e", N, q, x, x).matrix
    nx = I + x * A
    ey = build_aux("e", N, q, y, y).matrix
    ny = I + y * A
    rV = (be * (d + nx) - de * (ex + nx) - (1 - q) * I) @ right_vector(x, ab, q, N)
    rW = left_vector(x, ab, q, N) @ (al * (ex + nx) - ga * (d + nx) - (1 - q) * I)
    rVt = (be * (d - ny) - de * (ey - ny) + (1 - q) * y * A) @ right_vector_t(y, ab, q, N)
    rWt = left_vector_t(y, ab, q, N) @ (al * (ey - ny) - ga * (d - ny) + (1 - q) * y * A)
    return tuple(float(np.abs(r[k]).max()) for r in (rV, rW, rVt, rWt))


# ----------------------------------------------------------------------------
# U and T


def _default_N(ab, *spectral):
    return truncation_size(*ab.as_tuple(), *spectral)


def _row_chain(row, z, mu, L, q, ab, N):
    w = np.exp(-np.arange(N) * mu)
    if row == "U":
        left, right = left_vector(z, ab, q, N), right_vector(z, ab, q, N)
    else:
        left, right = left_vector_t(z, ab, q, N), right_vector_t(z, ab, q, N)
    R = contract(left * w, x_blocks(N, q, z, z), L)
    return R[:, :, 0, :] @ right


def open_transfer(row, spectral, mu, L, q, ab: ABParameters, N=None, *,
                  extrapolate=True, rescale=False):
    """``U(x)`` (``row='U'``) or ``T(y)`` (``row='T'``) on the ``2^L`` space.

    ``rescale=True`` multiplies by ``1 - e^{-mu}``.
    """
    if row not in ("U", "T"):
        raise DomainError(f"row must be 'U' or 'T', got {row!r}")
    ab.require_max_current("the boundary contraction")
    _check_mu(mu)
    if N is None:
        N = _default_N(ab, q, spectral, spectral * spectral)
    build = lambda n: _row_chain(row, spectral, mu, L, q, ab, n)
    out = tail_extrapolate(build, N, mu) if extrapolate else build(N)
    if rescale:
        out = (1 - np.exp(-mu)) * out
    return out


def commutation_residual(x, y, mu, L, q, rates: BoundaryRates, N=None, extrapolate=True):
    ab = ab_from_rates(rates, q)
    UT = open_transfer("U", x, mu, L, q, ab, N, extrapolate=extrapolate) @ open_transfer(
        "T", y, mu, L, q, ab, N, extrapolate=extrapolate)
    M = open_markov(L, q, mu, rates)
    return np.abs(M @ UT - UT @ M).max()


def exchange_residuals(x, y, mu, L, q, ab: ABParameters, N=None):
    """``|U(x)T(y) - U(y)T(x)|`` and ``|T(y)U(x) - T(x)U(y)|``."""
    U = {z: open_transfer("U", z, mu, L, q, ab, N) for z in {x, y}}
    T = {z: open_transfer("T", z, mu, L, q, ab, N) for z in {x, y}}
    r1 = np.abs(U[x] @ T[y] - U[y] @ T[x]).max()
    r2 = np.abs(T[y] @ U[x] - T[x] @ U[y]).max()
    return float(r1), float(r2)


class OpenPQ:
    """Normalized factors ``P(x) = h_b(x) U(x) U(0)^{-1}`` and ``Q(y) = h_b(y) U(0) T(y)``."""

    def __init__(self, mu, L, q, ab: ABParameters, N=None):
        ab.require_max_current("the Baxter operators")
        _check_mu(mu)
        self.mu, self.L, self.q, self.ab = mu, L, q, ab
        self.N = N if N is not None else _default_N(ab, q)
        self.U0 = self.U(0.0)
        self.condition = float(np.linalg.cond(self.U0))
        if not np.isfinite(self.condition) or self.condition > 1e12:
            raise DomainError(f"U(0) is singular (condition number {self.condition:.3g})")
        self._U0inv = np.linalg.inv(self.U0)

    def U(self, x):
        return open_transfer("U", x, self.mu, self.L, self.q, self.ab, self.N)

    def T(self, y):
        return open_transfer("T", y, self.mu, self.L, self.q, self.ab, self.N)

    def P(self, x):
        return hb(x, self.ab, self.q) * self.U(x) @ self._U0inv

    def Q(self, y):
        return hb(y, self.ab, self.q) * self.U0 @ self.T(y)

    def shifted_pair(self, x, k):
        """``P(x) Q(1/(q^(k-1) x)) - e^{-2k mu} P(q^k x) Q(q/x)``."""
        q = self.q
        return (self.P(x) @ self.Q(1 / (q ** (k - 1) * x))
                - np.exp(-2 * k * self.mu) * self.P(q ** k * x) @ self.Q(q / x))


def pq_build(mu, L, q, ab: ABParameters, N=None):
    return OpenPQ(mu, L, q, ab, N)


# ----------------------------------------------------------------------------
# two-dimensional auxiliary space


def kplus2(x, q, ab: ABParameters):
    b, bt = ab.b, ab.b_tilde
    D = q * q * x * x - 1
    return np.array([[1, q * x * (q * x + q * x * b * bt - b - bt) / D],
                     [x * (1 + b * bt - q * x * b - q * x * bt) / D, -b * bt * x]], dtype=complex)


def kminus2(x, q, ab: ABParameters):
    a, at = ab.a, ab.a_tilde
    D = 1 - x * x
    return np.array([[1, (a + at - x - a * at * x) / D],
                     [(a * x + at * x - 1 - a * at) / (q * D), -a * at / (q * x)]], dtype=complex)


def x2_blocks(x, q):
    return x_blocks(2, q, x, 1 / (q * x))


def x2bar_blocks(x, q):
    """Contragredient two-dimensional blocks at ``y = 1/(q x)``."""
    y = 1 / (q * x)
    A = np.diag([1.0, q]).astype(complex)
    S = np.array([[0, 0], [1, 0]], dtype=complex)
    I = np.eye(2)
    out = np.empty((2, 2, 2, 2), dtype=complex)
    out[0, 0] = I + y * A
    out[0, 1] = (I - A) @ S
    out[1, 0] = (I - x * y * A) @ S.T
    out[1, 1] = I + x * A
    return out


def _paired_blocks(x, q):
    X = x2_blocks(x, q)
    Xb = x2bar_blocks(x, q)
    Y = np.empty((2, 2, 4, 4), dtype=complex)
    for s in (0, 1):
        for t in (0, 1):
            Y[s, t] = sum(np.kron(X[s, u], Xb[u, t]) for u in (0, 1))
    return Y


def _t2_contract(x, mu, L, q, Km, Kp):
    Am = np.diag([1.0, np.exp(-mu)])
    left = Km.T.reshape(-1) @ np.kron(Am, Am)
    return contract(left, _paired_blocks(x, q), L)[:, :, 0, :] @ Kp.reshape(-1)


def t2_open_blocks(x, mu, L, q, ab: ABParameters):
    """Two-dimensional open transfer matrix built from boundary and bulk blocks.

    Normalized so that ``h_b(x) h_b(1/(qx))`` times it equals the matrix
    obtained from the Baxter operators.
    """
    return _t2_contract(x, mu, L, q, kminus2(x, q, ab), kplus2(x, q, ab))


def finite_t_open(k, x, mu, L, q, ab: ABParameters, N=None, pq=None):
    """``t_tilde^[k](x)`` of the open chain.

    ``k=1`` gives ``F(x)`` times the identity, ``k=2`` the block construction
    and larger ``k`` the Baxter-operator combination.
    """
    if k < 1:
        raise DomainError(f"k={k} must be at least 1")
    if k == 1:
        return eval_F(x, L, ab, q) * np.eye(2 ** L, dtype=complex)
    if k == 2:
        return hb(x, ab, q) * hb(1 / (q * x), ab, q) * t2_open_blocks(x, mu, L, q, ab)
    pq = pq or OpenPQ(mu, L, q, ab, N)
    return pq.shifted_pair(x, k)


def decomposition_residual(k, x, mu, L, q, ab: ABParameters, N=None, pq=None):
    """Baxter-operator combination against ``t_tilde^[k]`` (k = 1 or 2)."""
    pq = pq or OpenPQ(mu, L, q, ab, N)
    lhs = pq.shifted_pair(x, k)
    t = finite_t_open(k, x, mu, L, q, ab)
    return float(np.abs(lhs - t).max() / max(1.0, np.abs(t).max()))


def t2_symmetry_residual(x, mu, L, q, ab: ABParameters):
    a = finite_t_open(2, x, mu, L, q, ab)
    b = finite_t_open(2, 1 / (q * x), mu, L, q, ab)
    return float(np.abs(a - b).max() / max(1.0, np.abs(a).max()))


def tq_residual(x, mu, L, q, ab: ABParameters, N=None, pq=None):
    """``t2(x) Q(1/x) - F(x) Q(1/(qx)) - e^{-2mu} F(qx) Q(q/x)``, relative."""
    pq = pq or OpenPQ(mu, L, q, ab, N)
    lhs = finite_t_open(2, x, mu, L, q, ab) @ pq.Q(1 / x)
    rhs = (eval_F(x, L, ab, q) * pq.Q(1 / (q * x))
           + np.exp(-2 * mu) * eval_F(q * x, L, ab, q) * pq.Q(q / x))
    return float(np.abs(lhs - rhs).max() / max(1.0, np.abs(lhs).max()))


def fusion_residual(k, x, mu, L, q, ab: ABParameters, N=None, pq=None):
    """``t2_0 tk_1 - F_1 t(k+1)_0 - e^{-2mu} F_0 t(k-1)_2`` with ``t_l = t(q^l x)``."""
    pq = pq or OpenPQ(mu, L, q, ab, N)
    t = lambda kk, l: finite_t_open(kk, q ** l * x, mu, L, q, ab, pq=pq)
    F = lambda l: eval_F(q ** l * x, L, ab, q)
    lhs = t(2, 0) @ t(k, 1)
    r = lhs - F(1) * t(k + 1, 0) - np.exp(-2 * mu) * F(0) * t(k - 1, 2)
    return float(np.abs(r).max() / max(1.0, np.abs(lhs).max()))


# ----------------------------------------------------------------------------
# generator from the two-dimensional transfer matrix


def _t2_over_F(x, mu, L, q, ab: ABParameters, point):
    """``t_tilde^[2](x) / F(x)`` near ``x=-1/q`` or ``t_tilde^[2](x) / F(qx)`` near ``x=-1``.

    The vanishing and diverging factors of both sides are cancelled by hand
    so the expression is regular at the evaluation point.
    """
    a, at, b, bt = ab.as_tuple()
    if point == "inv_q":
        u = 1 - 1 / (q * q * x * x)
        Kp = np.array([[u, (q * x + q * x * b * bt - b - bt) / (q * x)],
                       [(1 + b * bt - q * x * b - q * x * bt) / (q * q * x), -b * bt * x * u]],
                      dtype=complex)
        Kp = Kp * (1 - 1 / (q * x * x)) / np.prod([1 - c / (q * x) for c in (a, at, b, bt)])
        Km = kminus2(x, q, ab)
        scale = 1 / ((1 + x) ** L * (1 + 1 / x) ** L)
    else:
        Km = np.array([[1 - x * x, a + at - x - a * at * x],
                       [(a * x + at * x - 1 - a * at) / q, -a * at * (1 - x * x) / (q * x)]],
                      dtype=complex)
        Kp = kplus2(x, q, ab)
        scale = (1 - q * x * x) / ((1 + q * x) ** L * (1 + 1 / (q * x)) ** L
                                   * np.prod([1 - c * x for c in (a, at, b, bt)]))
    return scale * _t2_contract(x, mu, L, q, Km, Kp)


def markov_from_t2(mu, L, q, rates: BoundaryRates, point=-1.0, step=1e-6):
    """Rebuild the open generator from ``t_tilde^[2]``.

    ``point=-1``: ``(1-q)/2 d/dx log(t2(x)/F(qx))``;
    ``point=-1/q``: ``(1-1/q)/2 d/dx log(t2(x)/F(x))``.
    Returns ``(matrix, residual against the direct construction)``.
    """
    ab = ab_from_rates(rates, q)
    if np.isclose(point, -1.0):
        x0, pref, tag = -1.0, (1 - q) / 2, "minus_one"
    elif np.isclose(point, -1 / q):
        x0, pref, tag = -1 / q, (1 - 1 / q) / 2, "inv_q"
    else:
        raise DomainError(f"reconstruction point must be -1 or -1/q, got {point}")
    G = lambda x: _t2_over_F(x, mu, L, q, ab, tag)
    M = open_markov(L, q, mu, rates)
    rec = pref * log_derivative(G, x0, step)
    res = np.abs(rec - M).max()
    if res > 1e-4:
        rec = pref * log_derivative(G, x0, step, richardson=True)
        res = np.abs(rec - M).max()
    return rec, float(res)


def khat_plus(lam, q, ab: ABParameters):
    """Right boundary matrix in the Lax parametrization ``x = -(1 - q lam)/(q (1 - lam))``."""
    x = -(1 - q * lam) / (q * (1 - lam))
    b, bt = ab.b, ab.b_tilde
    u = 1 - 1 / (q * q * x * x)
    Kp = np.array([[u, (q * x + q * x * b * bt - b - bt) / (q * x)],
                   [(1 + b * bt - q * x * b - q * x * bt) / (q * q * x), -b * bt * x * u]],
                  dtype=complex)
    Kp = Kp / ((1 - b / (q * x)) * (1 - bt / (q * x)))
    return np.diag([1.0, -q]) @ Kp @ np.array([[0, 1], [1, 0]])


def khat_minus(lam, q, ab: ABParameters):
    """Left boundary matrix in the Lax parametrization."""
    x = -(1 - q * lam) / (q * (1 - lam))
    pref = (1 - 1 / (q * x * x)) / ((1 - ab.a / (q * x)) * (1 - ab.a_tilde / (q * x)))
    return pref * np.array([[0, 1], [1, 0]]) @ kminus2(x, q, ab) @ np.diag([1.0, -1 / q])


# ----------------------------------------------------------------------------
# limit mu -> 0


def mu_zero_limit(mu, L, q, ab: ABParameters, ys=(0.1, 0.2, 0.3), N=None):
    """Convergence data of ``(1 - e^{-mu}) h_b(y) T(y)`` as ``mu -> 0``.

    Returns a dict with the rank-one defect (second over first singular
    value, worst over ``ys``), the relative spread over ``ys`` and the
    deviation from ``J / (a a_tilde, b b_tilde, q)_inf`` with ``J`` the
    all-ones matrix.
    """
    mats = [hb(y, ab, q) * open_transfer("T", y, mu, L, q, ab, N, rescale=True) for y in ys]
    defect = max(s[1] / s[0] for s in (np.linalg.svd(m, compute_uv=False) for m in mats))
    ref = mats[0]
    spread = max(np.abs(m - ref).max() for m in mats) / np.abs(ref).max()
    c = 1 / (qpoch(ab.a * ab.a_tilde, None, q) * qpoch(ab.b * ab.b_tilde, None, q)
             * qpoch(q, None, q))
    target = c * np.ones_like(ref)
    deviation = max(np.abs(m - target).max() for m in mats) / abs(c)
    return {"rank_one_defect": float(defect), "y_spread": float(spread),
            "deviation": float(deviation)}
