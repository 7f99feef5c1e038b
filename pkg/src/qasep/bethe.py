"""Perturbative solution of the self-consistent equation for the top eigenvalue.

Functions on the unit circle are sampled at ``z_j = exp(i pi (2j+1) / M)``,
a grid shifted by half a step so that ``z = 1`` and ``z = -1`` are never hit.
The unknown ``W(z)`` is expanded in powers of the auxiliary parameter ``B``
and solved order by order from

    W = -(1/s) log(1 - B F(z) exp(X_s[W](z)))

where ``X_s`` multiplies the Laurent coefficient of index ``k`` by
``s q^|k| / (1 - q^|k|)``.  The open chain uses ``s = 2`` with the boundary
function ``F``; the ring uses ``s = 1`` with ``h``.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import factorial

import numpy as np

from .config import BetheConfig, CumulantSeries, SystemSpec
from .errors import ConvergenceError, DomainError
from .qspecial import ABParameters, ab_from_rates, eval_F, eval_h

__all__ = [
    "CircleFunction", "BSeries", "kernel_quadrature", "eval_F", "eval_h", "convolve_X", "solve_W_series",
    "mu_and_E_of_B", "cumulants_from_series", "tasep_residue_mode", "bethe_cumulants",
]


def circle_grid(M):
    return np.exp(1j * np.pi * (2 * np.arange(M) + 1) / M)


@dataclass(frozen=True)
class CircleFunction:
    """Samples of a function on the shifted unit-circle grid."""

    samples: np.ndarray

    @property
    def M(self):
        return len(self.samples)

    @property
    def z(self):
        return circle_grid(self.M)

    @classmethod
    def from_callable(cls, f, M=512):
        if M & (M - 1):
            raise DomainError(f"grid size M={M} must be a power of two")
        return cls(np.asarray(f(circle_grid(M)), dtype=complex))

    @classmethod
    def from_coefficients(cls, coef, M=512):
        """Build from a mapping ``k -> f_k`` of Laurent coefficients."""
        z = circle_grid(M)
        return cls(sum(c * z ** k for k, c in coef.items()) * np.ones(M, dtype=complex))

    def coefficients(self):
        """Laurent coefficients ``f_k`` for ``k`` in ``fftfreq`` order, and those ``k``."""
        M = self.M
        k = np.fft.fftfreq(M, 1 / M).astype(int)
        return np.fft.fft(self.samples) / M * np.exp(-1j * np.pi * k / M), k

    def laurent(self, k):
        c, ks = self.coefficients()
        return c[np.flatnonzero(ks == k)[0]] if abs(k) < self.M // 2 else 0.0

    def mean(self):
        """Zeroth Laurent coefficient, i.e. the contour average."""
        return self.samples.mean()

    def tail(self, width=None):
        """Largest coefficient magnitude in the top ``width`` frequencies."""
        c, k = self.coefficients()
        width = width or max(1, self.M // 16)
        return np.abs(c[np.abs(k) >= self.M // 2 - width]).max()


def kernel_multiplier(M, q, scale=2.0):
    k = np.abs(np.fft.fftfreq(M, 1 / M))
    m = np.zeros(M)
    nz = k > 0
    m[nz] = scale * q ** k[nz] / (1 - q ** k[nz])
    return m


def convolve_X(f, q, scale=2.0):
    """Apply the kernel convolution to a :class:`CircleFunction` (or raw samples)."""
    samples = f.samples if isinstance(f, CircleFunction) else np.asarray(f, dtype=complex)
    out = np.fft.ifft(kernel_multiplier(len(samples), q, scale) * np.fft.fft(samples))
    return CircleFunction(out)


def kernel_quadrature(f, q, scale=2.0, terms=64):
    """Direct contour quadrature of the kernel with its series truncated at ``terms``.

    The kernel is ``sum_{k>=1} scale q^k / (1 - q^k) (w^k + w^-k)`` with
    ``w = z / z'``, averaged against ``f(z')`` over the grid.
    """
    z = f.z
    w = z[:, None] / z[None, :]
    K = np.zeros_like(w)
    for k in range(1, terms + 1):
        K += scale * q ** k / (1 - q ** k) * (w ** k + w ** -k)
    return CircleFunction(K @ f.samples / f.M)


@dataclass(frozen=True)
class BSeries:
    """``W(z) = sum_n W_n(z) B^n`` sampled on the grid; ``W[0]`` vanishes."""

    W: np.ndarray
    q: float
    scale: float
    geometry: str

    @property
    def n_max(self):
        return self.W.shape[0] - 1

    @property
    def z(self):
        return circle_grid(self.W.shape[1])

    def order(self, n):
        return CircleFunction(self.W[n])


def _series_mul(a, b, n):
    out = np.zeros_like(a)
    for k in range(n + 1):
        out[k] = sum(a[i] * b[k - i] for i in range(k + 1))
    return out


def _series_exp(a, n):
    # exp of a series with a[0] = 0, from e' = a' e
    e = np.zeros_like(a)
    e[0] = 1.0
    for k in range(1, n + 1):
        e[k] = sum(j * a[j] * e[k - j] for j in range(1, k + 1)) / k
    return e


def _solve_on_grid(source, q, scale, n_max):
    M = len(source)
    mult = kernel_multiplier(M, q, scale)
    W = np.zeros((n_max + 1, M), dtype=complex)
    for order in range(1, n_max + 1):
        XW = np.fft.ifft(mult[None, :] * np.fft.fft(W, axis=1), axis=1)
        G = source[None, :] * _series_exp(XW, n_max)
        u = np.zeros_like(W)
        u[1:] = G[:-1]
        # -(1/s) log(1 - u) = (1/s) sum_m u^m / m, only the current order is kept
        total = np.zeros_like(W)
        power = np.zeros_like(W)
        power[0] = 1.0
        for m in range(1, order + 1):
            power = _series_mul(power, u, n_max)
            total += power / m
        W[order] = total[order] / scale
    return W


def solve_W_series(L, ab: ABParameters | None, q, n_max=6, *, geometry="open", N=None,
                   config: BetheConfig = BetheConfig()):
    """Order-by-order solution ``W_1 .. W_{n_max}``.

    ``geometry='open'`` needs ``ab`` in the maximal-current domain when
    ``q > 0``; ``geometry='periodic'`` needs the particle number ``N``.
    The grid is doubled until the Laurent tail of every order is below
    ``config.tail_tol``.
    """
    if n_max > 8:
        raise DomainError(f"n_max={n_max} above the supported order 8")
    if geometry == "open":
        if q > 0 or not ab.max_current:
            ab.require_max_current("the unit-circle contour")
        src = lambda z: eval_F(z, L, ab, q)
        scale = 2.0
    elif geometry == "periodic":
        if N is None or not 0 <= N <= L:
            raise DomainError(f"periodic pipeline needs a particle number 0..{L}, got {N}")
        src = lambda z: eval_h(z, L, N)
        scale = 1.0
    else:
        raise DomainError(f"unknown geometry {geometry!r}")
    M = config.grid
    while True:
        W = _solve_on_grid(src(circle_grid(M)), q, scale, n_max)
        worst = max((CircleFunction(W[n]).tail() / max(1.0, np.abs(W[n]).max())
                     for n in range(1, n_max + 1)), default=0.0)
        if worst < config.tail_tol:
            return BSeries(W, q, scale, geometry)
        if 2 * M > config.max_grid:
            raise ConvergenceError(
                f"Laurent tail {worst:.2e} above {config.tail_tol:.0e} at the largest grid M={M}")
        M *= 2


def mu_and_E_of_B(W: BSeries):
    """Coefficients of ``mu(B)`` and ``E(B)``, index 0 being the constant term."""
    z = W.z
    mu = -W.W.mean(axis=1)
    E = -(1 - W.q) * (W.W * (z / (1 + z) ** 2)[None, :]).mean(axis=1)
    mu[0] = 0.0
    E[0] = 0.0
    return mu, E


def revert_series(f, n):
    """Compositional inverse ``g`` with ``f(g(t)) = t`` to order ``n`` (``f[0] = 0``)."""
    if abs(f[1]) == 0:
        raise DomainError("the linear coefficient vanishes; the series cannot be inverted")
    g = np.zeros(n + 1, dtype=complex)
    g[1] = 1 / f[1]
    for _ in range(n):
        acc = np.zeros(n + 1, dtype=complex)
        power = np.zeros(n + 1, dtype=complex)
        power[0] = 1.0
        for k in range(1, n + 1):
            power = np.convolve(power, g)[:n + 1]
            if k >= 2:
                acc += f[k] * power
        g = -acc / f[1]
        g[1] += 1 / f[1]
    return g


def compose_series(f, g, n):
    """``f(g(t))`` to order ``n`` for ``g[0] = 0``."""
    out = np.zeros(n + 1, dtype=complex)
    out[0] = f[0]
    power = np.zeros(n + 1, dtype=complex)
    power[0] = 1.0
    for k in range(1, n + 1):
        power = np.convolve(power, g)[:n + 1]
        out += f[k] * power
    return out


def cumulants_from_series(mu, E, n_max, geometry=""):
    """Eliminate ``B`` and return the cumulants ``c_k = k! [mu^k] E``."""
    mu = np.asarray(mu, dtype=complex)
    E = np.asarray(E, dtype=complex)
    n = min(n_max, len(mu) - 1)
    if n < 1:
        return CumulantSeries((0.0,), method="bethe", geometry=geometry)
    if abs(mu[1]) < 1e-300:
        raise DomainError("mu(B) has no linear term; the series cannot be reverted")
    B = revert_series(mu[:n + 1], n)
    e = compose_series(E[:n + 1], B, n)
    vals = tuple(complex(e[k]) * factorial(k) for k in range(n + 1))
    return CumulantSeries(vals, method="bethe", geometry=geometry)


# ----------------------------------------------------------------------------
# q = 0 with residues


def _binomial_series(d, e, order):
    # (d + t)^e truncated at t^order, any integer e, d != 0
    out = []
    coef = d ** 0  # keeps Fraction arithmetic exact
    for j in range(order + 1):
        out.append(coef * d ** (e - j))
        coef = coef * (e - j) / (j + 1)
    return out


def _truncated_product(a, b, m):
    return [sum(a[i] * b[k - i] for i in range(k + 1)) for k in range(m)]


def _residue_sum(roots, const, gamma):
    """Sum of residues over ``gamma`` of ``const * prod_r (z - r)^e_r``."""
    total = 0
    for r0 in gamma:
        m = -roots.get(r0, 0)
        if m <= 0:
            continue
        series = [const] + [0] * (m - 1)
        for r, e in roots.items():
            if r == r0 or e == 0:
                continue
            series = _truncated_product(series, _binomial_series(r0 - r, e, m - 1), m)
        total += series[m - 1]
    return total


def _exact(c):
    # floats are dyadic rationals, so real parameters can be handled exactly;
    # high-order residues otherwise lose digits to cancellation
    c = complex(c)
    return Fraction(c.real) if c.imag == 0 else c


def tasep_residue_mode(L, ab: ABParameters, n_max=6):
    """``mu(B)`` and ``E(B)`` at ``q = 0`` from residues at ``0`` and the boundary parameters.

    Valid for any real boundary parameters, including values above one
    where the unit circle no longer separates the poles.  Real parameters
    are treated in exact rational arithmetic.
    """
    cs = [_exact(c) for c in ab.as_tuple()]
    if any(abs(complex(c) + 1) < 1e-12 for c in cs):
        raise DomainError("a boundary parameter equal to -1 collides with the zero of the integrand")
    zero, one = (Fraction(0), Fraction(1)) if all(isinstance(c, Fraction) for c in cs) else (0j, 1 + 0j)
    inner = list(dict.fromkeys([zero, *cs]))
    outer = [1 / c for c in cs if c != 0]
    points = [complex(v) for v in inner + outer + [one, -one]]
    for i, u in enumerate(points):
        for v in points[i + 1:]:
            if 0 < abs(u - v) < 1e-12:
                raise DomainError(f"poles at {u} and {v} nearly coincide")
    for u in inner:
        # an inner point equal to an outer pole is only harmless if the two cancel
        net = -sum(c == u for c in cs) - sum(c != 0 and 1 / c == u for c in cs)
        net += 2 * (u == 1) + (2 * L + 2) * (u == -1) + (2 - L) * (u == 0)
        if any(abs(complex(u) - complex(v)) < 1e-12 for v in outer) and net < 0:
            raise DomainError(f"an inner pole at {complex(u)} coincides with an outer one")
    mu = np.zeros(n_max + 1, dtype=complex)
    E = np.zeros(n_max + 1, dtype=complex)
    for k in range(1, n_max + 1):
        # F^k = (-1)^k (z-1)^{2k} (z+1)^{2Lk+2k} z^{k(2-L)} / prod_c (1 - c z)^k (z - c)^k
        roots = {}

        def add(r, e):
            roots[r] = roots.get(r, 0) + e

        const = (-one) ** k
        add(one, 2 * k)
        add(-one, 2 * L * k + 2 * k)
        add(zero, k * (2 - L))
        for c in cs:
            add(c, -k)
            if c != 0:
                add(1 / c, -k)
                const /= (-c) ** k
        r_mu = dict(roots)
        r_mu[zero] = r_mu.get(zero, 0) - 1
        r_E = dict(roots)
        r_E[-one] = r_E.get(-one, 0) - 2
        mu[k] = complex(-_residue_sum(r_mu, const, inner) / (2 * k))
        E[k] = complex(-_residue_sum(r_E, const, inner) / (2 * k))
    return mu, E


def bethe_cumulants(spec: SystemSpec, n_max=6, config: BetheConfig = BetheConfig()):
    """Cumulants of the current from the functional equation.

    Open chains at ``q = 0`` with a boundary parameter of modulus one or
    more use the residue formulas; everything else uses the unit circle.
    """
    if spec.is_open:
        ab = ab_from_rates(spec.rates, spec.q)
        if spec.q == 0 and not ab.max_current:
            mu, E = tasep_residue_mode(spec.L, ab, n_max)
            return cumulants_from_series(mu, E, n_max, "open")
        W = solve_W_series(spec.L, ab, spec.q, n_max, config=config)
    else:
        W = solve_W_series(spec.L, None, spec.q, n_max, geometry="periodic", N=spec.sector_N,
                           config=config)
    mu, E = mu_and_E_of_B(W)
    return cumulants_from_series(mu, E, n_max, spec.geometry)
