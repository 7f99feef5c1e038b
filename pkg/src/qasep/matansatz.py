"""Matrix-product stationary state of the open chain at zero counting field."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .config import BoundaryRates
from .errors import DomainError
from .markov_oracle import open_markov, stationary_state
from .qspecial import ab_from_rates
from .transfer.aux import build_aux, truncation_size
from .transfer.open import left_vector, right_vector

__all__ = [
    "DEOperators", "SteadyWeights", "build_DE", "boundary_vectors", "steady_weights",
    "steady_weight", "verify_stationarity", "oracle_angle", "boundary_current",
]


@dataclass(frozen=True)
class DEOperators:
    """Truncated ``D = d + n_x`` and ``E = e + n_x`` with ``n_x = 1 + x A``."""

    D: np.ndarray
    E: np.ndarray
    x: float
    q: float
    rates: BoundaryRates

    @property
    def N(self):
        return self.D.shape[0]

    def algebra_defect(self):
        """``DE - q ED - (1-q)(D+E)``; its last row feels the cutoff."""
        D, E, q = self.D, self.E, self.q
        return D @ E - q * E @ D - (1 - q) * (D + E)

    def algebra_residual(self):
        return float(np.abs(self.algebra_defect()[:-1]).max())

    def boundary_residuals(self, W, V):
        """Largest entries of ``[beta D - delta E - (1-q)] V`` and its left counterpart.

        Only the first ``N - 1`` components are compared since ``e`` raises
        the top level out of the truncated space.
        """
        r, q = self.rates, self.q
        one = np.eye(self.N)
        right = (r.beta * self.D - r.delta * self.E - (1 - q) * one) @ V
        left = W @ (r.alpha * self.E - r.gamma * self.D - (1 - q) * one)
        return float(np.abs(right[:-1]).max()), float(np.abs(left[:-1]).max())


def build_DE(x, q, rates: BoundaryRates, N):
    if N < 2:
        raise DomainError(f"truncation N={N} must be at least 2")
    n_x = np.eye(N) + x * build_aux("A", N, q).matrix
    D = build_aux("d", N, q).matrix + n_x
    E = build_aux("e", N, q, x=x, y=x).matrix + n_x
    return DEOperators(D.astype(complex), E.astype(complex), x, q, rates)


def _default_N(ab, L, x):
    return truncation_size(*ab.as_tuple(), x) + L


def boundary_vectors(x, q, rates: BoundaryRates, N):
    ab = ab_from_rates(rates, q)
    ab.require_max_current("the boundary contraction")
    return left_vector(x, ab, q, N), right_vector(x, ab, q, N)


@dataclass(frozen=True)
class SteadyWeights:
    weights: np.ndarray
    L: int

    @property
    def Z(self):
        return float(self.weights.sum())

    @property
    def probabilities(self):
        return self.weights / self.weights.sum()


def steady_weights(L, q, rates: BoundaryRates, x=0.0, N=None):
    """Unnormalized weights of all ``2^L`` configurations, site 1 on the lowest bit."""
    ab = ab_from_rates(rates, q)
    ab.require_max_current("the boundary contraction")
    N = N or _default_N(ab, L, x)
    ops = build_DE(x, q, rates, N)
    W, V = boundary_vectors(x, q, rates, N)
    rows = W[None, :]
    for _ in range(L):
        rows = np.vstack([rows @ ops.E, rows @ ops.D])
    w = rows @ V
    if np.abs(w.imag).max() > 1e-10 * np.abs(w).max():
        raise DomainError("weights came out complex; the boundary parameters are not physical")
    return SteadyWeights(w.real, L)


def steady_weight(config, L, q, rates: BoundaryRates, x=0.0, N=None):
    """Weight ``<<W| prod_i [(1 - tau_i) E + tau_i D] |V>>`` of a single configuration."""
    if not 0 <= config < 2 ** L:
        raise DomainError(f"configuration {config} outside 0..{2 ** L - 1}")
    ab = ab_from_rates(rates, q)
    ab.require_max_current("the boundary contraction")
    N = N or _default_N(ab, L, x)
    ops = build_DE(x, q, rates, N)
    W, V = boundary_vectors(x, q, rates, N)
    v = W
    for i in range(L):
        v = v @ (ops.D if (config >> i) & 1 else ops.E)
    return float((v @ V).real)


def verify_stationarity(L, rates: BoundaryRates, q, N=None, x=0.0):
    """``|M_0 P| / |P|`` in the max norm."""
    P = steady_weights(L, q, rates, x, N).weights
    M = open_markov(L, q, 0.0, rates)
    return float(np.abs(M @ P).max() / np.abs(P).max())


def oracle_angle(L, rates: BoundaryRates, q, N=None, x=0.0):
    """Angle in radians between the weight vector and the kernel of the generator."""
    P = steady_weights(L, q, rates, x, N).probabilities
    ref = stationary_state(open_markov(L, q, 0.0, rates))
    u = ref / np.linalg.norm(ref)
    along = P @ u
    # atan2 keeps full precision for nearly parallel vectors, unlike arccos
    return float(np.arctan2(np.linalg.norm(P - along * u), along))


def boundary_current(probabilities, L, rates: BoundaryRates):
    """Mean particle flux through the left reservoir bond."""
    p = np.asarray(probabilities)
    occupied = (np.arange(2 ** L) & 1).astype(bool)
    return float(rates.alpha * p[~occupied].sum() - rates.gamma * p[occupied].sum())
