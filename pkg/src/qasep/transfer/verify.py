"""Spec-driven entry points that run the individual identity checks."""
from __future__ import annotations

import numpy as np

from ..config import SystemSpec
from ..errors import DomainError
from ..qspecial import ab_from_rates
from . import open as op
from . import periodic as per


def _mu(spec):
    if np.real(spec.mu) <= 0:
        raise DomainError(f"mu={spec.mu} must have a positive real part")
    return spec.mu


def _ab(spec):
    return ab_from_rates(spec.rates, spec.q)


def verify_commutation(spec: SystemSpec, x, y, N=None, extrapolate=True):
    """``|[M, T(x,y)]|`` on the ring or ``|[M, U(x) T(y)]|`` on the open chain."""
    mu = _mu(spec)
    if spec.is_open:
        return float(op.commutation_residual(x, y, mu, spec.L, spec.q, spec.rates, N, extrapolate))
    return float(per.commutation_residual(x, y, mu, spec.L, spec.q, N, extrapolate))


def verify_exchange(spec: SystemSpec, x, y, N=None):
    """Exchange residuals plus the Baxter-operator checks at ``(x, y)``.

    Keys: ``UT`` and ``TU`` for the two orderings, ``PQ_commutator`` for
    ``[P(x), Q(y)]`` and ``PQ_proportional`` for ``P(x)Q(0) - P(0)Q(x)``.
    """
    mu = _mu(spec)
    if not spec.is_open:
        raise DomainError("the exchange relation concerns the open chain")
    ab = _ab(spec)
    r1, r2 = op.exchange_residuals(x, y, mu, spec.L, spec.q, ab, N)
    pq = op.OpenPQ(mu, spec.L, spec.q, ab, N)
    Px, Qy = pq.P(x), pq.Q(y)
    return {
        "UT": r1,
        "TU": r2,
        "PQ_commutator": float(np.abs(Px @ Qy - Qy @ Px).max()),
        "PQ_proportional": float(np.abs(Px @ pq.Q(0.0) - pq.P(0.0) @ pq.Q(x)).max()),
    }


def finite_t(k, x, spec: SystemSpec, N=None):
    mu = _mu(spec)
    if spec.is_open:
        return op.finite_t_open(k, x, mu, spec.L, spec.q, _ab(spec), N)
    return per.finite_t_periodic(k, x, mu, spec.L, spec.q)


def verify_decomposition(k, x, spec: SystemSpec, N=None):
    mu = _mu(spec)
    if spec.is_open:
        if k not in (1, 2):
            raise DomainError("the open decomposition is checked for k = 1 and 2")
        return op.decomposition_residual(k, x, mu, spec.L, spec.q, _ab(spec), N)
    return float(per.decomposition_residual(k, x, mu, spec.L, spec.q, N))


def verify_t2_symmetry(x, spec: SystemSpec):
    return op.t2_symmetry_residual(x, _mu(spec), spec.L, spec.q, _ab(spec))


def verify_tq_and_fusion(x, spec: SystemSpec, N=None):
    """T-Q and fusion residuals, keyed by name."""
    mu = _mu(spec)
    L, q = spec.L, spec.q
    if spec.is_open:
        ab = _ab(spec)
        pq = op.OpenPQ(mu, L, q, ab, N)
        out = {"tq": op.tq_residual(x, mu, L, q, ab, pq=pq)}
        for k in (2, 3):
            out[f"fusion_k{k}"] = op.fusion_residual(k, x, mu, L, q, ab, pq=pq)
        return out
    out = {"tq": float(per.tq_residual(x, mu, L, q, N)),
           "tq_order3": float(per.tq_order_residual(3, x, mu, L, q, N))}
    for k in (2, 3):
        f1, f2, f3 = per.fusion_residuals(k, x, mu, L, q)
        out[f"fusion_k{k}"] = float(f1)
        out[f"fusion_right_k{k}"] = float(f2)
        out[f"fusion_combined_k{k}"] = float(f3)
    return out


def markov_from_t2(spec: SystemSpec, point=-1.0, step=1e-6):
    """Generator rebuilt from ``t^[2]`` and its residual against the direct one."""
    mu = _mu(spec)
    if spec.is_open:
        return op.markov_from_t2(mu, spec.L, spec.q, spec.rates, point, step)
    return per.markov_from_t2(mu, spec.L, spec.q, point, step)


def mu_zero_limit_checks(spec: SystemSpec, mus=(1e-2, 5e-3, 2.5e-3), x=0.2, y=0.3,
                         ys=(0.1, 0.2, 0.3), N=96):
    """Deviation data of the rescaled transfer matrices along decreasing ``mu``.

    Each entry of the returned list is a dict with ``mu`` and the measured
    deviations; ``slope`` reports successive deviation ratios.
    """
    rows = []
    for mu in mus:
        if spec.is_open:
            data = op.mu_zero_limit(mu, spec.L, spec.q, _ab(spec), ys, N)
        else:
            T = per.periodic_transfer(x, y, mu, spec.L, spec.q, N, rescale=True,
                                      sector=spec.sector_N)
            data = {"deviation": float(np.abs(T - 1).max())}
        rows.append({"mu": mu, **data})
    key = "deviation"
    ratios = [rows[i][key] / rows[i + 1][key] for i in range(len(rows) - 1)]
    return {"rows": rows, "ratios": ratios}
