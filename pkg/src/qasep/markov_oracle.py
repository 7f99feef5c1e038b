"""Dense generators of the current-deformed exclusion process and their spectra.

Configurations are labelled by ``c = sum_i tau_i 2**(i-1)`` so that site 1 is
the least significant bit.  Matrices act on column vectors: ``M[c2, c1]`` is
the rate of the jump ``c1 -> c2``.
"""
from __future__ import annotations

from dataclasses import dataclass
from math import comb, factorial

import numpy as np

from .config import BoundaryRates, CumulantSeries, SystemSpec
from .errors import BranchError, ConvergenceError, DomainError

MAX_SITES = 14
DENSE_LIMIT = 4096


def _check_size(L, max_sites):
    if L > max_sites:
        raise DomainError(f"L={L} exceeds the dimension guard max_sites={max_sites}")


def site_operator(op, i, L):
    """Embed a 2x2 matrix acting on site ``i`` (1-based) into the chain."""
    out = np.ones((1, 1))
    for site in range(L, 0, -1):
        out = np.kron(out, op if site == i else np.eye(2))
    return out


def bond_operator(op, i, j, L):
    """Embed a 4x4 matrix on sites ``(i, j)``, local basis index ``2 tau_i + tau_j``."""
    op = np.asarray(op)
    D = 2 ** L
    cols = np.arange(D)
    ti = (cols >> (i - 1)) & 1
    tj = (cols >> (j - 1)) & 1
    local = 2 * ti + tj
    rest = cols & ~(1 << (i - 1)) & ~(1 << (j - 1))
    out = np.zeros((D, D), dtype=np.result_type(op, float))
    for row in range(4):
        si, sj = row >> 1, row & 1
        target = rest | (si << (i - 1)) | (sj << (j - 1))
        np.add.at(out, (target, cols), op[row, local])
    return out


def _bulk_bond(q, forward=1.0, backward=1.0):
    # hop i -> j at rate 1 (weighted by ``forward``), j -> i at rate q
    return np.array([[0, 0, 0, 0],
                     [0, -q, forward, 0],
                     [0, q * backward, -1, 0],
                     [0, 0, 0, 0]], dtype=complex)


def open_parts(L, q, rates: BoundaryRates):
    """Split the open generator as ``M0 + e^mu Jp + e^-mu Jm``."""
    al, be, ga, de = rates.as_tuple()
    M0 = site_operator(np.array([[-al, 0], [0, -ga]]), 1, L)
    M0 = M0 + site_operator(np.array([[-de, be], [de, -be]]), L, L)
    for i in range(1, L):
        M0 = M0 + bond_operator(_bulk_bond(q).real, i, i + 1, L)
    Jp = site_operator(np.array([[0, 0], [al, 0]]), 1, L)
    Jm = site_operator(np.array([[0, ga], [0, 0]]), 1, L)
    return M0, Jp, Jm


def periodic_parts(L, q, bond=None):
    """Split the periodic generator as ``M0 + e^mu Jp + e^-mu Jm``.

    The counted bond joins site ``bond`` to the next one (default: L -> 1).
    """
    bond = L if bond is None else bond
    M0 = np.zeros((2 ** L, 2 ** L))
    Jp = np.zeros_like(M0)
    Jm = np.zeros_like(M0)
    for i in range(1, L + 1):
        j = i % L + 1
        if i == bond:
            diag = np.diag([0, -q, -1, 0]).astype(float)
            M0 = M0 + bond_operator(diag, i, j, L)
            fwd = np.zeros((4, 4))
            fwd[1, 2] = 1.0
            bwd = np.zeros((4, 4))
            bwd[2, 1] = q
            Jp = Jp + bond_operator(fwd, i, j, L)
            Jm = Jm + bond_operator(bwd, i, j, L)
        else:
            M0 = M0 + bond_operator(_bulk_bond(q).real, i, j, L)
    return M0, Jp, Jm


def open_markov(L, q, mu, rates: BoundaryRates, max_sites=MAX_SITES):
    _check_size(L, max_sites)
    M0, Jp, Jm = open_parts(L, q, rates)
    return M0 + np.exp(mu) * Jp + np.exp(-mu) * Jm


def periodic_markov(L, q, mu, max_sites=MAX_SITES):
    """Full ``2^L`` periodic generator.

    ``mu`` is either one fugacity, placed on the bond ``L -> 1``, or a
    sequence of ``L`` fugacities, the i-th one on the bond ``i -> i+1``.
    """
    _check_size(L, max_sites)
    if L < 2:
        raise DomainError(f"a ring needs at least two sites, got L={L}")
    mus = np.atleast_1d(np.asarray(mu, dtype=complex))
    if mus.size == 1:
        mus = np.concatenate([np.zeros(L - 1), mus])
    if mus.size != L:
        raise DomainError(f"expected 1 or {L} bond fugacities, got {mus.size}")
    D = 2 ** L
    M = np.zeros((D, D), dtype=complex)
    for i in range(1, L + 1):
        M = M + bond_operator(_bulk_bond(q, np.exp(mus[i - 1]), np.exp(-mus[i - 1])), i, i % L + 1, L)
    return M


def sector_basis(L, N):
    """Configurations with ``N`` particles, in increasing bitmask order."""
    if not 0 <= N <= L:
        raise DomainError(f"invalid sector N={N} for L={L}")
    c = np.arange(2 ** L)
    pop = np.array([bin(v).count("1") for v in c])
    return c[pop == N]


def restrict(M, L, N):
    idx = sector_basis(L, N)
    return M[np.ix_(idx, idx)]


def build_markov(spec: SystemSpec, max_sites=MAX_SITES):
    """Dense deformed generator for ``spec``; periodic ones are sector-restricted."""
    if spec.is_open:
        return open_markov(spec.L, spec.q, spec.mu, spec.rates, max_sites)
    return restrict(periodic_markov(spec.L, spec.q, spec.mu, max_sites), spec.L, spec.sector_N)


def current_operator(spec: SystemSpec):
    """``dM/dmu`` at ``mu = 0``; its column sums weight the current."""
    if spec.is_open:
        _, Jp, Jm = open_parts(spec.L, spec.q, spec.rates)
        return Jp - Jm
    _, Jp, Jm = periodic_parts(spec.L, spec.q)
    return restrict(Jp - Jm, spec.L, spec.sector_N)


def _power_iteration(M, tol=1e-13, max_iter=200_000):
    shift = np.abs(M).sum(axis=0).max()
    A = M + shift * np.eye(M.shape[0])
    v = np.full(M.shape[0], 1.0 / M.shape[0], dtype=complex)
    lam = 0.0
    for _ in range(max_iter):
        w = A @ v
        new = np.vdot(v, w) / np.vdot(v, v)
        v = w / np.linalg.norm(w)
        if abs(new - lam) <= tol * max(1.0, abs(new)):
            return new - shift
        lam = new
    raise ConvergenceError("power iteration did not converge")


def dominant_eigenvalue(M, hint=None, tol=1e-9):
    """Top eigenvalue of ``M``.

    Without ``hint`` the eigenvalue of largest real part is returned.  With a
    ``hint`` (the value at a nearby point of a continuation path) the
    eigenvalue closest to it is returned, and a :class:`BranchError` is raised
    when two candidates are equally close within ``tol``.
    """
    M = np.asarray(M)
    if not np.all(np.isfinite(M)):
        raise DomainError("matrix has non-finite entries")
    if M.shape[0] > DENSE_LIMIT:
        if hint is not None:
            raise DomainError("branch following needs the dense solver")
        return _power_iteration(M)
    ev = np.linalg.eigvals(M)
    if hint is None:
        return ev[np.argmax(ev.real)]
    dist = np.abs(ev - hint)
    order = np.argsort(dist)
    if len(ev) > 1 and dist[order[1]] - dist[order[0]] < tol and abs(ev[order[1]] - ev[order[0]]) > tol:
        raise BranchError(f"two eigenvalues equally close to the hint {hint}")
    return ev[order[0]]


def follow_branch(matrix_of_mu, mus, start=0.0, separation=0.5):
    """Track the eigenvalue branch that starts at ``start`` along ``mus``.

    A step is rejected when the runner-up eigenvalue is not clearly farther
    from the previous value than the chosen one (ratio above ``separation``).
    """
    prev = start
    out = []
    for m in mus:
        ev = np.linalg.eigvals(matrix_of_mu(m))
        dist = np.abs(ev - prev)
        order = np.argsort(dist)
        if len(ev) > 1 and dist[order[0]] > separation * dist[order[1]]:
            raise BranchError(f"branch tracking lost at mu={m}")
        prev = ev[order[0]]
        out.append(prev)
    return np.array(out)


def cumulants_oracle(spec: SystemSpec, n_max, radius=0.1, samples=64, radial_steps=20):
    """Cumulants from a discrete Cauchy integral of ``E(mu)`` on a circle.

    The branch through ``E(0) = 0`` is followed radially out to the first
    sample and then around the circle.  ``values[k]`` is ``k!`` times the k-th
    Taylor coefficient.
    """
    if n_max > 8:
        raise DomainError(f"n_max={n_max} above the supported order 8")
    theta = 2 * np.pi * (np.arange(samples) + 0.5) / samples
    ray = np.linspace(0, 1, radial_steps + 1)[1:] * radius * np.exp(1j * theta[0])
    mat = lambda m: build_markov(spec.with_mu(m))
    start = follow_branch(mat, ray)[-1]
    try:
        vals = follow_branch(mat, radius * np.exp(1j * theta), start=start)
    except BranchError as err:
        raise BranchError(f"{err} on the circle |mu|={radius}") from err
    closing = follow_branch(mat, [radius * np.exp(1j * theta[0])], start=vals[-1])[0]
    if abs(closing - vals[0]) > 1e-8 * max(1.0, abs(vals[0])):
        raise BranchError("the tracked branch does not close around the circle")
    coef = [np.mean(vals * np.exp(-1j * k * theta)) / radius ** k * factorial(k)
            for k in range(n_max + 1)]
    return CumulantSeries(tuple(coef), method="oracle", geometry=spec.geometry)


def stationary_state(M, tol=1e-10):
    """Normalized right null vector of a stochastic generator."""
    M = np.asarray(M)
    s = np.linalg.svd(M, compute_uv=False)
    scale = max(1.0, s[0])
    if np.sum(s < tol * scale) > 1:
        raise DomainError("the generator has a degenerate kernel")
    D = M.shape[0]
    lhs = np.vstack([M, np.ones((1, D))])
    rhs = np.zeros(D + 1)
    rhs[-1] = 1.0
    p = np.linalg.lstsq(lhs, rhs, rcond=None)[0]
    if np.iscomplexobj(p):
        p = p.real
    return p


def stationary_current(spec: SystemSpec, p=None):
    """Mean current across the counted bond in the stationary state."""
    if p is None:
        p = stationary_state(build_markov(spec.with_mu(0.0)))
    return float(np.real(current_operator(spec).sum(axis=0) @ p))


# ----------------------------------------------------------------------------
# open XXZ correspondence


@dataclass(frozen=True)
class XXZParameters:
    a_z: complex
    a_plus: complex
    a_minus: complex
    b_z: complex
    b_plus: complex
    b_minus: complex
    Delta: float
    nu0: complex = 0.0
    nuL: complex = 0.0
    epsilon: complex | None = None


def xxz_anisotropy(q):
    return (q ** -0.5 + q ** 0.5) / 2


def xxz_map(rates: BoundaryRates, q, nu0=0.0, nuL=0.0, L=None):
    """Boundary fields of the spin chain equivalent to the open process.

    When ``L`` is given the constant shift ``epsilon`` is fixed by matching
    the traces of the generator and of ``sqrt(q) H``.
    """
    if q <= 0:
        raise DomainError("the spin-chain map divides by sqrt(q); q must be positive")
    al, be, ga, de = rates.as_tuple()
    s = np.sqrt(q)
    root = np.lib.scimath.sqrt
    params = XXZParameters(
        a_z=(1 - q - al + ga) / (2 * s),
        a_plus=root(al * ga / q) * np.exp(nu0),
        a_minus=root(al * ga / q) * np.exp(-nu0),
        b_z=(-1 + q + be - de) / (2 * s),
        b_plus=root(be * de / q) * np.exp(-nuL),
        b_minus=root(be * de / q) * np.exp(nuL),
        Delta=xxz_anisotropy(q),
        nu0=nu0,
        nuL=nuL,
    )
    if L is None:
        return params
    M = xxz_gauge_markov(L, q, rates, nu0, nuL)
    H = xxz_hamiltonian(L, params, q)
    eps = np.trace(M - s * H) / 2 ** L
    return XXZParameters(**{**params.__dict__, "epsilon": eps})


def xxz_inverse(params: XXZParameters, q):
    """Recover ``(rates, nu0, nuL)`` from the boundary fields."""
    s = np.sqrt(q)
    root = np.lib.scimath.sqrt
    h = (1 - q) / 2
    r0 = root((s * params.a_z - h) ** 2 + q * params.a_plus * params.a_minus)
    rL = root((s * params.b_z + h) ** 2 + q * params.b_plus * params.b_minus)
    al = r0 - s * params.a_z + h
    ga = r0 + s * params.a_z - h
    be = rL + s * params.b_z + h
    de = rL - s * params.b_z - h
    nu0 = 0.5 * np.log(params.a_plus / params.a_minus) if al * ga != 0 else params.nu0
    nuL = 0.5 * np.log(params.b_minus / params.b_plus) if be * de != 0 else params.nuL
    vals = [complex(v) for v in (al, be, ga, de)]
    if any(abs(v.imag) > 1e-12 for v in vals):
        raise DomainError(f"boundary fields map to complex rates {vals}")
    return BoundaryRates(*(v.real for v in vals)), nu0, nuL


def xxz_gauge_markov(L, q, rates: BoundaryRates, nu0=0.0, nuL=0.0):
    """Generator with the symmetric choice of bond fugacities used by the map."""
    al, be, ga, de = rates.as_tuple()
    root = np.lib.scimath.sqrt
    m0 = np.array([[-al, root(al * ga) * np.exp(-nu0)],
                   [root(al * ga) * np.exp(nu0), -ga]], dtype=complex)
    mL = np.array([[-de, root(be * de) * np.exp(nuL)],
                   [root(be * de) * np.exp(-nuL), -be]], dtype=complex)
    s = np.sqrt(q)
    bulk = np.array([[0, 0, 0, 0], [0, -q, s, 0], [0, s, -1, 0], [0, 0, 0, 0]], dtype=complex)
    M = site_operator(m0, 1, L) + site_operator(mL, L, L)
    for i in range(1, L):
        M = M + bond_operator(bulk, i, i + 1, L)
    return M


def xxz_hamiltonian(L, params: XXZParameters, q):
    """Open XXZ Hamiltonian with boundary fields ``params``.

    Bulk coupling ``(Delta sz sz + sx sx + sy sy) / 2`` on each bond.  The
    asymmetric part of the hopping telescopes into a field
    ``(1 - q) / (4 sqrt(q))`` that is subtracted at site 1 and added at site L.
    """
    D = params.Delta
    bulk = np.array([[D, 0, 0, 0], [0, -D, 2, 0], [0, 2, -D, 0], [0, 0, 0, D]], dtype=complex) / 2
    c = (1 - q) / (4 * np.sqrt(q))
    h0 = np.array([[params.a_z - c, params.a_minus], [params.a_plus, -params.a_z + c]])
    hL = np.array([[params.b_z + c, params.b_minus], [params.b_plus, -params.b_z - c]])
    H = site_operator(h0, 1, L) + site_operator(hL, L, L)
    for i in range(1, L):
        H = H + bond_operator(bulk, i, i + 1, L)
    return H


def sector_dimension(L, N):
    return comb(L, N)
