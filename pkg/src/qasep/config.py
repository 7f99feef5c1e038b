"""Plain dataclass containers for model parameters."""
from __future__ import annotations

from dataclasses import dataclass, asdict
import math

from .errors import DomainError


@dataclass(frozen=True)
class BoundaryRates:
    """Reservoir rates of the open chain.

    ``alpha`` injects and ``gamma`` extracts at the left end, ``beta``
    extracts and ``delta`` injects at the right end.
    """

    alpha: float
    beta: float
    gamma: float = 0.0
    delta: float = 0.0

    def __post_init__(self):
        for name in ("alpha", "beta", "gamma", "delta"):
            v = getattr(self, name)
            if not math.isfinite(v) or v < 0:
                raise DomainError(f"rate {name}={v!r} must be finite and non-negative")

    def check_active(self):
        if self.alpha <= 0 and self.gamma <= 0:
            raise DomainError("left reservoir inactive: alpha and gamma are both zero")
        if self.beta <= 0 and self.delta <= 0:
            raise DomainError("right reservoir inactive: beta and delta are both zero")
        return self

    def as_tuple(self):
        return (self.alpha, self.beta, self.gamma, self.delta)

    @classmethod
    def tasep(cls, alpha, beta):
        return cls(alpha, beta, 0.0, 0.0)


@dataclass(frozen=True)
class SystemSpec:
    """One instance of the current-deformed exclusion process.

    For ``geometry='periodic'`` the particle number ``sector_N`` must be set
    and ``rates`` must be omitted; for ``geometry='open'`` it is the other
    way round.
    """

    L: int
    q: float
    mu: complex = 0.0
    geometry: str = "open"
    sector_N: int | None = None
    rates: BoundaryRates | None = None

    def __post_init__(self):
        if int(self.L) != self.L or self.L < 1:
            raise DomainError(f"L={self.L!r} must be a positive integer")
        if not 0 <= self.q < 1:
            raise DomainError(f"q={self.q!r} must lie in [0, 1)")
        if self.geometry == "periodic":
            if self.L < 2:
                raise DomainError(f"a ring needs at least two sites, got L={self.L}")
            if self.sector_N is None:
                raise DomainError("periodic geometry needs sector_N")
            if not 0 <= self.sector_N <= self.L:
                raise DomainError(f"sector_N={self.sector_N} outside 0..{self.L}")
            if self.rates is not None:
                raise DomainError("periodic geometry takes no boundary rates")
        elif self.geometry == "open":
            if self.sector_N is not None:
                raise DomainError("sector_N only applies to the periodic geometry")
            if self.rates is None:
                raise DomainError("open geometry needs boundary rates")
            self.rates.check_active()
        else:
            raise DomainError(f"unknown geometry {self.geometry!r}")

    @property
    def is_open(self):
        return self.geometry == "open"

    def with_mu(self, mu):
        return SystemSpec(self.L, self.q, mu, self.geometry, self.sector_N, self.rates)

    def to_dict(self):
        d = asdict(self)
        mu = complex(self.mu)
        d["mu"] = mu.real if mu.imag == 0 else [mu.real, mu.imag]
        return d


@dataclass(frozen=True)
class TruncationPolicy:
    """Rule for the auxiliary-space cutoff: ``ceil(ln tol / ln r) + pad``, capped."""

    tol: float = 1e-12
    pad: int = 8
    cap: int = 96
    floor: int = 8

    def size(self, ratio):
        r = float(abs(ratio))
        if r >= 1:
            return self.cap
        if r == 0:
            return max(self.floor, self.pad)
        n = math.ceil(math.log(self.tol) / math.log(r)) + self.pad
        return int(min(max(n, self.floor), self.cap))


@dataclass(frozen=True)
class BetheConfig:
    """Numerical knobs of the unit-circle series solver."""

    n_max: int = 6
    grid: int = 512
    tail_tol: float = 1e-10
    max_grid: int = 8192


@dataclass(frozen=True)
class CumulantSeries:
    """Taylor data of the top eigenvalue ``E(mu) = sum_k c_k mu^k / k!``.

    ``values[k]`` holds ``c_k``; ``values[0]`` is the value at ``mu = 0``
    and vanishes for a stochastic generator.
    """

    values: tuple
    method: str = ""
    geometry: str = ""

    @property
    def n_max(self):
        return len(self.values) - 1

    def cumulant(self, k):
        return self.values[k]

    def taylor(self):
        return tuple(c / math.factorial(k) for k, c in enumerate(self.values))
