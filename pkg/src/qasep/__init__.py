"""Current statistics of the asymmetric simple exclusion process from transfer matrices.

Submodules
----------
markov_oracle  exact generators and brute-force cumulants
qspecial       q-series special functions and boundary parameters
transfer       transfer matrices, Q-operators, exchange operators
bethe          perturbative solution of the functional equation
matansatz      matrix-product stationary state
cli            command-line front end
"""
from .config import BetheConfig, BoundaryRates, CumulantSeries, SystemSpec, TruncationPolicy
from .errors import BranchError, ConvergenceError, DomainError
from .bethe import bethe_cumulants
from .markov_oracle import build_markov, cumulants_oracle, stationary_state

__version__ = "0.1.0"

__all__ = [
    "BetheConfig", "BoundaryRates", "CumulantSeries", "SystemSpec", "TruncationPolicy",
    "BranchError", "ConvergenceError", "DomainError",
    "bethe_cumulants", "build_markov", "cumulants_oracle", "stationary_state",
]
