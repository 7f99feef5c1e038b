import numpy as np
import pytest

from qasep.bethe import bethe_cumulants
from qasep.config import BoundaryRates, SystemSpec
from qasep.errors import DomainError
from qasep.markov_oracle import open_markov, stationary_state
from qasep.matansatz import (boundary_current, boundary_vectors, build_DE, oracle_angle,
                             steady_weight, steady_weights, verify_stationarity)

TASEP11 = BoundaryRates(1.0, 1.0)
GENERIC = BoundaryRates(0.6, 0.7, 0.2, 0.1)


def test_tasep_algebra():
    ops = build_DE(0.0, 0.0, TASEP11, 10)
    defect = ops.D @ ops.E - (ops.D + ops.E)
    assert np.all(defect[:-1] == 0)


@pytest.mark.parametrize("x, q", [(0.0, 0.4), (0.3, 0.4), (-0.5, 0.7)])
def test_quadratic_algebra(x, q):
    assert build_DE(x, q, GENERIC, 16).algebra_residual() < 1e-14


@pytest.mark.parametrize("x", [0.0, 0.3])
def test_boundary_relations(x):
    q = 0.4
    W, V = boundary_vectors(x, q, GENERIC, 40)
    assert max(build_DE(x, q, GENERIC, 40).boundary_residuals(W, V)) < 1e-10


def test_needs_two_levels():
    with pytest.raises(DomainError):
        build_DE(0.0, 0.5, GENERIC, 1)


def test_single_site():
    p = steady_weights(1, 0.0, TASEP11).probabilities
    assert np.allclose(p, [0.5, 0.5], atol=1e-15)
    assert verify_stationarity(1, TASEP11, 0.0) < 1e-12


def test_two_sites_against_oracle():
    p = steady_weights(2, 0.0, TASEP11).probabilities
    assert np.allclose(p, stationary_state(open_markov(2, 0.0, 0.0, TASEP11)), atol=1e-10)


def test_single_weight_matches_table():
    sw = steady_weights(3, 0.4, GENERIC)
    assert steady_weight(5, 3, 0.4, GENERIC) == pytest.approx(sw.weights[5], rel=1e-13)


@pytest.mark.parametrize("x", [0.3, -0.2])
def test_weights_do_not_depend_on_x(x):
    ref = steady_weights(4, 0.4, GENERIC, 0.0).probabilities
    assert np.abs(steady_weights(4, 0.4, GENERIC, x).probabilities - ref).max() < 1e-10


@pytest.mark.parametrize("L", [2, 4, 6])
def test_stationary(L):
    assert verify_stationarity(L, GENERIC, 0.4) < 1e-9
    assert oracle_angle(L, GENERIC, 0.4) < 1e-8


def test_current_matches_first_cumulant():
    L, q = 4, 0.4
    p = steady_weights(L, q, GENERIC).probabilities
    c1 = bethe_cumulants(SystemSpec(L, q, rates=GENERIC), 1).values[1].real
    assert boundary_current(p, L, GENERIC) == pytest.approx(c1, rel=1e-7)


def test_rejects_low_density_rates():
    with pytest.raises(DomainError):
        steady_weights(2, 0.3, BoundaryRates(0.2, 0.7))
