import numpy as np
import pytest

from qasep.config import BoundaryRates, SystemSpec
from qasep.errors import DomainError
from qasep.markov_oracle import open_markov
from qasep.qspecial import ABParameters, ab_from_rates, qpoch
from qasep.transfer import (OpenPQ, boundary_residuals, khat_minus, khat_plus, open_transfer,
                            right_vector_t)
from qasep.transfer import open as op
from qasep.transfer import verify

Q, MU = 0.5, 0.3
RATES = BoundaryRates(0.6, 0.7, 0.2, 0.1)
AB = ab_from_rates(RATES, Q)
SPEC = SystemSpec(2, Q, MU, rates=RATES)


def test_plain_boundary_vector():
    v = right_vector_t(0.0, ABParameters.zero(), Q, 6)
    assert np.allclose(v, [1 / qpoch(Q, k, Q) for k in range(6)])


@pytest.mark.parametrize("x, y", [(0.2, 0.3), (-0.3, 0.6), (0.0, 0.0)])
def test_boundary_conditions(x, y):
    assert max(boundary_residuals(x, y, RATES, Q, 30)) < 1e-10


@pytest.mark.parametrize("x, y", [(0.2, 0.1), (0.0, 0.0), (-0.35, 0.45)])
def test_commutation(x, y):
    assert op.commutation_residual(x, y, MU, 2, Q, RATES, 48) < 1e-8


def test_raw_truncation_error_decays_geometrically():
    r32, r64 = (op.commutation_residual(0.2, 0.1, MU, 2, Q, RATES, N, extrapolate=False)
                for N in (32, 64))
    assert r64 / r32 < Q ** 16 * 10


def test_rejects_outside_max_current():
    with pytest.raises(DomainError, match="a_tilde"):
        open_transfer("U", 0.2, MU, 2, Q, ABParameters(1.2, 0, 0.3, 0))


def test_exchange():
    out = verify.verify_exchange(SPEC, 0.2, 0.35)
    assert max(out.values()) < 1e-8


def test_exchange_trivial_at_equal_arguments():
    out = verify.verify_exchange(SPEC, 0.2, 0.2)
    assert out["UT"] == 0 and out["TU"] == 0


def test_baxter_operators_well_conditioned():
    pq = OpenPQ(MU, 2, Q, AB)
    assert pq.condition < 1e3
    assert np.abs(pq.P(0.2) @ pq.Q(0.3) - pq.Q(0.3) @ pq.P(0.2)).max() < 1e-8


@pytest.mark.parametrize("k", [1, 2])
def test_decomposition(k):
    assert op.decomposition_residual(k, 0.2, MU, 2, Q, AB) < 1e-7


def test_fused_symmetry():
    assert op.t2_symmetry_residual(0.37, MU, 2, Q, AB) < 1e-8


def test_tq():
    assert op.tq_residual(0.2, MU, 2, Q, AB) < 1e-7


@pytest.mark.parametrize("k", [2, 3])
def test_fusion(k):
    assert op.fusion_residual(k, 0.2, MU, 2, Q, AB) < 1e-7


@pytest.mark.parametrize("L", [2, 3])
@pytest.mark.parametrize("point", [-1.0, -1 / Q])
def test_generator_from_fused_matrix(L, point):
    M, res = op.markov_from_t2(MU, L, Q, RATES, point)
    assert res < 1e-5
    assert np.abs(M - open_markov(L, Q, MU, RATES)).max() < 1e-5


def test_boundary_matrices_at_origin():
    assert np.allclose(khat_plus(0.0, Q, AB), np.eye(2))
    al, be, ga, de = RATES.as_tuple()
    want = [[(1 - al + ga) / (1 + Q), ga / Q], [al, (al - ga + Q) / (1 + Q)]]
    assert np.allclose(khat_minus(0.0, Q, AB), want)


def test_boundary_matrix_slope():
    h = 1e-6
    slope = (khat_plus(h, Q, AB) - khat_plus(-h, Q, AB)) / (2 * h)
    al, be, ga, de = RATES.as_tuple()
    assert np.allclose(slope, [[-2 * de, 2 * be], [2 * de, 1 - Q - 2 * be]], atol=1e-8)


def test_zero_field_limit():
    rows = [op.mu_zero_limit(mu, 2, Q, AB, N=96) for mu in (1e-2, 5e-3)]
    for mu, row in zip((1e-2, 5e-3), rows):
        assert row["rank_one_defect"] < 10 * mu
        assert row["y_spread"] < 10 * mu
    assert rows[0]["deviation"] / rows[1]["deviation"] == pytest.approx(2, rel=0.1)
