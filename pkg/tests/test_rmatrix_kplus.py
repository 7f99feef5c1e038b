import numpy as np
import pytest

from qasep.qspecial import ABParameters, qpoch
from qasep.transfer import (boundary_action_residuals, kplus_coeffs, kplus_matrix,
                            r_exchange_residuals, r_matrix, truncation_checks)
from qasep.transfer.rmatrix import diag_ratio, shift_ratio

Q = 0.5


def test_exchange_relations():
    res = r_exchange_residuals(0.2, 0.3, 0.15, 0.25, Q, N=24)
    assert set(res) == {"R_y", "R_x", "R"}
    assert max(res.values()) < 1e-8


def test_identity_at_equal_arguments():
    N = 12
    assert np.abs(r_matrix(0.2, 0.3, 0.2, 0.3, Q, N) - np.eye(N * N)).max() < 1e-14


@pytest.mark.parametrize("ab", [ABParameters(0.3, 0.0, 0.4, 0.0), ABParameters(0.3, -0.2, 0.4, -0.1)])
def test_boundary_action(ab):
    assert max(boundary_action_residuals(0.2, 0.3, ab, Q, N=24)) < 1e-7


def test_diag_ratio_entries():
    d = diag_ratio(0.2, 0.6, Q, 3, space=2)
    j = np.tile(np.arange(3), 3)
    want = [qpoch(0.2 * Q ** k, None, Q) / qpoch(0.6 * Q ** k, None, Q) for k in j]
    assert np.allclose(d, want)


def test_shift_ratio_trivial():
    assert np.allclose(shift_ratio(0.4, 0.4, Q, 4), np.eye(16))


def test_shift_ratio_first_order():
    N = 3
    S = shift_ratio(0.2, 0.7, Q, N)
    # (0,1) -> (1,0) with coefficient (den - num) / (1 - q)
    assert S[1 * N + 0, 0 * N + 1] == pytest.approx((0.7 - 0.2) / (1 - Q))


def test_kplus_corner():
    ab = ABParameters(0.3, -0.2, 0.4, -0.1)
    assert kplus_coeffs(0, 0, 0.3, 0.5, ab, Q) == pytest.approx(1.0)


def test_kplus_first_row_one_way():
    ab = ABParameters(0.3, 0.0, 0.4, 0.0)
    x, y = 0.3, 0.5
    K = kplus_matrix(x, y, ab, Q, 5, "one-way")
    want = [qpoch(ab.b * y, j, Q) / qpoch(y * y, j, Q) for j in range(5)]
    assert np.allclose(K[0], want)


def test_two_way_reduces_to_one_way(rng):
    ab = ABParameters(0.3, -0.2, 0.4, 0.0)
    x, y = 0.35, 0.6
    one = kplus_matrix(x, y, ab, Q, 5, "one-way")
    two = kplus_matrix(x, y, ab, Q, 5, "two-way")
    for i, j in rng.integers(0, 5, size=(8, 2)):
        assert abs(two[i, j] / one[i, j] - 1) < 1e-10


@pytest.mark.parametrize("p, y", [(1, 0.7), (2, 1.3)])
def test_truncation_pattern(p, y):
    ab = ABParameters(0.3, -0.2, 0.4, -0.1)
    vanish, err = truncation_checks(p, y, ab, Q)
    assert vanish < 1e-12
    assert err < 1e-8
