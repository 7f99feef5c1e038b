import numpy as np
import pytest

from qasep.config import BoundaryRates
from qasep.errors import DomainError
from qasep.qspecial import (ABParameters, ab_from_rates, euler_coefficients, eval_F, eval_h, hb,
                            heine_transform, hyper_2phi1, q_binomial, q_derivative, qpoch,
                            qpoch_prod, qseries_coefficients, rates_from_ab)


def test_qpoch_finite():
    assert qpoch(0.5, 2, 0.5) == pytest.approx(0.375)
    assert qpoch(0.3, 0, 0.7) == 1


def test_qpoch_infinite_matches_long_product():
    q, x = 0.6, 0.35
    direct = np.prod([1 - x * q ** k for k in range(400)])
    assert abs(qpoch(x, None, q) - direct) < 1e-15


def test_qpoch_vectorized():
    xs = np.array([0.1, 0.2, -0.4])
    got = qpoch(xs, None, 0.3)
    assert got.shape == (3,)
    assert np.allclose(got, [qpoch(v, None, 0.3) for v in xs], rtol=0, atol=1e-15)


def test_qpoch_rejects_q_outside_disc():
    with pytest.raises(DomainError):
        qpoch(0.2, None, 1.0)


def test_qpoch_prod():
    assert qpoch_prod([0.2, 0.3], 3, 0.5) == pytest.approx(qpoch(0.2, 3, 0.5) * qpoch(0.3, 3, 0.5))


@pytest.mark.parametrize("c", [0.3, -0.7, 0.9])
def test_euler_pair_inverts(c):
    q, n = 0.4, 30
    prod = np.convolve(euler_coefficients(c, q, n), euler_coefficients(c, q, n, inverse=True))[:n]
    assert np.allclose(prod, np.eye(1, n)[0], atol=1e-14)


def test_qseries_matches_products():
    q, s = 0.5, 0.3
    coef = qseries_coefficients([0.2, -0.4], [0.6], q, 60)
    want = qpoch(0.2 * s, None, q) * qpoch(-0.4 * s, None, q) / qpoch(0.6 * s, None, q)
    assert abs(np.polyval(coef[::-1], s) - want) < 1e-14


@pytest.mark.parametrize("rates, a, at", [
    (BoundaryRates(1, 1), 0.0, 0.0),
    (BoundaryRates(0.5, 1), 1.0, 0.0),
])
def test_ab_from_rates_tasep(rates, a, at):
    ab = ab_from_rates(rates, 0.0)
    assert ab.a == pytest.approx(a, abs=1e-15)
    assert ab.a_tilde == pytest.approx(at, abs=1e-15)


@pytest.mark.parametrize("q", [0.0, 0.3, 0.8])
def test_ab_round_trip(q):
    r = BoundaryRates(0.6, 0.7, 0.2, 0.1)
    back = rates_from_ab(ab_from_rates(r, q), q)
    assert np.allclose(back.as_tuple(), r.as_tuple(), atol=1e-14)


def test_ab_rejects_zero_injection():
    with pytest.raises(DomainError, match="alpha"):
        ab_from_rates(BoundaryRates(0.0, 1.0, 0.3, 0.0), 0.5)


def test_max_current_flag():
    assert ABParameters(0.3, -0.2, 0.5, 0).max_current
    with pytest.raises(DomainError):
        ABParameters(1.5, 0, 0.5, 0).require_max_current()


def test_2phi1_degenerate_sum():
    # with a = c the series collapses to the q-binomial theorem (b z)_inf / (z)_inf
    q, z = 0.3, 0.2
    want = qpoch(q * z, None, q) / qpoch(z, None, q)
    assert abs(hyper_2phi1(q, q, q, z, q) - want) < 1e-14


def test_heine_transform():
    args = (0.2, 0.3, 0.4, 0.25, 0.5)
    assert abs(hyper_2phi1(*args) - heine_transform(*args)) < 1e-12


def test_q_derivative_of_power():
    q, x = 0.4, 0.7
    got = q_derivative(lambda t: t ** 3, x, q)
    assert got == pytest.approx((1 - q ** 3) * x ** 2)


def test_q_binomial_symmetry():
    assert q_binomial(6, 2, 0.3) == pytest.approx(q_binomial(6, 4, 0.3))
    assert q_binomial(5, 2, 0.0) == pytest.approx(1.0)


def test_hb_one_way_at_q0():
    ab = ABParameters(0.5, 0, 0.5, 0)
    assert hb(0.2, ab, 0.0, "one-way") == pytest.approx(0.96 / 0.81)


def test_eval_F_tasep_point():
    assert eval_F(2.0, 1, ABParameters.zero(), 0.0) == pytest.approx(-10.125)


@pytest.mark.parametrize("L", [1, 2, 4])
def test_eval_F_inversion_symmetry(L):
    ab = ABParameters(0.3, -0.2, 0.4, -0.1)
    z = 0.8 * np.exp(1j * 0.7)
    assert abs(eval_F(z, L, ab, 0.35) - eval_F(1 / z, L, ab, 0.35)) < 1e-12 * abs(eval_F(z, L, ab, 0.35))


def test_eval_h():
    assert eval_h(2.0, 2, 1) == pytest.approx(4.5)
