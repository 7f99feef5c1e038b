"""Property-based checks of invariants across random parameters."""
import numpy as np
from hypothesis import HealthCheck, assume, given, settings
from hypothesis import strategies as st

from qasep.bethe import CircleFunction, bethe_cumulants, compose_series, revert_series
from qasep.config import BoundaryRates, SystemSpec
from qasep.markov_oracle import (cumulants_oracle, dominant_eigenvalue, open_markov,
                                 periodic_markov, restrict)
from qasep.matansatz import steady_weights
from qasep.qspecial import ABParameters, ab_from_rates, eval_F, qpoch, rates_from_ab
from qasep.transfer import open as op
from qasep.transfer import periodic_transfer

unit = st.floats(0.05, 0.95)
qs = st.floats(0.0, 0.8)
rate = st.floats(0.05, 2.0)
small_rate = st.floats(0.0, 1.0)
rates = st.builds(BoundaryRates, rate, rate, small_rate, small_rate)

SLOW = settings(max_examples=15, deadline=None,
                suppress_health_check=[HealthCheck.too_slow, HealthCheck.filter_too_much])


@st.composite
def max_current_ab(draw):
    a, b = draw(st.floats(0.0, 0.7)), draw(st.floats(0.0, 0.7))
    at, bt = -draw(st.floats(0.0, 0.5)), -draw(st.floats(0.0, 0.5))
    return ABParameters(a, at, b, bt)


@given(st.floats(-0.9, 0.9), st.integers(0, 12), st.integers(0, 12), qs)
def test_pochhammer_splits(x, n, m, q):
    lhs = qpoch(x, n + m, q)
    rhs = qpoch(x, n, q) * qpoch(x * q ** n, m, q)
    assert abs(lhs - rhs) <= 1e-13 * max(1.0, abs(lhs))


@given(rates, st.floats(0.0, 0.9))
def test_boundary_parameter_round_trip(r, q):
    back = rates_from_ab(ab_from_rates(r, q), q)
    assert np.allclose(back.as_tuple(), r.as_tuple(), rtol=1e-9, atol=1e-12)


@given(st.integers(1, 6), qs, rates)
def test_generator_columns_sum_to_zero(L, q, r):
    M = open_markov(L, q, 0.0, r)
    assert np.abs(M.sum(axis=0)).max() < 1e-13


@settings(max_examples=25, deadline=None)
@given(st.integers(1, 4), st.floats(0.1, 0.8), rates, st.floats(-0.5, 0.5))
def test_fluctuation_symmetry_open(L, q, r, mu):
    assume(min(r.gamma, r.delta) > 0.05)
    shift = np.log(r.alpha * r.beta / (r.gamma * r.delta)) + (L - 1) * np.log(1 / q)
    E = lambda m: dominant_eigenvalue(open_markov(L, q, m, r)).real
    assert abs(E(mu) - E(-mu - shift)) < 1e-9 * max(1.0, abs(E(mu)))


@settings(max_examples=25, deadline=None)
@given(st.integers(2, 5), st.floats(0.1, 0.8), st.floats(-0.5, 0.5), st.data())
def test_fluctuation_symmetry_ring(L, q, mu, data):
    N = data.draw(st.integers(1, L - 1))
    E = lambda m: dominant_eigenvalue(restrict(periodic_markov(L, q, m), L, N)).real
    assert abs(E(mu) - E(-mu - L * np.log(1 / q))) < 1e-9 * max(1.0, abs(E(mu)))


# radius above every |c| <= 0.7 keeps the argument away from the poles at c q^k
@given(max_current_ab(), st.integers(1, 5), qs, st.floats(0.75, 0.95), st.floats(0, 2 * np.pi))
def test_boundary_function_inversion(ab, L, q, r, phase):
    z = r * np.exp(1j * phase)
    f = eval_F(z, L, ab, q)
    assert abs(f - eval_F(1 / z, L, ab, q)) <= 1e-10 * max(1.0, abs(f))


@given(st.dictionaries(st.integers(-20, 20), st.complex_numbers(max_magnitude=10), max_size=6))
def test_laurent_round_trip(coef):
    f = CircleFunction.from_coefficients(coef, 64)
    for k in range(-20, 21):
        assert abs(f.laurent(k) - coef.get(k, 0)) < 1e-12


@given(st.lists(st.floats(-3, 3), min_size=4, max_size=4), st.floats(0.5, 3))
def test_series_reversion_round_trip(tail, lead):
    f = np.array([0.0, lead, *tail])
    g = revert_series(f, 5)
    assert np.allclose(compose_series(f, g, 5), [0, 1, 0, 0, 0, 0], atol=1e-9)


@SLOW
@given(st.integers(1, 8), st.floats(0.0, 0.7), max_current_ab())
def test_weights_positive(L, q, ab):
    r = rates_from_ab(ab, q)
    assert steady_weights(L, q, r).weights.min() > 0


@SLOW
@given(st.integers(1, 5), st.floats(0.0, 0.7), max_current_ab(),
       st.lists(st.floats(-0.6, 0.6), min_size=3, max_size=3))
def test_weights_x_independent(L, q, ab, xs):
    r = rates_from_ab(ab, q)
    ref = steady_weights(L, q, r, 0.0).probabilities
    for x in xs:
        assert np.abs(steady_weights(L, q, r, x).probabilities - ref).max() < 1e-10


@SLOW
@given(st.integers(1, 4), st.sampled_from([0.0, 0.3, 0.6]), max_current_ab())
def test_bethe_equals_oracle_open(L, q, ab):
    spec = SystemSpec(L, q, rates=rates_from_ab(ab, q))
    got = np.real(bethe_cumulants(spec, 3).values[1:])
    want = np.real(cumulants_oracle(spec, 3).values[1:])
    assert np.allclose(got, want, rtol=1e-6, atol=1e-12)


@SLOW
@given(st.integers(2, 6), st.floats(0.0, 0.7), st.data())
def test_bethe_equals_oracle_ring(L, q, data):
    N = data.draw(st.integers(1, L - 1))
    spec = SystemSpec(L, q, geometry="periodic", sector_N=N)
    got = np.real(bethe_cumulants(spec, 3).values[1:])
    want = np.real(cumulants_oracle(spec, 3).values[1:])
    assert np.allclose(got, want, rtol=1e-6, atol=1e-12)


@SLOW
@given(st.floats(-0.6, 0.6), st.floats(-0.6, 0.6), st.floats(0.2, 1.0), max_current_ab())
def test_open_commutation(x, y, mu, ab):
    q = 0.5
    r = rates_from_ab(ab, q)
    assert op.commutation_residual(x, y, mu, 2, q, r) < 1e-8


@SLOW
@given(st.floats(-0.6, 0.6), st.floats(-0.6, 0.6), st.floats(0.2, 1.0), st.floats(0.1, 0.8))
def test_periodic_commutation(x, y, mu, q):
    T = periodic_transfer(x, y, mu, 3, q, 48)
    M = periodic_markov(3, q, mu)
    assert np.abs(M @ T - T @ M).max() < 1e-8 * max(1.0, np.abs(T).max())
