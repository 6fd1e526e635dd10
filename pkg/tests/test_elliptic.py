import math

import mpmath
import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from scipy.integrate import quad, solve_ivp

from hill_krein import elliptic
from hill_krein.kernels import numba_impl, numpy_impl


def test_frozen_values():
    K, E = elliptic.complete_integrals(0.5)
    np.testing.assert_allclose(K, 1.6857503548126, rtol=0, atol=1e-12)
    np.testing.assert_allclose(E, 1.4674622093395, rtol=0, atol=1e-12)
    assert elliptic.ellipk(0.0) == pytest.approx(math.pi / 2, abs=1e-15)
    assert elliptic.ellipe(0.0) == pytest.approx(math.pi / 2, abs=1e-15)


def test_pi_closed_forms():
    np.testing.assert_allclose(elliptic.ellint_pi(-2.0, 0.0), math.pi / (2 * math.sqrt(3)), rtol=1e-14)
    for k in (0.1, 0.5, 0.9):
        np.testing.assert_allclose(elliptic.ellint_pi(0.0, k), elliptic.ellipk(k), rtol=1e-14)


@pytest.mark.parametrize("k", np.linspace(0.0, 0.99, 12))
def test_complete_against_mpmath(k):
    K, E = elliptic.complete_integrals(k)
    m = mpmath.mpf(k) ** 2
    assert abs(K - float(mpmath.ellipk(m))) < 1e-13
    assert abs(E - float(mpmath.ellipe(m))) < 1e-13


@settings(max_examples=40, deadline=None)
@given(n=st.floats(-5.0, 0.95), k=st.floats(0.0, 0.95))
def test_pi_against_quadrature(n, k):
    def integrand(t):
        s2 = math.sin(t) ** 2
        return 1.0 / ((1.0 - n * s2) * math.sqrt(1.0 - k * k * s2))

    ref, _ = quad(integrand, 0.0, math.pi / 2, epsabs=0, epsrel=2e-14, limit=200)
    np.testing.assert_allclose(elliptic.ellint_pi(n, k), ref, rtol=1e-11)


@settings(max_examples=40, deadline=None)
@given(k=st.floats(0.01, 0.99))
def test_e_not_above_k(k):
    K, E = elliptic.complete_integrals(k)
    assert E <= K


def test_pi_increasing_in_n():
    ns = np.linspace(-3.0, 0.9, 30)
    vals = [elliptic.ellint_pi(n, 0.6) for n in ns]
    assert np.all(np.diff(vals) > 0)


@pytest.mark.parametrize("k", [0.3, 0.8, 0.95])
def test_jacobi_against_ode(k):
    m = k * k
    K = elliptic.ellipk(k)
    xs = np.linspace(0.0, 4 * K, 41)

    def rhs(_, y):
        sn, cn, dn = y
        return [cn * dn, -sn * dn, -m * sn * cn]

    sol = solve_ivp(rhs, (0.0, xs[-1]), [0.0, 1.0, 1.0], t_eval=xs, method="DOP853", rtol=1e-13, atol=1e-13)
    sn, cn, dn = elliptic.jacobi(xs, k)
    np.testing.assert_allclose(sn, sol.y[0], atol=1e-10)
    np.testing.assert_allclose(cn, sol.y[1], atol=1e-10)
    np.testing.assert_allclose(dn, sol.y[2], atol=1e-10)


@pytest.mark.parametrize("k", [0.3, 0.8, 0.95])
def test_jacobi_identities_and_quarter_period(k):
    x = np.linspace(-7.0, 7.0, 201)
    sn, cn, dn = elliptic.jacobi(x, k)
    np.testing.assert_allclose(sn**2 + cn**2, 1.0, atol=1e-14)
    np.testing.assert_allclose(dn**2 + k * k * sn**2, 1.0, atol=1e-14)
    K = elliptic.ellipk(k)
    q = elliptic.jacobi(K, k)
    np.testing.assert_allclose(q, (1.0, 0.0, math.sqrt(1 - k * k)), atol=1e-13)
    np.testing.assert_allclose(elliptic.jacobi(2 * K, k).sn, 0.0, atol=1e-13)


def test_jacobi_limits():
    x = np.linspace(-3, 3, 31)
    sn, cn, dn = elliptic.jacobi(x, 1.0)
    np.testing.assert_allclose(sn, np.tanh(x), atol=1e-14)
    np.testing.assert_allclose(cn, 1 / np.cosh(x), atol=1e-14)
    np.testing.assert_allclose(dn, 1 / np.cosh(x), atol=1e-14)
    sn0, cn0, dn0 = elliptic.jacobi(x, 0.0)
    np.testing.assert_allclose(sn0, np.sin(x), atol=1e-15)
    np.testing.assert_allclose(dn0, 1.0)


def test_scalar_input_returns_floats():
    out = elliptic.jacobi(0.3, 0.5)
    assert all(isinstance(v, float) for v in out)


def test_domain_errors():
    with pytest.raises(elliptic.EllipticOverflowError):
        elliptic.ellipk(1.0)
    for bad in (-0.1, 1.2, float("nan")):
        with pytest.raises(elliptic.EllipticDomainError):
            elliptic.complete_integrals(bad)
    with pytest.raises(elliptic.EllipticDomainError):
        elliptic.ellint_pi(1.0, 0.5)
    with pytest.raises(elliptic.EllipticDomainError):
        elliptic.jacobi([0.0, np.inf], 0.5)
    assert issubclass(elliptic.EllipticDomainError, ValueError)


def test_backends_agree():
    rng = np.random.default_rng(3)
    u = rng.uniform(-20, 20, 500)
    for m in (0.0, 0.25, 0.81, 0.9999, 1.0):
        np.testing.assert_allclose(numba_impl.sncndn(u, m), numpy_impl.sncndn(u, m), atol=1e-14)
    coef = rng.normal(size=33) + 1j * rng.normal(size=33)
    coef[0] = coef[0].real
    np.testing.assert_allclose(
        numba_impl.trig_potential_matrix(coef, 16), numpy_impl.trig_potential_matrix(coef, 16), atol=1e-13
    )
    np.testing.assert_allclose(
        numba_impl.sine_potential_matrix(coef, 16), numpy_impl.sine_potential_matrix(coef, 16), atol=1e-13
    )
