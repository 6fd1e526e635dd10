import math

import numpy as np
import pytest

from hill_krein import coupling as cp


def _random_cases(branch, n=200, seed=0):
    rng = np.random.default_rng(seed)
    for _ in range(n):
        kappa = rng.uniform(0.1, 5.0)
        if branch in ("bplus", "bminus"):
            gamma = kappa * rng.uniform(2.01, 20.0)
        elif branch == "minus_one":
            gamma = kappa * rng.uniform(0.0, 0.99)
        else:
            gamma = kappa * rng.uniform(0.0, 10.0)
        yield cp.make_case(kappa, gamma, branch)


def test_admissible_examples():
    info = {b.branch: b for b in cp.admissible_b(1.0, 3.0)}
    np.testing.assert_allclose(info["bplus"].B, (3 + math.sqrt(5)) / 2, atol=1e-10)
    np.testing.assert_allclose(info["bminus"].B, (3 - math.sqrt(5)) / 2, atol=1e-10)
    assert not info["minus_one"].admissible

    info = {b.branch: b for b in cp.admissible_b(1.0, 2.0)}
    assert set(info) == {"one", "minus_one"}
    assert not info["minus_one"].admissible and "gamma < kappa" in info["minus_one"].reason

    info = {b.branch: b for b in cp.admissible_b(1.0, 0.0)}
    assert set(info) == {"one", "minus_one"} and info["minus_one"].admissible


def test_two_kappa_redirect():
    case = cp.make_case(1.0, 2.0, "bplus")
    assert case.branch == "one" and case.B == 1.0 and case.gamma_regime == "eq2k"


@pytest.mark.parametrize(
    "kappa,gamma,branch",
    [(1.0, 1.0, "bplus"), (1.0, 1.5, "bminus"), (1.0, 1.0, "minus_one"), (1.0, 2.0, "minus_one")],
)
def test_inadmissible(kappa, gamma, branch):
    with pytest.raises(cp.InadmissibleCaseError):
        cp.make_case(kappa, gamma, branch)


def test_bad_inputs():
    with pytest.raises(cp.InadmissibleCaseError):
        cp.make_case(0.0, 1.0, "one")
    with pytest.raises(cp.InadmissibleCaseError):
        cp.make_case(1.0, -1.0, "one")
    with pytest.raises(ValueError):
        cp.make_case(1.0, 1.0, "two")


def test_aliases():
    assert cp.canonical_branch("B+") == "bplus"
    assert cp.canonical_branch("-1") == "minus_one"


def test_s_matrix_examples():
    S = cp.s_matrix(cp.make_case(1.0, 0.0, "one"))
    np.testing.assert_array_equal(S, np.diag([5.0, 5.0, 1.0, 1.0]))
    S = cp.s_matrix(cp.make_case(1.0, 2.0, "one"))
    np.testing.assert_array_equal(S[:2, :2], [[9, 6], [6, 9]])
    np.testing.assert_array_equal(S[2:, 2:], [[-3, 6], [6, -3]])
    np.testing.assert_array_equal(S[:2, 2:], 0)


def test_beta_examples():
    b, chain, regime = cp.betas(cp.make_case(1.0, 0.0, "one"))
    assert b == (5.0, 1.0, 5.0, 1.0)
    assert chain == "b2=b4<b1=b3"
    assert regime == "zero"
    b, chain, regime = cp.betas(cp.make_case(1.0, 2.0, "one"))
    np.testing.assert_allclose(b, (15, 3, 3, -9))
    assert chain in ("b4<b2=b3<b1", "b4<b3=b2<b1")
    case = cp.make_case(1.0, 3.0, "bplus")
    assert case.betas[3] < 0
    assert case.ordering == "b4<b2<b3<b1"


def test_minus_one_betas_and_regimes():
    kappa, gamma = 1.0, 0.3
    case = cp.make_case(kappa, gamma, "minus_one")
    np.testing.assert_allclose(case.betas, (5 - 5 * gamma, 1 - gamma, 5 + gamma, 1 + 5 * gamma))
    assert case.gamma_regime == "sub2k5"
    assert cp.make_case(1.0, 0.4, "minus_one").gamma_regime == "eq2k5"
    assert cp.make_case(1.0, 0.7, "minus_one").gamma_regime == "sup2k5"


@pytest.mark.parametrize("branch", cp.BRANCHES)
def test_random_cases(branch):
    for case in _random_cases(branch):
        k, g, B = case.kappa, case.gamma, case.B
        np.testing.assert_allclose(k + g * B**3, k * B**4 + g * B, rtol=1e-12)
        S = cp.s_matrix(case)
        np.testing.assert_array_equal(S, S.T)
        numeric = np.sort(np.linalg.eigvalsh(S))
        np.testing.assert_allclose(np.sort(case.betas), numeric, rtol=1e-9, atol=1e-9 * np.abs(numeric).max())
        if branch == "one":
            want = (5 * k + 5 * g, k + g, 5 * k - g, k - 5 * g)
            np.testing.assert_allclose(case.betas, want, rtol=1e-12, atol=1e-12)
        if branch in ("bplus", "bminus"):
            b1, b2, b3, b4 = case.betas
            assert b4 < b2 < b3 < b1 and b4 < 0

        frame = cp.orthonormal_frame(case)
        U = frame.U
        np.testing.assert_allclose(U.T @ U, np.eye(4), atol=1e-12)
        np.testing.assert_allclose(U @ frame.M @ U.T, S, atol=1e-10 * max(1.0, np.abs(S).max()))
        assert abs(np.linalg.det(U) - 1.0) < 1e-10
        assert cp.inertia(frame.M) == cp.inertia(S)


def test_vieta():
    for kappa, gamma in [(1.0, 3.0), (0.5, 7.0), (2.0, 4.5)]:
        bp = cp.make_case(kappa, gamma, "bplus").B
        bm = cp.make_case(kappa, gamma, "bminus").B
        assert abs(bp * bm - 1.0) < 1e-12
        assert abs(bp + bm - gamma / kappa) < 1e-12


def test_frame_for_b_one():
    U = cp.orthonormal_frame(cp.make_case(1.0, 1.0, "one")).U
    r = 1 / math.sqrt(2)
    np.testing.assert_allclose(np.abs(U[:2, :2]), r, atol=1e-14)
    np.testing.assert_allclose(U[:2, 0], [r, r], atol=1e-14)


def test_degenerate_frame_deterministic():
    case = cp.make_case(1.0, 0.0, "one")
    a, b = cp.orthonormal_frame(case), cp.orthonormal_frame(case)
    np.testing.assert_array_equal(a.U, b.U)
    np.testing.assert_array_equal(a.U, np.eye(4))


def test_resign_frame_stays_valid():
    rng = np.random.default_rng(1)
    for case in (cp.make_case(1.0, 0.0, "one"), cp.make_case(1.0, 3.0, "bminus")):
        frame = cp.orthonormal_frame(case)
        S = cp.s_matrix(case)
        for _ in range(5):
            other = cp.resign_frame(frame, rng)
            np.testing.assert_allclose(other.U.T @ other.U, np.eye(4), atol=1e-12)
            np.testing.assert_allclose(other.U @ other.M @ other.U.T, S, atol=1e-10 * np.abs(S).max())


def test_inertia():
    assert cp.inertia(np.diag([-1.0, 0.0, 2.0, 3.0])) == (1, 1, 2)
