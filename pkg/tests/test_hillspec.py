import math

import numpy as np
import pytest

from hill_krein import coupling, hillspec as hs, waveforms as wf

TWO_PI = 2 * math.pi


@pytest.fixture(scope="module")
def waves():
    p = wf.wave_params(0.5, TWO_PI)
    return {kind: wf.sample_profile(kind, p, 256) for kind in wf.PROFILE_KINDS}


def test_free_operator(waves):
    prof = waves["cnoidal"]
    spec = hs.hill_spectrum(0.0, prof)
    j = np.arange(1, 128)
    want = np.sort(np.concatenate([[0], j, j, [128]]) ** 2 * 1.0 + prof.omega)
    np.testing.assert_allclose(spec.eigenvalues, want, rtol=1e-13)
    assert spec.n_count == 0 and spec.z_count == 0
    assert spec.parities[0] == "even"
    np.testing.assert_allclose(spec.eigenvectors[:, 0], spec.eigenvectors[0, 0], atol=1e-12)
    assert hs.parity_floquet_check(spec).passed


@pytest.mark.parametrize("space,kind", [("full", "cnoidal"), ("full", "snoidal"), ("odd", "snoidal")])
def test_matrix_symmetric(waves, space, kind):
    A = hs.assemble_hill(5.0, waves[kind], space).matrix
    assert np.max(np.abs(A - A.T)) < 1e-12
    assert A.shape[0] == (256 if space == "full" else 127)


def test_odd_space_needs_snoidal(waves):
    with pytest.raises(ValueError):
        hs.assemble_hill(1.0, waves["cnoidal"], "odd")


def test_cnoidal_counts_and_kernels(waves):
    prof = waves["cnoidal"]
    s1 = hs.hill_spectrum(5.0, prof)
    assert (s1.n_count, s1.z_count) == (2, 1)
    assert s1.kernel_overlap["phi_prime"] > 1 - 1e-8
    s2 = hs.hill_spectrum(1.0, prof)
    assert (s2.n_count, s2.z_count) == (1, 1)
    assert s2.kernel_overlap["phi"] > 1 - 1e-8
    assert not s1.unresolved and not s2.unresolved


def test_snoidal_odd_counts(waves):
    prof = waves["snoidal"]
    s1 = hs.hill_spectrum(5.0, prof, "odd")
    assert (s1.n_count, s1.z_count) == (1, 0)
    assert s1.kernel_overlap["phi_prime"] == 0.0
    s2 = hs.hill_spectrum(1.0, prof, "odd")
    assert (s2.n_count, s2.z_count) == (0, 1)
    assert s2.kernel_overlap["phi"] > 1 - 1e-8


def test_zero_mode_residuals(waves):
    for prof in waves.values():
        A1 = hs.assemble_hill(5.0, prof)
        A2 = hs.assemble_hill(1.0, prof)
        c1 = A1.basis.to_coeffs(prof.dphi)
        c2 = A2.basis.to_coeffs(prof.phi)
        assert np.linalg.norm(A1.matrix @ c1) < 1e-7 * np.linalg.norm(c1)
        assert np.linalg.norm(A2.matrix @ c2) < 1e-7 * np.linalg.norm(c2)


def test_counts_invariant_under_refinement():
    p = wf.wave_params(0.8, TWO_PI)
    for kind, space in [("cnoidal", "full"), ("snoidal", "odd"), ("snoidal", "full")]:
        got = []
        for N in (256, 512):
            prof = wf.sample_profile(kind, p, N)
            got.append([(s.n_count, s.z_count) for s in (hs.hill_spectrum(b, prof, space) for b in (5.0, 1.0))])
        assert got[0] == got[1]


def test_comparison_example():
    case = coupling.make_case(1.0, 1.0, "one")
    p = wf.wave_params(0.5, TWO_PI, case.kappa, case.gamma, case.B)
    prof = wf.sample_profile("cnoidal", p, 256)
    spectra = [hs.hill_spectrum(b, prof) for b in case.betas]
    counts = {s.beta: s.n_count for s in spectra}
    assert counts == {10.0: 2, 2.0: 1, 4.0: 2, -4.0: 0}
    report = hs.comparison_check(spectra)
    assert report.passed, report.message


def test_comparison_detects_violation(waves):
    prof = waves["cnoidal"]
    lo, hi = hs.hill_spectrum(1.0, prof), hs.hill_spectrum(5.0, prof)
    fake = hs.HillSpectrum(
        beta=10.0, space="full", eigenvalues=lo.eigenvalues + 1.0, coeffs=lo.coeffs,
        n_count=0, z_count=0, kernel_overlap={}, parities=[], tol=lo.tol, gap=1.0,
        unresolved=False, operator=lo.operator,
    )
    report = hs.comparison_check([lo, hi, fake])
    assert not report.passed and report.first_violation[0] == 1


def test_equal_beta_identical(waves):
    a = hs.hill_spectrum(3.0, waves["cnoidal"])
    b = hs.hill_spectrum(3.0, waves["cnoidal"])
    assert hs.comparison_check([a, b]).passed
    np.testing.assert_allclose(a.eigenvalues, b.eigenvalues, atol=1e-10)


def test_negative_beta_positive_definite(waves):
    s = hs.hill_spectrum(-4.0, waves["cnoidal"])
    assert s.n_count == 0 and s.z_count == 0 and s.eigenvalues[0] > 0


def test_parities(waves):
    cn1 = hs.hill_spectrum(5.0, waves["cnoidal"])
    # phi^4 for the cnoidal wave has period L/2, so both bound states are even
    assert cn1.parities[:2] == ["even", "even"]
    assert hs.parity_floquet_check(cn1).passed
    assert hs.hill_spectrum(1.0, waves["cnoidal"]).parities[0] == "even"
    sn1 = hs.hill_spectrum(5.0, waves["snoidal"])
    assert sn1.parities[:2] == ["even", "odd"]
    assert hs.parity_floquet_check(sn1).passed
    assert not hs.parity_floquet_check(cn1, second_odd=True).passed


def test_parity_label():
    x = np.arange(64) * TWO_PI / 64
    assert hs.parity_label(np.cos(x)) == "even"
    assert hs.parity_label(np.sin(x)) == "odd"
    assert hs.parity_label(np.cos(x) + np.sin(x)) == "mixed"


def test_inertia_additivity():
    case = coupling.make_case(1.0, 1.0, "one")
    p = wf.wave_params(0.5, TWO_PI, case.kappa, case.gamma, case.B)
    prof = wf.sample_profile("cnoidal", p, 128)
    S = coupling.s_matrix(case)
    op = hs.assemble_hill(0.0, prof)
    K, P = np.diag(op.kinetic), op.potential
    big = np.kron(np.eye(4), K) - np.kron(S, P)
    w = np.linalg.eigvalsh(big)
    tol = hs.zero_tolerance(prof.omega)
    blockwise = sum(hs.hill_spectrum(b, prof).n_count for b in case.betas)
    assert int(np.sum(w < -tol)) == blockwise == 5


def test_unresolved_flag(waves):
    s = hs.spectrum_counts(hs.assemble_hill(5.0, waves["cnoidal"]), tol=0.1)
    assert s.unresolved
