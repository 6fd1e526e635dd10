"""Fourier-Galerkin discretization of scalar Hill operators.

``L_beta = -d^2/dx^2 + omega - beta phi^4`` on ``L``-periodic functions.
Two spaces are supported:

* ``full``: the real orthonormal trig basis ``cos(2 pi m x / L)``,
  ``m = 0..N/2``, followed by ``sin(2 pi m x / L)``, ``m = 1..N/2-1``
  (dimension ``N``);
* ``odd``: the sine functions only (dimension ``N/2 - 1``).

The kinetic part is diagonal and exact.  The potential enters through the
Fourier coefficients of ``phi^4`` up to wavenumber ``N``, computed on a
zero-padded grid of ``4N`` points so the quartic product is alias-free.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np

from . import kernels
from .waveforms import GridProfile, sample_profile

__all__ = [
    "SPACES",
    "TrigBasis",
    "HillOperator",
    "HillSpectrum",
    "CheckReport",
    "trig_basis",
    "zero_tolerance",
    "potential_coefficients",
    "assemble_hill",
    "spectrum_counts",
    "hill_spectrum",
    "comparison_check",
    "parity_floquet_check",
    "parity_label",
]

SPACES = ("full", "odd")
PAD_FACTOR = 4
GAP_FACTOR = 100.0
PARITY_TOL = 1e-6
EVEN_POTENTIAL_TOL = 1e-13


def zero_tolerance(omega):
    """``tau_z = 1e-6 max(1, omega)``."""
    return 1e-6 * max(1.0, omega)


@dataclass(frozen=True, eq=False)
class TrigBasis:
    """Orthonormal real trig basis sampled on the ``N``-point grid.

    ``Q[:, j]`` is basis function ``j`` on the grid and ``wavenumbers[j]``
    its integer frequency.  ``n_cos`` leading columns are cosines.
    """

    N: int
    L: float
    space: str
    Q: np.ndarray
    wavenumbers: np.ndarray
    n_cos: int

    @property
    def dim(self):
        return self.Q.shape[1]

    def to_coeffs(self, f):
        """Coefficients of a band-limited grid function (exact by trapezoid rule)."""
        w = (self.L / self.N) * self.Q.T
        c = w @ np.asarray(f, dtype=float)
        if self.n_cos == self.N // 2 + 1:
            c[self.N // 2] *= 0.5
        return c

    def to_grid(self, c):
        return self.Q @ c


@lru_cache(maxsize=16)
def trig_basis(N, L, space="full"):
    if space not in SPACES:
        raise ValueError(f"space must be one of {SPACES}, got {space!r}")
    h = N // 2
    x = np.arange(N) * (L / N)
    unit = 2.0 * np.pi / L
    sin_m = np.arange(1, h)
    sin_cols = np.sqrt(2.0 / L) * np.sin(unit * np.outer(x, sin_m))
    if space == "odd":
        Q, m, n_cos = sin_cols, sin_m, 0
    else:
        cos_m = np.arange(h + 1)
        cos_cols = np.sqrt(2.0 / L) * np.cos(unit * np.outer(x, cos_m))
        cos_cols[:, 0] = 1.0 / np.sqrt(L)
        Q = np.hstack([cos_cols, sin_cols])
        m = np.concatenate([cos_m, sin_m])
        n_cos = h + 1
    Q.flags.writeable = False
    m.flags.writeable = False
    return TrigBasis(N, float(L), space, Q, m, n_cos)


def _interpolate(f, M):
    """Trigonometric interpolation of a periodic grid function onto ``M`` points."""
    n = len(f)
    spec = np.fft.rfft(f)
    padded = np.zeros(M // 2 + 1, dtype=complex)
    padded[: n // 2 + 1] = spec
    padded[n // 2] *= 0.5  # split the Nyquist mode between +-N/2
    return np.fft.irfft(padded, n=M) * (M / n)


def potential_coefficients(phi, power=4):
    """Fourier coefficients ``c_p`` of ``phi**power`` for ``p = 0..N``."""
    n = len(phi)
    M = PAD_FACTOR * n
    fine = _interpolate(np.asarray(phi, dtype=float), M)
    return np.fft.rfft(fine**power)[: n + 1] / M


@dataclass(frozen=True, eq=False)
class HillOperator:
    """Galerkin matrix of ``-d^2 + omega - beta phi^4`` plus its context."""

    beta: float
    space: str
    profile: GridProfile
    basis: TrigBasis
    kinetic: np.ndarray
    potential: np.ndarray

    @property
    def matrix(self):
        return np.diag(self.kinetic) - self.beta * self.potential

    def __array__(self, dtype=None, copy=None):
        m = self.matrix
        return m if dtype is None else m.astype(dtype)

    @property
    def is_even(self):
        """True if the potential does not couple cosines to sines."""
        nc = self.basis.n_cos
        if nc == 0:
            return True
        cross = self.potential[:nc, nc:]
        scale = max(1.0, float(np.max(np.abs(self.potential))))
        return float(np.max(np.abs(cross))) <= EVEN_POTENTIAL_TOL * scale


@lru_cache(maxsize=32)
def _potential_cache(key):
    phi_bytes, N, space = key
    phi = np.frombuffer(phi_bytes, dtype=np.float64)
    coef = potential_coefficients(phi)
    if space == "odd":
        return kernels.sine_potential_matrix(coef, N)
    return kernels.trig_potential_matrix(coef, N)


def assemble_hill(beta, profile, space="full"):
    """Assemble the Galerkin operator of ``L_beta`` in the chosen space."""
    if space not in SPACES:
        raise ValueError(f"space must be one of {SPACES}, got {space!r}")
    if space == "odd" and profile.kind != "snoidal":
        raise ValueError("the odd space requires an odd (snoidal) profile")
    basis = trig_basis(profile.N, profile.L, space)
    unit = 2.0 * np.pi / profile.L
    kinetic = (unit * basis.wavenumbers) ** 2 + profile.omega
    phi = np.ascontiguousarray(profile.phi, dtype=np.float64)
    pot = _potential_cache((phi.tobytes(), profile.N, space))
    return HillOperator(float(beta), space, profile, basis, kinetic, pot)


def parity_label(f, tol=PARITY_TOL):
    """Classify a grid function as ``even``, ``odd`` or ``mixed`` about ``x = 0``."""
    f = np.asarray(f, dtype=float)
    norm = np.linalg.norm(f)
    if norm == 0.0:
        return "even"
    refl = np.roll(f[::-1], 1)
    if np.linalg.norm(refl - f) < tol * norm:
        return "even"
    if np.linalg.norm(refl + f) < tol * norm:
        return "odd"
    return "mixed"


@dataclass(frozen=True, eq=False)
class HillSpectrum:
    """Eigen-decomposition and counts of one Hill operator.

    ``coeffs[:, j]`` holds eigenvector ``j`` in the orthonormal basis, so
    grid values are ``basis.to_grid(coeffs[:, j])`` (``eigenvectors``).
    """

    beta: float
    space: str
    eigenvalues: np.ndarray
    coeffs: np.ndarray
    n_count: int
    z_count: int
    kernel_overlap: dict
    parities: list
    tol: float
    gap: float
    unresolved: bool
    operator: HillOperator = field(repr=False)

    @property
    def basis(self):
        return self.operator.basis

    @property
    def eigenvectors(self):
        return self.basis.to_grid(self.coeffs)

    @property
    def zero_mask(self):
        return np.abs(self.eigenvalues) <= self.tol

    @property
    def kernel_coeffs(self):
        return self.coeffs[:, self.zero_mask]

    def summary(self):
        return {
            "beta": self.beta,
            "n": self.n_count,
            "z": self.z_count,
            "kernel": dict(self.kernel_overlap),
        }


def _eigh_blocks(op):
    A = op.matrix
    A = 0.5 * (A + A.T)
    nc = op.basis.n_cos
    if nc == 0 or nc == A.shape[0] or not op.is_even:
        return np.linalg.eigh(A)
    wc, vc = np.linalg.eigh(A[:nc, :nc])
    ws, vs = np.linalg.eigh(A[nc:, nc:])
    w = np.concatenate([wc, ws])
    v = np.zeros_like(A)
    v[:nc, :nc] = vc
    v[nc:, nc:] = vs
    order = np.argsort(w, kind="stable")
    return w[order], v[:, order]


def kernel_overlap(kernel_coeffs, basis, f):
    """Norm of the projection of ``f / ||f||`` onto the span of ``kernel_coeffs``.

    Equals ``max |<v, f>| / ||f||`` over unit ``v`` in the kernel.  The norm of
    ``f`` is its full ``L^2`` norm, so functions outside the space score 0.
    """
    if kernel_coeffs.shape[1] == 0:
        return 0.0
    full = np.sqrt(basis.L / basis.N) * np.linalg.norm(f)
    if full == 0.0:
        return 0.0
    proj = kernel_coeffs.T @ basis.to_coeffs(f)
    return float(np.linalg.norm(proj) / full)


def spectrum_counts(H, tol=None, n_parity=6):
    """Dense eigendecomposition with negative/zero counts and kernel diagnostics."""
    if tol is None:
        tol = zero_tolerance(H.profile.omega)
    w, v = _eigh_blocks(H)
    zero = np.abs(w) <= tol
    rest = np.abs(w[~zero])
    gap = float(rest.min()) if rest.size else np.inf
    unresolved = bool(gap <= GAP_FACTOR * tol)
    kz = v[:, zero]
    overlaps = {
        "phi_prime": kernel_overlap(kz, H.basis, H.profile.dphi),
        "phi": kernel_overlap(kz, H.basis, H.profile.phi),
    }
    grid = H.basis.to_grid(v[:, :n_parity])
    parities = [parity_label(grid[:, j]) for j in range(grid.shape[1])]
    return HillSpectrum(
        beta=H.beta,
        space=H.space,
        eigenvalues=w,
        coeffs=v,
        n_count=int(np.sum(w < -tol)),
        z_count=int(np.sum(zero)),
        kernel_overlap=overlaps,
        parities=parities,
        tol=float(tol),
        gap=gap,
        unresolved=unresolved,
        operator=H,
    )


def hill_spectrum(beta, profile, space="full", tol=None, max_N=2048):
    """``spectrum_counts(assemble_hill(...))``, doubling ``N`` while unresolved."""
    prof = profile
    while True:
        spec = spectrum_counts(assemble_hill(beta, prof, space), tol=tol)
        if not spec.unresolved or prof.N >= max_N:
            return spec
        prof = sample_profile(prof.kind, prof.params, 2 * prof.N)


@dataclass(frozen=True)
class CheckReport:
    passed: bool
    message: str
    first_violation: tuple | None = None


def comparison_check(spectra, n_eigs=None, atol=1e-10):
    """Check the comparison-theorem consequences on spectra sorted by ``beta``.

    Larger ``beta`` must give eigenvalue-wise smaller or equal spectra and a
    nondecreasing negative count; equal ``beta`` must give equal spectra.
    """
    spectra = sorted(spectra, key=lambda s: s.beta)
    for i, (lo, hi) in enumerate(zip(spectra, spectra[1:])):
        m = n_eigs or min(len(lo.eigenvalues), len(hi.eigenvalues))
        a = lo.eigenvalues[:m]
        b = hi.eigenvalues[:m]
        scale = atol * max(1.0, float(np.max(np.abs(a))))
        if hi.beta == lo.beta:
            bad = np.flatnonzero(np.abs(a - b) > scale)
            if bad.size:
                return CheckReport(False, f"equal beta={lo.beta} but spectra differ", (i, int(bad[0])))
            continue
        bad = np.flatnonzero(b > a + scale)
        if bad.size:
            return CheckReport(
                False,
                f"beta={hi.beta} eigenvalue {bad[0]} exceeds that of beta={lo.beta}",
                (i, int(bad[0])),
            )
        if hi.n_count < lo.n_count:
            return CheckReport(False, f"n decreases from beta={lo.beta} to beta={hi.beta}", (i, -1))
    return CheckReport(True, "comparison ordering holds")


def parity_floquet_check(spectrum, second_odd=None):
    """Ground state even; second eigenfunction odd for the snoidal ``L_1``.

    ``second_odd=None`` requires the odd second state only for a snoidal
    profile with two negative eigenvalues.  For the cnoidal profile ``phi^4``
    has period ``L/2`` and wells at ``0`` and ``L/2``, both fixed by the
    reflection, so its second state is even.
    """
    if spectrum.space != "full":
        return CheckReport(False, "parity check needs a full-space spectrum")
    par = spectrum.parities
    if par[0] != "even":
        return CheckReport(False, f"ground state is {par[0]}", (0,))
    if second_odd is None:
        second_odd = spectrum.operator.profile.kind == "snoidal" and spectrum.n_count >= 2
    if second_odd and par[1] != "odd":
        return CheckReport(False, f"second eigenfunction is {par[1]}", (1,))
    return CheckReport(True, "parities " + ",".join(par[:2]))
