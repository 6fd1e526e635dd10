"""Direct spectrum of the linearized Hamiltonian operator ``J L``.

Uses the same Galerkin basis as :mod:`hillspec`.  Unknowns are stacked as
``(Re u, Re v, Im u, Im v)``, each a coefficient vector of length ``d``.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import coupling, hillspec

__all__ = ["LinearizedPencil", "GrowthResult", "growth_tolerance", "assemble_jl", "growth_verdict"]

PAIRING_RTOL = 1e-6


def growth_tolerance(omega):
    """``tau_r = 1e-5 max(1, omega)``."""
    return 1e-5 * max(1.0, omega)


@dataclass(frozen=True, eq=False)
class LinearizedPencil:
    matrix: np.ndarray
    space: str
    case: coupling.CouplingCase
    profile: object
    basis: hillspec.TrigBasis

    @property
    def omega(self):
        return self.profile.omega

    def to_coeffs(self, comps):
        """Stack the basis coefficients of a (4, N) grid field."""
        return np.concatenate([self.basis.to_coeffs(c) for c in comps])


@dataclass(frozen=True, eq=False)
class GrowthResult:
    max_real: float
    verdict: str
    n_unstable: int
    pairing_error: float
    symmetric: bool
    unresolved: bool
    eigenvalues: np.ndarray


def _block(S2, kinetic, pot):
    A0 = np.diag(kinetic)
    return np.block(
        [[A0 - S2[0, 0] * pot, -S2[0, 1] * pot], [-S2[1, 0] * pot, A0 - S2[1, 1] * pot]]
    )


def assemble_jl(case, profile, space="full"):
    """``[[0, L_im], [-L_re, 0]]`` with ``L_re``, ``L_im`` the 2x2 Hill blocks of ``L``."""
    op = hillspec.assemble_hill(0.0, profile, space)
    S = coupling.s_matrix(case)
    L_re = _block(S[:2, :2], op.kinetic, op.potential)
    L_im = _block(S[2:, 2:], op.kinetic, op.potential)
    Z = np.zeros_like(L_re)
    return LinearizedPencil(np.block([[Z, L_im], [-L_re, Z]]), space, case, profile, op.basis)


def _pairing_error(lam, chunk=512):
    """Largest distance from ``-lambda`` and ``conj(lambda)`` to the spectrum."""
    worst = 0.0
    for start in range(0, lam.size, chunk):
        part = lam[start : start + chunk, None]
        neg = np.min(np.abs(part + lam[None, :]), axis=1)
        con = np.min(np.abs(np.conj(part) - lam[None, :]), axis=1)
        worst = max(worst, float(np.max(neg)), float(np.max(con)))
    return worst


def growth_verdict(pencil, tol=None):
    """Largest real part of ``sigma(J L)`` and the stable/unstable call."""
    if tol is None:
        tol = growth_tolerance(pencil.omega)
    try:
        lam = np.linalg.eigvals(pencil.matrix)
    except np.linalg.LinAlgError:
        return GrowthResult(np.nan, "unresolved", 0, np.nan, False, True, np.zeros(0, complex))
    if not np.all(np.isfinite(lam)):
        return GrowthResult(np.nan, "unresolved", 0, np.nan, False, True, lam)
    max_real = float(np.max(lam.real))
    scale = float(np.max(np.abs(lam))) or 1.0
    err = _pairing_error(lam)
    return GrowthResult(
        max_real=max_real,
        verdict="stable" if max_real <= tol else "unstable",
        n_unstable=int(np.sum(lam.real > tol)),
        pairing_error=err,
        symmetric=err <= PAIRING_RTOL * scale,
        unresolved=False,
        eigenvalues=lam,
    )
