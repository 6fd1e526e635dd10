"""Algebra of the coupled system: admissible ``B``, the matrix ``S``, its
eigenvalues ``beta_1..beta_4`` and the orthogonal frame ``U``.

Channel order follows the diagonal of ``M = diag(beta_1, beta_3, beta_2,
beta_4)``: the first two channels come from the upper 2x2 block of ``S``
(real parts), the last two from the lower block (imaginary parts).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import mpmath
import numpy as np

__all__ = [
    "BRANCHES",
    "InadmissibleCaseError",
    "InconsistencyError",
    "BranchInfo",
    "CouplingCase",
    "OrthogonalFrame",
    "canonical_branch",
    "admissible_b",
    "make_case",
    "s_matrix",
    "betas",
    "s_value",
    "orthonormal_frame",
    "resign_frame",
    "inertia",
    "CHANNEL_BETA_INDEX",
]

BRANCHES = ("bplus", "bminus", "one", "minus_one")

_ALIASES = {
    "bplus": "bplus",
    "b+": "bplus",
    "bminus": "bminus",
    "b-": "bminus",
    "one": "one",
    "bonep": "one",
    "1": "one",
    "+1": "one",
    "minus_one": "minus_one",
    "minus-one": "minus_one",
    "bonem": "minus_one",
    "-1": "minus_one",
}

# channel c of M carries beta_{CHANNEL_BETA_INDEX[c]}
CHANNEL_BETA_INDEX = (1, 3, 2, 4)

_CLOSED_FORM_RTOL = 1e-9
_TIE_RTOL = 1e-12


class InadmissibleCaseError(ValueError):
    """The requested branch does not exist for the given ``(kappa, gamma)``."""


class InconsistencyError(RuntimeError):
    """Closed-form eigenvalues disagree with the numerical eigenvalues of ``S``."""


def canonical_branch(name):
    key = str(name).strip().lower()
    if key not in _ALIASES:
        raise InadmissibleCaseError(f"unknown branch {name!r}; expected one of {BRANCHES}")
    return _ALIASES[key]


def _is_two_kappa(kappa, gamma):
    return abs(gamma - 2.0 * kappa) <= _TIE_RTOL * max(1.0, kappa)


@dataclass(frozen=True)
class BranchInfo:
    branch: str
    B: float
    admissible: bool
    reason: str | None = None


@dataclass(frozen=True)
class CouplingCase:
    kappa: float
    gamma: float
    branch: str
    B: float
    betas: tuple
    s_value: float | None
    gamma_regime: str
    ordering: str

    @property
    def nonlinearity(self):
        """``kappa + gamma B^3``; positive for every admissible case."""
        return self.kappa + self.gamma * self.B**3

    @property
    def channel_betas(self):
        """``(beta_1, beta_3, beta_2, beta_4)``, the diagonal of ``M``."""
        return tuple(self.betas[i - 1] for i in CHANNEL_BETA_INDEX)


@dataclass(frozen=True, eq=False)
class OrthogonalFrame:
    U: np.ndarray
    M: np.ndarray

    @property
    def channel_betas(self):
        return tuple(float(v) for v in np.diag(self.M))


def _check_kappa_gamma(kappa, gamma):
    if not (kappa > 0.0 and math.isfinite(kappa)):
        raise InadmissibleCaseError(f"kappa must be positive, got {kappa!r}")
    if not (gamma >= 0.0 and math.isfinite(gamma)):
        raise InadmissibleCaseError(f"gamma must be nonnegative, got {gamma!r}")


def _b_roots(kappa, gamma):
    disc = math.sqrt(gamma * gamma - 4.0 * kappa * kappa)
    big = (gamma + disc) / (2.0 * kappa)
    # B_+ B_- = 1; avoids cancellation in gamma - disc
    return big, 2.0 * kappa / (gamma + disc)


def admissible_b(kappa, gamma):
    """Roots of the compatibility condition, each flagged admissible or not.

    ``B = 1`` is always present.  ``B = -1`` is returned with a flag since
    ``theta`` is real only for ``gamma < kappa``.  ``B_+`` and ``B_-`` appear
    only for ``gamma > 2 kappa``; at ``gamma = 2 kappa`` they equal 1.
    """
    _check_kappa_gamma(kappa, gamma)
    out = [BranchInfo("one", 1.0, True)]
    if gamma < kappa:
        out.append(BranchInfo("minus_one", -1.0, True))
    else:
        out.append(
            BranchInfo("minus_one", -1.0, False, "minus_one requires gamma < kappa")
        )
    if gamma > 2.0 * kappa and not _is_two_kappa(kappa, gamma):
        bp, bm = _b_roots(kappa, gamma)
        out.append(BranchInfo("bplus", bp, True))
        out.append(BranchInfo("bminus", bm, True))
    return out


def _s_mp(kappa, gamma, sign):
    d = sign * mpmath.sqrt(gamma * gamma - 4 * kappa * kappa)
    k2 = kappa * kappa
    inner = gamma**4 + gamma**3 * d - 4 * gamma**2 * k2 - 2 * gamma * d * k2 + 2 * k2 * k2
    return d, mpmath.sqrt(max(inner, 0))


def s_value(kappa, gamma, sign=+1):
    """``s(kappa, gamma)``; ``sign=-1`` flips the inner root (the ``B_-`` form)."""
    with mpmath.workdps(50):
        return float(_s_mp(mpmath.mpf(kappa), mpmath.mpf(gamma), sign)[1])


def _closed_form_betas(kappa, gamma, branch):
    if branch in ("bplus", "bminus"):
        # the printed forms cancel terms of size gamma^4 / kappa^3 down to
        # O(kappa); evaluate them at 50 digits so large gamma/kappa stay exact
        with mpmath.workdps(50):
            kappa, gamma = mpmath.mpf(kappa), mpmath.mpf(gamma)
            d, s = _s_mp(kappa, gamma, 1 if branch == "bplus" else -1)
            k2 = kappa * kappa
            g2 = gamma * gamma
            lead = 3 * mpmath.sqrt(2) * g2 * s
            c3 = 4 * kappa**3
            b1 = (lead + 7 * g2 * g2 + 7 * g2 * gamma * d - 24 * g2 * k2 - 10 * gamma * d * k2 + 20 * k2 * k2) / c3
            b2 = (lead - g2 * g2 - g2 * gamma * d - 2 * gamma * d * k2 + 4 * k2 * k2) / c3
            b3 = -(lead - 7 * g2 * g2 - 7 * g2 * gamma * d + 24 * g2 * k2 + 10 * gamma * d * k2 - 20 * k2 * k2) / c3
            b4 = -(lead + g2 * g2 + g2 * gamma * d + 2 * gamma * d * k2 - 4 * k2 * k2) / c3
            return tuple(float(b) for b in (b1, b2, b3, b4)), float(s)
    if branch == "one":
        return (5 * kappa + 5 * gamma, kappa + gamma, 5 * kappa - gamma, kappa - 5 * gamma), None
    return (5 * kappa - 5 * gamma, kappa - gamma, 5 * kappa + gamma, kappa + 5 * gamma), None


def _regime(kappa, gamma, branch):
    if branch in ("bplus", "bminus"):
        return "super2k"
    if gamma == 0.0:
        return "zero"
    if branch == "one":
        if _is_two_kappa(kappa, gamma):
            return "eq2k"
        return "sub2k" if gamma < 2.0 * kappa else "super2k"
    edge = 0.4 * kappa
    if abs(gamma - edge) <= _TIE_RTOL * max(1.0, kappa):
        return "eq2k5"
    return "sub2k5" if gamma < edge else "sup2k5"


def _ordering(values):
    """Chain like ``b4<b2=b3<b1`` from sorted values, ties within ``1e-12``."""
    order = sorted(range(4), key=lambda i: values[i])
    scale = max(abs(v) for v in values) or 1.0
    parts = [f"b{order[0] + 1}"]
    for prev, cur in zip(order, order[1:]):
        rel = "=" if abs(values[cur] - values[prev]) <= _TIE_RTOL * scale else "<"
        parts.append(f"{rel}b{cur + 1}")
    return "".join(parts)


def _s_blocks(kappa, gamma, B):
    g = gamma
    upper = np.array(
        [[5 * kappa + 2 * g * B**3, 3 * g * B**2], [3 * g * B**2, 5 * kappa * B**4 + 2 * g * B]]
    )
    lower = np.array(
        [[kappa - 2 * g * B**3, 3 * g * B**2], [3 * g * B**2, kappa * B**4 - 2 * g * B]]
    )
    return upper, lower


def s_matrix(case):
    """The 4x4 block-diagonal matrix ``S`` of the linearization."""
    upper, lower = _s_blocks(case.kappa, case.gamma, case.B)
    out = np.zeros((4, 4))
    out[:2, :2] = upper
    out[2:, 2:] = lower
    return out


def make_case(kappa, gamma, branch):
    """Build and verify a :class:`CouplingCase`.

    ``bplus``/``bminus`` at ``gamma = 2 kappa`` are redirected to ``one``.
    Raises :class:`InadmissibleCaseError` for branches that do not exist
    and :class:`InconsistencyError` if the closed-form ``beta`` disagree
    with ``eig(S)``.
    """
    kappa = float(kappa)
    gamma = float(gamma)
    _check_kappa_gamma(kappa, gamma)
    branch = canonical_branch(branch)
    if branch in ("bplus", "bminus"):
        if _is_two_kappa(kappa, gamma):
            branch = "one"
        elif not gamma > 2.0 * kappa:
            raise InadmissibleCaseError(f"{branch} requires gamma > 2*kappa")
    if branch == "minus_one" and not gamma < kappa:
        raise InadmissibleCaseError("minus_one requires gamma < kappa")

    if branch == "bplus":
        B = _b_roots(kappa, gamma)[0]
    elif branch == "bminus":
        B = _b_roots(kappa, gamma)[1]
    else:
        B = 1.0 if branch == "one" else -1.0

    values, s = _closed_form_betas(kappa, gamma, branch)
    case = CouplingCase(
        kappa,
        gamma,
        branch,
        B,
        tuple(float(v) for v in values),
        s,
        _regime(kappa, gamma, branch),
        _ordering(values),
    )
    _verify_betas(case)
    return case


def _verify_betas(case):
    numeric = np.sort(np.linalg.eigvalsh(s_matrix(case)))
    closed = np.sort(case.betas)
    scale = max(1.0, float(np.max(np.abs(numeric))))
    err = float(np.max(np.abs(numeric - closed)))
    if err > _CLOSED_FORM_RTOL * scale:
        raise InconsistencyError(
            f"closed-form betas {closed.tolist()} differ from eig(S) {numeric.tolist()} "
            f"by {err:.3e} for branch {case.branch}"
        )


def betas(case):
    """``((beta_1, beta_2, beta_3, beta_4), ordering, gamma_regime)``."""
    _verify_betas(case)
    return case.betas, case.ordering, case.gamma_regime


def _block_frame(block, targets):
    """Unit eigenvectors of a 2x2 block matched to the closed-form ``targets``."""
    w, v = np.linalg.eigh(block)
    scale = max(1.0, float(np.max(np.abs(w))))
    if abs(w[1] - w[0]) <= _TIE_RTOL * scale:
        return np.eye(2)
    first = int(np.argmin(np.abs(w - targets[0])))
    return v[:, [first, 1 - first]]


def _fix_signs(U):
    U = U.copy()
    for j in range(U.shape[1]):
        col = U[:, j]
        nz = np.flatnonzero(np.abs(col) > 1e-14)
        if nz.size and col[nz[0]] < 0:
            U[:, j] = -col
    if np.linalg.det(U) < 0:
        U[:, -1] = -U[:, -1]
    return U


def orthonormal_frame(case):
    """``U`` with ``U M U^T = S`` and ``M = diag(beta_1, beta_3, beta_2, beta_4)``."""
    b1, b2, b3, b4 = case.betas
    upper, lower = _s_blocks(case.kappa, case.gamma, case.B)
    U = np.zeros((4, 4))
    U[:2, :2] = _block_frame(upper, (b1, b3))
    U[2:, 2:] = _block_frame(lower, (b2, b4))
    U = _fix_signs(U)
    return OrthogonalFrame(U, np.diag([b1, b3, b2, b4]))


def resign_frame(frame, rng):
    """Another valid frame: random column signs, random rotations in degenerate blocks."""
    U = frame.U.copy()
    beta = np.diag(frame.M)
    for lo in (0, 2):
        block = slice(lo, lo + 2)
        scale = max(1.0, abs(beta[lo]), abs(beta[lo + 1]))
        if abs(beta[lo] - beta[lo + 1]) <= _TIE_RTOL * scale:
            t = rng.uniform(0.0, 2.0 * np.pi)
            rot = np.array([[np.cos(t), -np.sin(t)], [np.sin(t), np.cos(t)]])
            U[:, block] = U[:, block] @ rot
    U = U * rng.choice([-1.0, 1.0], size=4)[None, :]
    return OrthogonalFrame(U, frame.M.copy())


def inertia(matrix, tol=1e-12):
    """``(negative, zero, positive)`` eigenvalue counts of a symmetric matrix."""
    w = np.linalg.eigvalsh(np.asarray(matrix, dtype=float))
    cut = tol * max(1.0, float(np.max(np.abs(w))) if w.size else 1.0)
    return int(np.sum(w < -cut)), int(np.sum(np.abs(w) <= cut)), int(np.sum(w > cut))
