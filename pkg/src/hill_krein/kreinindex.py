"""Krein matrix, Hamiltonian-Krein index and stability verdicts.

The 4-component operator ``L = (-d^2 + omega) I - phi^4 S`` is diagonalized
by the orthogonal frame ``U`` into four scalar Hill operators (channels).
``V_ij = <L^-1 J Theta_i, J Theta_j>`` is evaluated channel by channel as
``sum_c <L_c^-1 (U^T J Theta_i)_c, (U^T J Theta_j)_c>``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from . import coupling, hillspec, waveforms
from .coupling import CouplingCase
from .hillspec import HillOperator, HillSpectrum

__all__ = [
    "NonOrthogonalRHSError",
    "UnresolvedKernelError",
    "KernelBasis",
    "KreinMatrix",
    "ExpectedCell",
    "StabilityReport",
    "EXPECTED_CELLS",
    "OPEN_CELLS",
    "SYMPLECTIC_J",
    "solve_on_complement",
    "channel_spectra",
    "kernel_basis",
    "kernel_residuals",
    "assemble_V",
    "krein_verdict",
    "quad_form",
    "quad_form_I",
    "quad_form_J",
    "mass_identity",
    "expected_cell",
    "stability_report",
]

SCHEMA = "hill-krein/1"
SYMPLECTIC_J = np.block([[np.zeros((2, 2)), np.eye(2)], [-np.eye(2), np.zeros((2, 2))]])
ORTH_TOL = 1e-8
MATCH_TOL = 1e-6
COMPONENT_CUTOFF = 1e-12
SINGULAR_RTOL = 1e-6


class NonOrthogonalRHSError(ValueError):
    """Right-hand side has a component along the kernel."""


class UnresolvedKernelError(RuntimeError):
    """Kernel could not be separated from the rest of the spectrum."""


# ---------------------------------------------------------------- solves


def _deflated_solve(w, v, zero, c, matrix=None, orth_tol=ORTH_TOL):
    norm = float(np.linalg.norm(c))
    if norm == 0.0:
        return np.zeros_like(c)
    proj = v[:, zero].T @ c
    if proj.size and float(np.max(np.abs(proj))) > orth_tol * norm:
        raise NonOrthogonalRHSError(
            f"right-hand side has kernel component {float(np.max(np.abs(proj))):.3e} "
            f"(relative to norm {norm:.3e})"
        )
    keep = ~zero
    coef = v[:, keep].T @ c
    u = v[:, keep] @ (coef / w[keep])
    if matrix is not None:
        # remove the (tiny) kernel part of c before measuring the residual
        target = c - v[:, zero] @ proj
        res = float(np.linalg.norm(matrix @ u - target))
        if res > 1e-8 * norm:
            raise UnresolvedKernelError(f"deflated solve residual {res:.3e} exceeds 1e-8*||f||")
    return u


def _solve_coeffs(spec, c, orth_tol=ORTH_TOL, check=True):
    matrix = spec.operator.matrix if check else None
    return _deflated_solve(spec.eigenvalues, spec.coeffs, spec.zero_mask, c, matrix, orth_tol)


def solve_on_complement(H, f, kernel=None, tol=None, orth_tol=ORTH_TOL):
    """Minimum-norm solution ``u`` orthogonal to ``Ker H`` of ``H u = f``.

    ``H`` is a :class:`HillSpectrum`, a :class:`HillOperator` (``f`` and the
    result are grid functions) or a dense symmetric matrix (plain vectors).
    For a matrix, the kernel is the eigenvectors with ``|lambda| <= tol``
    (default ``1e-10 max|lambda|``); an explicit ``kernel`` (columns) must
    span the same space.
    """
    if isinstance(H, HillOperator):
        H = hillspec.spectrum_counts(H, tol=tol)
    if isinstance(H, HillSpectrum):
        basis = H.basis
        f = np.asarray(f, dtype=float)
        c = basis.to_coeffs(f)
        outside = float(np.linalg.norm(basis.to_grid(c) - f))
        if outside > 1e-8 * max(float(np.linalg.norm(f)), 1e-300):
            raise ValueError(f"right-hand side is not in the {H.space} space")
        return basis.to_grid(_solve_coeffs(H, c, orth_tol))
    A = np.asarray(H, dtype=float)
    A = 0.5 * (A + A.T)
    w, v = np.linalg.eigh(A)
    if tol is None:
        tol = 1e-10 * max(1.0, float(np.max(np.abs(w))))
    zero = np.abs(w) <= tol
    if kernel is not None:
        K = np.asarray(kernel, dtype=float).reshape(A.shape[0], -1)
        if K.shape[1] != int(zero.sum()):
            raise UnresolvedKernelError(
                f"given kernel has dimension {K.shape[1]}, eigenvalues show {int(zero.sum())}"
            )
        if K.shape[1]:
            q, _ = np.linalg.qr(K)
            if np.linalg.norm(q - v[:, zero] @ (v[:, zero].T @ q)) > 1e-6:
                raise UnresolvedKernelError("given kernel does not match the null space of H")
    return _deflated_solve(w, v, zero, np.asarray(f, dtype=float), A, orth_tol)


# ---------------------------------------------------------------- channels


def channel_spectra(frame, profile, space, tol=None):
    """Spectra of the four channel operators, reused for equal ``beta``."""
    done = {}
    out = []
    for beta in frame.channel_betas:
        if beta not in done:
            done[beta] = hillspec.spectrum_counts(hillspec.assemble_hill(beta, profile, space), tol)
        out.append(done[beta])
    return out


def _to_channels(frame, comps):
    """Channel grid functions ``U^T comps`` for a (4, N) array."""
    return frame.U.T @ comps


@dataclass(frozen=True, eq=False)
class KernelBasis:
    elements: list
    labels: list
    channels: list

    def __len__(self):
        return len(self.elements)

    def gram_determinant(self):
        if not self.elements:
            return 1.0
        flat = np.array([e.ravel() / np.linalg.norm(e.ravel()) for e in self.elements])
        return float(np.linalg.det(flat @ flat.T))


def kernel_basis(spectra, frame, profile, B, match_tol=MATCH_TOL):
    """Kernel of ``L`` from the channel kernels.

    A channel kernel containing ``phi'`` or ``phi`` (overlap above
    ``1 - match_tol``) contributes that exact function; the vector is then
    ``sqrt(1 + B^2) U[:, c] g``, i.e. ``(g, B g, 0, 0)``-type elements.
    Any remaining kernel directions are added as unit-norm grid modes.
    """
    elements, labels, channels = [], [], []
    scale = math.sqrt(1.0 + B * B)
    refs = (("phi_prime", profile.dphi), ("phi", profile.phi))
    for c, spec in enumerate(spectra):
        K = spec.kernel_coeffs.copy()
        if K.shape[1] == 0:
            continue
        basis = spec.basis
        for name, g in refs:
            if K.shape[1] == 0 or spec.kernel_overlap[name] <= 1.0 - match_tol:
                continue
            gc = basis.to_coeffs(g)
            gc /= np.linalg.norm(gc)
            elements.append(scale * np.outer(frame.U[:, c], g))
            labels.append(f"{name}@b{coupling.CHANNEL_BETA_INDEX[c]}")
            channels.append(c)
            # drop the matched direction from the channel kernel
            K = K - np.outer(gc, gc @ K)
            u, s, _ = np.linalg.svd(K, full_matrices=False)
            K = u[:, s > 0.5]
        for j in range(K.shape[1]):
            g = basis.to_grid(K[:, j])
            g = g / (np.linalg.norm(g) * math.sqrt(profile.L / profile.N))
            elements.append(np.outer(frame.U[:, c], g))
            labels.append(f"mode@b{coupling.CHANNEL_BETA_INDEX[c]}")
            channels.append(c)
    return KernelBasis(elements, labels, channels)


def kernel_residuals(spectra, frame, kernel):
    """``||L Theta|| / ||Theta||`` for each kernel element."""
    out = []
    for theta in kernel.elements:
        chans = _to_channels(frame, theta)
        num = 0.0
        den = 0.0
        for c, spec in enumerate(spectra):
            cc = spec.basis.to_coeffs(chans[c])
            num += float(np.sum((spec.operator.matrix @ cc) ** 2))
            den += float(np.sum(cc**2))
        out.append(math.sqrt(num / den) if den else 0.0)
    return out


@dataclass(frozen=True, eq=False)
class KreinMatrix:
    """``V`` with conditioning diagnostics."""

    matrix: np.ndarray
    eigenvalues: np.ndarray
    n_neg: int
    condition: float
    singular: bool
    asymmetry: float
    offdiag_ratio: float


def assemble_V(case, space, profile, frame, kernel, spectra=None):
    """Krein matrix over ``kernel`` computed through the channel operators."""
    if spectra is None:
        spectra = channel_spectra(frame, profile, space)
    rhs = []
    for theta in kernel.elements:
        chans = _to_channels(frame, SYMPLECTIC_J @ theta)
        total = float(np.linalg.norm(chans))
        parts = []
        for c, spec in enumerate(spectra):
            g = chans[c]
            if np.linalg.norm(g) <= COMPONENT_CUTOFF * total:
                g = np.zeros_like(g)
            parts.append(spec.basis.to_coeffs(g))
        rhs.append(parts)
    sols = [[_solve_coeffs(spec, r[c]) for c, spec in enumerate(spectra)] for r in rhs]
    n = len(rhs)
    V = np.zeros((n, n))
    for i in range(n):
        for j in range(n):
            V[i, j] = sum(float(sols[i][c] @ rhs[j][c]) for c in range(4))
    return _krein_matrix(V)


def _krein_matrix(V):
    n = V.shape[0]
    if n == 0:
        return KreinMatrix(V, np.zeros(0), 0, 1.0, False, 0.0, 0.0)
    sym = 0.5 * (V + V.T)
    w = np.linalg.eigvalsh(sym)
    vnorm = float(np.max(np.abs(w)))
    amin = float(np.min(np.abs(w)))
    singular = amin <= SINGULAR_RTOL * vnorm
    cond = vnorm / amin if amin > 0 else math.inf
    asym = float(np.max(np.abs(V - V.T))) / max(vnorm, 1e-300)
    diag = np.abs(np.diag(V))
    off = np.abs(V - np.diag(np.diag(V)))
    off_ratio = float(np.max(off / np.sqrt(np.outer(diag, diag)).clip(1e-300))) if n > 1 else 0.0
    return KreinMatrix(V, w, int(np.sum(w < 0.0)), cond, bool(singular), asym, off_ratio)


def krein_verdict(n_L, V):
    """``(K_Ham, verdict)`` from ``n(L)`` and ``V`` (matrix or :class:`KreinMatrix`)."""
    if isinstance(V, KreinMatrix):
        n_V = V.n_neg
    else:
        V = np.asarray(V, dtype=float)
        n_V = int(np.sum(np.linalg.eigvalsh(0.5 * (V + V.T)) < 0.0)) if V.size else 0
    k_ham = int(n_L) - n_V
    if k_ham < 0:
        raise ValueError(f"negative index n_L - n_V = {k_ham}")
    if k_ham % 2 == 1:
        return k_ham, "unstable"
    if k_ham == 0:
        return k_ham, "stable"
    return k_ham, "inconclusive"


# ---------------------------------------------------------------- sign conditions


def quad_form(beta, profile, f, space="full"):
    """``<L_beta^-1 f, f>`` with ``f`` orthogonal to the kernel."""
    spec = hillspec.spectrum_counts(hillspec.assemble_hill(beta, profile, space))
    c = spec.basis.to_coeffs(f)
    return float(_solve_coeffs(spec, c) @ c)


def _default_space(profile):
    return "odd" if profile.kind == "snoidal" else "full"


def quad_form_I(profile, space=None):
    """``I = <L_1^-1 phi, phi>``; odd space by default for a snoidal profile."""
    beta1 = 5.0 * profile.params.nonlinearity
    return quad_form(beta1, profile, profile.phi, space or _default_space(profile))


def quad_form_J(profile):
    """``J = <L_2^-1 phi', phi'>``.

    Always in the full space: ``psi'`` is even, so it has no odd-space part.
    """
    return quad_form(profile.params.nonlinearity, profile, profile.dphi, "full")


def mass_identity(profile, space=None):
    """``(I, -1/2 theta^2 d||phi_hat||^2/domega, relative difference)``."""
    value = quad_form_I(profile, space)
    p = profile.params
    analytic = -0.5 * waveforms.mass_and_slopes(p.k, p.L).scaled(p.theta).dmass_domega
    return value, analytic, abs(value - analytic) / abs(value)


# ---------------------------------------------------------------- expectations


@dataclass(frozen=True)
class ExpectedCell:
    """One row of the classification table: counts and verdict for a gamma/kappa range."""

    profile: str
    space: str
    branch: str
    regime: str
    lo: float
    hi: float
    closed: bool
    sample: float
    n_L: int | None
    z_L: int | None
    n_V: int | None
    K_Ham: int | None
    verdict: str

    def contains(self, ratio):
        eps = 1e-12 * max(1.0, abs(ratio))
        if self.closed:
            return self.lo - eps <= ratio <= self.hi + eps
        return self.lo + eps < ratio < self.hi - eps

    @property
    def covered(self):
        return self.verdict != "paper_open"


_INF = math.inf


def _cell(profile, space, branch, regime, lo, hi, closed, sample, counts, verdict):
    return ExpectedCell(profile, space, branch, regime, lo, hi, closed, sample, *counts, verdict)


EXPECTED_CELLS = (
    _cell("cnoidal", "full", "bplus", "gamma>2k", 2, _INF, False, 3, (5, 2, 1, 4), "inconclusive"),
    _cell("cnoidal", "full", "bminus", "gamma>2k", 2, _INF, False, 3, (5, 2, 1, 4), "inconclusive"),
    _cell("cnoidal", "full", "one", "gamma=0", 0, 0, True, 0, (6, 4, 2, 4), "inconclusive"),
    _cell("cnoidal", "full", "one", "k/5<gamma<2k", 0.2, 2, False, 1, (5, 2, 1, 4), "inconclusive"),
    _cell("cnoidal", "full", "one", "gamma=2k", 2, 2, True, 2, (4, 3, 1, 3), "unstable"),
    _cell("cnoidal", "full", "one", "gamma>5k", 5, _INF, False, 6, (3, 2, 1, 2), "inconclusive"),
    _cell("cnoidal", "full", "minus_one", "gamma=0", 0, 0, True, 0, (6, 4, 2, 4), "inconclusive"),
    _cell("snoidal", "odd", "bplus", "gamma>2k", 2, _INF, False, 3, (2, 1, 1, 1), "unstable"),
    _cell("snoidal", "odd", "bminus", "gamma>2k", 2, _INF, False, 3, (2, 1, 1, 1), "unstable"),
    _cell("snoidal", "odd", "one", "gamma=0", 0, 0, True, 0, (2, 2, 2, 0), "stable"),
    _cell("snoidal", "odd", "one", "0<gamma<2k", 0, 2, False, 1, (2, 1, 1, 1), "unstable"),
    _cell("snoidal", "odd", "one", "gamma=2k", 2, 2, True, 2, (1, 2, 1, 0), "stable"),
    _cell("snoidal", "odd", "one", "gamma>2k", 2, _INF, False, 3, (1, 1, 1, 0), "stable"),
    _cell("snoidal", "odd", "minus_one", "gamma=0", 0, 0, True, 0, (2, 2, 2, 0), "stable"),
)

_OPEN = (None, None, None, None)

OPEN_CELLS = (
    _cell("cnoidal", "full", "minus_one", "0<gamma<k", 0, 1, False, 0.5, _OPEN, "paper_open"),
    _cell("snoidal", "odd", "minus_one", "0<gamma<k", 0, 1, False, 0.5, _OPEN, "paper_open"),
    _cell("cnoidal", "full", "one", "0<gamma<=k/5", 0, 0.2, False, 0.1, _OPEN, "paper_open"),
    _cell("cnoidal", "full", "one", "2k<gamma<=5k", 2, 5, False, 3, _OPEN, "paper_open"),
)


def expected_cell(case, profile_kind, space):
    """Classification-table cell covering the configuration, or ``None``."""
    ratio = case.gamma / case.kappa
    for cell in EXPECTED_CELLS:
        if (cell.profile, cell.space, cell.branch) == (profile_kind, space, case.branch) and cell.contains(ratio):
            return cell
    return None


# ---------------------------------------------------------------- report


@dataclass(frozen=True)
class StabilityReport:
    case: CouplingCase
    space: str
    profile: str
    k: float
    L: float
    N: int
    omega: float
    n_L: int
    z_L: int
    spectra: tuple
    V: tuple
    n_V: int
    K_Ham: int | None
    verdict: str
    paper_expected: str | None
    jl_max_real: float | None
    jl_verdict: str | None
    diagnostics: tuple = field(default=())

    def to_dict(self):
        c = self.case
        return {
            "schema": SCHEMA,
            "case": {"kappa": c.kappa, "gamma": c.gamma, "branch": c.branch, "B": c.B},
            "wave": {"k": self.k, "L": self.L, "omega": self.omega, "profile": self.profile, "N": self.N},
            "space": self.space,
            "counts": {"n_L": self.n_L, "z_L": self.z_L},
            "spectra": [dict(s, kernel=dict(s["kernel"])) for s in self.spectra],
            "V": {"matrix": [list(row) for row in self.V], "n_neg": self.n_V},
            "K_Ham": self.K_Ham,
            "verdict": self.verdict,
            "paper_expected": self.paper_expected,
            "jl": {"max_real": self.jl_max_real, "verdict": self.jl_verdict},
            "diagnostics": list(self.diagnostics),
        }

    @classmethod
    def from_dict(cls, d):
        if d.get("schema") != SCHEMA:
            raise ValueError(f"unsupported schema {d.get('schema')!r}")
        c = d["case"]
        case = coupling.make_case(c["kappa"], c["gamma"], c["branch"])
        w = d["wave"]
        return cls(
            case=case,
            space=d["space"],
            profile=w["profile"],
            k=w["k"],
            L=w["L"],
            N=w["N"],
            omega=w["omega"],
            n_L=d["counts"]["n_L"],
            z_L=d["counts"]["z_L"],
            spectra=tuple(_freeze_summary(s) for s in d["spectra"]),
            V=tuple(tuple(row) for row in d["V"]["matrix"]),
            n_V=d["V"]["n_neg"],
            K_Ham=d["K_Ham"],
            verdict=d["verdict"],
            paper_expected=d["paper_expected"],
            jl_max_real=d["jl"]["max_real"],
            jl_verdict=d["jl"]["verdict"],
            diagnostics=tuple(d.get("diagnostics", ())),
        )


def _freeze_summary(s):
    return {"beta": s["beta"], "n": s["n"], "z": s["z"], "kernel": dict(s["kernel"])}


def _resolve_spectra(frame, profile, space, max_N):
    while True:
        spectra = channel_spectra(frame, profile, space)
        if not any(s.unresolved for s in spectra) or profile.N >= max_N:
            return spectra, profile
        profile = waveforms.sample_profile(profile.kind, profile.params, 2 * profile.N)


def stability_report(
    kappa,
    gamma,
    branch,
    k=0.5,
    L=2.0 * math.pi,
    profile_kind="cnoidal",
    space="full",
    N=256,
    *,
    with_jl=True,
    resign_trials=2,
    seed=0,
    tol=None,
    max_N=2048,
):
    """Run the pipeline for one configuration and collect a :class:`StabilityReport`."""
    from . import dynspec

    case = coupling.make_case(kappa, gamma, branch)
    if space == "odd" and profile_kind != "snoidal":
        raise ValueError("the odd space requires the snoidal profile")
    params = waveforms.wave_params(k, L, case.kappa, case.gamma, case.B)
    profile = waveforms.resolved_profile(profile_kind, params, N, case.kappa, case.gamma, case.B)
    frame = coupling.orthonormal_frame(case)
    diagnostics = []

    if tol is None:
        spectra, profile = _resolve_spectra(frame, profile, space, max_N)
    else:
        spectra = [
            hillspec.spectrum_counts(hillspec.assemble_hill(b, profile, space), tol)
            for b in frame.channel_betas
        ]
    unresolved = any(s.unresolved for s in spectra)
    if unresolved:
        diagnostics.append("spectral gap below 100*tau_z; verdict withheld")
    n_L = sum(s.n_count for s in spectra)
    z_L = sum(s.z_count for s in spectra)

    cell = expected_cell(case, profile_kind, space)
    expected = cell.verdict if cell else "paper_open"

    kernel = kernel_basis(spectra, frame, profile, case.B)
    V = np.zeros((0, 0))
    n_V = 0
    k_ham = None
    verdict = "inconclusive"
    try:
        km = assemble_V(case, space, profile, frame, kernel, spectra)
        V = km.matrix
        n_V = km.n_neg
        if km.singular:
            diagnostics.append(f"V is singular (condition {km.condition:.3e})")
        else:
            k_ham, verdict = krein_verdict(n_L, km)
            rng = np.random.default_rng(seed)
            for _ in range(resign_trials):
                alt = coupling.resign_frame(frame, rng)
                alt_kernel = kernel_basis(spectra, alt, profile, case.B)
                if assemble_V(case, space, profile, alt, alt_kernel, spectra).n_neg != n_V:
                    diagnostics.append("n(V) changed under frame re-signing")
                    verdict = "inconclusive"
                    break
    except (NonOrthogonalRHSError, UnresolvedKernelError, ValueError) as exc:
        diagnostics.append(f"V assembly failed: {exc}")

    if cell is not None and cell.z_L is not None and z_L != cell.z_L:
        diagnostics.append(
            f"regime boundary: measured z(L)={z_L}, classification table has {cell.z_L}; verdict withheld"
        )
        verdict = "inconclusive"

    if unresolved:
        verdict = "inconclusive"

    jl_max = jl_verdict = None
    if with_jl:
        growth = dynspec.growth_verdict(dynspec.assemble_jl(case, profile, space))
        jl_max, jl_verdict = growth.max_real, growth.verdict
        if not growth.symmetric:
            diagnostics.append(f"J L spectrum pairing error {growth.pairing_error:.3e}")

    return StabilityReport(
        case=case,
        space=space,
        profile=profile_kind,
        k=float(k),
        L=float(L),
        N=profile.N,
        omega=params.omega,
        n_L=n_L,
        z_L=z_L,
        spectra=tuple(_freeze_summary(s.summary()) for s in spectra),
        V=tuple(tuple(float(x) for x in row) for row in V),
        n_V=n_V,
        K_Ham=k_ham,
        verdict=verdict,
        paper_expected=expected,
        jl_max_real=jl_max,
        jl_verdict=jl_verdict,
        diagnostics=tuple(diagnostics),
    )
