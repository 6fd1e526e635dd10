"""Acceptance checks shared by ``hill-krein selftest`` and the test suite.

Each ``criterion_N`` returns an :class:`Outcome`; ``details`` lists every
failed sub-check (empty when the criterion passes).  Independent oracles
come from scipy (adaptive quadrature, DOP853 integration) and mpmath.
"""

from __future__ import annotations

import math
import time
import warnings
from dataclasses import dataclass, field

import numpy as np

from . import coupling, dynspec, elliptic, hillspec, kreinindex, waveforms

__all__ = ["Outcome", "CRITERIA", "QUICK", "TOL", "run", "criterion"]

TWO_PI = 2.0 * math.pi
K_SPECTRAL = (0.3, 0.5, 0.8)

# every threshold the criteria compare against, in one auditable place
TOL = {
    "complete_integrals": 1e-13,
    "ellint_pi": 1e-12,
    "ellint_pi_point": 1e-11,
    "jacobi_ode": 1e-11,
    "jacobi_mpmath": 1e-12,
    "jacobi_identity": 1e-12,
    "quarter_shift": 1e-10,
    "mass_quadrature": 1e-9,
    "mass_derivative": 1e-8,
    "finite_difference": 1e-5,
    "kernel_overlap": 1e-6,
    "mass_identity": 1e-6,
}


@dataclass
class Outcome:
    number: int
    title: str
    budget: float
    passed: bool = True
    details: list = field(default_factory=list)
    seconds: float = 0.0

    def expect(self, cond, message):
        if not cond:
            self.passed = False
            self.details.append(message)
        return bool(cond)

    def line(self):
        status = "PASS" if self.passed else "FAIL"
        return f"criterion {self.number:2d} {status} {self.seconds:7.2f}s  {self.title}"


CRITERIA = {}


def criterion(number, title, budget):
    def wrap(fn):
        def run_one(**kw):
            out = Outcome(number, title, budget)
            start = time.perf_counter()
            try:
                fn(out, **kw)
            except Exception as exc:  # a crash is a failed criterion, not an abort
                out.expect(False, f"raised {type(exc).__name__}: {exc}")
            out.seconds = time.perf_counter() - start
            out.expect(out.seconds < budget, f"runtime {out.seconds:.1f}s over budget {budget}s")
            return out

        run_one.__name__ = fn.__name__
        run_one.__doc__ = fn.__doc__
        CRITERIA[number] = run_one
        return run_one

    return wrap


def _rel(a, b):
    return abs(a - b) / max(abs(b), 1e-300)


@criterion(1, "elliptic integrals and Jacobi functions vs independent oracles", 5.0)
def criterion_1(out, **_):
    import mpmath
    from scipy.integrate import quad, solve_ivp

    ks = np.linspace(0.0, 0.99, 100)
    errs = []
    for k in ks:
        big_k, big_e = elliptic.complete_integrals(k)
        errs.append(max(_rel(big_k, float(mpmath.ellipk(k * k))), _rel(big_e, float(mpmath.ellipe(k * k)))))
    out.expect(max(errs) <= TOL["complete_integrals"], f"K/E max relative error {max(errs):.2e}")

    rng = np.random.default_rng(1)
    ns = rng.uniform(-2.0, 0.9, 100)
    kk = rng.uniform(0.0, 0.95, 100)
    worst = 0.0
    for n, k in zip(ns, kk):
        with warnings.catch_warnings():
            # quad flags roundoff at epsrel near machine precision; the result is still the oracle
            warnings.simplefilter("ignore")
            ref, _ = quad(
                lambda t: 1.0 / ((1.0 - n * math.sin(t) ** 2) * math.sqrt(1.0 - (k * math.sin(t)) ** 2)),
                0.0,
                math.pi / 2,
                epsabs=0.0,
                epsrel=2e-14,
                limit=200,
            )
        worst = max(worst, _rel(elliptic.ellint_pi(n, k), ref))
    out.expect(worst <= TOL["ellint_pi"], f"Pi max relative error {worst:.2e}")
    ref = quad(lambda t: 1.0 / ((1 + 1.5 * math.sin(t) ** 2) * math.sqrt(1 - 0.25 * math.sin(t) ** 2)),
               0.0, math.pi / 2, epsabs=0.0, epsrel=2e-14)[0]
    out.expect(_rel(elliptic.ellint_pi(-1.5, 0.5), ref) <= TOL["ellint_pi_point"], "Pi(-1.5, 0.5) off quadrature")

    for k in (0.3, 0.8, 0.95):
        xs = np.linspace(0.0, 6.0, 100)
        m = k * k
        sol = solve_ivp(
            lambda _x, y: [y[1] * y[2], -y[0] * y[2], -m * y[0] * y[1]],
            (0.0, 6.0),
            [0.0, 1.0, 1.0],
            method="DOP853",
            t_eval=xs,
            rtol=1e-13,
            atol=1e-15,
        )
        sn, cn, dn = elliptic.jacobi(xs, k)
        ode = float(np.max(np.abs(np.vstack([sn, cn, dn]) - sol.y)))
        out.expect(ode <= TOL["jacobi_ode"], f"Jacobi vs ODE at k={k}: {ode:.2e}")
        mp = np.array([[float(mpmath.ellipfun(f, x, m=m)) for x in xs] for f in ("sn", "cn", "dn")])
        err = float(np.max(np.abs(np.vstack([sn, cn, dn]) - mp)))
        out.expect(err <= TOL["jacobi_mpmath"], f"Jacobi vs mpmath at k={k}: {err:.2e}")
        ident = max(float(np.max(np.abs(sn**2 + cn**2 - 1))), float(np.max(np.abs(dn**2 + m * sn**2 - 1))))
        out.expect(ident <= TOL["jacobi_identity"], f"Jacobi identities at k={k}: {ident:.2e}")


@criterion(2, "cnoidal/snoidal existence: residual, parameter ranges, quarter shift", 10.0)
def criterion_2(out, **_):
    for L in (math.pi, TWO_PI, 10.0):
        for k in np.round(np.arange(0.1, 0.91, 0.1), 10):
            p = waveforms.wave_params(k, L, 1.0, 1.0, 1.0)
            out.expect(-2.0 < p.q < -1.0, f"q={p.q} at k={k}, L={L}")
            out.expect(2.0 / 3.0 < p.q_tilde < 1.0, f"q_tilde={p.q_tilde} at k={k}, L={L}")
            out.expect(p.omega > 4.0 * math.pi**2 / L**2, f"omega={p.omega} at k={k}, L={L}")
            tol = waveforms.residual_tolerance(p.omega)
            profiles = {}
            for kind in waveforms.PROFILE_KINDS:
                prof = waveforms.sample_profile(kind, p, 256)
                profiles[kind] = prof
                res = waveforms.ode_residual(prof, 1.0, 1.0, 1.0)
                out.expect(res <= tol, f"{kind} residual {res:.2e} > {tol:.2e} at k={k}, L={L}")
            shifted = np.roll(profiles["cnoidal"].phi, -64)
            diff = float(np.max(np.abs(profiles["snoidal"].phi - shifted)))
            out.expect(diff < TOL["quarter_shift"], f"snoidal vs shifted cnoidal {diff:.2e} at k={k}, L={L}")


@criterion(3, "mass closed form, positive slopes, finite-difference slope", 10.0)
def criterion_3(out, **_):
    import mpmath

    for k in (0.3, 0.5, 0.8):
        prof = waveforms.sample_profile("cnoidal", waveforms.wave_params(k, TWO_PI), 512)
        quadrature = float(np.sum(prof.phi**2) * TWO_PI / 512)
        mass = waveforms.mass_and_slopes(k, TWO_PI).mass
        out.expect(_rel(mass, quadrature) <= TOL["mass_quadrature"], f"mass vs quadrature at k={k}: {_rel(mass, quadrature):.2e}")
    h = 1e-6
    for k in np.round(np.arange(0.05, 0.951, 0.05), 10):
        ms = waveforms.mass_and_slopes(k, TWO_PI)
        out.expect(ms.dmass_dk > 0 and ms.domega_dk > 0 and ms.dmass_domega > 0, f"nonpositive slope at k={k}")
        out.expect(waveforms.action_curvature(k, TWO_PI) > 0, f"d''(omega) <= 0 at k={k}")
        with mpmath.workdps(30):
            exact = float(mpmath.diff(_mp_mass, mpmath.mpf(k)))
        out.expect(_rel(ms.dmass_dk, exact) <= TOL["mass_derivative"], f"dmass_dk vs mpmath derivative at k={k}")
        if k < 0.1:
            # dmass_dk ~ k^3 here; the h=1e-6 difference carries ~1e-5 roundoff
            continue
        fd = (waveforms.mass_and_slopes(k + h, TWO_PI).mass - waveforms.mass_and_slopes(k - h, TWO_PI).mass) / (2 * h)
        out.expect(_rel(ms.dmass_dk, fd) <= TOL["finite_difference"], f"dmass_dk vs FD at k={k}: {_rel(ms.dmass_dk, fd):.2e}")


def _mp_mass(k):
    import mpmath

    L = 2 * mpmath.pi
    big_k = mpmath.ellipk(k * k)
    r = mpmath.sqrt(k**4 - k**2 + 1)
    a = 2 / L * ((2 - k * k + 2 * r) * L * L * big_k * big_k) ** 0.25
    q = -1 + k * k - r
    return a * a * L / big_k * (mpmath.ellippi(q, k * k) * (q - 1) + big_k) / q


def _scalar_checks(out, k, N, tau_z):
    p = waveforms.wave_params(k, TWO_PI, 1.0, 1.0, 1.0)
    c = p.nonlinearity
    cn = waveforms.sample_profile("cnoidal", p, N)
    sn = waveforms.sample_profile("snoidal", p, N)
    tag = f"k={k}, N={N}"

    def spec(beta, prof, space):
        return hillspec.spectrum_counts(hillspec.assemble_hill(beta, prof, space), tol=tau_z)

    s1, s2 = spec(5 * c, cn, "full"), spec(c, cn, "full")
    o1, o2 = spec(5 * c, sn, "odd"), spec(c, sn, "odd")
    f1 = spec(5 * c, sn, "full")
    for name, s, nz in (("cn L1", s1, (2, 1)), ("cn L2", s2, (1, 1)), ("sn L1,odd", o1, (1, 0)), ("sn L2,odd", o2, (0, 1))):
        out.expect((s.n_count, s.z_count) == nz, f"{name} (n,z)={(s.n_count, s.z_count)} != {nz} at {tag}")
        out.expect(not s.unresolved, f"{name} spectral gap {s.gap:.2e} unresolved at {tag}")
    out.expect(s1.kernel_overlap["phi_prime"] > 1 - TOL["kernel_overlap"], f"cn L1 kernel vs phi' at {tag}")
    out.expect(s2.kernel_overlap["phi"] > 1 - TOL["kernel_overlap"], f"cn L2 kernel vs phi at {tag}")
    out.expect(o2.kernel_overlap["phi"] > 1 - TOL["kernel_overlap"], f"sn L2,odd kernel vs psi at {tag}")
    out.expect(o1.kernel_overlap["phi_prime"] < TOL["kernel_overlap"], f"odd space keeps psi' at {tag}")
    for name, s in (("cn L1", s1), ("cn L2", s2), ("sn L1", f1)):
        rep = hillspec.parity_floquet_check(s)
        out.expect(rep.passed, f"parity {name} at {tag}: {rep.message}")
    return [(s.n_count, s.z_count) for s in (s1, s2, o1, o2)]


@criterion(4, "scalar Hill counts, kernels and parities (full and odd spaces)", 60.0)
def criterion_4(out, tau_z=None, **_):
    for k in K_SPECTRAL:
        a = _scalar_checks(out, k, 256, tau_z)
        b = _scalar_checks(out, k, 512, tau_z)
        out.expect(a == b, f"counts change under N=256 -> 512 at k={k}: {a} vs {b}")


@criterion(5, "sign conditions I < 0 (with mass identity) and J > 0", 30.0)
def criterion_5(out, **_):
    for k in K_SPECTRAL:
        p = waveforms.wave_params(k, TWO_PI, 1.0, 1.0, 1.0)
        for kind in waveforms.PROFILE_KINDS:
            prof = waveforms.sample_profile(kind, p, 256)
            value, analytic, rel = kreinindex.mass_identity(prof)
            out.expect(value < 0, f"I={value} not negative ({kind}, k={k})")
            out.expect(rel <= TOL["mass_identity"], f"I vs -theta^2/2 dmass/domega rel {rel:.2e} ({kind}, k={k})")
            j = kreinindex.quad_form_J(prof)
            out.expect(j > 0, f"J={j} not positive ({kind}, k={k})")


def _report(branch, gamma, kind, space, k, N=256, tau_z=None):
    return kreinindex.stability_report(1.0, gamma, branch, k, TWO_PI, kind, space, N, tol=tau_z)


def _match(out, rep, cell, tag):
    got = (rep.n_L, rep.z_L, rep.n_V, rep.K_Ham, rep.verdict)
    want = (cell.n_L, cell.z_L, cell.n_V, cell.K_Ham, cell.verdict)
    out.expect(got == want, f"{tag}: (n_L,z_L,n_V,K,verdict)={got}, expected {want}")


def _cells(profile, verdicts=None):
    return [c for c in kreinindex.EXPECTED_CELLS if c.profile == profile and (verdicts is None or c.verdict in verdicts)]


def _jl_agrees(out, rep, tag):
    tau_r = dynspec.growth_tolerance(rep.omega)
    if rep.verdict == "unstable":
        out.expect(rep.jl_max_real > tau_r, f"{tag}: jl max real {rep.jl_max_real:.2e} <= tau_r")
    elif rep.verdict == "stable":
        out.expect(rep.jl_max_real <= tau_r, f"{tag}: jl max real {rep.jl_max_real:.2e} > tau_r")


@criterion(6, "cnoidal case: B=1, gamma=2 kappa is unstable with K_Ham=3", 60.0)
def criterion_6(out, tau_z=None, **_):
    cell = next(c for c in _cells("cnoidal") if c.regime == "gamma=2k")
    for k in K_SPECTRAL:
        rep = _report("one", 2.0, "cnoidal", "full", k, tau_z=tau_z)
        _match(out, rep, cell, f"cnoidal gamma=2k k={k}")
        _jl_agrees(out, rep, f"cnoidal gamma=2k k={k}")


@criterion(7, "snoidal cases: every covered odd-space cell", 180.0)
def criterion_7(out, tau_z=None, **_):
    for cell in _cells("snoidal"):
        for k in K_SPECTRAL:
            tag = f"snoidal {cell.branch} {cell.regime} k={k}"
            rep = _report(cell.branch, cell.sample, "snoidal", "odd", k, tau_z=tau_z)
            _match(out, rep, cell, tag)
            _jl_agrees(out, rep, tag)


@criterion(8, "cnoidal inconclusive cells never report stable/unstable", 60.0)
def criterion_8(out, tau_z=None, **_):
    for cell in _cells("cnoidal", {"inconclusive"}):
        for k in K_SPECTRAL:
            tag = f"cnoidal {cell.branch} {cell.regime} k={k}"
            rep = _report(cell.branch, cell.sample, "cnoidal", "full", k, tau_z=tau_z)
            out.expect(rep.verdict == "inconclusive", f"{tag}: verdict {rep.verdict}")
            out.expect(rep.K_Ham == cell.K_Ham, f"{tag}: K_Ham={rep.K_Ham}, expected {cell.K_Ham}")


@criterion(9, "Krein verdict agrees with J L spectrum; Hamiltonian pairing", 120.0)
def criterion_9(out, tau_z=None, **_):
    cells = [c for c in _cells("cnoidal") if c.regime == "gamma=2k"] + _cells("snoidal")
    for cell in cells:
        for k in K_SPECTRAL:
            tag = f"{cell.profile} {cell.branch} {cell.regime} k={k}"
            case = coupling.make_case(1.0, cell.sample, cell.branch)
            rep = _report(cell.branch, cell.sample, cell.profile, cell.space, k, tau_z=tau_z)
            out.expect(rep.verdict == rep.jl_verdict, f"{tag}: Krein {rep.verdict} vs J L {rep.jl_verdict}")
            params = waveforms.wave_params(k, TWO_PI, case.kappa, case.gamma, case.B)
            prof = waveforms.sample_profile(cell.profile, params, rep.N)
            growth = dynspec.growth_verdict(dynspec.assemble_jl(case, prof, cell.space))
            out.expect(growth.symmetric, f"{tag}: pairing error {growth.pairing_error:.2e}")


@criterion(10, "integer outputs invariant under N=256/512 and frame re-signing", 150.0)
def criterion_10(out, tau_z=None, **_):
    for cell in kreinindex.EXPECTED_CELLS:
        tag = f"{cell.profile} {cell.branch} {cell.regime}"
        reps = [
            kreinindex.stability_report(
                1.0, cell.sample, cell.branch, 0.5, TWO_PI, cell.profile, cell.space, N,
                with_jl=False, resign_trials=3, seed=seed, tol=tau_z,
            )
            for N, seed in ((256, 11), (512, 12))
        ]
        ints = [(r.n_L, r.z_L, r.n_V, r.K_Ham) for r in reps]
        out.expect(ints[0] == ints[1], f"{tag}: {ints[0]} at N=256 vs {ints[1]} at N=512")
        for r in reps:
            out.expect(
                not any("re-signing" in d for d in r.diagnostics), f"{tag}: n(V) depends on the frame (N={r.N})"
            )


QUICK = (1, 2, 3)


def run(numbers=None, tau_z=None):
    """Run the requested criteria (all by default) in order."""
    numbers = sorted(CRITERIA) if numbers is None else list(numbers)
    return [CRITERIA[n](tau_z=tau_z) for n in numbers]
