"""Cnoidal and snoidal standing-wave profiles of the quintic equation.

The profile solves ``-phi'' + omega phi - (kappa + gamma B^3) phi^5 = 0``.
It is the auxiliary solution ``phi_hat`` of ``-phi'' + omega phi - phi^5 = 0``
scaled by ``theta = (kappa + gamma B^3)^(-1/4)``.  The elliptic modulus
``k`` is the primary parameter; ``omega`` is derived from it.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .elliptic import complete_integrals, ellint_pi, jacobi

__all__ = [
    "WaveDomainError",
    "WaveParams",
    "GridProfile",
    "MassSlopes",
    "wave_params",
    "omega_of_k",
    "k_of_omega",
    "sample_profile",
    "resolved_profile",
    "spectral_derivative",
    "ode_residual",
    "residual_tolerance",
    "mass_and_slopes",
    "action_curvature",
]

PROFILE_KINDS = ("cnoidal", "snoidal")


class WaveDomainError(ValueError):
    """Wave parameters outside the range where the profile exists."""


@dataclass(frozen=True)
class WaveParams:
    k: float
    L: float
    a: float
    q: float
    a_tilde: float
    q_tilde: float
    omega: float
    theta: float

    @property
    def nonlinearity(self):
        """The coefficient ``kappa + gamma B^3 = theta^-4`` of the quintic term."""
        return self.theta**-4


@dataclass(frozen=True, eq=False)
class GridProfile:
    """Samples of a profile on ``N`` uniform points of ``[0, L)``."""

    kind: str
    N: int
    x: np.ndarray
    phi: np.ndarray
    dphi: np.ndarray
    params: WaveParams

    @property
    def L(self):
        return self.params.L

    @property
    def omega(self):
        return self.params.omega

    def reflect(self, f):
        """Return ``f(-x)`` on the grid."""
        return np.roll(f[::-1], 1)


def _r(k):
    return math.sqrt(k**4 - k**2 + 1.0)


def _check_k_L(k, L):
    if not (0.0 < k < 1.0):
        raise WaveDomainError(f"modulus k must lie in (0, 1), got {k!r}")
    if not (L > 0.0 and math.isfinite(L)):
        raise WaveDomainError(f"period L must be positive, got {L!r}")


def omega_of_k(k, L):
    """Frequency ``16 K(k)^2 sqrt(k^4 - k^2 + 1) / L^2``."""
    big_k = complete_integrals(k)[0]
    return 16.0 * big_k * big_k * _r(k) / (L * L)


def k_of_omega(omega, L, tol=1e-12):
    """Invert the increasing map ``k -> omega(k)`` by bisection."""
    lower = 4.0 * math.pi**2 / (L * L)
    if not omega > lower:
        raise WaveDomainError(f"omega must exceed 4 pi^2 / L^2 = {lower!r}, got {omega!r}")
    lo, hi = 0.0, 1.0
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        if mid >= 1.0 or mid <= 0.0:
            break
        if omega_of_k(mid, L) < omega:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def wave_params(k, L, kappa=1.0, gamma=0.0, B=1.0):
    """Closed-form parameters of the cnoidal/snoidal wave for modulus ``k``."""
    k = float(k)
    L = float(L)
    _check_k_L(k, L)
    strength = kappa + gamma * B**3
    if not strength > 0.0:
        raise WaveDomainError(
            f"kappa + gamma B^3 = {strength!r} must be positive for theta to be real"
        )
    big_k = complete_integrals(k)[0]
    r = _r(k)
    a = (2.0 / L) * ((2.0 - k * k + 2.0 * r) * L * L * big_k * big_k) ** 0.25
    q = -1.0 + k * k - r
    a_tilde = -a * math.sqrt(1.0 - k * k) / math.sqrt(1.0 - q)
    q_tilde = (k * k - q) / (1.0 - q)
    omega = 16.0 * big_k * big_k * r / (L * L)
    theta = strength**-0.25
    return WaveParams(k, L, a, q, a_tilde, q_tilde, omega, theta)


def spectral_derivative(f, L, order=1):
    """Fourier derivative of a periodic grid function.

    The Nyquist mode is dropped for odd orders so real input stays real.
    """
    n = len(f)
    wavenum = 2.0 * np.pi * np.fft.rfftfreq(n, d=L / n)
    mult = (1j * wavenum) ** order
    if order % 2 == 1 and n % 2 == 0:
        mult[-1] = 0.0
    return np.fft.irfft(mult * np.fft.rfft(f), n=n)


def _evaluate(kind, params, x):
    big_k = complete_integrals(params.k)[0]
    sn, cn, _ = jacobi(4.0 * big_k * x / params.L, params.k)
    if kind == "cnoidal":
        amp, char, top = params.a, params.q, cn
    elif kind == "snoidal":
        amp, char, top = params.a_tilde, params.q_tilde, sn
    else:
        raise ValueError(f"profile kind must be one of {PROFILE_KINDS}, got {kind!r}")
    denom = 1.0 - char * sn * sn
    if np.any(denom <= 0.0):
        raise WaveDomainError("1 - q sn^2 must stay positive")
    return params.theta * amp * top / np.sqrt(denom)


def sample_profile(kind, params, N=256):
    """Sample the cnoidal or snoidal profile on ``N`` uniform points."""
    N = int(N)
    if N < 32 or N % 2:
        raise ValueError(f"N must be even and >= 32, got {N}")
    x = np.arange(N) * (params.L / N)
    phi = _evaluate(kind, params, x)
    if kind == "snoidal":
        phi[0] = 0.0
    dphi = spectral_derivative(phi, params.L)
    for arr in (x, phi, dphi):
        arr.flags.writeable = False
    return GridProfile(kind, N, x, phi, dphi, params)


def residual_tolerance(omega):
    return 1e-8 * max(1.0, omega)


def ode_residual(profile, kappa, gamma, B):
    """Max-norm residual of ``-phi'' + omega phi - (kappa + gamma B^3) phi^5``."""
    phi = profile.phi
    d2 = spectral_derivative(phi, profile.L, order=2)
    res = -d2 + profile.omega * phi - (kappa + gamma * B**3) * phi**5
    return float(np.max(np.abs(res)))


def resolved_profile(kind, params, N=256, kappa=None, gamma=0.0, B=1.0, max_N=4096):
    """Sample a profile, doubling ``N`` until the ODE residual meets tolerance.

    When ``kappa`` is omitted the nonlinearity is taken from ``params.theta``.
    """
    if kappa is None:
        kappa, gamma, B = params.nonlinearity, 0.0, 1.0
    tol = residual_tolerance(params.omega)
    while True:
        prof = sample_profile(kind, params, N)
        if ode_residual(prof, kappa, gamma, B) <= tol or N >= max_N:
            return prof
        N *= 2


class MassSlopes(NamedTuple):
    mass: float
    dmass_dk: float
    domega_dk: float
    dmass_domega: float

    def scaled(self, theta):
        """Values for the wave ``theta * phi_hat``; mass terms pick up ``theta^2``."""
        t2 = theta * theta
        return MassSlopes(self.mass * t2, self.dmass_dk * t2, self.domega_dk, self.dmass_domega * t2)


def mass_and_slopes(k, L):
    """``||phi_hat||^2`` and its slopes in ``k`` and ``omega`` (``theta = 1``).

    The mass uses the third-kind integral at characteristic ``q``; the
    ``k``-derivatives are the explicit closed forms in ``K(k)``, ``E(k)``.
    """
    k = float(k)
    L = float(L)
    _check_k_L(k, L)
    big_k, big_e = complete_integrals(k)
    k2 = k * k
    r = _r(k)
    a = (2.0 / L) * ((2.0 - k2 + 2.0 * r) * L * L * big_k * big_k) ** 0.25
    q = -1.0 + k2 - r
    mass = a * a * L / big_k * (ellint_pi(q, k) * (q - 1.0) + big_k) / q

    poly_a = (-12 * k**6 + 42 * k**4 - 56 * k2 + 32) * r + (
        12 * k**8 - 48 * k**6 + 82 * k**4 - 72 * k2 + 32
    )
    poly_b = (-18 * k**4 + 40 * k2 - 32) * r + (18 * k**6 - 50 * k**4 + 56 * k2 - 32)
    denom = r * math.sqrt(2.0 - k2 + 2.0 * r) * (k2 - 1.0 - r) ** 2 * k * (1.0 + r)
    dmass_dk = (poly_a * big_k + poly_b * big_e) / denom

    bracket = (2 * k**4 - 2 * k2 + 2) * big_e + (-(k**4) + 3 * k2 - 2) * big_k
    domega_dk = 16.0 * big_k / (L * L * (1.0 - k2) * k * r) * bracket
    return MassSlopes(mass, dmass_dk, domega_dk, dmass_dk / domega_dk)


def action_curvature(k, L):
    """``d''(omega) = 1/2 d/domega ||phi||^2`` for the scalar wave."""
    return 0.5 * mass_and_slopes(k, L).dmass_domega
