"""Complete elliptic integrals and Jacobi elliptic functions.

Every function takes the *modulus* ``k`` (not the parameter ``m = k**2``).
This is fixed at the API boundary: internally the Jacobi kernel works with
``m``, but callers never see it.

``K`` and ``E`` come from the arithmetic-geometric mean, ``Pi`` from
Carlson's symmetric integrals ``R_F`` and ``R_J``, and ``sn, cn, dn`` from
the descending Landen (AGM) recursion.
"""

from __future__ import annotations

import math
from typing import NamedTuple

import numpy as np

from . import kernels

__all__ = [
    "EllipticDomainError",
    "EllipticOverflowError",
    "JacobiTriple",
    "complete_integrals",
    "ellipk",
    "ellipe",
    "ellint_pi",
    "carlson_rf",
    "carlson_rj",
    "jacobi",
]


class EllipticDomainError(ValueError):
    """Argument outside the domain of an elliptic function."""


class EllipticOverflowError(EllipticDomainError, OverflowError):
    """``K(k)`` requested at ``k = 1`` where it diverges."""


class JacobiTriple(NamedTuple):
    sn: np.ndarray | float
    cn: np.ndarray | float
    dn: np.ndarray | float


def _check_modulus(k, allow_one=False):
    k = float(k)
    if not math.isfinite(k):
        raise EllipticDomainError(f"modulus must be finite, got {k!r}")
    if k < 0.0:
        raise EllipticDomainError(f"modulus must be >= 0, got {k!r}")
    if k == 1.0 and not allow_one:
        raise EllipticOverflowError("K(k) diverges at k = 1")
    if k > 1.0:
        raise EllipticDomainError(f"modulus must be < 1, got {k!r}")
    return k


def complete_integrals(k):
    """Return ``(K(k), E(k))`` for ``0 <= k < 1``.

    AGM iteration ``a_{n+1} = (a_n + b_n)/2``, ``b_{n+1} = sqrt(a_n b_n)``
    from ``(1, k')`` with ``K = pi / (2 a_inf)`` and
    ``E = K (1 - sum_n 2^(n-1) c_n^2)``, ``c_0 = k``.
    """
    k = _check_modulus(k)
    a = 1.0
    b = math.sqrt((1.0 - k) * (1.0 + k))
    c = k
    total = 0.5 * c * c
    power = 0.5
    for _ in range(60):
        if abs(c) <= 1e-17 * a:
            break
        c = 0.5 * (a - b)
        a, b = 0.5 * (a + b), math.sqrt(a * b)
        power *= 2.0
        total += power * c * c
    big_k = math.pi / (2.0 * a)
    return big_k, big_k * (1.0 - total)


def ellipk(k):
    """Complete elliptic integral of the first kind ``K(k)``."""
    return complete_integrals(k)[0]


def ellipe(k):
    """Complete elliptic integral of the second kind ``E(k)``."""
    return complete_integrals(k)[1]


def _rc_one(e):
    """``R_C(1, 1 + e)`` in closed form, with a series near ``e = 0``."""
    if abs(e) < 1e-4:
        return 1.0 - e / 3.0 + e * e / 5.0 - e**3 / 7.0 + e**4 / 9.0
    if e > 0.0:
        s = math.sqrt(e)
        return math.atan(s) / s
    s = math.sqrt(-e)
    return math.atanh(s) / s


def carlson_rf(x, y, z):
    """Carlson's ``R_F(x, y, z)`` for nonnegative arguments, at most one zero."""
    if min(x, y, z) < 0.0 or (x + y == 0.0 or y + z == 0.0 or z + x == 0.0):
        raise EllipticDomainError("R_F needs nonnegative arguments with at most one zero")
    a0 = (x + y + z) / 3.0
    q = (3e-16) ** (-1.0 / 6.0) * max(abs(a0 - x), abs(a0 - y), abs(a0 - z))
    am = a0
    fourm = 1.0
    for _ in range(100):
        if q / fourm < abs(am):
            break
        sx, sy, sz = math.sqrt(x), math.sqrt(y), math.sqrt(z)
        lam = sx * sy + sy * sz + sz * sx
        x, y, z = (x + lam) / 4.0, (y + lam) / 4.0, (z + lam) / 4.0
        am = (am + lam) / 4.0
        fourm *= 4.0
    xx = (am - x) / am
    yy = (am - y) / am
    zz = -xx - yy
    e2 = xx * yy - zz * zz
    e3 = xx * yy * zz
    return (1.0 - e2 / 10.0 + e3 / 14.0 + e2 * e2 / 24.0 - 3.0 * e2 * e3 / 44.0) / math.sqrt(am)


def carlson_rj(x, y, z, p):
    """Carlson's ``R_J(x, y, z, p)`` for ``x, y, z >= 0`` (at most one zero), ``p > 0``."""
    if min(x, y, z) < 0.0 or p <= 0.0:
        raise EllipticDomainError("R_J needs x, y, z >= 0 and p > 0")
    a0 = (x + y + z + 2.0 * p) / 5.0
    delta = (p - x) * (p - y) * (p - z)
    q = (0.25e-16) ** (-1.0 / 6.0) * max(abs(a0 - x), abs(a0 - y), abs(a0 - z), abs(a0 - p))
    am = a0
    fourm = 1.0
    acc = 0.0
    for _ in range(100):
        if q / fourm < abs(am):
            break
        sx, sy, sz, sp = math.sqrt(x), math.sqrt(y), math.sqrt(z), math.sqrt(p)
        lam = sx * sy + sy * sz + sz * sx
        d = (sp + sx) * (sp + sy) * (sp + sz)
        e = delta / (fourm**3 * d * d)
        acc += _rc_one(e) / (fourm * d)
        x, y, z, p = (x + lam) / 4.0, (y + lam) / 4.0, (z + lam) / 4.0, (p + lam) / 4.0
        am = (am + lam) / 4.0
        fourm *= 4.0
    xx = (am - x) / am
    yy = (am - y) / am
    zz = (am - z) / am
    pp = -(xx + yy + zz) / 2.0
    e2 = xx * yy + xx * zz + yy * zz - 3.0 * pp * pp
    e3 = xx * yy * zz + 2.0 * e2 * pp + 4.0 * pp**3
    e4 = (2.0 * xx * yy * zz + e2 * pp + 3.0 * pp**3) * pp
    e5 = xx * yy * zz * pp * pp
    series = (
        1.0
        - 3.0 * e2 / 14.0
        + e3 / 6.0
        + 9.0 * e2 * e2 / 88.0
        - 3.0 * e4 / 22.0
        - 9.0 * e2 * e3 / 52.0
        + 3.0 * e5 / 26.0
    )
    return series / (fourm * am * math.sqrt(am)) + 6.0 * acc


def ellint_pi(n, k):
    """Complete elliptic integral of the third kind.

    ``Pi(n, k) = int_0^{pi/2} dt / ((1 - n sin^2 t) sqrt(1 - k^2 sin^2 t))``
    for characteristic ``n < 1``.
    """
    k = _check_modulus(k)
    n = float(n)
    if not math.isfinite(n) or n >= 1.0:
        raise EllipticDomainError(f"characteristic must be finite and < 1, got {n!r}")
    kc2 = (1.0 - k) * (1.0 + k)
    rf = carlson_rf(0.0, kc2, 1.0)
    if n == 0.0:
        return rf
    return rf + n / 3.0 * carlson_rj(0.0, kc2, 1.0, 1.0 - n)


def jacobi(x, k):
    """Jacobi elliptic functions ``(sn, cn, dn)`` at ``x`` for modulus ``0 <= k <= 1``.

    ``x`` may be a scalar or an array; the result has matching shape.
    """
    k = _check_modulus(k, allow_one=True)
    arr = np.asarray(x, dtype=np.float64)
    if not np.all(np.isfinite(arr)):
        raise EllipticDomainError("argument must be finite")
    sn, cn, dn = kernels.sncndn(np.atleast_1d(arr), k * k)
    if arr.ndim == 0:
        return JacobiTriple(float(sn[0]), float(cn[0]), float(dn[0]))
    return JacobiTriple(sn.reshape(arr.shape), cn.reshape(arr.shape), dn.reshape(arr.shape))
