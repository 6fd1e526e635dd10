"""Loop versions of the hot kernels compiled with numba."""

import math

import numpy as np
from numba import njit

_AGM_MAXITER = 40


@njit(cache=True)
def _agm_sequence(m):
    a = np.empty(_AGM_MAXITER + 1)
    c = np.empty(_AGM_MAXITER + 1)
    a[0] = 1.0
    c[0] = math.sqrt(m)
    b = math.sqrt(1.0 - m)
    n = 0
    while n < _AGM_MAXITER and abs(c[n]) > 1e-16 * a[n]:
        a[n + 1] = 0.5 * (a[n] + b)
        c[n + 1] = 0.5 * (a[n] - b)
        b = math.sqrt(a[n] * b)
        n += 1
    return a[: n + 1], c[: n + 1]


@njit(cache=True)
def _sncndn(u, m):
    size = u.shape[0]
    sn = np.empty(size)
    cn = np.empty(size)
    dn = np.empty(size)
    if m == 0.0:
        for i in range(size):
            sn[i] = math.sin(u[i])
            cn[i] = math.cos(u[i])
            dn[i] = 1.0
        return sn, cn, dn
    if m == 1.0:
        for i in range(size):
            sn[i] = math.tanh(u[i])
            cn[i] = 1.0 / math.cosh(u[i])
            dn[i] = cn[i]
        return sn, cn, dn
    a, c = _agm_sequence(m)
    n = a.shape[0] - 1
    scale = (2.0**n) * a[n]
    for i in range(size):
        phi = scale * u[i]
        for j in range(n, 0, -1):
            phi = 0.5 * (phi + math.asin(c[j] / a[j] * math.sin(phi)))
        s = math.sin(phi)
        co = math.cos(phi)
        sn[i] = s
        cn[i] = co
        dn[i] = math.sqrt((1.0 - m) + m * co * co)
    return sn, cn, dn


def sncndn(u, m):
    """Jacobi ``sn, cn, dn`` at argument array ``u`` and parameter ``m = k**2``."""
    u = np.ascontiguousarray(u, dtype=np.float64)
    shape = u.shape
    sn, cn, dn = _sncndn(u.ravel(), float(m))
    return sn.reshape(shape), cn.reshape(shape), dn.reshape(shape)


@njit(cache=True)
def _trig_potential_matrix(re, im, n):
    h = n // 2
    out = np.empty((n, n))
    r2 = 1.0 / math.sqrt(2.0)
    for i in range(h + 1):
        wi = r2 if i == 0 else 1.0
        for j in range(h + 1):
            wj = r2 if j == 0 else 1.0
            out[i, j] = wi * wj * (re[abs(i - j)] + re[i + j])
        for js in range(1, h):
            d = js - i
            sg = 1.0 if d > 0 else (-1.0 if d < 0 else 0.0)
            v = -wi * (im[i + js] + sg * im[abs(d)])
            out[i, h + js] = v
            out[h + js, i] = v
    for i in range(1, h):
        for j in range(1, h):
            out[h + i, h + j] = re[abs(i - j)] - re[i + j]
    return out


def trig_potential_matrix(coef, n):
    """Galerkin matrix of a real potential on the orthonormal real trig basis."""
    coef = np.asarray(coef, dtype=np.complex128)
    return _trig_potential_matrix(
        np.ascontiguousarray(coef.real), np.ascontiguousarray(coef.imag), int(n)
    )


@njit(cache=True)
def _sine_potential_matrix(re, n):
    h = n // 2
    out = np.empty((h - 1, h - 1))
    for i in range(1, h):
        for j in range(1, h):
            out[i - 1, j - 1] = re[abs(i - j)] - re[i + j]
    return out


def sine_potential_matrix(coef, n):
    """Galerkin matrix of an even potential on ``sin 1..n/2-1`` (odd subspace)."""
    coef = np.asarray(coef, dtype=np.complex128)
    return _sine_potential_matrix(np.ascontiguousarray(coef.real), int(n))
