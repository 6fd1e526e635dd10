"""Vectorized numpy versions of the hot kernels."""

import numpy as np

_AGM_MAXITER = 40


def _agm_sequence(m):
    """Return the arrays ``a_n``, ``c_n`` of the AGM started at ``(1, sqrt(1-m))``."""
    a = [1.0]
    c = [np.sqrt(m)]
    b = np.sqrt(1.0 - m)
    for _ in range(_AGM_MAXITER):
        if abs(c[-1]) <= 1e-16 * a[-1]:
            break
        an = 0.5 * (a[-1] + b)
        cn = 0.5 * (a[-1] - b)
        b = np.sqrt(a[-1] * b)
        a.append(an)
        c.append(cn)
    return np.array(a), np.array(c)


def sncndn(u, m):
    """Jacobi ``sn, cn, dn`` at argument array ``u`` and parameter ``m = k**2``.

    Descending Landen / AGM scheme.  ``0 <= m <= 1``; ``m == 1`` is the
    hyperbolic limit.
    """
    u = np.asarray(u, dtype=np.float64)
    if m == 0.0:
        return np.sin(u), np.cos(u), np.ones_like(u)
    if m == 1.0:
        sech = 1.0 / np.cosh(u)
        return np.tanh(u), sech, sech.copy()
    a, c = _agm_sequence(m)
    n = len(a) - 1
    phi = (2.0**n) * a[n] * u
    phi_prev = phi
    for j in range(n, 0, -1):
        phi_prev = phi
        phi = 0.5 * (phi + np.arcsin(c[j] / a[j] * np.sin(phi)))
    sn = np.sin(phi)
    cn = np.cos(phi)
    # dn^2 = k'^2 + k^2 cn^2 has no cancellation
    dn = np.sqrt((1.0 - m) + m * cn * cn)
    return sn, cn, dn


def trig_potential_matrix(coef, n):
    """Galerkin matrix of a real potential on the orthonormal real trig basis.

    ``coef[p]`` is the complex Fourier coefficient ``c_p`` (``V = sum c_p
    e^{i p kappa x}``) for ``p = 0..n``.  The basis is ordered
    ``cos 0..n/2`` followed by ``sin 1..n/2-1``.
    """
    h = n // 2
    re = coef.real
    im = coef.imag
    mc = np.arange(h + 1)
    ms = np.arange(1, h)
    wc = np.ones(h + 1)
    wc[0] = 1.0 / np.sqrt(2.0)

    dcc = np.abs(mc[:, None] - mc[None, :])
    cc = (wc[:, None] * wc[None, :]) * (re[dcc] + re[mc[:, None] + mc[None, :]])
    dss = np.abs(ms[:, None] - ms[None, :])
    ss = re[dss] - re[ms[:, None] + ms[None, :]]
    diff = ms[None, :] - mc[:, None]
    cs = -wc[:, None] * (im[mc[:, None] + ms[None, :]] + np.sign(diff) * im[np.abs(diff)])

    out = np.empty((n, n))
    out[: h + 1, : h + 1] = cc
    out[h + 1 :, h + 1 :] = ss
    out[: h + 1, h + 1 :] = cs
    out[h + 1 :, : h + 1] = cs.T
    return out


def sine_potential_matrix(coef, n):
    """Galerkin matrix of an even potential on ``sin 1..n/2-1`` (odd subspace)."""
    re = coef.real
    ms = np.arange(1, n // 2)
    return re[np.abs(ms[:, None] - ms[None, :])] - re[ms[:, None] + ms[None, :]]
