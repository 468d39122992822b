"""Special functions: Bessel J of integer and half-integer order, the radial
Fourier kernel, and the Laguerre-Gaussian Fourier eigenbasis.

All routines are vectorised over the argument.
"""
from __future__ import annotations

import math

import numpy as np
from scipy.special import gammaln

__all__ = [
    "ball_volume",
    "sphere_area",
    "bessel_j",
    "radial_kernel",
    "basis_norms",
    "laguerre_polys",
    "eigen_basis",
    "jacobi_coefficients",
]

_MILLER_CUTOFF = 50.0
_SERIES_CUTOFF = 1.0


def ball_volume(d: int) -> float:
    """nu_d = pi^(d/2) / Gamma(d/2 + 1)."""
    return math.exp(0.5 * d * math.log(math.pi) - math.lgamma(0.5 * d + 1.0))


def sphere_area(d: int) -> float:
    """Surface measure omega_{d-1} of the unit sphere in R^d."""
    return d * ball_volume(d)


def _check_order(nu: float) -> float:
    twice = 2.0 * nu
    if twice != round(twice) or nu < -0.5:
        raise ValueError(f"order must be a half-integer >= -1/2, got {nu}")
    return float(nu)


def _series(nu: float, x: np.ndarray) -> np.ndarray:
    # ascending series, used for x <= 1 where it converges fast without cancellation
    out = np.zeros_like(x)
    pos = x > 0
    if nu == 0:
        out[~pos] = 1.0
    elif nu < 0:
        out[~pos] = math.inf
    xp = x[pos]
    h2 = 0.25 * xp * xp
    lead = np.exp(nu * np.log(0.5 * xp) - gammaln(nu + 1.0))
    term = np.ones_like(xp)
    total = np.ones_like(xp)
    for k in range(1, 30):
        term = -term * h2 / (k * (k + nu))
        total += term
        if np.all(np.abs(term) < 1e-17 * np.abs(total)):
            break
    out[pos] = lead * total
    return out


def _asymptotic_01(x: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    # Hankel expansion for J_0 and J_1, valid for large x
    res = []
    for nu in (0.0, 1.0):
        mu = 4.0 * nu * nu
        p = np.ones_like(x)
        q = np.zeros_like(x)
        term = np.ones_like(x)
        for k in range(1, 60):
            term = term * (mu - (2 * k - 1) ** 2) / (k * 8.0 * x)
            if k % 2:
                q += term if (k // 2) % 2 == 0 else -term
            else:
                p += -term if (k // 2) % 2 else term
            if np.all(np.abs(term) < 1e-17):
                break
        chi = x - (0.5 * nu + 0.25) * math.pi
        res.append(np.sqrt(2.0 / (math.pi * x)) * (p * np.cos(chi) - q * np.sin(chi)))
    return res[0], res[1]


def _miller_integer(n: int, x: np.ndarray) -> np.ndarray:
    # backward recurrence normalised by J_0 + 2 sum J_2k = 1
    top = max(n, float(np.max(x)))
    m = int(top + 20 + math.sqrt(40.0 * top))
    m += m % 2
    jp1 = np.zeros_like(x)
    j = np.full_like(x, 1e-300)
    norm = np.zeros_like(x)
    want = np.zeros_like(x)
    for k in range(m, 0, -1):
        jm1 = (2.0 * k / x) * j - jp1
        jp1, j = j, jm1
        # j now holds index k-1
        if k - 1 == n:
            want = j.copy()
        if (k - 1) % 2 == 0 and k - 1 > 0:
            norm += 2.0 * j
        big = np.abs(j) > 1e200
        if np.any(big):
            for arr in (j, jp1, norm, want):
                arr[big] *= 1e-200
    norm += j
    return want / norm


def _upward_integer(n: int, x: np.ndarray) -> np.ndarray:
    j0, j1 = _asymptotic_01(x)
    if n == 0:
        return j0
    for k in range(1, n):
        j0, j1 = j1, (2.0 * k / x) * j1 - j0
    return j1


def _spherical(n: int, x: np.ndarray) -> np.ndarray:
    # j_n(x) for x > 1
    s, c = np.sin(x), np.cos(x)
    j0 = s / x
    if n == 0:
        return j0
    out = np.empty_like(x)
    up = x > n
    if np.any(up):
        xu = x[up]
        a, b = j0[up], s[up] / xu**2 - c[up] / xu
        for k in range(1, n):
            a, b = b, (2 * k + 1) / xu * b - a
        out[up] = b
    dn = ~up
    if np.any(dn):
        xd = x[dn]
        m = int(n + 20 + math.sqrt(40.0 * n))
        jp1 = np.zeros_like(xd)
        j = np.full_like(xd, 1e-300)
        want = np.zeros_like(xd)
        j1_raw = np.zeros_like(xd)
        for k in range(m, 0, -1):
            jm1 = (2 * k + 1) / xd * j - jp1
            jp1, j = j, jm1
            if k - 1 == n:
                want = j.copy()
            if k - 1 == 1:
                j1_raw = j.copy()
            big = np.abs(j) > 1e200
            if np.any(big):
                for arr in (j, jp1, want, j1_raw):
                    arr[big] *= 1e-200
        true0 = j0[dn]
        true1 = s[dn] / xd**2 - c[dn] / xd
        use0 = np.abs(true0) >= np.abs(true1)
        scale = np.where(use0, true0 / np.where(use0, j, 1.0), true1 / np.where(use0, 1.0, j1_raw))
        out[dn] = want * scale
    return out


def bessel_j(nu: float, x) -> np.ndarray:
    """Bessel function J_nu(x) for nu in {-1/2, 0, 1/2, 1, ...} and x >= 0.

    Ascending series for x <= 1, Miller backward recurrence for integer order up
    to x = 50 (or while nu >= x), the Hankel expansion plus upward recurrence
    beyond, and spherical-Bessel recurrences for half-integer order.
    """
    nu = _check_order(nu)
    xa = np.asarray(x, dtype=float)
    scalar = xa.ndim == 0
    xa = np.atleast_1d(xa).astype(float)
    if np.any(xa < 0) or np.any(np.isnan(xa)):
        raise ValueError("bessel_j requires x >= 0")
    out = np.empty_like(xa)
    small = xa <= _SERIES_CUTOFF
    if nu == -0.5:
        out[small] = _series(-0.5, xa[small]) if np.any(small) else out[small]
        big = ~small
        out[big] = np.sqrt(2.0 / (math.pi * xa[big])) * np.cos(xa[big])
    elif nu != int(nu):
        if np.any(small):
            out[small] = _series(nu, xa[small])
        big = ~small
        if np.any(big):
            xb = xa[big]
            out[big] = np.sqrt(2.0 * xb / math.pi) * _spherical(int(nu - 0.5), xb)
    else:
        n = int(nu)
        if np.any(small):
            out[small] = _series(nu, xa[small])
        mid = (~small) & ((xa <= _MILLER_CUTOFF) | (xa <= n))
        if np.any(mid):
            out[mid] = _miller_integer(n, xa[mid])
        far = (~small) & ~mid
        if np.any(far):
            out[far] = _upward_integer(n, xa[far])
    return out[0] if scalar else out


def radial_kernel(d: int, z, via_bessel: bool = False) -> np.ndarray:
    """Normalised kernel Gamma(nu+1) (2/z)^nu J_nu(z) with nu = d/2 - 1.

    The radial Fourier transform in R^d is
    fhat(rho) = omega_{d-1} int_0^inf f(r) r^(d-1) K(2 pi rho r) dr with K(0) = 1.
    For d = 1 this is cos(z); ``via_bessel`` forces the generic Bessel route.
    """
    nu = 0.5 * d - 1.0
    za = np.abs(np.asarray(z, dtype=float))
    if d == 1 and not via_bessel:
        return np.cos(za)
    scalar = za.ndim == 0
    za = np.atleast_1d(za)
    out = np.empty_like(za)
    small = za < 1.0
    if np.any(small):
        h2 = 0.25 * za[small] ** 2
        term = np.ones_like(h2)
        total = np.ones_like(h2)
        for k in range(1, 25):
            term = -term * h2 / (k * (k + nu))
            total += term
        out[small] = total
    big = ~small
    if np.any(big):
        zb = za[big]
        out[big] = math.exp(math.lgamma(nu + 1.0)) * (2.0 / zb) ** nu * bessel_j(nu, zb)
    return out[0] if scalar else out


def basis_norms(d: int, kmax: int) -> np.ndarray:
    """L^2(R^d) norms N_k of L_k^(d/2-1)(2 pi |x|^2) exp(-pi |x|^2)."""
    k = np.arange(kmax + 1, dtype=float)
    logn2 = -0.5 * d * math.log(2.0) + gammaln(k + 0.5 * d) - gammaln(0.5 * d) - gammaln(k + 1.0)
    return np.exp(0.5 * logn2)


def jacobi_coefficients(d: int, kmax: int) -> tuple[np.ndarray, np.ndarray]:
    """Diagonal a_k and off-diagonal b_k of the symmetric three-term recurrence
    u q_k = -b_k q_{k+1} + a_k q_k - b_{k-1} q_{k-1} for the normalised basis
    polynomials q_k(u) = L_k^(alpha)(u) / N_k, alpha = d/2 - 1."""
    alpha = 0.5 * d - 1.0
    k = np.arange(kmax + 1, dtype=float)
    a = 2.0 * k + alpha + 1.0
    b = np.sqrt((k + 1.0) * (k + 0.5 * d))
    return a, b


def laguerre_polys(d: int, kmax: int, u) -> tuple[np.ndarray, np.ndarray]:
    """Normalised Laguerre polynomials q_0..q_kmax at u = 2 pi r^2.

    Returns (Q, logscale) with the true values Q * exp(logscale)[:, None];
    rows are rescaled during the recurrence so large u never overflows.
    """
    u = np.atleast_1d(np.asarray(u, dtype=float))
    a, b = jacobi_coefficients(d, kmax)
    n0 = basis_norms(d, 0)[0]
    out = np.empty((u.size, kmax + 1))
    logscale = np.zeros(u.size)
    prev = np.zeros_like(u)
    cur = np.full_like(u, 1.0 / n0)
    out[:, 0] = cur
    for k in range(kmax):
        nxt = ((a[k] - u) * cur - (b[k - 1] if k > 0 else 0.0) * prev) / b[k]
        prev, cur = cur, nxt
        out[:, k + 1] = cur
        big = np.abs(cur) > 1e150
        if np.any(big):
            out[big, : k + 2] *= 1e-150
            prev[big] *= 1e-150
            cur[big] *= 1e-150
            logscale[big] += 150.0 * math.log(10.0)
    return out, logscale


def eigen_basis(d: int, kmax: int, r) -> np.ndarray:
    """Unit-L^2 Fourier eigenfunctions l_k(r), k = 0..kmax, as columns.

    l_k is a degree-k polynomial in 2 pi r^2 times exp(-pi r^2), with
    Fourier eigenvalue (-1)^k.
    """
    r = np.atleast_1d(np.asarray(r, dtype=float))
    u = 2.0 * math.pi * r * r
    q, logscale = laguerre_polys(d, kmax, u)
    return q * np.exp(logscale - 0.5 * u)[:, None]
