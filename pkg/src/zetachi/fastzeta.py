"""Vectorised double-precision ζ machinery for bulk evaluation.

Same formulas as :mod:`zetachi.special` (Euler–Maclaurin with the
derivatives carried as truncated Taylor series, χ via log-gamma), but on
numpy arrays.  Hardy's Z additionally has a Riemann–Siegel evaluator,
which costs O(sqrt t) per point and is only used to scan for sign changes.
"""

from __future__ import annotations

import functools
import math

import mpmath
import numpy as np
from scipy.special import loggamma, psi

LOG_PI = math.log(math.pi)
TWO_PI = 2.0 * math.pi

_EM_TERMS = 30
# elements per chunk of the (points x terms) matrix
_CHUNK_ELEMS = 1 << 21


@functools.cache
def _bernoulli_ratios() -> np.ndarray:
    return np.array([float(mpmath.bernoulli(2 * k) / mpmath.factorial(2 * k))
                     for k in range(1, _EM_TERMS + 1)])


def em_cutoff(t: np.ndarray) -> np.ndarray:
    """Euler–Maclaurin cutoff N(t); keeps |s + 2k| / (2πN) below ~0.55."""
    return np.maximum(40, np.ceil(0.3 * np.abs(t))).astype(np.int64)


def _series_times_linear(ser: np.ndarray, a: np.ndarray) -> np.ndarray:
    out = a * ser
    out[1:] += ser[:-1]
    return out


_SPLIT = 134217729.0  # 2**27 + 1


@functools.cache
def _two_pi_parts() -> tuple[float, float, float]:
    ctx = mpmath.MPContext()
    ctx.dps = 60
    two_pi = 2 * ctx.pi
    c1 = float(ctx.mpf(int(two_pi * 2**30)) / 2**30)
    r = two_pi - c1
    c2 = float(ctx.mpf(int(r * 2**60)) / 2**60)
    c3 = float(r - c2)
    return c1, c2, c3


_log_cache: dict[str, np.ndarray] = {}


def _log_dd(N: int) -> tuple[np.ndarray, np.ndarray]:
    """log n for 1 <= n < N as double-double (hi, lo)."""
    hi = _log_cache.get("hi")
    if hi is None or hi.size < N - 1:
        size = max(N - 1, 2 * (0 if hi is None else hi.size), 1024)
        ctx = mpmath.MPContext()
        ctx.dps = 40
        logs = [ctx.log(n) for n in range(1, size + 1)]
        h = np.array([float(v) for v in logs])
        lo = np.array([float(v - ctx.mpf(float(v))) for v in logs])
        _log_cache["hi"], _log_cache["lo"] = h, lo
    return _log_cache["hi"][: N - 1], _log_cache["lo"][: N - 1]


def _split(a):
    c = _SPLIT * a
    hi = c - (c - a)
    return hi, a - hi


def reduced_phase(t: np.ndarray, ln_hi: np.ndarray, ln_lo: np.ndarray) -> np.ndarray:
    """(t * log n) mod 2π with the product and reduction done in double-double."""
    t = t[:, None]
    p = t * ln_hi
    th, tl = _split(t)
    lh, ll = _split(ln_hi)
    e = ((th * lh - p) + th * ll + tl * lh) + tl * ll  # exact: p + e = t * ln_hi
    c1, c2, c3 = _two_pi_parts()
    k = np.rint(p / c1)
    return (((p - k * c1) - k * c2) + (e + t * ln_lo)) - k * c3


def _zeta_taylor_chunk(s: np.ndarray, order: int, N: int, accurate: bool = False) -> np.ndarray:
    K = order + 1
    n = np.arange(1, N, dtype=np.float64)
    ln = np.log(n)
    if accurate:
        ln_hi, ln_lo = _log_dd(N + 1)
        ln_hi, ln_lo = ln_hi[:-1], ln_lo[:-1]
        ph = reduced_phase(s.imag, ln_hi, ln_lo)
        base = np.exp(-np.outer(s.real, ln)) * (np.cos(ph) - 1j * np.sin(ph))
    else:
        base = np.exp(-np.outer(s, ln))  # (P, N-1)
    powers = np.empty((N - 1, K))
    powers[:, 0] = 1.0
    for j in range(1, K):
        powers[:, j] = powers[:, j - 1] * (-ln) / j
    acc = (base @ powers).T.astype(np.complex128)  # (K, P), Taylor coefficients
    lnN = math.log(N)
    serN = np.empty((K, s.size), dtype=np.complex128)
    if accurate:
        hN, lN = _log_dd(N + 1)
        phN = reduced_phase(s.imag, hN[-1:], lN[-1:])[:, 0]
        serN[0] = np.exp(-s.real * lnN) * (np.cos(phN) - 1j * np.sin(phN))
    else:
        serN[0] = np.exp(-s * lnN)
    for j in range(1, K):
        serN[j] = serN[j - 1] * (-lnN) / j
    inv = 1.0 / (s - 1.0)
    serinv = np.empty_like(serN)
    serinv[0] = inv
    for j in range(1, K):
        serinv[j] = -serinv[j - 1] * inv
    for j in range(K):
        acc[j] += N * np.einsum("ip,ip->p", serN[: j + 1], serinv[j::-1]) + 0.5 * serN[j]
    rising = np.zeros((K, s.size), dtype=np.complex128)
    rising[0] = s
    if K > 1:
        rising[1] = 1.0
    # rising carries the factor N^{-2(k-1)} so it stays O(1) even when |s|^{2k} would overflow
    inv_N2 = 1.0 / (float(N) * N)
    for k, b in enumerate(_bernoulli_ratios(), start=1):
        c = b / N
        for j in range(K):
            acc[j] += c * np.einsum("ip,ip->p", rising[: j + 1], serN[j::-1])
        rising = _series_times_linear(rising, s + (2 * k - 1))
        rising = _series_times_linear(rising, s + 2 * k) * inv_N2
    return acc


def zeta_taylor(s, order: int = 0, accurate: bool = False) -> np.ndarray:
    """Taylor coefficients ζ^{(j)}(s)/j! for j <= order; shape (order+1, len(s)).

    ``accurate`` computes the phases t log n in double-double, removing the
    O(t log t) ulp rounding that otherwise dominates the error at large t.
    """
    s = np.atleast_1d(np.asarray(s, dtype=np.complex128))
    out = np.empty((order + 1, s.size), dtype=np.complex128)
    if s.size == 0:
        return out
    N = em_cutoff(s.imag)
    idx = np.argsort(N, kind="stable")
    start = 0
    Ns = N[idx]
    while start < s.size:
        # largest chunk whose (points x max cutoff) stays within _CHUNK_ELEMS
        cost = np.arange(1, s.size - start + 1) * Ns[start:]
        width = max(1, int(np.searchsorted(cost, _CHUNK_ELEMS, side="right")))
        stop = start + width
        Nmax = int(Ns[stop - 1])
        sel = idx[start:stop]
        out[:, sel] = _zeta_taylor_chunk(s[sel], order, Nmax, accurate)
        start = stop
    return out


def zeta(s) -> np.ndarray:
    return zeta_taylor(s, 0)[0]


def zeta_derivs(s, order: int, accurate: bool = False) -> np.ndarray:
    """ζ^{(j)}(s) for j = 0..order; shape (order+1, len(s))."""
    c = zeta_taylor(s, order, accurate)
    for j in range(2, order + 1):
        c[j] *= math.factorial(j)
    return c


def zeta_log_deriv(s) -> np.ndarray:
    c = zeta_taylor(s, 1)
    return c[1] / c[0]


def log_chi(s) -> np.ndarray:
    s = np.asarray(s, dtype=np.complex128)
    return (s - 0.5) * LOG_PI + loggamma((1.0 - s) / 2.0) - loggamma(s / 2.0)


def chi(s) -> np.ndarray:
    return np.exp(log_chi(s))


def chi_log_deriv(s) -> np.ndarray:
    s = np.asarray(s, dtype=np.complex128)
    return LOG_PI - 0.5 * (psi((1.0 - s) / 2.0) + psi(s / 2.0))


def theta(t) -> np.ndarray:
    t = np.asarray(t, dtype=np.float64)
    return loggamma(0.25 + 0.5j * t).imag - 0.5 * t * LOG_PI


def theta_deriv(t) -> np.ndarray:
    t = np.asarray(t, dtype=np.float64)
    return 0.5 * psi(0.25 + 0.5j * t).real - 0.5 * LOG_PI


def hardy_z_em(t) -> np.ndarray:
    t = np.atleast_1d(np.asarray(t, dtype=np.float64))
    z = zeta(0.5 + 1j * t)
    return (np.exp(1j * theta(t)) * z).real


def hardy_z_and_deriv(t, accurate: bool = False) -> tuple[np.ndarray, np.ndarray]:
    """Z(t) and Z'(t) from one Euler–Maclaurin pass."""
    t = np.atleast_1d(np.asarray(t, dtype=np.float64))
    c = zeta_taylor(0.5 + 1j * t, 1, accurate)
    rot = np.exp(1j * theta(t))
    z = rot * c[0]
    dz = rot * (1j * theta_deriv(t) * c[0] + 1j * c[1])
    return z.real, dz.real


# --- Riemann–Siegel -----------------------------------------------------

_PSI_DEGREE = 80


@functools.cache
def _psi_poly() -> np.polynomial.Polynomial:
    """Taylor polynomial in z = p - 1/2 of Ψ(p) = cos 2π(p²-p-1/16) / cos 2πp.

    Ψ is entire, so the expansion about 1/2 converges on all of [0, 1].
    """
    ctx = mpmath.MPContext()
    ctx.dps = 60
    D = _PSI_DEGREE
    two_pi = 2 * ctx.pi
    a = 5 * ctx.pi / 8
    # numerator: -cos(2πz² - a) = -(cos a cos 2πz² + sin a sin 2πz²)
    num = [ctx.mpf(0)] * (D + 1)
    for m in range(0, D // 2 + 1):
        w = two_pi**m / ctx.factorial(m)
        if m % 2 == 0:
            term = ctx.cos(a) * (-1) ** (m // 2)
        else:
            term = ctx.sin(a) * (-1) ** (m // 2)
        num[2 * m] = -w * term
    den = [ctx.mpf(0)] * (D + 1)
    for m in range(0, D // 2 + 1):
        den[2 * m] = (-1) ** m * two_pi ** (2 * m) / ctx.factorial(2 * m)
    q = [ctx.mpf(0)] * (D + 1)
    for m in range(D + 1):
        q[m] = (num[m] - sum(den[j] * q[m - j] for j in range(1, m + 1))) / den[0]
    return np.polynomial.Polynomial([float(c) for c in q])


@functools.cache
def _psi_derivs() -> tuple:
    p = _psi_poly()
    out = [p]
    for _ in range(12):
        out.append(out[-1].deriv())
    return tuple(out)


def _rs_correction(p: np.ndarray, a: np.ndarray) -> np.ndarray:
    d = _psi_derivs()
    z = p - 0.5
    P = [d[k](z) for k in range(13)]
    pi2, pi4, pi6, pi8 = math.pi**2, math.pi**4, math.pi**6, math.pi**8
    c0 = P[0]
    c1 = -P[3] / (96 * pi2)
    c2 = P[2] / (64 * pi2) + P[6] / (18432 * pi4)
    c3 = -P[1] / (64 * pi2) - P[5] / (3840 * pi4) - P[9] / (5308416 * pi6)
    c4 = (P[0] / (128 * pi2) + 19 * P[4] / (24576 * pi4)
          + 11 * P[8] / (5898240 * pi6) + P[12] / (2038431744 * pi8))
    ia = 1.0 / a
    return c0 + ia * (c1 + ia * (c2 + ia * (c3 + ia * c4)))


def hardy_z_rs(t) -> np.ndarray:
    """Riemann–Siegel Z(t) with four correction terms (meant for t >= 200)."""
    t = np.atleast_1d(np.asarray(t, dtype=np.float64))
    out = np.empty_like(t)
    if t.size == 0:
        return out
    a = np.sqrt(t / TWO_PI)
    N = np.floor(a).astype(np.int64)
    p = a - N
    th = theta(t)
    Nmax = int(N.max())
    width = max(1, _CHUNK_ELEMS // max(Nmax, 1))
    n = np.arange(1, Nmax + 1, dtype=np.float64)
    ln = np.log(n)
    rsq = 1.0 / np.sqrt(n)
    for start in range(0, t.size, width):
        sl = slice(start, start + width)
        ph = th[sl, None] - np.outer(t[sl], ln)
        mask = n[None, :] <= N[sl, None]
        out[sl] = 2.0 * np.sum(np.where(mask, rsq * np.cos(ph), 0.0), axis=1)
    sign = np.where(N % 2 == 1, 1.0, -1.0)  # (-1)^(N-1)
    out += sign * a**-0.5 * _rs_correction(p, a)
    return out


RS_THRESHOLD = 200.0


def hardy_z(t) -> np.ndarray:
    """Z(t): Euler–Maclaurin below RS_THRESHOLD, Riemann–Siegel above."""
    t = np.atleast_1d(np.asarray(t, dtype=np.float64))
    out = np.empty_like(t)
    lo = t < RS_THRESHOLD
    if lo.any():
        out[lo] = hardy_z_em(t[lo])
    if (~lo).any():
        out[~lo] = hardy_z_rs(t[~lo])
    return out
