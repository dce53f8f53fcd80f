"""High-precision ζ, its derivatives, the functional-equation factor χ, θ, Z,
and the Stieltjes constants.

Every function takes ``dps`` (significant decimal digits) explicitly; each
precision gets its own private mpmath context, so nothing here touches the
global ``mpmath.mp`` state.  The double-precision, vectorised counterparts
used for bulk work live in :mod:`zetachi.fastzeta`.
"""

from __future__ import annotations

import functools
import math
import threading

import mpmath

from .errors import DomainError, PoleError, UnsupportedError

DEFAULT_DPS = 30

_ctx_lock = threading.Lock()
_contexts: dict[int, mpmath.ctx_mp.MPContext] = {}


def context(dps: int = DEFAULT_DPS) -> mpmath.ctx_mp.MPContext:
    """Private mpmath context at ``dps`` digits (shared per precision)."""
    with _ctx_lock:
        ctx = _contexts.get(dps)
        if ctx is None:
            ctx = mpmath.MPContext()
            ctx.dps = dps
            _contexts[dps] = ctx
        return ctx


def ell(t):
    """log(t / 2π)."""
    if isinstance(t, (int, float)):
        return math.log(t / (2 * math.pi))
    return mpmath.log(t / (2 * mpmath.pi))


def _bernoulli_ratio(ctx, k: int):
    """B_2k / (2k)! at the context precision, cached on the context."""
    cache = ctx.__dict__.setdefault("_zetachi_bern", [])
    while len(cache) < k:
        m = 2 * (len(cache) + 1)
        cache.append(ctx.bernoulli(m) / ctx.factorial(m))
    return cache[k - 1]


def _series_mul_linear(coeffs: list, a) -> list:
    """Multiply a truncated h-series by (a + h)."""
    out = [a * coeffs[0]]
    for j in range(1, len(coeffs)):
        out.append(a * coeffs[j] + coeffs[j - 1])
    return out


def zeta_taylor(s, order: int, dps: int = DEFAULT_DPS) -> list:
    """Taylor coefficients ζ^{(j)}(s)/j!, j = 0..order, by Euler–Maclaurin.

    Each piece of the Euler–Maclaurin formula is expanded as a truncated
    power series in the shift h (s -> s + h) so derivatives come out of the
    same pass as the value.
    """
    ctx = context(dps)
    s = ctx.mpc(s)
    if abs(s - 1) < ctx.mpf("1e-30"):
        raise PoleError("ζ has a pole at s = 1")
    t = abs(s.imag)
    N = max(20, math.ceil(2 * float(t) / math.pi))
    K = order + 1
    acc = [ctx.mpc(0)] * K
    # main sum: Σ_{n<N} n^{-s} (-log n)^j / j!
    for n in range(1, N):
        ln = ctx.log(n)
        term = ctx.power(n, -s)
        acc[0] += term
        mlog = -ln
        for j in range(1, K):
            term = term * mlog / j
            acc[j] += term
    lnN = ctx.log(N)
    Npow = ctx.power(N, -s)
    ser_N = [Npow]
    for j in range(1, K):
        ser_N.append(ser_N[-1] * (-lnN) / j)
    # N^{1-s}/(s-1)
    inv = 1 / (s - 1)
    ser_inv = [inv]
    for j in range(1, K):
        ser_inv.append(-ser_inv[-1] * inv)
    for j in range(K):
        acc[j] += N * sum(ser_N[i] * ser_inv[j - i] for i in range(j + 1))
        acc[j] += ser_N[j] / 2
    # Bernoulli tail
    eps = ctx.mpf(10) ** (-(dps + 5))
    rising = ([s, ctx.mpc(1)] + [ctx.mpc(0)] * K)[:K]
    inv_N2 = ctx.mpf(1) / (N * N)
    scale = ctx.mpf(1) / N  # N^{-(2k-1)}
    prev = None
    for k in range(1, 400):
        coef = _bernoulli_ratio(ctx, k) * scale
        tail = [coef * sum(rising[i] * ser_N[j - i] for i in range(j + 1)) for j in range(K)]
        mag = max(abs(x) for x in tail)
        if prev is not None and mag > prev:
            break  # asymptotic series started to diverge
        for j in range(K):
            acc[j] += tail[j]
        if mag < eps * max(abs(acc[0]), eps):
            break
        prev = mag
        rising = _series_mul_linear(rising, s + 2 * k - 1)
        rising = _series_mul_linear(rising, s + 2 * k)
        scale *= inv_N2
    return acc


def zeta(s, dps: int = DEFAULT_DPS):
    return zeta_taylor(s, 0, dps)[0]


def zeta_deriv(s, nu: int, dps: int = DEFAULT_DPS):
    """ν-th derivative of ζ at s (1 <= ν <= 6)."""
    if not 0 <= nu <= 6:
        raise DomainError("derivative order must be between 0 and 6")
    c = zeta_taylor(s, nu, dps)
    return c[nu] * math.factorial(nu)


def _check_chi_point(ctx, s):
    # poles at s = 1, 3, 5, ...; zeros at s = 0, -2, -4, ...
    if abs(s.imag) < ctx.mpf("1e-25"):
        r = s.real
        k = ctx.nint(r)
        if abs(r - k) < ctx.mpf("1e-25"):
            k = int(k)
            if k >= 1 and k % 2 == 1:
                raise PoleError(f"χ has a pole at s = {k}")
            if k <= 0 and k % 2 == 0:
                raise PoleError(f"χ vanishes at s = {k}")


def log_chi(s, dps: int = DEFAULT_DPS):
    """log χ(s) = (s - 1/2) log π + log Γ((1-s)/2) - log Γ(s/2)."""
    ctx = context(dps)
    s = ctx.mpc(s)
    _check_chi_point(ctx, s)
    return (s - ctx.mpf(0.5)) * ctx.log(ctx.pi) + ctx.loggamma((1 - s) / 2) - ctx.loggamma(s / 2)


def chi(s, dps: int = DEFAULT_DPS):
    """χ(s) with ζ(s) = χ(s) ζ(1 - s)."""
    ctx = context(dps)
    return ctx.exp(log_chi(s, dps))


def chi_stirling(s, dps: int = DEFAULT_DPS):
    """Leading Stirling form (t/2π)^{1/2-σ-it} e^{i(t + π/4)}."""
    ctx = context(dps)
    s = ctx.mpc(s)
    sigma, t = s.real, s.imag
    if t < 1 or not -1 <= sigma <= 2:
        raise DomainError("chi_stirling needs Im s >= 1 and -1 <= Re s <= 2")
    return ctx.power(t / (2 * ctx.pi), ctx.mpf(0.5) - s) * ctx.expj(t + ctx.pi / 4)


def chi_log_deriv(s, dps: int = DEFAULT_DPS):
    """χ'/χ(s) = log π - ψ((1-s)/2)/2 - ψ(s/2)/2."""
    ctx = context(dps)
    s = ctx.mpc(s)
    if abs(s.real) > 2 or s.imag <= 1:
        raise DomainError("chi_log_deriv needs |Re s| <= 2 and Im s > 1")
    return ctx.log(ctx.pi) - (ctx.digamma((1 - s) / 2) + ctx.digamma(s / 2)) / 2


def riemann_siegel_theta(t, dps: int = DEFAULT_DPS):
    """θ(t) = Im log Γ(1/4 + it/2) - (t/2) log π on the continuous branch."""
    ctx = context(dps)
    t = ctx.mpf(t)
    return ctx.loggamma(ctx.mpf(0.25) + ctx.j * t / 2).imag - t / 2 * ctx.log(ctx.pi)


def hardy_Z_complex(t, dps: int = DEFAULT_DPS):
    """e^{iθ(t)} ζ(1/2 + it) before discarding the (vanishing) imaginary part."""
    ctx = context(dps)
    t = ctx.mpf(t)
    return ctx.expj(riemann_siegel_theta(t, dps)) * zeta(ctx.mpc(0.5, t), dps)


def hardy_Z(t, dps: int = DEFAULT_DPS):
    return hardy_Z_complex(t, dps).real


@functools.lru_cache(maxsize=None)
def _laurent_coefficients(dps: int, count: int = 3, points: int = 64):
    """Coefficients a_n of ζ(s) - 1/(s-1) = Σ a_n (s-1)^n via the trapezoid rule on |s-1| = 1/2."""
    work = dps + 15
    ctx = context(work)
    r = ctx.mpf(0.5)
    coeffs = [ctx.mpf(0)] * count
    for k in range(points):
        w = r * ctx.expjpi(ctx.mpf(2 * k) / points)
        f = zeta(1 + w, work) - 1 / w
        for n in range(count):
            coeffs[n] += (f * w ** (-n)).real
    return tuple(c / points for c in coeffs)


def stieltjes(n: int, dps: int = DEFAULT_DPS):
    """γ_n for n in {0, 1, 2}, from a contour integral of ζ around s = 1."""
    if n not in (0, 1, 2):
        raise UnsupportedError("only γ0, γ1, γ2 are provided")
    ctx = context(dps)
    a = _laurent_coefficients(max(dps, 25))
    return ctx.mpf((-1) ** n * math.factorial(n) * a[n])
