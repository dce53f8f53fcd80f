"""Numerical integrals: the oscillatory J(σ, r, T), the rectangle contour
integral of (ζ'/ζ)χX^s, and the approximate-functional-equation residual.

All line integrals go through one adaptive engine: every panel is integrated
with 16- and 24-point Gauss–Legendre rules, and panels whose two estimates
disagree by more than their share of the tolerance are halved.  The work is
vectorised per refinement level, and the integrand may be vector valued so
that one set of (expensive) ζ evaluations serves several X at once.
"""

from __future__ import annotations

import functools
import math
from dataclasses import dataclass, field

import numpy as np

from . import fastzeta as fz
from . import special
from .errors import DomainError, QuadratureError, ZeroTooCloseError
from .zeros import ZeroTable, locate_zeros

TWO_PI = 2.0 * math.pi
MIN_ZERO_DISTANCE = 0.05
MAX_LEVELS = 40
MAX_PANELS = 1 << 18
# relative rounding floor per panel, in units of h * max|f|
NOISE = 1e-13


@dataclass(frozen=True)
class QuadResult:
    value: complex
    est_error: float
    evaluations: int
    notes: dict = field(default_factory=dict)


@functools.cache
def _gauss(n: int) -> tuple[np.ndarray, np.ndarray]:
    return np.polynomial.legendre.leggauss(n)


def _rule(f, a: np.ndarray, b: np.ndarray, n: int) -> tuple[np.ndarray, np.ndarray]:
    """Gauss–Legendre n-point estimates on the panels [a_i, b_i].

    Returns the estimates, shape (m, panels), and max |f| at the nodes per panel.
    """
    x, w = _gauss(n)
    half = 0.5 * (b - a)
    mid = 0.5 * (b + a)
    nodes = (mid[:, None] + half[:, None] * x[None, :]).ravel()
    vals = np.atleast_2d(f(nodes)).reshape(-1, a.size, n)
    return (vals * w).sum(axis=2) * half, np.abs(vals).max(axis=(0, 2))


def adaptive(f, edges: np.ndarray, tol: float, max_levels: int = MAX_LEVELS,
             max_panels: int = MAX_PANELS) -> QuadResult:
    """∫ f over [edges[0], edges[-1]] starting from the given panels.

    ``f`` maps a 1-d array of nodes to an array of shape (m, len(nodes)) or
    (len(nodes),).  A panel of length h is accepted once, over all components,
    |G24 - G16| <= max(tol * h / (total length), NOISE * h * max|f|); the second
    term keeps rounding noise in f from forcing endless subdivision.
    """
    edges = np.asarray(edges, dtype=np.float64)
    total_len = abs(edges[-1] - edges[0])
    a, b = edges[:-1], edges[1:]
    done_val = []
    done_err = []
    evals = 0
    for level in range(max_levels):
        g16, _ = _rule(f, a, b, 16)
        g24, fmax = _rule(f, a, b, 24)
        evals += 40 * a.size
        h = np.abs(b - a)
        diff = np.abs(g24 - g16).max(axis=0)
        ok = diff <= np.maximum(tol * h / total_len, NOISE * h * fmax)
        done_val.append(g24[:, ok].sum(axis=1))
        done_err.append(diff[ok].sum())
        if ok.all():
            return QuadResult(np.sum(done_val, axis=0), float(np.sum(done_err)), evals)
        a, b = a[~ok], b[~ok]
        pending_val, pending_err = g24[:, ~ok].sum(axis=1), diff[~ok].sum()
        if level == max_levels - 1 or 2 * a.size > max_panels:
            break
        m = 0.5 * (a + b)
        a, b = np.concatenate([a, m]), np.concatenate([m, b])
        order = np.argsort(a, kind="stable")
        a, b = a[order], b[order]
    raise QuadratureError("adaptive quadrature did not converge",
                          np.sum(done_val, axis=0) + pending_val,
                          float(np.sum(done_err) + pending_err))


def _scalar(res: QuadResult) -> QuadResult:
    v = np.atleast_1d(res.value)
    return QuadResult(complex(v[0]), res.est_error, res.evaluations, res.notes)


# --- J(σ, r, T) -------------------------------------------------------------

def j_integrand(sigma: float, r: float):
    """t -> χ(σ + it) r^{it}, with the combined phase reduced before exp."""
    logr = math.log(r)

    def f(t):
        lc = fz.log_chi(sigma + 1j * t)
        ph = np.mod(lc.imag, TWO_PI) + np.mod(t * logr, TWO_PI)
        return np.exp(lc.real + 1j * ph)

    return f


def phase_panels(a: float, b: float, r: float, cap: float = 2.0) -> np.ndarray:
    """Panel edges of length <= π / max(|log(t/2πr)|, t^{-1/2})."""
    edges = [a]
    t = a
    while t < b:
        h = math.pi / max(abs(math.log(t / (TWO_PI * r))), t**-0.5)
        t = min(b, t + min(h, cap))
        edges.append(t)
    return np.array(edges)


def integrate_J(sigma: float, r: float, T: float, tol: float = 1e-9) -> QuadResult:
    """∫_T^{2T} χ(σ + it) r^{it} dt."""
    if not -1 <= sigma <= 2:
        raise DomainError("need -1 <= sigma <= 2")
    if r <= 0:
        raise DomainError("need r > 0")
    if T < 10:
        raise DomainError("need T >= 10")
    if tol < 1e-9:
        raise DomainError("need tol >= 1e-9")
    f = j_integrand(sigma, r)
    edges = phase_panels(T, 2 * T, r)
    scale = max(1.0, TWO_PI * r ** (1 - sigma), T ** (0.5 - sigma))
    return _scalar(adaptive(f, edges, tol * scale))


def brute_force_J(sigma: float, r: float, T: float, panels: int = 1_000_000) -> complex:
    """Composite Simpson rule on a uniform grid (independent check)."""
    t = np.linspace(T, 2 * T, 2 * panels + 1)
    v = j_integrand(sigma, r)(t)
    h = T / (2 * panels)
    w = np.ones(t.size)
    w[1:-1:2] = 4
    w[2:-1:2] = 2
    return complex(h / 3 * np.sum(w * v))


# --- rectangle contour ----------------------------------------------------

def _safe_boundary(T: float, ordinates: np.ndarray) -> float:
    """Move T to the middle of its zero gap if a zero is within MIN_ZERO_DISTANCE."""
    i = int(np.searchsorted(ordinates, T, side="right"))
    lo = ordinates[i - 1] if i > 0 else -math.inf
    hi = ordinates[i] if i < ordinates.size else math.inf
    if T - lo >= MIN_ZERO_DISTANCE and hi - T >= MIN_ZERO_DISTANCE:
        return T
    if hi - lo < 2 * MIN_ZERO_DISTANCE:
        raise ZeroTooCloseError(f"zeros at {lo:.6f} and {hi:.6f} leave no room for the contour near {T}")
    return 0.5 * (lo + hi)


def _nearby(T: float, table: ZeroTable | None) -> np.ndarray:
    """Ordinates around T, including at least one on each side above the first zero."""
    if table is not None:
        g = table.ordinates
        i = int(np.searchsorted(g, T))
        if i < g.size:
            return g[max(0, i - 2) : i + 2]
    width = 1.0
    while True:
        g = locate_zeros(T - width, T + width)
        if (g > T).any() and ((g <= T).any() or T - width < 14):
            return g
        width *= 2


def contour_integrand(Xs: np.ndarray):
    """s -> (ζ'/ζ)(s) χ(s) X^s for every X in Xs; shape (len(Xs), len(s)).

    Evaluated as ζ'(s) X^s / ζ(1 - s) (the functional equation gives
    χ(s) = ζ(s)/ζ(1 - s)), which avoids the large log-gamma phases whose
    rounding would otherwise dominate the error where |χ| is large.
    """
    logX = np.log(np.asarray(Xs, dtype=np.float64))

    def g(s):
        d = fz.zeta_taylor(s, 1, accurate=True)[1]
        base = d / fz.zeta_taylor(1.0 - s, 0, accurate=True)[0]
        return base[None, :] * np.exp(np.outer(logX, s))

    return g


def contour_sum_multi(Xs, T1: float, T2: float, tol: float = 1e-8,
                      table: ZeroTable | None = None) -> QuadResult:
    """(1/2πi)∮ (ζ'/ζ)χX^s ds around c+iT1, c+iT2, 1-c+iT2, 1-c+iT1 for several X."""
    Xs = np.atleast_1d(np.asarray(Xs, dtype=np.float64))
    if np.any(Xs < 1):
        raise DomainError("need X >= 1")
    if not 1 < T1 < T2:
        raise DomainError("need 1 < T1 < T2")
    T1 = _safe_boundary(T1, _nearby(T1, table))
    T2 = _safe_boundary(T2, _nearby(T2, table))
    c = 1.0 + 1.0 / math.log(T2)
    g = contour_integrand(Xs)
    # oscillation of χX^s is log(t/2πX); zeros give structure on a scale of ~0.5
    rX = float(Xs.max())

    def vertical(sig, sgn):
        edges = phase_panels(T1, T2, rX, cap=0.5)
        res = adaptive(lambda t: g(sig + 1j * t) * (1j * sgn), edges, tol / 4)
        return res

    def horizontal(T, sgn):
        edges = np.linspace(1 - c, c, 9)
        return adaptive(lambda x: g(x + 1j * T) * (-sgn), edges, tol / 4)

    legs = [vertical(c, 1), horizontal(T2, 1), vertical(1 - c, -1), horizontal(T1, -1)]
    total = np.sum([leg.value for leg in legs], axis=0) / (2j * math.pi)
    err = sum(leg.est_error for leg in legs) / TWO_PI
    evals = sum(leg.evaluations for leg in legs)
    return QuadResult(total, err, evals, {"T1": T1, "T2": T2, "c": c})


def contour_sum(X: float, T1: float, T2: float, tol: float = 1e-8,
                table: ZeroTable | None = None) -> QuadResult:
    """Σ_{T1<γ<=T2} χ(ρ)X^ρ via the argument principle (boundaries may be nudged)."""
    return _scalar(contour_sum_multi([X], T1, T2, tol, table))


# --- approximate functional equation --------------------------------------

def afe_cutoffs(t: float, alpha: float) -> tuple[int, int]:
    u = t / TWO_PI
    return math.floor(u**alpha), math.floor(u ** (1 - alpha))


def afe_parts(s, alpha: float = 0.5, nu: int = 1, dps: int = special.DEFAULT_DPS) -> tuple[complex, complex]:
    """(ζ^{(ν)}(s), its two-piece approximation with sharp cutoffs)."""
    ctx = special.context(dps)
    s = ctx.mpc(s)
    t = s.imag
    if t < 10:
        raise DomainError("need Im s >= 10")
    if not 0 < alpha < 1:
        raise DomainError("need 0 < alpha < 1")
    if nu < 1:
        raise DomainError("only nu >= 1 is supported")
    x, y = afe_cutoffs(float(t), alpha)
    ell = ctx.log(t / (2 * ctx.pi))
    first = ctx.fsum(ctx.log(n) ** nu * ctx.power(n, -s) for n in range(1, x + 1))
    second = ctx.fsum((ctx.log(n) - ell) ** nu * ctx.power(n, s - 1) for n in range(1, y + 1))
    approx = (-1) ** nu * first + special.chi(s, dps) * second
    exact = special.zeta_deriv(s, nu, dps)
    return complex(exact), complex(approx)


def afe_residual(s, alpha: float = 0.5, nu: int = 1, dps: int = special.DEFAULT_DPS) -> complex:
    """ζ^{(ν)}(s) minus its two-piece approximation with sharp cutoffs."""
    exact, approx = afe_parts(s, alpha, nu, dps)
    return exact - approx


def afe_budget(t: float, alpha: float, nu: int) -> float:
    L = math.log(t)
    return (t ** (-alpha / 2) + t ** (-(1 - alpha) / 2)) * L ** (nu + 1)
