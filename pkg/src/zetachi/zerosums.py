"""Direct sums over zeta zeros ρ = 1/2 + iγ in a window.

Terms are evaluated in double precision with the phases γ log X formed in
double-double and reduced mod 2π before any trigonometric call; the totals
are accumulated with ``math.fsum`` (correctly rounded), so any split of the
window into chunks, serial or threaded, gives a bit-identical result.

Every sum also has a ``precise=True`` route that evaluates each term at the
requested decimal precision through :mod:`zetachi.special`; it is slow and
exists as an independent cross-check of the fast route.
"""

from __future__ import annotations

import enum
import functools
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from . import fastzeta as fz
from . import special
from .zeros import ZeroWindow

TWO_PI = 2.0 * math.pi
CHUNK = 4096


class SumKind(enum.Enum):
    ChiXRho = "chi-x-rho"
    XRho = "x-rho"
    XNegRho = "x-neg-rho"
    ZetaDeriv = "zeta-deriv"
    ChiWeighted = "chi-weighted"


@functools.lru_cache(maxsize=256)
def _log_dd(x: float) -> tuple[float, float]:
    """log x as a double-double pair."""
    ctx = special.context(40)
    v = ctx.log(ctx.mpf(x))
    hi = float(v)
    return hi, float(v - hi)


def reduced_phase(gammas: np.ndarray, x: float) -> np.ndarray:
    """(γ log x) mod 2π, formed in double-double."""
    hi, lo = _log_dd(x)
    return fz.reduced_phase(np.asarray(gammas, dtype=np.float64), np.array([hi]), np.array([lo]))[:, 0]


def fsum_complex(terms) -> complex:
    terms = np.asarray(terms, dtype=np.complex128)
    return complex(math.fsum(terms.real), math.fsum(terms.imag))


def _chi_phase(g: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """(|χ(ρ)|, arg χ(ρ) mod 2π) from the log-gamma closed form."""
    lc = fz.log_chi(0.5 + 1j * g)
    return np.exp(lc.real), np.mod(lc.imag, TWO_PI)


def _terms_chi_x(g: np.ndarray, X: float) -> np.ndarray:
    mod, ph = _chi_phase(g)
    ph = ph + (reduced_phase(g, X) if X != 1 else 0.0)
    return mod * math.sqrt(X) * np.exp(1j * ph)


def _terms_x(g: np.ndarray, X: float, sign: int) -> np.ndarray:
    ph = reduced_phase(g, X)
    return X ** (0.5 * sign) * np.exp(1j * sign * ph)


def _terms_deriv(g: np.ndarray, nu: int) -> np.ndarray:
    return fz.zeta_derivs(0.5 + 1j * g, nu, accurate=True)[nu]


def _terms_weighted(g: np.ndarray, n: int, k: int) -> np.ndarray:
    return _terms_chi_x(g, float(n)) * np.log(g / TWO_PI) ** k


def _accumulate(term_fn, gammas: np.ndarray, workers: int = 1) -> complex:
    if gammas.size == 0:
        return 0j
    chunks = [gammas[i : i + CHUNK] for i in range(0, gammas.size, CHUNK)]
    if workers > 1 and len(chunks) > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            parts = list(pool.map(term_fn, chunks))
    else:
        parts = [term_fn(c) for c in chunks]
    return fsum_complex(np.concatenate(parts))


def cumulative(term_fn, gammas: np.ndarray, block: int = 1024) -> np.ndarray:
    """Running totals of the terms; block offsets are exact (fsum) sums."""
    terms = term_fn(gammas) if gammas.size else np.empty(0, dtype=np.complex128)
    out = np.empty_like(terms)
    offset = 0j
    for i in range(0, terms.size, block):
        seg = terms[i : i + block]
        out[i : i + block] = offset + np.cumsum(seg)
        offset = fsum_complex(np.append(seg, offset))
    return out


def _precise(term, window: ZeroWindow, dps: int) -> complex:
    ctx = special.context(dps)
    acc = [term(ctx, ctx.mpf(float(h)) + ctx.mpf(float(l)))
           for h, l in zip(window.gammas, window.table.ordinates_lo[window.slice])]
    total = ctx.fsum(acc)
    return complex(total)


def sum_chi_x_rho(window: ZeroWindow, X: float, *, precise: bool = False,
                  dps: int = special.DEFAULT_DPS, workers: int = 1) -> complex:
    """Σ χ(ρ) X^ρ over the window."""
    if X < 1:
        raise ValueError("need X >= 1")
    if precise:
        def term(ctx, g):
            s = ctx.mpc(0.5, g)
            return special.chi(s, dps) * ctx.power(X, s)
        return _precise(term, window, dps)
    return _accumulate(lambda g: _terms_chi_x(g, X), window.gammas, workers)


def sum_x_rho(window: ZeroWindow, X: float, sign: int = 1, *, precise: bool = False,
              dps: int = special.DEFAULT_DPS, workers: int = 1) -> complex:
    """Σ X^{sign·ρ} over the window."""
    if X <= 0:
        raise ValueError("need X > 0")
    if sign not in (1, -1):
        raise ValueError("sign must be +1 or -1")
    if precise:
        def term(ctx, g):
            return ctx.power(X, sign * ctx.mpc(0.5, g))
        return _precise(term, window, dps)
    return _accumulate(lambda g: _terms_x(g, X, sign), window.gammas, workers)


def sum_zeta_deriv(window: ZeroWindow, nu: int, *, precise: bool = False,
                   dps: int = special.DEFAULT_DPS, workers: int = 1) -> complex:
    """Σ ζ^{(ν)}(ρ) over the window (1 <= ν <= 6)."""
    if not 1 <= nu <= 6:
        raise ValueError("need 1 <= nu <= 6")
    if precise:
        def term(ctx, g):
            return special.zeta_deriv(ctx.mpc(0.5, g), nu, dps)
        return _precise(term, window, dps)
    return _accumulate(lambda g: _terms_deriv(g, nu), window.gammas, workers)


def sum_chi_weighted(window: ZeroWindow, n: int, k: int, *, precise: bool = False,
                     dps: int = special.DEFAULT_DPS, workers: int = 1) -> complex:
    """Σ χ(ρ) n^ρ ℓ(γ)^k over the window, with ℓ(γ) = log(γ/2π)."""
    if n < 1 or int(n) != n:
        raise ValueError("n must be a positive integer")
    if not 0 <= k <= 6:
        raise ValueError("need 0 <= k <= 6")
    if precise:
        def term(ctx, g):
            s = ctx.mpc(0.5, g)
            return special.chi(s, dps) * ctx.power(n, s) * ctx.log(g / (2 * ctx.pi)) ** k
        return _precise(term, window, dps)
    return _accumulate(lambda g: _terms_weighted(g, int(n), k), window.gammas, workers)


@dataclass(frozen=True)
class SumSpec:
    """A sum over a window; X doubles as n for ChiWeighted, nu as the exponent k."""

    kind: SumKind
    window: ZeroWindow
    X: float = 1.0
    nu: int = 0

    def __post_init__(self):
        K = SumKind
        if self.kind is K.ChiXRho and self.X < 1:
            raise ValueError("ChiXRho needs X >= 1")
        if self.kind in (K.XRho, K.XNegRho) and self.X <= 0:
            raise ValueError("X must be positive")
        if self.kind is K.ZetaDeriv and not 1 <= self.nu <= 6:
            raise ValueError("ZetaDeriv needs 1 <= nu <= 6")
        if self.kind is K.ChiWeighted and (self.X < 1 or int(self.X) != self.X or not 0 <= self.nu <= 6):
            raise ValueError("ChiWeighted needs integer n >= 1 and 0 <= k <= 6")

    def evaluate(self, **kw) -> complex:
        K = SumKind
        if self.kind is K.ChiXRho:
            return sum_chi_x_rho(self.window, self.X, **kw)
        if self.kind is K.XRho:
            return sum_x_rho(self.window, self.X, 1, **kw)
        if self.kind is K.XNegRho:
            return sum_x_rho(self.window, self.X, -1, **kw)
        if self.kind is K.ZetaDeriv:
            return sum_zeta_deriv(self.window, self.nu, **kw)
        return sum_chi_weighted(self.window, int(self.X), self.nu, **kw)


def chi_x_terms(gammas: np.ndarray, X: float) -> np.ndarray:
    """The individual terms χ(ρ) X^ρ (used for running totals)."""
    return _terms_chi_x(np.asarray(gammas, dtype=np.float64), X)


def cumulative_chi_x_rho(window: ZeroWindow, X: float) -> np.ndarray:
    """Running values of Σ χ(ρ) X^ρ over the window, one per zero."""
    return cumulative(lambda g: _terms_chi_x(g, X), window.gammas)

