"""Predicted main terms and unit-constant error budgets.

Each predictor returns an :class:`AsymptoticPrediction` whose budget is the
sum of named error shapes with O-constants set to 1.  The reporting layer
compares residuals against these shapes and fits one constant per claim.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field

import numpy as np

from .arith import get_sieve, lambda_real, nearest_prime_power_distance
from .special import stieltjes

TWO_PI = 2.0 * math.pi
SNAP = 1e-12
# constant a in the unconditional exp(-a sqrt(log T)) shapes
A_CONST = 1.0


class Regime(enum.Enum):
    BelowBand = "below-band"
    InBand = "in-band"
    AboveBand = "above-band"


@dataclass(frozen=True)
class AsymptoticPrediction:
    main: complex
    budget: float
    terms: tuple[tuple[str, float], ...]
    regime: Regime | None = None
    alt_terms: tuple[tuple[str, float], ...] = ()
    notes: dict = field(default_factory=dict)

    @property
    def alt_budget(self) -> float | None:
        return sum(v for _, v in self.alt_terms) if self.alt_terms else None


def _prediction(main, terms, **kw) -> AsymptoticPrediction:
    terms = tuple((k, float(v)) for k, v in terms)
    budget = sum(v for _, v in terms)
    if not (math.isfinite(budget) and budget > 0):
        raise ValueError("budget must be positive and finite")
    return AsymptoticPrediction(complex(main), budget, terms, **kw)


def _le(a: float, b: float) -> bool:
    """a <= b with ties within SNAP (relative) counted as equal."""
    return a <= b or abs(a - b) <= SNAP * max(abs(a), abs(b))


def classify_regime(X: float, T: float) -> Regime:
    if T <= 1:
        raise ValueError("need T > 1")
    if X < 1:
        raise ValueError("need X >= 1")
    if _le(X, T / TWO_PI):
        return Regime.BelowBand
    if _le(X, T / math.pi):
        return Regime.InBand
    return Regime.AboveBand


def _near_int(a: float) -> int | None:
    k = round(a)
    return int(k) if abs(a - k) <= SNAP * max(1.0, abs(a)) else None


def below_band_range(X: float, T: float) -> range:
    """Integers n with T/(2πX) < n <= T/(πX)."""
    lo, hi = T / (TWO_PI * X), T / (math.pi * X)
    k, m = _near_int(lo), _near_int(hi)
    first = k + 1 if k is not None else math.floor(lo) + 1
    last = m if m is not None else math.floor(hi)
    return range(max(1, first), last + 1)


def above_band_range(X: float, T: float) -> range:
    """Integers n with πX/T <= n < 2πX/T."""
    lo, hi = math.pi * X / T, TWO_PI * X / T
    k, m = _near_int(lo), _near_int(hi)
    first = k if k is not None else math.ceil(lo)
    last = m - 1 if m is not None else math.floor(hi)
    return range(max(1, first), last + 1)


def prime_power_terms(rng: range) -> list[int]:
    """The n in the range with Λ(n) != 0."""
    if len(rng) == 0:
        return []
    lam = get_sieve(rng.stop).slice(rng.start, rng.stop - 1)
    return [rng.start + int(i) for i in np.flatnonzero(lam)]


def _frac_phase(x: float, n: np.ndarray) -> np.ndarray:
    """2π·frac(x·n), reducing before the trigonometric call."""
    xi = math.floor(x)
    xf = x - xi
    return TWO_PI * np.mod(xf * n, 1.0)


def main_term_S(X: float, T: float, regime: Regime | None = None) -> complex:
    regime = regime or classify_regime(X, T)
    if regime is Regime.InBand:
        return X * math.log(X) * complex(math.cos(TWO_PI * (X % 1)), math.sin(TWO_PI * (X % 1)))
    if regime is Regime.BelowBand:
        rng = below_band_range(X, T)
        if len(rng) == 0:
            return 0j
        n = np.arange(rng.start, rng.stop, dtype=np.float64)
        lam = get_sieve(rng.stop).slice(rng.start, rng.stop - 1)
        ph = _frac_phase(X, n)
        terms = lam * np.exp(1j * ph)
    else:
        rng = above_band_range(X, T)
        if len(rng) == 0:
            return 0j
        n = np.arange(rng.start, rng.stop, dtype=np.float64)
        lam = get_sieve(rng.stop).slice(rng.start, rng.stop - 1)
        ph = TWO_PI * np.mod(X / n, 1.0)
        terms = lam / n * np.exp(1j * ph)
    return -X * complex(math.fsum(terms.real), math.fsum(terms.imag))


def error_budget_S(X: float, T: float) -> AsymptoticPrediction:
    L = math.log(T)
    sq = math.sqrt(T)
    terms = (
        ("sqrtT_log2", sq * L * L),
        ("large_X", X ** (1 + 1 / L) * L * L / sq),
        ("resonance_2piX", T**1.5 * L / (abs(T - TWO_PI * X) + sq)),
        ("resonance_piX", T**1.5 * L / (abs(T - math.pi * X) + sq)),
    )
    return _prediction(0.0, terms)


def predict_S(X: float, T: float) -> AsymptoticPrediction:
    """Regime-selected main term of Σ_{T<γ<=2T} χ(ρ)X^ρ with its budget."""
    regime = classify_regime(X, T)
    b = error_budget_S(X, T)
    return AsymptoticPrediction(main_term_S(X, T, regime), b.budget, b.terms, regime)


def predict_landau_gonek(X: float, T: float, sign: int = 1) -> AsymptoticPrediction:
    """Σ_{0<γ<=T} X^{±ρ}: main -(T/2π)Λ(X) (divided by X for sign -1)."""
    if X <= 1:
        raise ValueError("need X > 1")
    if sign not in (1, -1):
        raise ValueError("sign must be +1 or -1")
    lam = lambda_real(X)
    dist = nearest_prime_power_distance(X)
    lx = math.log(X)
    llog = math.log(2 * X * T) * math.log(math.log(3 * X))
    if sign == 1:
        main = -T / TWO_PI * lam
        terms = (
            ("X_log_loglog", X * llog),
            ("log_X_min", lx * min(T, X / dist)),
            ("log_T_min", math.log(2 * T) * min(T, 1 / lx)),
        )
    else:
        main = -T / TWO_PI * lam / X
        terms = (
            ("log_loglog", llog),
            ("log_X_min", lx * min(T / X, 1 / dist)),
            ("log_T_min", math.log(2 * T) * min(T / X, 1 / (X * lx))),
        )
    return _prediction(main, terms, notes={"distance_to_prime_power": dist, "lambda": lam})


def _shanks_main(T: float) -> float:
    g0, g1 = float(stieltjes(0)), float(stieltjes(1))
    ell = math.log(T / TWO_PI)
    u = T / TWO_PI
    return u / 2 * ell * ell + (g0 - 1) * u * ell + (1 - g0 - g0 * g0 - 3 * g1) * u


def predict_shanks(T: float) -> AsymptoticPrediction:
    """Three-term asymptotic for Σ_{0<γ<=T} ζ'(ρ); RH budget in alt_terms."""
    if T < 10:
        raise ValueError("need T >= 10")
    L = math.log(T)
    terms = (("unconditional", T * math.exp(-A_CONST * math.sqrt(L))),)
    alt = (("rh", math.sqrt(T) * L**3.25),)
    return _prediction(_shanks_main(T), terms, alt_terms=alt)


def predict_deriv_sum(nu: int, T: float) -> AsymptoticPrediction:
    """Leading term of Σ_{0<γ<=T} ζ^{(ν)}(ρ)."""
    if nu < 1:
        raise ValueError("need nu >= 1")
    ell = math.log(T / TWO_PI)
    main = (-1) ** (nu + 1) / (nu + 1) * T / TWO_PI * ell ** (nu + 1)
    return _prediction(main, (("T_logT_nu", T * math.log(T) ** nu),))


def in_j_band(r: float, T: float) -> bool:
    """T < 2πr <= 2T."""
    x = TWO_PI * r
    return not _le(x, T) and _le(x, 2 * T)


def predict_J(sigma: float, r: float, T: float) -> AsymptoticPrediction:
    """∫_T^{2T} χ(σ+it) r^{it} dt: stationary-phase main term and budget."""
    if not -1 <= sigma <= 2:
        raise ValueError("need -1 <= sigma <= 2")
    if r <= 0:
        raise ValueError("need r > 0")
    main = 0j
    if in_j_band(r, T):
        ph = TWO_PI * (r % 1.0)
        main = TWO_PI * r ** (1 - sigma) * complex(math.cos(ph), math.sin(ph))
    sq = math.sqrt(T)
    x = TWO_PI * r
    terms = (
        ("stirling", T ** (0.5 - sigma)),
        ("resonance_T", T ** (1.5 - sigma) / (abs(T - x) + sq)),
        ("resonance_2T", T ** (1.5 - sigma) / (abs(2 * T - x) + sq)),
    )
    return _prediction(main, terms)


def predict_corollary_integer(X: int, T: float) -> AsymptoticPrediction:
    """Σ_{0<γ<=T} χ(ρ)X^ρ for integer X = o(T): main -T/2π."""
    if X < 1 or int(X) != X:
        raise ValueError("X must be a positive integer")
    L = math.log(T)
    uncond = T * math.exp(-A_CONST * math.sqrt(L))
    rh = math.sqrt(T) * L * L
    terms = [("unconditional_or_rh", min(uncond, rh))]
    if X > 1:
        terms.insert(0, ("X_log_X", X * math.log(X)))
    notes = {"reportable": X <= T / (TWO_PI * L), "unconditional": uncond, "rh": rh}
    return _prediction(-T / TWO_PI, terms, notes=notes)


def predict_X1(T: float) -> AsymptoticPrediction:
    """Σ_{0<γ<=T} χ(ρ): main -T/2π with the RH-shape budget √T (log T)²."""
    L = math.log(T)
    return _prediction(-T / TWO_PI, (("sqrtT_log2", math.sqrt(T) * L * L),),
                       alt_terms=(("unconditional", T * math.exp(-A_CONST * math.sqrt(L))),))
