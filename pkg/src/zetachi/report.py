"""Comparison engine: direct value vs predicted main term vs error budget.

Each registered claim pairs one direct computation (a zero sum, an integral,
a partial sum) with one predictor.  ``compare`` produces a single
:class:`ComparisonReport`; ``calibrate`` runs a grid, takes the largest
residual/budget ratio as the fitted constant C and the least-squares slope
of log(ratio) against log(scale) as the trend.
"""

from __future__ import annotations

import json
import math
import threading
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from . import asymptotics as asym
from . import quadrature as quad
from . import zerosums
from .arith import PartialSumKind, partial_sum_direct, partial_sum_predicted
from .errors import CoverageError, InsufficientGridError, UnknownClaimError
from .special import DEFAULT_DPS
from .zeros import ZeroTable, find_zeros

DEFAULT_CAP = 100.0
SLOPE_LIMIT = 0.1
TWO_PI = 2.0 * math.pi


@dataclass(frozen=True)
class ComparisonReport:
    claim_id: str
    inputs: dict
    direct: complex
    predicted: complex
    budget: float
    residual: float
    ratio: float
    calibration_C: float | None = None
    calibration_slope: float | None = None
    notes: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        cal = None
        if self.calibration_C is not None:
            cal = {"C": self.calibration_C, "slope": self.calibration_slope}
        return {
            "claim_id": self.claim_id,
            "inputs": _plain(self.inputs),
            "direct": {"re": self.direct.real, "im": self.direct.imag},
            "predicted": {"re": self.predicted.real, "im": self.predicted.imag},
            "budget": self.budget,
            "residual": self.residual,
            "ratio": self.ratio,
            "calibration": cal,
            "notes": _plain(self.notes),
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True, indent=2)


@dataclass(frozen=True)
class CalibrationFit:
    claim_id: str
    grid: list
    C: float
    trend_slope: float
    scale_key: str
    cap: float = DEFAULT_CAP
    reports: list = field(default_factory=list, repr=False)

    @property
    def passed(self) -> bool:
        return self.trend_slope <= SLOPE_LIMIT and self.C <= self.cap

    def to_dict(self) -> dict:
        return {
            "claim_id": self.claim_id,
            "calibration": {"C": self.C, "slope": self.trend_slope},
            "cap": self.cap,
            "passed": self.passed,
            "scale_key": self.scale_key,
            "grid": [{"inputs": _plain(i), "ratio": r} for i, r in self.grid],
            "reports": [r.to_dict() for r in self.reports],
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True, indent=2)


def _plain(obj):
    """Convert numpy scalars and complex numbers into JSON-friendly values."""
    if isinstance(obj, dict):
        return {str(k): _plain(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_plain(v) for v in obj]
    if isinstance(obj, (complex, np.complexfloating)):
        return {"re": float(obj.real), "im": float(obj.imag)}
    if isinstance(obj, np.integer):
        return int(obj)
    if isinstance(obj, np.floating):
        return float(obj)
    if isinstance(obj, np.bool_):
        return bool(obj)
    return obj


# --- zero-table provider --------------------------------------------------

class ZeroSource:
    """Supplies a table covering a requested height (computing lazily if allowed)."""

    def __init__(self, table: ZeroTable | None = None, compute: bool = True):
        self.table = table
        self.compute = compute
        self._lock = threading.Lock()

    def covering(self, t: float) -> ZeroTable:
        with self._lock:
            if self.table is not None and self.table.t_max >= t:
                return self.table
            if not self.compute:
                cover = self.table.t_max if self.table is not None else 0.0
                raise CoverageError(f"zero table covers up to {cover}, need {t}")
            self.table = find_zeros(max(t, 100.0))
            return self.table


_default_source = ZeroSource()


# --- claim handlers -------------------------------------------------------
# each returns (direct, prediction, notes); residuals use the full complex
# difference unless the handler says otherwise via notes["compare"] = "real".

def _need(inputs: dict, *keys):
    missing = [k for k in keys if k not in inputs]
    if missing:
        raise ValueError(f"missing inputs: {', '.join(missing)}")
    return [inputs[k] for k in keys]


def _cor22(inputs, src, dps):
    (T,) = _need(inputs, "T")
    w = src.covering(T).window(0.0, T)
    return zerosums.sum_chi_x_rho(w, 1.0), asym.predict_X1(T), {"zeros": len(w)}


def _cor23(inputs, src, dps):
    X, T = _need(inputs, "X", "T")
    w = src.covering(T).window(0.0, T)
    pred = asym.predict_corollary_integer(int(X), T)
    return zerosums.sum_chi_x_rho(w, float(X)), pred, {"zeros": len(w), **pred.notes}


def _thm21(regime: asym.Regime):
    def handler(inputs, src, dps):
        X, T = _need(inputs, "X", "T")
        actual = asym.classify_regime(X, T)
        if actual is not regime:
            raise ValueError(f"(X={X}, T={T}) is {actual.value}, not {regime.value}")
        w = src.covering(2 * T).window(T, 2 * T)
        direct = zerosums.sum_chi_x_rho(w, X)
        pred = asym.predict_S(X, T)
        notes = {"zeros": len(w), "budget_terms": dict(pred.terms)}
        if regime is asym.Regime.InBand and pred.main != 0 and direct != 0:
            notes["phase_error"] = abs(math.remainder(np.angle(direct) - np.angle(pred.main), TWO_PI))
        return direct, pred, notes
    return handler


def _landau(sign: int):
    def handler(inputs, src, dps):
        X, T = _need(inputs, "X", "T")
        w = src.covering(T).window(0.0, T)
        pred = asym.predict_landau_gonek(X, T, sign)
        return zerosums.sum_x_rho(w, X, sign), pred, {"zeros": len(w), **pred.notes}
    return handler


def _thm15(inputs, src, dps):
    (T,) = _need(inputs, "T")
    w = src.covering(T).window(0.0, T)
    direct = zerosums.sum_zeta_deriv(w, 1)
    pred = asym.predict_shanks(T)
    notes = {"compare": "real", "zeros": len(w), "rh_budget": pred.alt_budget,
             "imag_over_real": abs(direct.imag) / abs(direct.real)}
    return direct, pred, notes


def _thm16(inputs, src, dps):
    nu, T = _need(inputs, "nu", "T")
    w = src.covering(T).window(0.0, T)
    direct = zerosums.sum_zeta_deriv(w, int(nu))
    pred = asym.predict_deriv_sum(int(nu), T)
    sign_ok = math.copysign(1, direct.real) == (-1) ** (int(nu) + 1)
    return direct, pred, {"compare": "real", "zeros": len(w), "sign_matches": sign_ok}


def _lemma41(inputs, src, dps):
    sigma, T = _need(inputs, "sigma", "T")
    if "r" in inputs:
        r = inputs["r"]
    else:
        (k,) = _need(inputs, "k")  # k = 2πr / T
        r = k * T / TWO_PI
    res = quad.integrate_J(sigma, r, T, inputs.get("tol", 1e-9))
    pred = asym.predict_J(sigma, r, T)
    return res.value, pred, {"r": r, "est_error": res.est_error, "in_band": asym.in_j_band(r, T)}


def _afe(inputs, src, dps):
    t, = _need(inputs, "t")
    alpha = inputs.get("alpha", 0.5)
    nu = int(inputs.get("nu", 1))
    sigma = inputs.get("sigma", 0.5)
    exact, approx = quad.afe_parts(complex(sigma, t), alpha, nu, dps)
    budget = quad.afe_budget(t, alpha, nu)
    pred = asym.AsymptoticPrediction(approx, budget, (("afe", budget),))
    cut = quad.afe_cutoffs(t, alpha)
    return exact, pred, {"cutoffs": list(cut)}


def _partial(kind: PartialSumKind):
    def handler(inputs, src, dps):
        (x,) = _need(inputs, "x")
        nu = int(inputs.get("nu", 0))
        C = float(inputs.get("C", 0.0))
        direct = partial_sum_direct(kind, x, nu, C)
        main, budget = partial_sum_predicted(kind, x, nu, C)
        pred = asym.AsymptoticPrediction(complex(main), budget, (("shape", budget),))
        return complex(direct), pred, {}
    return handler


REGISTRY: dict[str, Callable] = {
    "cor2.2": _cor22,
    "cor2.3": _cor23,
    "thm2.1/below-band": _thm21(asym.Regime.BelowBand),
    "thm2.1/in-band": _thm21(asym.Regime.InBand),
    "thm2.1/above-band": _thm21(asym.Regime.AboveBand),
    "thm1.2": _landau(1),
    "cor1.4": _landau(-1),
    "thm1.5": _thm15,
    "thm1.6": _thm16,
    "lemma4.1": _lemma41,
    "afe": _afe,
}
REGISTRY.update({f"partial-sum/{k.value}": _partial(k) for k in PartialSumKind})

# grid key whose growth defines the trend of each claim
SCALE_KEYS = ("T", "t", "x")


def claim_ids() -> list[str]:
    return sorted(REGISTRY)


def compare(claim_id: str, inputs: dict, table: ZeroTable | None = None,
            source: ZeroSource | None = None, dps: int = DEFAULT_DPS) -> ComparisonReport:
    handler = REGISTRY.get(claim_id)
    if handler is None:
        raise UnknownClaimError(f"unknown claim {claim_id!r}")
    if source is None:
        source = ZeroSource(table, compute=False) if table is not None else _default_source
    direct, pred, notes = handler(dict(inputs), source, dps)
    direct = complex(direct)
    predicted = complex(pred.main)
    if notes.get("compare") == "real":
        residual = abs(direct.real - predicted.real)
    else:
        residual = abs(direct - predicted)
    if pred.alt_budget is not None:
        notes.setdefault("alt_budget", pred.alt_budget)
        notes.setdefault("alt_ratio", residual / pred.alt_budget)
    return ComparisonReport(claim_id, dict(inputs), direct, predicted, pred.budget,
                            residual, residual / pred.budget, notes=notes)


def _scale_key(grid: list[dict]) -> str:
    for key in SCALE_KEYS:
        vals = {g.get(key) for g in grid}
        if None not in vals and len(vals) > 1:
            return key
    raise InsufficientGridError("grid does not vary any of T, t, x")


def fit(claim_id: str, reports: list[ComparisonReport], cap: float = DEFAULT_CAP) -> CalibrationFit:
    if len(reports) < 4:
        raise InsufficientGridError("calibration needs at least 4 grid points")
    inputs = [r.inputs for r in reports]
    key = _scale_key(inputs)
    x = np.log([float(i[key]) for i in inputs])
    ratios = np.array([r.ratio for r in reports])
    y = np.log(np.maximum(ratios, 1e-300))
    slope = float(np.polyfit(x, y, 1)[0]) if np.ptp(y) > 0 else 0.0
    C = float(ratios.max())
    done = [ComparisonReport(r.claim_id, r.inputs, r.direct, r.predicted, r.budget, r.residual,
                             r.ratio, C, slope, r.notes) for r in reports]
    return CalibrationFit(claim_id, [(r.inputs, r.ratio) for r in reports], C, slope, key, cap, done)


def calibrate(claim_id: str, grid: list[dict], table: ZeroTable | None = None,
              cap: float = DEFAULT_CAP, source: ZeroSource | None = None,
              dps: int = DEFAULT_DPS) -> CalibrationFit:
    if claim_id not in REGISTRY:
        raise UnknownClaimError(f"unknown claim {claim_id!r}")
    if len(grid) < 4:
        raise InsufficientGridError("calibration needs at least 4 grid points")
    reports = [compare(claim_id, g, table, source, dps) for g in grid]
    return fit(claim_id, reports, cap)
