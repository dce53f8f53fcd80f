"""Command-line interface: zero tables, sums, predictions, comparisons, Figure 1.

Every command is deterministic: the same configuration gives byte-identical
output files.  Exit status is 0 on success, 1 on validation, parse, audit or
coverage failures (and on comparisons that fail their trend criterion), and
2 on usage errors including unknown claim ids.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import os
import sys
from dataclasses import dataclass, field, replace
from pathlib import Path

import numpy as np

from . import arith
from . import asymptotics as asym
from . import quadrature as quad
from . import report
from . import zeros as zmod
from . import zerosums
from .errors import CoverageError, ParseError, UnknownClaimError, ZetaChiError

PRECISION_ENV = "ZX_PRECISION"
DEFAULT_CACHE = "zeros.ztbl"
CLASS_COLORS = {
    asym.Regime.AboveBand.value: "#1f4fd1",  # T < πX
    asym.Regime.InBand.value: "#d12f1f",  # πX <= T < 2πX
    asym.Regime.BelowBand.value: "#1f9d3a",  # T >= 2πX
}


@dataclass(frozen=True)
class RunConfig:
    precision_digits: int = 30
    sieve_limit: int = arith.DEFAULT_SIEVE_LIMIT
    zero_source: str = "compute"  # compute | import:PATH | cache:PATH
    output_dir: Path = Path(".")
    cap: float = report.DEFAULT_CAP
    overrides: dict = field(default_factory=dict)

    def validate(self) -> "RunConfig":
        if self.precision_digits < 15:
            raise ValueError("precision_digits must be >= 15")
        if self.sieve_limit < 2:
            raise ValueError("sieve_limit must be >= 2")
        if not self.cap > 0:
            raise ValueError("cap must be positive")
        kind, _, path = self.zero_source.partition(":")
        if kind not in ("compute", "import", "cache") or (kind != "compute") != bool(path):
            raise ValueError(f"bad zero_source {self.zero_source!r}")
        if kind == "import" and not Path(path).is_file():
            raise ValueError(f"zero table {path} does not exist")
        if self.output_dir.exists() and not self.output_dir.is_dir():
            raise ValueError(f"output_dir {self.output_dir} is not a directory")
        return self


_CONFIG_KEYS = {
    "precision_digits": int,
    "sieve_limit": int,
    "zero_source": str,
    "output_dir": Path,
    "cap": float,
}


def read_config_file(path: str | Path) -> dict:
    """key = value lines; '#' starts a comment; quotes around values are stripped."""
    out = {}
    for lineno, raw in enumerate(Path(path).read_text().splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        key, sep, value = line.partition("=")
        key, value = key.strip(), value.strip().strip("\"'")
        if not sep or key not in _CONFIG_KEYS:
            raise ValueError(f"{path}:{lineno}: unrecognised config line {raw!r}")
        out[key] = _CONFIG_KEYS[key](value)
    return out


def resolve_config(args: argparse.Namespace, environ=os.environ) -> RunConfig:
    """Defaults, then the config file, then ZX_PRECISION, then flags."""
    values: dict = {}
    if getattr(args, "config", None):
        values.update(read_config_file(args.config))
    if environ.get(PRECISION_ENV):
        values["precision_digits"] = int(environ[PRECISION_ENV])
    for key in _CONFIG_KEYS:
        flag = getattr(args, key, None)
        if flag is not None:
            values[key] = _CONFIG_KEYS[key](flag)
    overrides = {k: str(v) for k, v in sorted(values.items())}
    return replace(RunConfig(**values), overrides=overrides).validate()


# --- helpers ----------------------------------------------------------------

def _emit(text: str, out: str | None, cfg: RunConfig) -> None:
    if out is None:
        sys.stdout.write(text)
        return
    path = _out_path(out, cfg)
    path.write_text(text)


def _out_path(name: str | Path, cfg: RunConfig) -> Path:
    path = Path(name)
    if not path.is_absolute():
        path = cfg.output_dir / path
    path.parent.mkdir(parents=True, exist_ok=True)
    return path


def _dumps(obj) -> str:
    return json.dumps(report._plain(obj), sort_keys=True, indent=2) + "\n"


def _cx(z: complex) -> dict:
    return {"re": float(z.real), "im": float(z.imag)}


def load_zeros(cfg: RunConfig, need: float) -> zmod.ZeroTable:
    """A table covering ``need`` from the configured source."""
    kind, _, path = cfg.zero_source.partition(":")
    if kind == "import":
        table = zmod.load_table(path) if _is_ztbl(path) else zmod.import_zero_table(path)
    elif kind == "cache" and Path(path).is_file():
        table = zmod.load_table(path)
        if table.t_max < need and need <= zmod.MAX_TMAX:
            table = zmod.find_zeros(need)
            zmod.save_table(table, path)
    else:
        if need > zmod.MAX_TMAX:
            raise CoverageError(f"T={need} needs an imported zero table (compute limit {zmod.MAX_TMAX:g})")
        table = zmod.find_zeros(max(need, 14.0))
        if kind == "cache":
            Path(path).parent.mkdir(parents=True, exist_ok=True)
            zmod.save_table(table, path)
    if table.t_max < need:
        raise CoverageError(f"zero table covers up to {table.t_max}, need {need}")
    return table


def _is_ztbl(path: str) -> bool:
    with open(path, "rb") as fh:
        return fh.read(4) == zmod.MAGIC


def parse_grid(spec: str) -> list[dict]:
    """'T=1000:10000:1000' (inclusive range) or 'T=1000,2000,5000'."""
    key, sep, body = spec.partition("=")
    key = key.strip()
    if not sep or not key or not body:
        raise ValueError(f"bad grid {spec!r}; expected key=start:stop:step or key=v1,v2,...")
    if ":" in body:
        parts = [float(p) for p in body.split(":")]
        if len(parts) != 3 or parts[2] <= 0 or parts[1] < parts[0]:
            raise ValueError(f"bad grid range {body!r}")
        start, stop, step = parts
        count = int(math.floor((stop - start) / step + 1e-9)) + 1
        values = [start + i * step for i in range(count)]
    else:
        values = [float(v) for v in body.split(",")]
    return [{key: _num(v)} for v in values]


def _num(v: float):
    return int(v) if float(v).is_integer() else v


def _params(pairs: list[str] | None) -> dict:
    out = {}
    for pair in pairs or []:
        key, sep, value = pair.partition("=")
        if not sep:
            raise ValueError(f"bad parameter {pair!r}; expected key=value")
        out[key.strip()] = _num(float(value))
    return out


# --- commands ---------------------------------------------------------------

def cmd_zeros(args, cfg: RunConfig) -> int:
    if args.zeros_cmd == "find":
        table = zmod.find_zeros(args.tmax, args.tol)
        path = _out_path(args.out or DEFAULT_CACHE, cfg)
        zmod.save_table(table, path)
        print(len(table.ordinates))
        return 0
    if args.zeros_cmd == "import":
        table = zmod.import_zero_table(args.file, audit=not args.no_audit)
        if args.out:
            zmod.save_table(table, _out_path(args.out, cfg))
        print(len(table.ordinates))
        return 0
    if args.zeros_cmd == "export":
        table = load_zeros(cfg, 0.0)
        zmod.export_zero_table(table, _out_path(args.out, cfg), args.decimals)
        print(len(table.ordinates))
        return 0
    # count
    table = None
    if cfg.zero_source != "compute":
        table = load_zeros(cfg, args.T)
    print(zmod.count_zeros(args.T, table))
    return 0


def cmd_sum(args, cfg: RunConfig) -> int:
    kind = zerosums.SumKind(args.kind)
    table = load_zeros(cfg, args.hi)
    w = table.window(args.lo, args.hi)
    kw = {"precise": args.precise, "dps": cfg.precision_digits} if args.precise else {}
    inputs = {"lo": args.lo, "hi": args.hi}
    if kind is zerosums.SumKind.ChiXRho:
        value = zerosums.sum_chi_x_rho(w, args.X, **kw)
        inputs["X"] = args.X
    elif kind in (zerosums.SumKind.XRho, zerosums.SumKind.XNegRho):
        sign = 1 if kind is zerosums.SumKind.XRho else -1
        value = zerosums.sum_x_rho(w, args.X, sign, **kw)
        inputs["X"] = args.X
    elif kind is zerosums.SumKind.ZetaDeriv:
        value = zerosums.sum_zeta_deriv(w, args.nu, **kw)
        inputs["nu"] = args.nu
    else:
        value = zerosums.sum_chi_weighted(w, args.n, args.k, **kw)
        inputs.update(n=args.n, k=args.k)
    out = {"kind": kind.value, "inputs": inputs, "zeros": len(w), "value": _cx(value)}
    _emit(_dumps(out), args.out, cfg)
    return 0


PREDICTORS = {
    "S": (lambda a: asym.predict_S(a.X, a.T), ("X", "T")),
    "landau-gonek": (lambda a: asym.predict_landau_gonek(a.X, a.T, a.sign), ("X", "T", "sign")),
    "shanks": (lambda a: asym.predict_shanks(a.T), ("T",)),
    "deriv-sum": (lambda a: asym.predict_deriv_sum(a.nu, a.T), ("nu", "T")),
    "J": (lambda a: asym.predict_J(a.sigma, a.r, a.T), ("sigma", "r", "T")),
    "x1": (lambda a: asym.predict_X1(a.T), ("T",)),
    "integer-x": (lambda a: asym.predict_corollary_integer(int(a.X), a.T), ("X", "T")),
}


def cmd_predict(args, cfg: RunConfig) -> int:
    fn, keys = PREDICTORS[args.claim]
    missing = [k for k in keys if getattr(args, k) is None]
    if missing:
        raise ValueError(f"predict {args.claim} needs --{', --'.join(missing)}")
    pred = fn(args)
    out = {
        "claim": args.claim,
        "inputs": {k: getattr(args, k) for k in keys},
        "main": _cx(pred.main),
        "budget": pred.budget,
        "terms": dict(pred.terms),
        "alt_terms": dict(pred.alt_terms),
        "regime": pred.regime.value if pred.regime else None,
        "notes": pred.notes,
    }
    _emit(_dumps(out), args.out, cfg)
    return 0


def _coverage_need(claim: str, points: list[dict]) -> float:
    if claim.startswith("thm2.1/"):
        return 2 * max(p["T"] for p in points)
    if claim in ("lemma4.1", "afe") or claim.startswith("partial-sum/"):
        return 0.0
    return max(p["T"] for p in points)


def cmd_compare(args, cfg: RunConfig) -> int:
    if args.claim not in report.REGISTRY:
        raise UnknownClaimError(f"unknown claim {args.claim!r}")
    fixed = _params(args.set)
    for key in ("X", "T", "nu", "sigma", "r", "k", "t", "alpha", "x"):
        value = getattr(args, key, None)
        if value is not None:
            fixed[key] = _num(value)
    points = [{**fixed, **g} for g in parse_grid(args.grid)] if args.grid else [fixed]
    need = _coverage_need(args.claim, points)
    table = load_zeros(cfg, need) if need > 0 else None
    source = report.ZeroSource(table, compute=False)
    dps = cfg.precision_digits
    if len(points) == 1 and not args.grid:
        rep = report.compare(args.claim, points[0], source=source, dps=dps)
        body = {**rep.to_dict(), "cap": cfg.cap, "passed": rep.ratio <= cfg.cap}
        passed = body["passed"]
    else:
        fitted = report.calibrate(args.claim, points, cap=cfg.cap, source=source, dps=dps)
        body, passed = fitted.to_dict(), fitted.passed
    body["config"] = cfg.overrides
    _emit(_dumps(body), args.out, cfg)
    return 0 if passed else 1


def cmd_afe(args, cfg: RunConfig) -> int:
    s = complex(args.sigma, args.t)
    exact, approx = quad.afe_parts(s, args.alpha, args.nu, cfg.precision_digits)
    budget = quad.afe_budget(args.t, args.alpha, args.nu)
    residual = exact - approx
    out = {
        "inputs": {"t": args.t, "sigma": args.sigma, "alpha": args.alpha, "nu": args.nu},
        "cutoffs": list(quad.afe_cutoffs(args.t, args.alpha)),
        "exact": _cx(exact),
        "approx": _cx(approx),
        "residual": _cx(residual),
        "abs_residual": abs(residual),
        "budget": budget,
        "ratio": abs(residual) / budget,
    }
    _emit(_dumps(out), args.out, cfg)
    return 0


# --- Figure 1 ---------------------------------------------------------------

def figure1_points(table: zmod.ZeroTable, X: float, tmax: float, mode: str = "cumulative",
                   tstart: float = 0.0) -> tuple[np.ndarray, np.ndarray]:
    """(T, S) arrays for the Figure-1 scatter.

    cumulative: one point per zero γ in (tstart, tmax], S = Σ_{tstart<γ'<=γ} χ(ρ')X^ρ'.
    dyadic: S(X, T) = Σ_{T<γ<=2T} at every jump of the window, i.e. T = γ <= tmax
    and T = γ/2 for γ <= 2 tmax.
    """
    if mode == "cumulative":
        w = table.window(tstart, tmax)
        return w.gammas.copy(), zerosums.cumulative_chi_x_rho(w, X)
    if mode != "dyadic":
        raise ValueError(f"unknown mode {mode!r}")
    w = table.window(0.0, 2 * tmax)
    g = w.gammas
    run = np.concatenate([[0j], zerosums.cumulative_chi_x_rho(w, X)])
    Ts = np.unique(np.concatenate([g[g <= tmax], g / 2]))
    Ts = Ts[(Ts > tstart) & (Ts <= tmax)]
    hi = np.searchsorted(g, 2 * Ts, side="right")
    lo = np.searchsorted(g, Ts, side="right")
    return Ts, run[hi] - run[lo]


def regime_classes(Ts: np.ndarray, X: float) -> list[str]:
    return [asym.classify_regime(X, float(T)).value for T in Ts]


def write_figure_csv(path: Path, Ts, S, classes) -> None:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["T", "re", "im", "class"])
    for T, z, c in zip(Ts, S, classes):
        w.writerow([repr(float(T)), repr(float(z.real)), repr(float(z.imag)), c])
    path.write_text(buf.getvalue())


def _ticks(lo: float, hi: float, n: int = 5) -> list[float]:
    span = hi - lo
    raw = span / n
    mag = 10 ** math.floor(math.log10(raw))
    step = min((m * mag for m in (1, 2, 5, 10) if m * mag >= raw), default=10 * mag)
    first = math.ceil(lo / step) * step
    return [first + i * step for i in range(int((hi - first) / step + 1e-9) + 1)]


def _fmt(v: float) -> str:
    return f"{v:.6g}"


def render_svg(S: np.ndarray, classes: list[str], X: float, title: str) -> str:
    """Static SVG 1.1 scatter of Re S (x) against Im S (y), scaled independently."""
    W, H, M = 800, 600, 70
    re, im = S.real, S.imag
    def bounds(v):
        lo, hi = (float(v.min()), float(v.max())) if v.size else (-1.0, 1.0)
        pad = 0.05 * (hi - lo) if hi > lo else 1.0
        return lo - pad, hi + pad
    x0, x1 = bounds(re)
    y0, y1 = bounds(im)
    sx = lambda v: M + (v - x0) / (x1 - x0) * (W - 2 * M)
    sy = lambda v: H - M - (v - y0) / (y1 - y0) * (H - 2 * M)
    out = [
        '<?xml version="1.0" encoding="UTF-8" standalone="no"?>',
        f'<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{W}" height="{H}" '
        f'viewBox="0 0 {W} {H}">',
        f"<title>{title}</title>",
        f'<rect x="0" y="0" width="{W}" height="{H}" fill="white"/>',
        f'<rect x="{M}" y="{M}" width="{W - 2 * M}" height="{H - 2 * M}" fill="none" stroke="black"/>',
    ]
    for t in _ticks(x0, x1):
        x = sx(t)
        out.append(f'<line x1="{x:.2f}" y1="{H - M}" x2="{x:.2f}" y2="{H - M + 5}" stroke="black"/>')
        out.append(f'<text x="{x:.2f}" y="{H - M + 20}" font-size="11" text-anchor="middle">{_fmt(t)}</text>')
    for t in _ticks(y0, y1):
        y = sy(t)
        out.append(f'<line x1="{M - 5}" y1="{y:.2f}" x2="{M}" y2="{y:.2f}" stroke="black"/>')
        out.append(f'<text x="{M - 8}" y="{y + 4:.2f}" font-size="11" text-anchor="end">{_fmt(t)}</text>')
    out.append(f'<text x="{W / 2}" y="{H - 15}" font-size="13" text-anchor="middle">Re S</text>')
    out.append(f'<text x="18" y="{H / 2}" font-size="13" text-anchor="middle" '
               f'transform="rotate(-90 18 {H / 2})">Im S</text>')
    cls = np.array(classes)
    legend = {
        asym.Regime.AboveBand.value: f"T &lt; {_fmt(math.pi * X)}",
        asym.Regime.InBand.value: f"{_fmt(math.pi * X)} &lt;= T &lt; {_fmt(2 * math.pi * X)}",
        asym.Regime.BelowBand.value: f"T &gt;= {_fmt(2 * math.pi * X)}",
    }
    for i, (name, color) in enumerate(CLASS_COLORS.items()):
        mask = cls == name
        if mask.any():
            xs, ys = sx(re[mask]), sy(im[mask])
            d = "".join(f"M{a:.2f} {b:.2f}h0" for a, b in zip(xs, ys))
            out.append(f'<path class="{name}" d="{d}" stroke="{color}" stroke-width="2.5" '
                       f'stroke-linecap="round" fill="none"/>')
        ly = M + 15 + 16 * i
        out.append(f'<circle cx="{W - M - 150}" cy="{ly - 4}" r="4" fill="{color}"/>')
        out.append(f'<text x="{W - M - 140}" y="{ly}" font-size="11">{legend[name]}</text>')
    out.append("</svg>")
    return "\n".join(out) + "\n"


def cmd_figure1(args, cfg: RunConfig) -> int:
    need = args.tmax if args.mode == "cumulative" else 2 * args.tmax
    table = load_zeros(cfg, need)
    Ts, S = figure1_points(table, args.X, args.tmax, args.mode, args.tstart)
    classes = regime_classes(Ts, args.X)
    stem = args.prefix or f"figure1_X{_fmt(args.X)}_T{_fmt(args.tmax)}_{args.mode}"
    write_figure_csv(_out_path(stem + ".csv", cfg), Ts, S, classes)
    title = f"S for X={_fmt(args.X)}, T up to {_fmt(args.tmax)} ({args.mode})"
    _out_path(stem + ".svg", cfg).write_text(render_svg(S, classes, args.X, title))
    counts = {c: classes.count(c) for c in CLASS_COLORS}
    print(json.dumps({"rows": len(Ts), "classes": counts,
                      "boundaries": [math.pi * args.X, 2 * math.pi * args.X],
                      "csv": stem + ".csv", "svg": stem + ".svg"}, sort_keys=True))
    return 0


# --- parser -----------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="key=value configuration file")
    common.add_argument("--precision-digits", dest="precision_digits", type=int)
    common.add_argument("--sieve-limit", dest="sieve_limit", type=int)
    common.add_argument("--zeros", dest="zero_source",
                        help="compute | import:PATH | cache:PATH")
    common.add_argument("--output-dir", dest="output_dir")
    common.add_argument("--cap", type=float, help="calibration cap on C")

    p = argparse.ArgumentParser(prog="zetachi", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="cmd", required=True)

    z = sub.add_parser("zeros", help="zero tables")
    zsub = z.add_subparsers(dest="zeros_cmd", required=True)
    f = zsub.add_parser("find", parents=[common], help="compute zeros up to --tmax")
    f.add_argument("--tmax", type=float, required=True)
    f.add_argument("--tol", type=float, default=1e-10)
    f.add_argument("--out", help=f"ZTBL output (default {DEFAULT_CACHE})")
    i = zsub.add_parser("import", parents=[common], help="import a plain-text table")
    i.add_argument("--file", required=True)
    i.add_argument("--out", help="also save as ZTBL")
    i.add_argument("--no-audit", action="store_true")
    e = zsub.add_parser("export", parents=[common], help="write the table as plain text")
    e.add_argument("--out", required=True)
    e.add_argument("--decimals", type=int)
    c = zsub.add_parser("count", parents=[common], help="audited N(T)")
    c.add_argument("--T", type=float, required=True)

    s = sub.add_parser("sum", parents=[common], help="a sum over zeros in (lo, hi]")
    s.add_argument("--kind", required=True, choices=[k.value for k in zerosums.SumKind])
    s.add_argument("--X", type=float, default=1.0)
    s.add_argument("--nu", type=int, default=1)
    s.add_argument("--n", type=int, default=1)
    s.add_argument("--k", type=int, default=1)
    s.add_argument("--lo", type=float, default=0.0)
    s.add_argument("--hi", type=float, required=True)
    s.add_argument("--precise", action="store_true", help="evaluate every term with mpmath")
    s.add_argument("--out")

    pr = sub.add_parser("predict", parents=[common], help="main term and error budget")
    pr.add_argument("--claim", required=True, choices=sorted(PREDICTORS))
    for name, typ in (("X", float), ("T", float), ("nu", int), ("sigma", float), ("r", float)):
        pr.add_argument(f"--{name}", type=typ)
    pr.add_argument("--sign", type=int, default=1, choices=(1, -1))
    pr.add_argument("--out")

    cm = sub.add_parser("compare", parents=[common], help="direct vs predicted for a claim")
    cm.add_argument("--claim", required=True)
    cm.add_argument("--grid", help="key=start:stop:step or key=v1,v2,...")
    for name in ("X", "T", "nu", "sigma", "r", "k", "t", "alpha", "x"):
        cm.add_argument(f"--{name}", type=float)
    cm.add_argument("--set", action="append", metavar="KEY=VALUE", help="extra claim input")
    cm.add_argument("--out")

    a = sub.add_parser("afe", parents=[common], help="approximate functional equation residual")
    a.add_argument("--t", type=float, required=True)
    a.add_argument("--alpha", type=float, default=0.5)
    a.add_argument("--nu", type=int, default=1)
    a.add_argument("--sigma", type=float, default=0.5)
    a.add_argument("--out")

    fg = sub.add_parser("figure1", parents=[common], help="CSV and SVG of S over the zeros")
    fg.add_argument("--X", type=float, required=True)
    fg.add_argument("--tmax", type=float, required=True)
    fg.add_argument("--tstart", type=float, default=0.0)
    fg.add_argument("--mode", choices=("cumulative", "dyadic"), default="cumulative")
    fg.add_argument("--prefix", help="output file stem")
    return p


COMMANDS = {
    "zeros": cmd_zeros,
    "sum": cmd_sum,
    "predict": cmd_predict,
    "compare": cmd_compare,
    "afe": cmd_afe,
    "figure1": cmd_figure1,
}


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        cfg = resolve_config(args)
        if cfg.sieve_limit != arith.DEFAULT_SIEVE_LIMIT:
            arith.configure_sieve(cfg.sieve_limit)
        return COMMANDS[args.cmd](args, cfg)
    except UnknownClaimError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except ParseError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except (ZetaChiError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
