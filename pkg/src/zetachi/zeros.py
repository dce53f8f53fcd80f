"""Zero ordinates of ζ on the critical line: search, audit, import/export.

Zeros are located as sign changes of Hardy's Z on a fine grid and refined
to full double precision.  Every search is audited block by block against
the argument-principle count

    N(T) = θ(T)/π + 1 + arg ζ(1/2 + iT)/π,

with the argument tracked continuously along the horizontal segment from
3 + iT.  A mismatch in a block triggers a finer rescan of that block; if it
persists the search fails loudly rather than return a table with a gap.

All sums downstream assume ρ = 1/2 + iγ; the audit is what licenses that
at the heights handled here.
"""

from __future__ import annotations

import enum
import math
import re
import struct
from dataclasses import dataclass, field
from decimal import Decimal
from pathlib import Path

import numpy as np

from . import fastzeta as fz
from .errors import (
    AuditError,
    CoverageError,
    MissedZeroError,
    MonotonicityError,
    ParseError,
    RefinementError,
)

GRID_STEP = 0.05
BLOCK_LENGTH = 100.0
SCAN_START = 10.0
MAX_TMAX = 1.0e5
NUDGE = 1e-6
MAX_HALVINGS = 6


class ZeroSource(enum.Enum):
    Computed = "computed"
    Imported = "imported"


@dataclass(frozen=True, eq=False)
class ZeroTable:
    """Strictly increasing zero ordinates γ_k (hi + lo double-double parts)."""

    ordinates: np.ndarray
    precision: float
    source: ZeroSource
    t_max: float
    ordinates_lo: np.ndarray | None = None
    decimals: int | None = None

    def __post_init__(self):
        g = np.ascontiguousarray(self.ordinates, dtype=np.float64)
        if g.size and (np.any(np.diff(g) <= 0) or g[0] <= 13.0):
            raise MonotonicityError("ordinates must be strictly increasing and above 13")
        g.setflags(write=False)
        object.__setattr__(self, "ordinates", g)
        lo = self.ordinates_lo
        lo = np.zeros_like(g) if lo is None else np.ascontiguousarray(lo, dtype=np.float64)
        lo.setflags(write=False)
        object.__setattr__(self, "ordinates_lo", lo)

    def __len__(self) -> int:
        return self.ordinates.size

    def count_below(self, T: float) -> int:
        """Number of ordinates γ <= T."""
        return int(np.searchsorted(self.ordinates, T, side="right"))

    def window(self, lo: float, hi: float) -> "ZeroWindow":
        return window(self, lo, hi)

    def truncated(self, t_max: float) -> "ZeroTable":
        k = self.count_below(t_max)
        return ZeroTable(self.ordinates[:k], self.precision, self.source, min(t_max, self.t_max),
                         self.ordinates_lo[:k], self.decimals)


@dataclass(frozen=True)
class ZeroWindow:
    """The ordinates γ with lo < γ <= hi (after boundary nudging)."""

    table: ZeroTable = field(repr=False)
    lo: float
    hi: float

    @property
    def slice(self) -> slice:
        g = self.table.ordinates
        return slice(int(np.searchsorted(g, self.lo, side="right")),
                     int(np.searchsorted(g, self.hi, side="right")))

    @property
    def gammas(self) -> np.ndarray:
        return self.table.ordinates[self.slice]

    def __len__(self) -> int:
        s = self.slice
        return max(0, s.stop - s.start)

    def __iter__(self):
        return iter(self.gammas)


def _nudge(g: np.ndarray, x: float) -> float:
    """Move x by NUDGE away from an ordinate closer than NUDGE, keeping membership."""
    if g.size == 0:
        return x
    i = int(np.searchsorted(g, x))
    for j in (i - 1, i):
        if 0 <= j < g.size and abs(g[j] - x) < NUDGE:
            return g[j] + NUDGE if g[j] <= x else g[j] - NUDGE
    return x


def window(table: ZeroTable, lo: float, hi: float) -> ZeroWindow:
    if hi > table.t_max:
        raise CoverageError(f"window end {hi} beyond table coverage {table.t_max}")
    if hi < lo:
        raise ValueError("window needs lo <= hi")
    g = table.ordinates
    return ZeroWindow(table, _nudge(g, lo), _nudge(g, hi))


# --- argument-principle count ---------------------------------------------

_ARG_SIGMA_START = 3.0


def _arg_zeta_half(T: float) -> float:
    """Continuous arg ζ(σ + iT) from σ = 3 down to σ = 1/2."""
    sig = np.linspace(_ARG_SIGMA_START, 0.5, 33)
    vals = fz.zeta(sig + 1j * T)
    for _ in range(12):
        inc = np.angle(vals[1:] / vals[:-1])
        bad = np.flatnonzero(np.abs(inc) > math.pi / 4)
        if bad.size == 0:
            break
        mids = 0.5 * (sig[bad] + sig[bad + 1])
        new = fz.zeta(mids + 1j * T)
        sig = np.insert(sig, bad + 1, mids)
        vals = np.insert(vals, bad + 1, new)
    else:
        raise AuditError(f"could not track arg ζ at height {T}")
    inc = np.angle(vals[1:] / vals[:-1])
    return float(np.angle(vals[0]) + inc.sum())


def argument_count(T: float) -> float:
    """θ(T)/π + 1 + S(T); an integer (up to rounding) unless T is an ordinate."""
    return float(fz.theta(np.array([T]))[0]) / math.pi + 1.0 + _arg_zeta_half(T) / math.pi


def _integer_count(T: float, slack: float = 0.1) -> int | None:
    v = argument_count(T)
    k = round(v)
    return int(k) if abs(v - k) < slack else None


# --- scanning -------------------------------------------------------------

def _count_and_brackets(a: float, b: float, step: float, accurate: bool):
    n = max(2, int(math.ceil((b - a) / step)) + 1)
    t = np.linspace(a, b, n)
    z = fz.hardy_z_em(t) if accurate else fz.hardy_z(t)
    change = np.flatnonzero(np.signbit(z[:-1]) != np.signbit(z[1:]))
    return t[change], t[change + 1], z[change], z[change + 1]


def _block_edges(t_lo: float, t_hi: float) -> list[tuple[float, int]]:
    """Block edges with their audited zero counts; the last edge is >= t_hi."""
    nblocks = max(1, int(math.ceil((t_hi - t_lo) / BLOCK_LENGTH)))
    raw = list(np.linspace(t_lo, t_hi, nblocks + 1))
    edges = []
    for k, x in enumerate(raw):
        for attempt in range(8):
            # the final edge may only move up; interior edges move either way
            shift = 0.0137 * attempt if k == len(raw) - 1 else 0.0137 * attempt * (-1) ** attempt
            c = _integer_count(x + shift)
            if c is not None:
                edges.append((x + shift, c))
                break
        else:
            raise AuditError(f"argument count near t = {x} is not close to an integer")
    return edges


def _scan(t_lo: float, t_hi: float, step: float = GRID_STEP):
    """Audited sign-change brackets on [t_lo, edge >= t_hi]."""
    edges = _block_edges(t_lo, t_hi)
    if edges[0][1] != 0 and t_lo <= SCAN_START:
        raise AuditError(f"argument count at {edges[0][0]} is {edges[0][1]}, expected 0")
    out = []
    for (a, na), (b, nb) in zip(edges[:-1], edges[1:]):
        want = nb - na
        h = step
        for level in range(MAX_HALVINGS + 1):
            br = _count_and_brackets(a, b, h, accurate=level > 0)
            if br[0].size == want:
                break
            h /= 2
        else:
            raise MissedZeroError(
                f"block ({a:.3f}, {b:.3f}]: {br[0].size} sign changes but argument count gives {want}")
        out.append(br)
    cat = [np.concatenate([o[i] for o in out]) for i in range(4)]
    return cat, edges


def _refine(a, b, fa, fb, tol: float):
    """Illinois iteration on the fast Z, then Newton on the Euler–Maclaurin Z."""
    a, b, fa, fb = (np.array(v, dtype=np.float64) for v in (a, b, fa, fb))
    if a.size == 0:
        return a, a.copy(), 0.0
    lo0, hi0 = a.copy(), b.copy()
    last = np.zeros(a.size, dtype=np.int8)  # which end was replaced last: 1 = b, -1 = a
    for _ in range(100):
        ia = np.flatnonzero(np.abs(b - a) > 1e-8 * np.maximum(1.0, np.abs(a)))
        if ia.size == 0:
            break
        A, B, FA, FB = a[ia], b[ia], fa[ia], fb[ia]
        c = (A * FB - B * FA) / (FB - FA)
        bad = ~((c > np.minimum(A, B)) & (c < np.maximum(A, B)))
        c[bad] = 0.5 * (A[bad] + B[bad])
        fc = fz.hardy_z(c)
        hit = fc == 0
        to_b = (np.signbit(fc) == np.signbit(FB)) & ~hit
        to_a = ~to_b & ~hit
        jb, ja, jh = ia[to_b], ia[to_a], ia[hit]
        b[jb], fb[jb] = c[to_b], fc[to_b]
        fa[jb] = np.where(last[jb] == 1, fa[jb] / 2, fa[jb])
        last[jb] = 1
        a[ja], fa[ja] = c[to_a], fc[to_a]
        fb[ja] = np.where(last[ja] == -1, fb[ja] / 2, fb[ja])
        last[ja] = -1
        a[jh] = b[jh] = c[hit]
    x = 0.5 * (a + b)
    z, dz = fz.hardy_z_and_deriv(x)
    x = x - z / dz
    z, dz = fz.hardy_z_and_deriv(x, accurate=True)
    x = x - z / dz
    z, dz = fz.hardy_z_and_deriv(x, accurate=True)
    step = -z / dz
    lo_b = np.minimum(lo0, hi0) - 1e-6
    hi_b = np.maximum(lo0, hi0) + 1e-6
    if np.any((x < lo_b) | (x > hi_b)) or not np.all(np.isfinite(x + step)):
        raise RefinementError("Newton polish left its sign-change bracket")
    # residual error of Z with double-double phases (~1e-15), through |Z'|
    eval_err = 1e-14 / np.maximum(np.abs(dz), 1e-300)
    err = np.abs(step) + eval_err
    hi = x + step
    lo = (x - hi) + step
    if np.any(err > tol):
        worst = int(np.argmax(err))
        raise RefinementError(f"zero near {x[worst]:.6f} only resolved to {err[worst]:.2e}")
    return hi, lo, float(err.max())


def find_zeros(t_max: float, tol: float = 1e-10) -> ZeroTable:
    """All zero ordinates in (0, t_max], audited against the argument count."""
    if not 14 <= t_max <= MAX_TMAX:
        raise ValueError(f"t_max must lie in [14, {MAX_TMAX:g}]")
    if tol < 1e-12:
        raise ValueError("tol must be >= 1e-12")
    (a, b, fa, fb), edges = _scan(SCAN_START, t_max)
    hi, lo, prec = _refine(a, b, fa, fb, tol)
    order = np.argsort(hi)
    hi, lo = hi[order], lo[order]
    keep = hi <= t_max
    table = ZeroTable(hi[keep], max(prec, 1e-14), ZeroSource.Computed, float(t_max), lo[keep])
    final_count = edges[-1][1] - int(np.count_nonzero(~keep))
    if len(table) != final_count:
        raise MissedZeroError(f"{len(table)} zeros found below {t_max}, argument count {final_count}")
    return table


def locate_zeros(a: float, b: float, tol: float = 1e-10) -> np.ndarray:
    """Ordinates in [a, b] from a fine local scan (no global audit)."""
    a = max(a, SCAN_START)
    if b <= a:
        return np.empty(0)
    lo, hi, fa, fb = _count_and_brackets(a, b, 0.01, accurate=True)
    g, _, _ = _refine(lo, hi, fa, fb, max(tol, 1e-10))
    return np.sort(g)


def count_zeros(T: float, table: ZeroTable | None = None) -> int:
    """N(T), cross-checked between sign changes of Z and the argument count."""
    if T < 14:
        raise ValueError("count_zeros needs T >= 14")
    arg = _integer_count(T)
    if arg is None:
        raise AuditError(f"T = {T} is too close to a zero ordinate to count")
    if table is not None and T <= table.t_max:
        found = table.count_below(T)
    else:
        (a, b, fa, _), _ = _scan(SCAN_START, T)
        found = int(np.count_nonzero(b <= T))
        # a bracket straddling T holds a zero below T iff Z changes sign on [a, T]
        for i in np.flatnonzero((a < T) & (b > T)):
            zT = fz.hardy_z_em(np.array([T]))[0]
            found += int(np.signbit(zT) != np.signbit(fa[i]))
    if found != arg:
        raise AuditError(f"sign changes give {found} zeros up to {T}, argument count gives {arg}")
    return arg


def audit_table(table: ZeroTable, T: float) -> int:
    """Check table.count_below(T) against the argument count; return the count."""
    return count_zeros(T, table)


# --- persistence ----------------------------------------------------------

MAGIC = b"ZTBL"
_HEAD = struct.Struct("<4sIQ")
_META = struct.Struct("<ddII")


def save_table(table: ZeroTable, path: str | Path, version: int = 2) -> None:
    """Write the binary cache (little-endian; see README for the layout)."""
    pairs = np.empty((len(table), 2), dtype="<f8")
    pairs[:, 0] = table.ordinates
    pairs[:, 1] = table.ordinates_lo
    with open(path, "wb") as fh:
        fh.write(_HEAD.pack(MAGIC, version, len(table)))
        if version == 2:
            src = 0 if table.source is ZeroSource.Computed else 1
            fh.write(_META.pack(table.t_max, table.precision, src, table.decimals or 0))
        elif version != 1:
            raise ValueError("unknown ZTBL version")
        fh.write(pairs.tobytes())


def load_table(path: str | Path) -> ZeroTable:
    data = Path(path).read_bytes()
    if len(data) < _HEAD.size:
        raise ParseError("truncated ZTBL header")
    magic, version, count = _HEAD.unpack_from(data, 0)
    if magic != MAGIC:
        raise ParseError("not a ZTBL file")
    off = _HEAD.size
    t_max = precision = None
    source, decimals = ZeroSource.Computed, None
    if version == 2:
        t_max, precision, src, dec = _META.unpack_from(data, off)
        off += _META.size
        source = ZeroSource.Computed if src == 0 else ZeroSource.Imported
        decimals = dec or None
    elif version != 1:
        raise ParseError(f"unsupported ZTBL version {version}")
    if len(data) != off + 16 * count:
        raise ParseError("ZTBL payload length does not match the count")
    pairs = np.frombuffer(data, dtype="<f8", count=2 * count, offset=off).reshape(count, 2)
    hi = pairs[:, 0].astype(np.float64)
    if t_max is None:
        t_max = float(hi[-1]) if count else 14.0
        precision = 0.0
    return ZeroTable(hi, precision, source, t_max, pairs[:, 1].astype(np.float64), decimals)


_LINE = re.compile(r"^\s*(\d+)\.(\d+)\s*$")


def import_zero_table(path: str | Path, audit: bool = True, audit_samples: int = 5) -> ZeroTable:
    """Parse a PlainText table (one decimal ordinate per line, >= 9 decimals)."""
    text = Path(path).read_text(encoding="ascii")
    lines = text.split("\n")
    if lines and lines[-1] == "":
        lines.pop()
    hi = np.empty(len(lines))
    lo = np.empty(len(lines))
    decimals = 0
    prev = None
    for i, line in enumerate(lines, start=1):
        m = _LINE.match(line)
        if not m:
            raise ParseError(f"not a decimal ordinate: {line!r}", i)
        if len(m.group(2)) < 9:
            raise ParseError("fewer than 9 decimal places", i)
        decimals = max(decimals, len(m.group(2)))
        d = Decimal(line.strip())
        if prev is not None and d <= prev:
            raise MonotonicityError(f"ordinate {d} does not exceed {prev}", i)
        prev = d
        h = float(d)
        hi[i - 1] = h
        lo[i - 1] = float(d - Decimal(h))
    if hi.size == 0:
        raise ParseError("empty zero table")
    if hi[0] <= 13.0:
        raise ParseError("ordinates must exceed 13", 1)
    table = ZeroTable(hi, 0.5 * 10.0**-decimals, ZeroSource.Imported, float(hi[-1]), lo, decimals)
    if audit:
        _spot_audit(table, audit_samples)
    return table


def _spot_audit(table: ZeroTable, samples: int) -> None:
    g = table.ordinates
    if g.size < 2:
        T = g[0] + min(0.5, 0.1)
        if _integer_count(T) != 1:
            raise AuditError("single-ordinate table does not start at the first zero")
        return
    rng = np.random.default_rng(20240917)
    ks = rng.choice(g.size - 1, size=min(samples, g.size - 1), replace=False)
    for k in sorted(int(k) for k in ks):
        T = 0.5 * (g[k] + g[k + 1])
        c = _integer_count(T)
        if c != k + 1:
            raise AuditError(f"prefix of {k + 1} ordinates ends near {T:.6f} but argument count is {c}")


def export_zero_table(table: ZeroTable, path: str | Path, decimals: int | None = None) -> None:
    """Write PlainText; reproduces an imported file byte for byte."""
    places = decimals or table.decimals or 12
    q = Decimal(1).scaleb(-places)
    with open(path, "w", encoding="ascii", newline="\n") as fh:
        for h, l in zip(table.ordinates, table.ordinates_lo):
            fh.write(f"{(Decimal(float(h)) + Decimal(float(l))).quantize(q)}\n")
