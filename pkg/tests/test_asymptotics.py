from __future__ import annotations

import math

import numpy as np
import pytest
from hypothesis import assume, given, settings
from hypothesis import strategies as st

from zetachi import arith
from zetachi import asymptotics as asym
from zetachi.asymptotics import Regime

TWO_PI = 2 * math.pi
G0 = 0.577215664901532860606512090082
G1 = -0.0728158454836767248605863758749


@pytest.mark.parametrize("X,T,regime", [
    (100, 1e4, Regime.BelowBand),
    (2000, 1e4, Regime.InBand),
    (5000, 1e4, Regime.AboveBand),
    (1e4 / TWO_PI, 1e4, Regime.BelowBand),
    (1e4 / math.pi, 1e4, Regime.InBand),
])
def test_classify_regime(X, T, regime):
    assert asym.classify_regime(X, T) is regime


_ORDER = {Regime.BelowBand: 0, Regime.InBand: 1, Regime.AboveBand: 2}


@settings(max_examples=200, deadline=None)
@given(st.floats(1, 1e6), st.floats(1, 1e6), st.floats(10, 1e6))
def test_regime_monotone_in_X(X1, X2, T):
    lo, hi = sorted((X1, X2))
    assert _ORDER[asym.classify_regime(lo, T)] <= _ORDER[asym.classify_regime(hi, T)]


def test_in_band_main_term():
    X, T = 2000.0, 1e4
    pred = asym.predict_S(X, T)
    assert pred.regime is Regime.InBand
    assert pred.main == pytest.approx(X * math.log(X), rel=1e-14)
    X = 2000.25
    want = X * math.log(X) * complex(math.cos(math.pi / 2), math.sin(math.pi / 2))
    assert asym.predict_S(X, T).main == pytest.approx(want, rel=1e-12)


def test_above_band_hand_enumeration():
    X, T = 5000.0, 1e4
    # πX/T ≈ 1.571 <= n < 3.142: n in {2, 3}
    assert list(asym.above_band_range(X, T)) == [2, 3]
    # exact fractional parts of X/n: 5000/2 = 2500, 5000/3 = 1666 + 2/3
    frac = {2: 0.0, 3: 2 / 3}
    want = -X * sum(arith.von_mangoldt(n) / n * complex(math.cos(TWO_PI * frac[n]), math.sin(TWO_PI * frac[n]))
                    for n in (2, 3))
    assert asym.predict_S(X, T).main == pytest.approx(want, rel=1e-12)


def test_below_band_x1_is_chebyshev_difference():
    T = 5000.0
    lo, hi = T / TWO_PI, T / math.pi
    want = -math.fsum(arith.von_mangoldt(n) for n in range(math.floor(lo) + 1, math.floor(hi) + 1))
    assert asym.predict_S(1.0, T).main == pytest.approx(want, rel=1e-13)


def test_dyadic_x1_telescopes():
    # Σ over (T/2^{k+1}, T/2^k] windows of the X=1 main terms is -ψ(T/2π) minus the part below 1
    T = 2.0**14 * math.pi
    total = 0j
    k = 0
    while T / 2 ** (k + 1) > TWO_PI:
        total += asym.predict_S(1.0, T / 2 ** (k + 1)).main
        k += 1
    top = math.floor(T / TWO_PI)
    bottom = math.floor(T / 2**k / TWO_PI)
    want = -math.fsum(arith.von_mangoldt(n) for n in range(bottom + 1, top + 1))
    assert total.real == pytest.approx(want, rel=1e-13)


def test_jump_structure_at_band_edges():
    """At X = T/π the above-band range is {1} (no prime power), so S has no n-sum term.

    At X = T/2π the below-band range is T/2πX = 1 < n <= 2 = T/πX, i.e. {2}: it is
    not empty; this is recorded as a known gap between the stated remark and the
    printed inequalities (see the acceptance suite).
    """
    for T in (1e3, 1e4, 12345.678):
        rng = asym.above_band_range(T / math.pi, T)
        assert asym.prime_power_terms(rng) == []
        assert list(asym.below_band_range(T / TWO_PI, T)) == [2]


def test_budget_shapes():
    T = 1e4
    L = math.log(T)
    b = dict(asym.error_budget_S(1.0, T).terms)
    assert max(b, key=b.get) == "sqrtT_log2"
    b = dict(asym.error_budget_S(T / TWO_PI, T).terms)
    assert b["resonance_2piX"] == pytest.approx(T * L, rel=1e-12)
    b = dict(asym.error_budget_S(T, T).terms)
    assert b["large_X"] == pytest.approx(math.e * math.sqrt(T) * L * L, rel=1e-12)


@settings(max_examples=200, deadline=None)
@given(st.floats(1, 1e5), st.floats(10, 1e6))
def test_budgets_positive_finite(X, T):
    b = asym.error_budget_S(X, T)
    assert math.isfinite(b.budget) and b.budget > 0
    assert all(v > 0 for _, v in b.terms)


def test_resonance_terms_decay_away_from_band():
    T = 1e4
    # at fixed T both resonance terms fall as X moves away from T/2π and T/π
    for key, edge in (("resonance_2piX", T / TWO_PI), ("resonance_piX", T / math.pi)):
        vals = [dict(asym.error_budget_S(edge + d, T).terms)[key] for d in (0, 10, 100, 1000)]
        assert all(a > b for a, b in zip(vals, vals[1:]))


def test_landau_gonek_examples():
    T = 1e4
    p = asym.predict_landau_gonek(4.0, T, 1)
    assert p.main == pytest.approx(-T / TWO_PI * math.log(2), rel=1e-14)
    p = asym.predict_landau_gonek(10.5, T, 1)
    assert p.main == 0
    assert p.notes["distance_to_prime_power"] == pytest.approx(0.5)
    assert dict(p.terms)["log_X_min"] == pytest.approx(math.log(10.5) * min(T, 10.5 / 0.5))
    p = asym.predict_landau_gonek(9.0, T, -1)
    assert p.main == pytest.approx(-T / TWO_PI * math.log(3) / 9, rel=1e-14)
    with pytest.raises(ValueError):
        asym.predict_landau_gonek(1.0, T)


def test_shanks():
    T = TWO_PI * math.e
    e = math.e
    want = e / 2 + (G0 - 1) * e + (1 - G0 - G0**2 - 3 * G1) * e
    assert asym.predict_shanks(T).main == pytest.approx(want, rel=1e-13)
    # frozen evaluation of the three-term formula at T = 10^4
    assert asym.predict_shanks(1e4).main.real == pytest.approx(38782.39834687104, rel=1e-13)
    ratios = [asym.predict_shanks(T).main.real / (T / (4 * math.pi) * math.log(T / TWO_PI) ** 2)
              for T in (1e4, 1e8, 1e16)]
    assert abs(ratios[2] - 1) < abs(ratios[1] - 1) < abs(ratios[0] - 1)
    p = asym.predict_shanks(1e4)
    assert p.alt_budget == pytest.approx(math.sqrt(1e4) * math.log(1e4) ** 3.25)


def test_deriv_sum():
    T = 1e4
    s = asym.predict_shanks(T).main.real
    d = asym.predict_deriv_sum(1, T).main.real
    assert d == pytest.approx(T / (4 * math.pi) * math.log(T / TWO_PI) ** 2)
    assert abs(s - d) < 0.5 * d
    assert asym.predict_deriv_sum(2, T).main.real < 0
    assert asym.predict_deriv_sum(3, TWO_PI * math.e).main.real == pytest.approx(math.e / 4)


def test_predict_J():
    T = 200.0
    r = 1.5 * T / TWO_PI
    p = asym.predict_J(1.0, r, T)
    assert abs(p.main) == pytest.approx(TWO_PI, rel=1e-14)
    assert p.main == pytest.approx(TWO_PI * complex(math.cos(TWO_PI * r), math.sin(TWO_PI * r)), rel=1e-12)
    assert abs(asym.predict_J(0.5, r, T).main) == pytest.approx(TWO_PI * math.sqrt(r), rel=1e-14)
    assert asym.predict_J(1.0, 0.9 * T / TWO_PI, T).main == 0
    assert asym.in_j_band(T / math.pi, T) and not asym.in_j_band(T / TWO_PI, T)


def test_corollary_integer():
    T = 1e4
    p = asym.predict_corollary_integer(1, T)
    assert dict(p.terms).keys() == {"unconditional_or_rh"}
    p = asym.predict_corollary_integer(2, T)
    assert p.main == pytest.approx(-1591.549430918953, rel=1e-12)
    assert dict(p.terms)["X_log_X"] == pytest.approx(2 * math.log(2))
    p = asym.predict_corollary_integer(50, T)
    assert dict(p.terms)["X_log_X"] == pytest.approx(195.6, abs=0.05)
    with pytest.raises(ValueError):
        asym.predict_corollary_integer(2.5, T)


@settings(max_examples=100, deadline=None)
@given(st.floats(2, 1e4), st.floats(100, 1e5))
def test_regime_partition_grid(X, T):
    assume(abs(X - T / TWO_PI) > 1e-6 and abs(X - T / math.pi) > 1e-6)
    r = asym.classify_regime(X, T)
    below = X <= T / TWO_PI
    inband = T / TWO_PI < X <= T / math.pi
    above = X > T / math.pi
    assert [below, inband, above].count(True) == 1
    assert (r is Regime.BelowBand) == below and (r is Regime.InBand) == inband


def test_ranges_match_literal_inequalities():
    rng = np.random.default_rng(11)
    for _ in range(200):
        T = rng.uniform(100, 1e5)
        X = rng.uniform(1, 2 * T)
        b = asym.below_band_range(X, T)
        assert all(T / (TWO_PI * X) < n <= T / (math.pi * X) for n in b)
        assert not (T / (TWO_PI * X) < b.start - 1 <= T / (math.pi * X)) or b.start == 1
        a = asym.above_band_range(X, T)
        assert all(math.pi * X / T <= n < TWO_PI * X / T for n in a)
