from __future__ import annotations

import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from zetachi import asymptotics as asym
from zetachi import special as sp
from zetachi import zerosums as zs
from zetachi.zeros import find_zeros

TABLE = find_zeros(1000.0)
G0 = 0.577215664901532860606512090082


def test_empty_window():
    w = TABLE.window(15, 20)
    assert len(w) == 0
    assert zs.sum_chi_x_rho(w, 3.0) == 0
    assert zs.sum_zeta_deriv(w, 1) == 0


def test_single_zero_terms():
    w = TABLE.window(14, 15)
    g = TABLE.ordinates[0]
    s = complex(0.5, g)
    v = zs.sum_chi_x_rho(w, 1.0)
    assert abs(v) == pytest.approx(1.0, abs=1e-14)
    assert v == pytest.approx(complex(sp.chi(s)), abs=1e-13)
    want = complex(sp.chi(s)) * 3**s * math.log(g / (2 * math.pi)) ** 2
    assert zs.sum_chi_weighted(w, 3, 2) == pytest.approx(want, rel=1e-12)


@pytest.mark.parametrize("X", [1.0, 2.0, 5.5, 137.25])
def test_fast_and_precise_routes_agree(X):
    w = TABLE.window(0, 400)
    fast = zs.sum_chi_x_rho(w, X)
    slow = zs.sum_chi_x_rho(w, X, precise=True)
    assert abs(fast - slow) <= 1e-10 * math.sqrt(X) * len(w)


def test_precise_routes_other_sums():
    w = TABLE.window(200, 300)
    for sign in (1, -1):
        assert zs.sum_x_rho(w, 7.0, sign) == pytest.approx(zs.sum_x_rho(w, 7.0, sign, precise=True), abs=1e-10)
    for nu in (1, 2, 3):
        fast = zs.sum_zeta_deriv(w, nu)
        assert abs(fast - zs.sum_zeta_deriv(w, nu, precise=True)) <= 1e-12 * len(w) * abs(fast)
    assert zs.sum_chi_weighted(w, 2, 1) == pytest.approx(zs.sum_chi_weighted(w, 2, 1, precise=True), abs=1e-10)


@settings(max_examples=30, deadline=None)
@given(st.floats(20, 500), st.floats(1, 1000))
def test_additivity(T, X):
    a = zs.sum_chi_x_rho(TABLE.window(0, T), X)
    b = zs.sum_chi_x_rho(TABLE.window(T, 2 * T), X)
    c = zs.sum_chi_x_rho(TABLE.window(0, 2 * T), X)
    n = len(TABLE.window(0, 2 * T))
    assert abs(a + b - c) <= 1e-10 * max(n, 1) * math.sqrt(X)


@settings(max_examples=30, deadline=None)
@given(st.floats(1.01, 1e4))
def test_conjugate_pairs_sum_to_real(X):
    w = TABLE.window(0, 1000)
    up = zs.sum_x_rho(w, X, 1)
    # X^{ρ̄} = conj(X^ρ) for real X on the critical line
    down = zs.fsum_complex(np.conj(X ** (0.5 + 1j * w.gammas)))
    assert abs((up + down).imag) <= 1e-9 * len(w) * math.sqrt(X)


@settings(max_examples=30, deadline=None)
@given(st.floats(1, 1e5))
def test_scale_bound(X):
    w = TABLE.window(0, 1000)
    terms = zs.chi_x_terms(w.gammas, X)
    assert np.allclose(np.abs(terms), math.sqrt(X), rtol=1e-12)
    assert abs(zs.sum_chi_x_rho(w, X)) <= math.sqrt(X) * len(w)


def test_parallel_matches_serial(desk_table):
    w = desk_table.window(0, 20000)
    serial = zs.sum_chi_x_rho(w, 2000.0)
    par = zs.sum_chi_x_rho(w, 2000.0, workers=4)
    assert par == serial


def test_cumulative_matches_prefix_sums():
    w = TABLE.window(0, 1000)
    run = zs.cumulative_chi_x_rho(w, 200.0)
    for k in (1, 10, 300, len(w)):
        assert run[k - 1] == pytest.approx(zs.sum_chi_x_rho(TABLE.window(0, w.gammas[k - 1]), 200.0), abs=1e-10)


def test_weighted_reduces_to_plain():
    w = TABLE.window(0, 1000)
    assert zs.sum_chi_weighted(w, 1, 0) == pytest.approx(zs.sum_chi_x_rho(w, 1.0), abs=1e-12)


def test_sum_spec_dispatch():
    w = TABLE.window(0, 500)
    assert zs.SumSpec(zs.SumKind.ChiXRho, w, X=2.0).evaluate() == zs.sum_chi_x_rho(w, 2.0)
    assert zs.SumSpec(zs.SumKind.XNegRho, w, X=2.0).evaluate() == zs.sum_x_rho(w, 2.0, -1)
    assert zs.SumSpec(zs.SumKind.ZetaDeriv, w, nu=2).evaluate() == zs.sum_zeta_deriv(w, 2)


def test_guards():
    w = TABLE.window(0, 100)
    with pytest.raises(ValueError):
        zs.sum_chi_x_rho(w, 0.5)
    with pytest.raises(ValueError):
        zs.sum_x_rho(w, 2.0, 0)
    with pytest.raises(ValueError):
        zs.sum_zeta_deriv(w, 0)


# --- main terms from the theory, checked against their envelopes -----------

def test_corollary_x1_main_term():
    v = zs.sum_chi_x_rho(TABLE.window(0, 1000), 1.0)
    pred = asym.predict_X1(1000.0)
    assert abs(v.real + 1000 / (2 * math.pi)) <= pred.budget


@pytest.mark.parametrize("X,sign,main", [
    (3.0, 1, -1e4 / (2 * math.pi) * math.log(3)),
    (6.0, 1, 0.0),
    (2.0, -1, -1e4 / (2 * math.pi) * math.log(2) / 2),
])
def test_landau_gonek_main_terms(desk_table, X, sign, main):
    v = zs.sum_x_rho(desk_table.window(0, 1e4), X, sign)
    budget = asym.predict_landau_gonek(X, 1e4, sign).budget
    assert abs(v - main) <= budget


def test_shanks_main_term(desk_table):
    v = zs.sum_zeta_deriv(desk_table.window(0, 1e4), 1)
    pred = asym.predict_shanks(1e4)
    assert abs(v.real - pred.main.real) <= pred.budget


def test_second_derivative_sign(desk_table):
    assert zs.sum_zeta_deriv(desk_table.window(0, 1e4), 2).real < 0


def test_weighted_main_term(desk_table):
    T = 1e4
    u = T / (2 * math.pi)
    v = zs.sum_chi_weighted(desk_table.window(0, T), 1, 1)
    L = math.log(T)
    assert abs(v - (-u * math.log(u) + u)) <= math.sqrt(T) * L**3
