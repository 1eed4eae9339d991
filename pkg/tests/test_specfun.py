import math

import mpmath as mp
import numpy as np
import pytest
import sympy
from hypothesis import given, settings, strategies as st

from fvmotion.mcharness import aux_stream, mean_report
from fvmotion.specfun import (
    STIRLING_MAX,
    SpecialFunctionError,
    bessel_i,
    bessel_ie,
    gen_binomial,
    hyp1f1,
    hyp1f1_scaled,
    i1_over_x_scaled,
    stirling2,
)

mp.mp.dps = 60


# --- Stirling numbers -------------------------------------------------------

@pytest.mark.parametrize("k, j, expected", [(3, 3, 1), (5, 0, 0), (4, 2, 7), (0, 0, 1), (6, 7, 0)])
def test_stirling2_examples(k, j, expected):
    assert stirling2(k, j) == expected


def test_stirling2_recursion_full_window():
    for k in range(2, STIRLING_MAX + 1):
        for j in range(1, k):
            assert stirling2(k, j) == j * stirling2(k - 1, j) + stirling2(k - 1, j - 1)


def test_stirling2_matches_sympy():
    from sympy.functions.combinatorial.numbers import stirling
    for k in (10, 33, 64):
        for j in (1, 2, k // 2, k - 1, k):
            assert stirling2(k, j) == int(stirling(k, j))


def test_stirling2_is_exact_integer():
    v = stirling2(64, 20)
    assert isinstance(v, int) and v > 2**63


def test_stirling2_range_error():
    with pytest.raises(SpecialFunctionError):
        stirling2(65, 3)
    with pytest.raises(SpecialFunctionError):
        stirling2(-1, 0)


# --- generalized binomial ---------------------------------------------------

@pytest.mark.parametrize("a, j, expected", [(1, 0, 1.0), (1, 2, 1.0), (2.5, 1, -2.5)])
def test_gen_binomial_examples(a, j, expected):
    assert gen_binomial(a, j) == pytest.approx(expected, rel=1e-15)


@given(st.floats(0.01, 20), st.integers(0, 30))
def test_gen_binomial_matches_sympy(a, j):
    ref = float(sympy.binomial(-sympy.Rational(a), j))
    assert gen_binomial(a, j) == pytest.approx(ref, rel=1e-12, abs=1e-300)


# --- Bessel -----------------------------------------------------------------

def test_bessel_examples():
    assert bessel_i(0, 0.0) == 1.0
    assert bessel_i(0.5, 1.0) == pytest.approx(math.sqrt(2 / math.pi) * math.sinh(1.0), rel=1e-15)
    oracle = float(mp.besseli(1.5, 2))
    rec = bessel_i(-0.5, 2.0) - bessel_i(0.5, 2.0) / 2.0
    assert bessel_i(1.5, 2.0) == pytest.approx(oracle, rel=1e-14)
    assert rec == pytest.approx(oracle, rel=1e-14)


@pytest.mark.parametrize("nu", [-0.5, 0, 0.5, 1, 1.5, 2, 5, 10.5, 20, 30.5])
@pytest.mark.parametrize("x", [1e-3, 0.1, 1.0, 7.3, 39.9, 40.1, 100.0, 700.0])
def test_bessel_against_mpmath(nu, x):
    ref = mp.besseli(nu, x) * mp.e ** (-x)
    assert bessel_ie(nu, x) == pytest.approx(float(ref), rel=1e-12, abs=1e-300)


@given(st.integers(0, 40), st.floats(0.1, 50))
@settings(max_examples=200)
def test_bessel_three_term_recurrence(twice_nu, x):
    nu = twice_nu / 2 + 0.5  # nu >= 1/2 so nu - 1 >= -1/2
    lhs = bessel_ie(nu - 1, x) - bessel_ie(nu + 1, x)
    rhs = 2 * nu / x * bessel_ie(nu, x)
    assert lhs == pytest.approx(rhs, rel=1e-12, abs=1e-290)


def test_bessel_vectorized_and_errors():
    x = np.array([0.0, 0.5, 80.0])
    out = bessel_ie(1, x)
    assert out.shape == (3,) and out[0] == 0.0
    with pytest.raises(SpecialFunctionError):
        bessel_i(0, -1.0)
    with pytest.raises(SpecialFunctionError):
        bessel_i(-0.5, 0.0)
    with pytest.raises(SpecialFunctionError):
        bessel_i(0.25, 1.0)


def test_i1_over_x_continuous_at_zero():
    assert i1_over_x_scaled(0.0) == 0.5
    for x in (1e-8, 9.99e-4, 1.001e-3, 0.3):
        ref = mp.besseli(1, x) / x * mp.e ** (-x)
        assert i1_over_x_scaled(x) == pytest.approx(float(ref), rel=1e-13)


# --- Kummer -----------------------------------------------------------------

def test_hyp1f1_examples():
    assert hyp1f1(0, 5, 3.0) == 1.0
    assert hyp1f1(2, 4, 0.0) == 1.0
    assert hyp1f1(1, 2, 1.0) == pytest.approx(math.e - 1, rel=1e-15)


@given(st.integers(1, 30), st.integers(0, 29), st.floats(0.0, 300.0))
@settings(max_examples=150)
def test_hyp1f1_against_mpmath(b, j, z):
    j = j % b
    ref = mp.hyp1f1(j, b, z) * mp.e ** (-z)
    assert hyp1f1_scaled(j, b, z) == pytest.approx(float(ref), rel=1e-12, abs=1e-300)


def test_hyp1f1_large_argument_does_not_underflow():
    ref = mp.hyp1f1(3, 11, 2000) * mp.e ** (-2000)
    assert hyp1f1_scaled(3, 11, 2000.0) == pytest.approx(float(ref), rel=1e-11)


def test_hyp1f1_parameter_error():
    with pytest.raises(SpecialFunctionError):
        hyp1f1(3, 3, 1.0)
    with pytest.raises(SpecialFunctionError):
        hyp1f1(1, 2, -1.0)


@pytest.mark.parametrize("j, b, z", [(1, 3, 2.0), (2, 5, 1.5), (4, 5, 3.0)])
def test_hyp1f1_beta_order_statistics(j, b, z):
    # the j-th order statistic of b - 1 uniforms is Beta(j, b - j)
    rng = aux_stream(11, j, b)
    u = np.sort(rng.random((200_000, b - 1)), axis=1)[:, j - 1]
    rep = mean_report(np.exp(z * u), target=hyp1f1(j, b, z), k=4)
    assert rep.verdict == "pass", rep


def test_pure_functions():
    assert bessel_ie(2.5, 3.3) == bessel_ie(2.5, 3.3)
    assert hyp1f1(2, 7, 4.4) == hyp1f1(2, 7, 4.4)
