import math
from fractions import Fraction

import mpmath
import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from primebounds.interval import DomainError, HPInterval, Interval, Jet, exp, hp_precision, log

finite = st.floats(min_value=-1e6, max_value=1e6, allow_nan=False)
positive = st.floats(min_value=1e-6, max_value=1e6, allow_nan=False)


def _exact(x: float) -> Fraction:
    return Fraction(x)


def _inside(iv: Interval, value: Fraction) -> bool:
    return Fraction(float(iv.lo)) <= value <= Fraction(float(iv.hi))


@given(finite, finite)
def test_add_sub_mul_enclose_exact_result(a, b):
    A, B = Interval(a), Interval(b)
    fa, fb = _exact(a), _exact(b)
    assert _inside(A + B, fa + fb)
    assert _inside(A - B, fa - fb)
    assert _inside(A * B, fa * fb)


@given(finite, positive)
def test_division_encloses_exact_quotient(a, b):
    assert _inside(Interval(a) / Interval(b), _exact(a) / _exact(b))


@given(st.floats(min_value=-700, max_value=700))
def test_exp_contains_mpmath(x):
    e = exp(Interval(x))
    with mpmath.workdps(40):
        ref = mpmath.exp(mpmath.mpf(x))
        assert mpmath.mpf(float(e.lo)) <= ref <= mpmath.mpf(float(e.hi))


@given(positive)
def test_log_contains_mpmath(x):
    v = log(Interval(x))
    with mpmath.workdps(40):
        ref = mpmath.log(mpmath.mpf(x))
        assert mpmath.mpf(float(v.lo)) <= ref <= mpmath.mpf(float(v.hi))


@given(st.lists(finite, min_size=2, max_size=2), st.lists(finite, min_size=2, max_size=2))
def test_mul_is_inclusion_monotone(xs, ys):
    x0, x1 = sorted(xs)
    y0, y1 = sorted(ys)
    big = Interval(x0, x1) * Interval(y0, y1)
    for x in (x0, x1, 0.5 * (x0 + x1)):
        for y in (y0, y1):
            small = Interval(x) * Interval(y)
            assert big.lo <= small.lo and small.hi <= big.hi


@pytest.mark.parametrize("text", ["0.1", "10.667", "3428.7225", "1/3"])
def test_enclose_decimal_constants(text):
    iv = Interval.enclose(text)
    q = Fraction(text)
    assert _inside(iv, q)
    assert float(iv.hi) <= np.nextafter(float(iv.lo), np.inf)


def test_vectorized_matches_scalar():
    xs = np.linspace(0.5, 40, 257)
    v = log(exp(Interval(xs)) + 1)
    for k in (0, 100, 256):
        s = log(exp(Interval(xs[k])) + 1)
        assert v.lo[k] == s.lo and v.hi[k] == s.hi


def test_log_of_nonpositive_is_flagged():
    v = log(Interval(-1.0, 2.0))
    assert v.lo == -np.inf
    with np.errstate(invalid="ignore"):
        assert np.isnan(log(Interval(-2.0, -1.0)).hi)


def test_integer_power_matches_repeated_product():
    x = Interval(-1.5, 2.0)
    sq = x**2
    assert sq.lo == 0.0 and sq.hi >= 4.0


def test_jet_derivative_of_exp_times_x():
    x = Jet.variable(Interval(2.0))
    f = x * exp(x)
    assert f.d.lo <= 3 * math.exp(2) <= f.d.hi
    assert f.v.lo <= 2 * math.exp(2) <= f.v.hi


def test_hp_interval_precision_and_domain():
    with hp_precision(200):
        v = log(HPInterval(10)) / 3
        assert float(v.hi - v.lo) < 1e-55
        with pytest.raises(DomainError):
            log(HPInterval(Interval(-1.0, 1.0)))


def test_hp_accepts_fractions_exactly():
    with hp_precision(106):
        v = HPInterval(Fraction(1, 3)) * 3
        assert v.lo <= 1 <= v.hi
