from fractions import Fraction

import numpy as np
import pytest
import sympy as sp
from hypothesis import given
from hypothesis import strategies as st

from primebounds import formula_lib as fl
from primebounds.interval import DomainError, HPInterval, Interval, hp_precision

Q = Fraction
P, U, X = fl.POLYS, fl.U, fl.X
x = sp.symbols("x")
R = sp.Rational


def _sym(poly: fl.Poly):
    deg = len(poly.coeffs) - 1
    return sum(R(c.numerator, c.denominator) * x ** (deg - k) for k, c in enumerate(poly.coeffs))


# retyped from the definitions, independent of formula_lib
SP = {
    "P8": 3 * x**2 - 6 * x + R("5.2"),
    "P9": x**3 - 6 * x**2 + R("11.4") * x - R("4.2"),
    "P10": 2 * x**3 - R("7.2") * x**2 + R("8.4") * x - R("4.41"),
    "P11": x**3 - R("4.2") * x**2 + R("4.41") * x,
    "P12": R("9.3") * x**2 - R("12.3") * x + R("11.5"),
}
SU = x**2 - x + 1


# ----------------------------------------------------------- exact identities
def test_p12_is_p8_plus_shift():
    assert P["P12"] == P["P8"] + Q("6.3") * U


def test_step1_quadratic_decomposition():
    assert fl.Poly("8.7", -38, "10.7") == P["P1"] + Q("5.7") * U - Q("26.3") * X


def test_s_constants_exact():
    assert fl.C.S2 == Q("2.7149")
    assert fl.C.S1 == Q("4.477")


@pytest.mark.parametrize("pid", list(SP))
def test_retyped_p_polys_match(pid):
    assert sp.expand(_sym(P[pid]) - SP[pid]) == 0


@pytest.mark.parametrize(
    "qid, combo",
    [
        ("Q7", SU * SP["P12"] + SU * SP["P8"] - R("3.15") * SP["P9"] - SP["P10"] + R("12.85") * SP["P8"]),
        ("Q8", R("3.15") * SP["P10"] + R("12.85") * SP["P9"]),
        ("Q9", 2 * SU * SP["P9"] - SP["P8"] * SP["P12"]),
    ],
)
def test_q7_q9_expansions_against_sympy(qid, combo):
    assert sp.expand(_sym(P[qid]) - combo) == 0


def test_factored_forms():
    assert sp.expand(_sym(P["P11"]) - x * (x - R("2.1")) ** 2) == 0
    assert sp.expand(_sym(P["P10"]) - 2 * (x - R("2.1")) * (x**2 - R("1.5") * x + R("1.05"))) == 0


@given(st.lists(st.fractions(max_denominator=50), min_size=1, max_size=6),
       st.lists(st.fractions(max_denominator=50), min_size=1, max_size=6),
       st.fractions(max_denominator=20))
def test_poly_ring_operations_evaluate_pointwise(a, b, t):
    pa, pb = fl.Poly(*a), fl.Poly(*b)
    assert (pa * pb)(t) == pa(t) * pb(t)
    assert (pa + pb)(t) == pa(t) + pb(t)
    assert (pa - pb)(t) == pa(t) - pb(t)


# ------------------------------------------------------- paper numeric values
@pytest.mark.parametrize(
    "fid, at, value, tol",
    [
        ("f1", "3.05", 131.27, 0.01),
        ("f2", "3.05", 16.7973, 1e-4),
        ("f3", "3.05", 0.04452, 1e-5),
        ("f4", "3.05", 0.81218, 1e-5),
        ("f5", "3.05", 0.06093, 1e-5),
        ("f6", "3.5", 4.35411, 1e-5),
        ("f7", "3.05", 6.82101, 1e-5),
        ("f8", "3.05", 0.14858, 1e-5),
        ("f9", "3.05", 7.11796, 1e-5),
        ("f10", "3.05", 6142.278, 1e-3),
    ],
)
def test_helper_values_at_left_endpoint(fid, at, value, tol):
    v = fl.eval_univariate(fid, Interval.enclose(at))
    assert abs(float(v.mid) - value) <= tol


def test_phi_rejects_nonpositive_inner_argument():
    with pytest.raises(DomainError):
        fl.phi(Interval(0.1))
    assert float(fl.phi(Interval(1.0)).lo) > 0


# ------------------------------------------------------ point identities (HP)
def _b1_display(y, w):
    return (
        Q("11.5")
        - (2 * w**3 - 18 * w**2 + Q("63.071778") * w - Q("97.1")) / (3 * y)
        + (w**4 - 12 * w**3 + Q("46.6") * w**2 - 112 * w + 40) / (2 * y**2)
        + (2 * w**4 - Q("21.3") * w**3 + Q("40.3") * w**2 - Q("41.5") * w + 12) / y**3
        + (9 * w**4 - 56 * w**3 + 129 * w**2 - 132 * w + 52) / (3 * y**4)
        + (2 * w**4 - 14 * w**3 + 36 * w**2 - 40 * w + 16) / y**5
    )


def _g_display(y, w):
    return (
        -(2 * w**3 - 18 * w**2 + Q("64.2") * w - Q("98.9")) / (3 * y)
        + (w**4 - 12 * w**3 + Q("63.16") * w**2 - Q("203.17") * w + Q("258.29")) / (2 * y**2)
        - (2 * w**5 - 10 * w**4 + 30 * w**3 - 70 * w**2 + 90 * w - Q("1554.24")) / (5 * y**3)
        - (8 * w**3 - Q("2137.44") * w**2 + Q("2185.45") * w - Q("37836.25")) / (12 * y**4)
    )


def _close(a, b, rel=1e-40):
    d = a - b
    scale = max(abs(float(b.hi)), 1.0)
    return float(max(abs(d.lo), abs(d.hi))) <= rel * scale


ns = st.integers(min_value=30, max_value=10**30)


@given(ns)
def test_b1_step1_matches_display(n):
    with hp_precision(200):
        pt = fl.HPPoint(n, n)
        assert _close(fl.b1(pt, a1="lower-step1"), _b1_display(pt.y, pt.w))


@given(ns)
def test_alpha_diagonal_identity(n):
    with hp_precision(200):
        pt = fl.HPPoint(n, n)
        lhs = fl.alpha(pt.w, pt.w)
        rhs = 6 * (Q("11.589") - fl.b1(pt, a1="lower-step1")) * pt.y**5
        assert _close(lhs, rhs, rel=1e-35)


@given(ns)
def test_g1_diagonal_identity(n):
    with hp_precision(200):
        pt = fl.HPPoint(n, n)
        lhs = fl.g1(pt.w, pt.w) / (60 * pt.y**4) - Q("0.059")
        assert _close(lhs, _g_display(pt.y, pt.w), rel=1e-35)


@given(st.integers(min_value=688_383, max_value=10**30))
def test_b0_dominates_shifted_g(n):
    with hp_precision(200):
        pt = fl.HPPoint(n, n)
        diff = fl.b0(pt, a0="upper-step1") - (Q("10.7") + _g_display(pt.y, pt.w))
        assert float(diff.hi) >= -1e-40


def test_cipolla_orders_converge_to_pn():
    # p_{10^6} = 15485863
    errs = [abs(float(fl.cipolla_estimate(10**6, k).mid) - 15_485_863) for k in (0, 1, 2)]
    assert errs[2] < errs[0]


def test_registry_json_lists_every_function():
    import json

    rows = json.loads(fl.registry_json())
    assert {r["id"] for r in rows} == set(fl.FUNCTIONS)
    assert all({"id", "arity", "domain", "paper_ref"} <= set(r) for r in rows)


def test_vector_and_hp_paths_agree_on_points():
    from primebounds.prime_engine import PointBatch

    n = np.array([10**5, 10**7, 10**9], dtype=np.int64)
    p = np.array([1_299_709, 179_424_673, 22_801_763_489], dtype=np.int64)
    batch = PointBatch(n, p)
    for fid in ("F0", "F1", "H1", "H6", "b0", "b1"):
        enc = fl.FUNCTIONS[fid].fn(batch)
        with hp_precision(200):
            for k in range(3):
                hp = fl.FUNCTIONS[fid].fn(fl.HPPoint(int(n[k]), int(p[k])))
                mid = (hp.lo + hp.hi) / 2
                assert enc.lo[k] <= mid <= enc.hi[k], fid
