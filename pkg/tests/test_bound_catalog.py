import json
import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from primebounds import bound_catalog as bc
from primebounds.interval import Interval

PRIMES_SMALL = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29]


def test_registry_ids_unique_and_complete():
    ids = [b.id for b in bc.registry()]
    assert len(ids) == len(set(ids)) == 22
    for must in ("thm-1.1-upper", "thm-1.2-lower", "corollary-unconditional-1.12", "rosser-lower"):
        assert must in ids


def test_eval_eq_1_6_at_4():
    v = bc.eval_bound("eq-1.6-upper", 4)
    ref = 4 * (math.log(4) + 2 * math.log(math.log(4)))
    assert v.lo <= ref <= v.hi
    assert abs(float(v.mid) - 8.1583) < 1e-3


def test_rosser_at_one():
    out = bc.check_bound("rosser-lower", bc.make_point(1, 2))
    assert out.verdict == bc.HOLDS and out.margin.contains(2.0)


def test_eq_1_4_fails_at_5():
    assert bc.check_bound("eq-1.4-upper", bc.make_point(5, 11)).verdict == bc.FAILS


def test_thm_1_2_holds_at_2():
    assert bc.check_bound("thm-1.2-lower", bc.make_point(2, 3)).verdict == bc.HOLDS


def test_argument_errors():
    with pytest.raises(KeyError):
        bc.get("no-such-bound")
    with pytest.raises(ValueError):
        bc.eval_bound("eq-2.12-upper", 10)
    with pytest.raises(ValueError):
        bc.eval_bound("eq-1.5-lower", 1)


def test_classify_strict_vs_nonstrict_at_zero():
    m = Interval(np.array([0.0, -1.0, 1.0, -1.0]), np.array([0.0, 1.0, 2.0, -0.5]))
    assert bc.classify(m, strict=True).tolist() == [0, -1, 1, 0]
    assert bc.classify(m, strict=False).tolist() == [1, -1, 1, 0]


def test_nan_margin_is_indeterminate():
    m = Interval(np.array([np.nan]), np.array([1.0]))
    assert bc.classify(m, strict=True).tolist() == [-1]


@given(st.integers(2, 10**12))
def test_upper_bounds_ordered_by_constant(n):
    # larger subtracted constant gives a smaller right-hand side
    a = bc.eval_bound("eq-1.9-upper", n)
    b = bc.eval_bound("eq-1.10-upper", n)
    assert b.hi <= a.hi


@given(st.integers(3, 10**12))
def test_conditional_remark_between_theorem_constants(n):
    # n(... - (w^2-6w+c)/2y^2) decreases in c: 10.667 < 11 < 11.508
    up = bc.eval_bound("thm-1.1-upper", n)
    mid = bc.eval_bound("remark-3.16-lower", n)
    lo = bc.eval_bound("thm-1.2-lower", n)
    assert lo.lo <= mid.hi and mid.lo <= up.hi


def test_theta_bound_needs_theta():
    with pytest.raises(ValueError):
        bc.check_bound("theta-lower-11.808", bc.make_point(10, 29))


def test_json_metadata():
    rows = json.loads(bc.bounds_json())
    remark = next(r for r in rows if r["id"] == "remark-3.16-lower")
    assert remark["conditional"] and remark["threshold"] is None
    assert remark["metadata"]["r3_lower"] == "3.9e30"
