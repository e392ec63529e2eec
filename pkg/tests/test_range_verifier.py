import json

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from primebounds import range_verifier as rv
from primebounds.prime_engine import PrimeEngine

ENG = PrimeEngine(ceiling=2 * 10**7)


@pytest.fixture(scope="module")
def small_pass():
    return rv.verify_many(rv.all_subject_ids(), 2, 10**5, ENG)


def test_every_subject_scans(small_pass):
    assert set(small_pass) == set(rv.all_subject_ids())
    for r in small_pass.values():
        assert r.count_checked > 0
        assert not r.unresolved


@pytest.mark.parametrize(
    "sid, last",
    [("eq-1.4-upper", 5), ("eq-1.6-upper", 3), ("eq-1.7-upper", 19), ("corollary-unconditional-1.12", 3467),
     ("theta-upper-10.367", 2580), ("kor-2.6", 70), ("H6", 4), ("lemma-3.1", 5), ("lemma-3.2", 16),
     ("eq-1.9-upper", 27075), ("dusart-theta-upper-0.782", 780)],
)
def test_last_violation_below_1e5(small_pass, sid, last):
    assert small_pass[sid].last_violation == last


@pytest.mark.parametrize("sid", ["eq-1.5-lower", "eq-1.8-lower", "thm-1.2-lower", "theta-lower-11.808",
                                 "prop-3.3", "kor-3.4", "kor-3.5", "lemma-5.4", "ineq-2.6"])
def test_clean_below_1e5(small_pass, sid):
    assert small_pass[sid].clean


def test_multi_subject_pass_equals_single_subject():
    many = rv.verify_many(["eq-1.7-upper", "kor-2.6"], 2, 20_000, ENG)
    one = rv.verify_range("kor-2.6", 2, 20_000, ENG)
    assert many["kor-2.6"].violations == one.violations


def test_parallel_equals_serial():
    par = rv.verify_range("eq-1.9-upper", 2, 200_000, PrimeEngine(ceiling=10**7, workers=3, segment_bytes=4096))
    ser = rv.verify_range("eq-1.9-upper", 2, 200_000, ENG)
    assert par.violations == ser.violations and par.count_checked == ser.count_checked


@given(st.integers(2, 5000), st.integers(0, 3000))
@settings(max_examples=25)
def test_threshold_is_consistent_with_report(lo, span):
    r = rv.verify_range("eq-1.7-upper", lo, lo + span, ENG)
    t = rv.threshold_from_report(r)
    assert all(v[0] < t.threshold for v in r.violations)
    assert r.count_checked == span + 1


def test_report_serialization_round_trip():
    r = rv.verify_range("eq-1.4-upper", 2, 100, ENG)
    d = json.loads(r.to_json())
    assert d["subject"] == "eq-1.4-upper" and d["violation_count"] == len(d["violations"])
    assert r.to_csv().splitlines()[0].startswith("subject,")
    assert r.exit_code == rv.EXIT_VIOLATIONS


def test_escalation_resolves_boundary_equality():
    code, bits = rv.escalate(rv.subject("eq-1.6-upper"), 4, 7)
    assert code == 1 and bits in rv.ESCALATION_BITS


def test_without_escalation_clean_ranges_stay_clean():
    r = rv.verify_range("thm-1.2-lower", 2, 1000, ENG, escalation=False)
    assert r.clean


def test_theta_envelope_statistics():
    r = rv.verify_theta("theta-lower-11.808", 2, 50_000, ENG)
    env = r.extra["theta_envelope"]
    # the 0.15 envelope is only claimed further out; here it is just recorded
    assert env["max_ratio"] > 0 and 2 <= env["at_n"] <= 50_000
    assert env["exceed_0.15"] >= 0


def test_unknown_subject():
    with pytest.raises(KeyError):
        rv.subject("nope")


def test_cap_limits_stored_violations():
    r = rv.verify_range("eq-1.10-upper", 2, 50_000, ENG, cap=10)
    assert len(r.violations) == 10 and r.violation_count > 10
