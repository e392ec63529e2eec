"""Quick identity and oracle checks behind ``primebounds selftest``.

Runs in well under five minutes on one core with the default configuration.
"""
from __future__ import annotations

import time
from fractions import Fraction

import numpy as np

from . import formula_lib as fl
from . import grid_verifier as gv
from . import oracles
from . import range_verifier as rv
from .prime_engine import PrimeEngine

Q = Fraction


def _identities():
    P, U, X = fl.POLYS, fl.U, fl.X
    assert P["P12"] == P["P8"] + Q("6.3") * U
    assert fl.Poly("8.7", -38, "10.7") == P["P1"] + Q("5.7") * U - Q("26.3") * X
    assert fl.C.S2 == Q("2.7149")
    assert fl.C.S1 == Q("4.477")
    assert P["Q7"] == U * P["P12"] + U * P["P8"] - Q("3.15") * P["P9"] - P["P10"] + Q("12.85") * P["P8"]
    assert P["Q8"] == Q("3.15") * P["P10"] + Q("12.85") * P["P9"]
    assert P["Q9"] == 2 * U * P["P9"] - P["P8"] * P["P12"]


def _sieve():
    eng = PrimeEngine()
    ref = oracles.primes_below(16 * 10**6)
    assert np.array_equal(eng.sieve_range(0, 16 * 10**6), ref)
    assert eng.sieve_range(10, 30).tolist() == oracles.trial_division_primes(10, 30)
    assert eng.nth_prime(10**6) == 15_485_863 == int(ref[10**6 - 1])
    assert eng.prime_count(10**7) == 664_579


def _theta():
    eng = PrimeEngine()
    ref = oracles.primes_below(10**4)
    th = None
    for b in eng.iter_batches(len(ref), len(ref), theta=True):
        th = b.theta[0]
    exact = oracles.mp_theta(ref)
    assert float(th.lo) <= exact <= float(th.hi)


def _thresholds():
    want = {"eq-1.4-upper": 6, "eq-1.6-upper": 4, "eq-1.7-upper": 20, "corollary-unconditional-1.12": 3468,
            "theta-upper-10.367": 2581, "H6": 5}
    res = rv.find_min_thresholds(list(want), 10**5)
    for sid, n in want.items():
        assert res[sid].threshold == n, (sid, res[sid].threshold)


def _grids():
    assert gv.run_grid(gv.paper_grid("r")).certified
    assert gv.tail_scan("f2", Q("3.05"), 30).certified


def _containment():
    for fid in fl.FUNCTIONS:
        assert not oracles.containment_failures(fid, 500), fid


CHECKS = [
    ("exact polynomial identities", _identities),
    ("sieve against bytearray and trial-division oracles", _sieve),
    ("theta enclosure against 50-digit sum", _theta),
    ("small thresholds at horizon 1e5", _thresholds),
    ("r grid and f2 tail scan", _grids),
    ("interval containment (500 samples per function)", _containment),
]


def run(verbose: bool = True) -> bool:
    ok = True
    for name, fn in CHECKS:
        t0 = time.perf_counter()
        try:
            fn()
            status = "ok"
        except Exception as e:  # report every failing check, keep going
            ok = False
            status = f"FAIL {type(e).__name__}: {e}"
        if verbose:
            print(f"{status:4s}  {name}  ({time.perf_counter() - t0:.1f}s)")
    return ok
