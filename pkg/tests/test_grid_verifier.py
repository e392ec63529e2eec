from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from primebounds import formula_lib as fl
from primebounds import grid_verifier as gv
from primebounds.interval import Interval


def test_paper_grid_parameters():
    by_id = {g.id: g for g in gv.PAPER_GRIDS}
    assert by_id["g1"].cells == 700_000 and by_id["g1"].x_end == 7
    assert by_id["h1"].cells == 8_000_000 and by_id["h1"].x_end == 8
    for gid in ("alpha", "beta", "gamma"):
        assert by_id[gid].x_start == Fraction("3.05") and by_id[gid].x_end == 7
    assert by_id["r"].x_start == Fraction("0.7") and by_id["r"].cells == 2800


def test_cell_edges_enclose_exact_rationals():
    spec = gv.paper_grid("alpha")
    a, b = gv._cell_edges(spec, 0, 1000)
    for i in (0, 1, 999):
        exact_a = spec.x_start + i * spec.step
        exact_b = exact_a + spec.step
        assert Fraction(float(a[i])) <= exact_a and Fraction(float(b[i])) >= exact_b
    # neighbouring cells overlap, so no point is skipped
    assert np.all(a[1:] <= b[:-1])


@pytest.mark.parametrize("gid", [g.id for g in gv.PAPER_GRIDS])
def test_bracket_property_spot_check(gid):
    assert gv.bracket_spot_test(gv.paper_grid(gid), samples=2000) == []


def test_r_grid_certifies():
    rep = gv.run_grid(gv.paper_grid("r"))
    assert rep.certified and rep.cells_checked == 2800
    assert rep.min_lower_bound[1] > 0.38


def test_coarse_g1_needs_refinement():
    coarse = gv.GridSpec("g1-coarse", "g1", 0, Fraction(1, 100), 700)
    flat = gv.run_grid(coarse, max_depth=0)
    assert not flat.certified and flat.exit_code == 2
    deep = gv.run_grid(coarse, max_depth=8)
    assert deep.certified and deep.refined > 0


def test_false_claim_is_not_certified():
    # r(x, x) is about 1.66 at 0.7 and 4.35 at 3.5 but above 10 in between
    fl.FUNCTIONS["_r_shifted"] = fl.FnInfo("_r_shifted", "bivariate", lambda x, t: fl.r(x, t) - 5, (0.7, 30))
    try:
        rep = gv.run_grid(gv.GridSpec("bad", "_r_shifted", Fraction("0.7"), Fraction(1, 1000), 2800))
        assert not rep.certified
        bad = {c for c, _, _ in rep.failures}
        assert 0 in bad and 2799 in bad
        assert not bad & set(range(800, 2300))
    finally:
        del fl.FUNCTIONS["_r_shifted"]


def test_workers_and_chunking_do_not_change_result():
    spec = gv.GridSpec("alpha-part", "alpha", Fraction("3.05"), Fraction(1, 10**5), 30_000)
    a = gv.run_grid(spec, workers=1, chunk=30_000)
    b = gv.run_grid(spec, workers=2, chunk=7_000)
    assert a.failures == b.failures and a.min_lower_bound == b.min_lower_bound


@given(st.integers(0, 394_999 - 64))
@settings(max_examples=20)
def test_cells_agree_with_independent_hp_bracket(i):
    from primebounds.interval import HPInterval, hp_precision

    spec = gv.paper_grid("alpha")
    lo, hi, failed, _, _ = gv.certify_cells(gv._evaluator(spec), *gv._cell_edges(spec, i, i + 1), max_depth=0)
    t0 = spec.x_start + i * spec.step
    with hp_precision(120):
        ref = fl.alpha(HPInterval(t0), HPInterval(t0 + spec.step))
    assert lo[0] <= float(ref.hi)


@pytest.mark.parametrize("fid, lo, hi", gv.PAPER_TAILS)
def test_tail_scans_certify(fid, lo, hi):
    rep = gv.tail_scan(fid, lo, hi)
    assert rep.certified, rep.summary()
    assert rep.label == gv.TAIL_LABEL


def test_manifest_round_trip(tmp_path):
    path = tmp_path / "grids.json"
    gv.write_manifest(path)
    grids, tails = gv.load_manifest(path)
    assert grids == gv.PAPER_GRIDS
    assert [t[0] for t in tails] == [t[0] for t in gv.PAPER_TAILS]


def test_spec_validation():
    with pytest.raises(ValueError):
        gv.GridSpec("x", "f1", 0, Fraction(1, 10), 10)  # f1 is univariate
    with pytest.raises(KeyError):
        gv.GridSpec("x", "nope", 0, Fraction(1, 10), 10)
    with pytest.raises(ValueError):
        gv.GridSpec("x", "g1", 0, 0, 10)
