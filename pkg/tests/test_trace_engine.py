import math

import numpy as np
import pytest

from qtorus import charvar, lifting, trace_engine
from qtorus.errors import NotPseudoAnosovError
from qtorus.intertwiners import compose
from qtorus.trace_engine import (
    TraceSeries,
    global_intertwining_residual,
    intertwiner_for,
    series,
    trace_product,
    trace_sum,
)

# |Trace Lambda| for (LLR, Example 1, n = 3), frozen after cross-checking against trace_sum
GOLDEN_N3 = 1.3640163933357865


def test_golden_n3(llr, ex1_lift):
    assert abs(trace_product(llr, ex1_lift, 3)) == pytest.approx(GOLDEN_N3, rel=1e-12)
    assert abs(trace_sum(llr, ex1_lift, 3)) == pytest.approx(GOLDEN_N3, rel=1e-12)


@pytest.mark.parametrize("n", range(3, 32, 2))
def test_unit_det(llr, ex1_lift, n):
    assert intertwiner_for(llr, ex1_lift, n).abs_det() == pytest.approx(1, abs=1e-8)


@pytest.mark.parametrize("eta", [0, 1])
@pytest.mark.parametrize("n", [3, 5])
def test_global_intertwining(llr, ex1_sweep, eta, n):
    lg = lifting.lift(ex1_sweep, eta=eta)
    assert global_intertwining_residual(llr, lg, n) < 1e-8


def test_global_intertwining_example3(llr, ex3_lift):
    assert global_intertwining_residual(llr, ex3_lift, 5) < 1e-8


def test_reassociation(llr, ex1_lift):
    from qtorus.intertwiners import build_left, build_right, build_twist
    from qtorus.qdilog import QdlParams
    from qtorus.torus_algebra import make_qroot

    n = 9
    q = make_qroot(n)
    rp = lifting.rep_params(ex1_lift, n, q)
    ps = [QdlParams(complex(u), complex(v), q) for u, v in zip(rp.u, rp.v)]
    parts = [build_left(ps[0]), build_left(ps[1]), build_right(ps[2]), build_twist(0, 0, 0, q)]
    left = compose([compose(parts[:2]), compose(parts[2:])])
    right = compose([parts[0], compose(parts[1:])])
    assert np.trace(left.mat) == pytest.approx(np.trace(right.mat), rel=1e-12)
    assert np.trace(left.mat) == pytest.approx(trace_product(llr, ex1_lift, n), rel=1e-12)


def test_epsilon_pattern(llr):
    assert llr.signs == (-1, -1, 1)


@pytest.mark.parametrize("n", [3, 5, 7, 9, 11, 31, 51, 101])
def test_product_vs_sum_examples(llr, ex1_lift, ex2_lift, n):
    for lg in (ex1_lift, ex2_lift):
        a, b = abs(trace_product(llr, lg, n)), abs(trace_sum(llr, lg, n))
        assert abs(a - b) <= 1e-9 * a


@pytest.mark.parametrize("letters", ["LR", "LRR", "LLRR", "LRLLR"])
def test_product_vs_sum_other_words(letters):
    w = charvar.MonodromyWord(letters)
    lg = lifting.lift(charvar.solve_hyperbolic(w))
    for n in (3, 5, 7, 13, 21):
        a, b = abs(trace_product(w, lg, n)), abs(trace_sum(w, lg, n))
        assert abs(a - b) <= 1e-9 * a


@pytest.mark.parametrize("k", [2, 3])
def test_product_vs_sum_other_roots(llr, ex2_lift, k):
    for n in (5, 7, 11, 13):
        if math.gcd(n, k) != 1:
            continue
        a, b = abs(trace_product(llr, ex2_lift, n, k)), abs(trace_sum(llr, ex2_lift, n, k))
        assert abs(a - b) <= 1e-9 * a


def test_branch_independence(llr, ex1_sweep, ex1_lift, rng):
    for _ in range(5):
        shifts = [int(s) for s in rng.integers(-3, 4, 3)]
        lg = lifting.lift(ex1_sweep, shifts=shifts)
        for n in range(3, 52, 2):
            a, b = abs(trace_product(llr, ex1_lift, n)), abs(trace_product(llr, lg, n))
            assert abs(a - b) <= 1e-8 * a


@pytest.mark.parametrize("letters", ["LLR", "LRLLR"])
def test_cyclic_invariance(letters, ex1_sweep):
    word = charvar.MonodromyWord(letters)
    s = ex1_sweep if letters == "LLR" else charvar.solve_hyperbolic(word)
    lg = lifting.lift(s)
    for shift in range(1, len(word)):
        rw = word.rotated(shift)
        rl = lifting.lift(charvar.sweep(rw, s.steps[shift]), logs0=(lg.A[shift], lg.B[shift], lg.C[shift]))
        for n in range(3, 32, 2):
            a, b = abs(trace_product(word, lg, n)), abs(trace_product(rw, rl, n))
            assert abs(a - b) <= 1e-8 * a


def test_series_rows_and_modes(llr, ex1_lift):
    ts = series(llr, ex1_lift, 3, 41, method="both")
    assert [r.n for r in ts.rows] == list(range(3, 42, 2))
    assert all(r.mode == r.n % 4 for r in ts.rows)
    assert not any(r.flags for r in ts.rows)
    for r in ts.rows:
        assert r.ell == pytest.approx(math.log(r.abs_trace) / r.n)


def test_series_worker_independent(llr, ex2_lift):
    a = series(llr, ex2_lift, 3, 61, workers=1)
    b = series(llr, ex2_lift, 3, 61, workers=3)
    assert a.to_csv() == b.to_csv()


def test_series_bimodal(llr, ex1_lift):
    ts = series(llr, ex1_lift, 3, 301)
    assert len(ts.rows) == 150
    # past the transient, the n = 3 mod 4 mode sits strictly above its n = 1 mod 4 neighbours
    signs = {np.sign(r.ell - s.ell) * (1 if r.mode == 3 else -1) for r, s in zip(ts.rows, ts.rows[1:]) if r.n >= 51}
    assert signs == {1.0}


def test_csv_roundtrip(llr, ex1_lift):
    ts = series(llr, ex1_lift, 3, 15)
    text = ts.to_csv()
    assert text.splitlines()[0] == "n,mode,re_trace,im_trace,abs_trace,ell,flags"
    back = TraceSeries.from_csv(text, "LLR")
    assert back.to_csv() == text
    assert back.rows[0].abs_trace == ts.rows[0].abs_trace


def test_degenerate_row_flagged(llr, ex1_lift, monkeypatch):
    from qtorus.errors import DegenerateWeightError

    def boom(*a, **k):
        raise DegenerateWeightError("forced")

    monkeypatch.setattr(trace_engine, "trace_product", boom)
    row = trace_engine.compute_row(llr, ex1_lift, 5)
    assert row.flags == ("degenerate",) and not row.ok


def test_suspect_flag(llr, ex1_lift, monkeypatch):
    monkeypatch.setattr(trace_engine, "trace_sum", lambda *a, **k: 2 * trace_product(llr, ex1_lift, 5))
    row = trace_engine.compute_row(llr, ex1_lift, 5, method="both")
    assert "suspect" in row.flags


def test_bad_inputs(llr, ex1_lift):
    with pytest.raises(ValueError):
        series(llr, ex1_lift, 11, 5)
    with pytest.raises(ValueError):
        series(llr, ex1_lift, 3, 5, method="fast")
    with pytest.raises(ValueError):
        trace_product(charvar.MonodromyWord("LR"), ex1_lift, 5)
    with pytest.raises(NotPseudoAnosovError):
        charvar.solve_hyperbolic(charvar.MonodromyWord("L"))
