import math

import pytest

from qtorus import asymptotics, charvar, lifting, trace_engine
from qtorus.asymptotics import compare_volume, fit, fit_class
from qtorus.trace_engine import TraceRow, TraceSeries


def synthetic_series(fn, n_max=301, parity=0):
    # only ell enters the fit; the trace columns are placeholders
    rows = tuple(TraceRow(n, 1 + 0j, 1.0, fn(n)) for n in range(3, n_max + 1, 2))
    return TraceSeries("LLR", rows, (0, 0, 0), parity)


def test_exact_polynomial_recovery():
    f = fit(synthetic_series(lambda n: 0.2 + 1 / n - 3 / n**2))
    for c in f.classes.values():
        assert c.coefficients[0] == pytest.approx(0.2, abs=1e-10)
        assert c.coefficients[1] == pytest.approx(1, abs=1e-8)
        assert c.coefficients[2] == pytest.approx(-3, abs=1e-6)
        assert c.rms < 1e-12


def test_shift_consistency():
    base = lambda n: 0.1 + 0.4 / n + 7 / n**3  # noqa: E731
    f0 = fit(synthetic_series(base))
    f1 = fit(synthetic_series(lambda n: base(n) + 2.5))
    for r in asymptotics.CLASSES:
        assert f1.limits[r] - f0.limits[r] == pytest.approx(2.5, abs=1e-10)


def test_insufficient_points():
    with pytest.raises(ValueError, match="usable points"):
        fit(synthetic_series(lambda n: 0.2, n_max=81))
    with pytest.raises(ValueError):
        fit_class([51, 55, 59], [0.1, 0.1, 0.1])


def test_degenerate_rows_excluded():
    ts = synthetic_series(lambda n: 0.2 + 1 / n)
    rows = list(ts.rows)
    rows[40] = TraceRow(rows[40].n, complex(math.nan), math.nan, math.nan, ("degenerate",))
    f = fit(TraceSeries("LLR", tuple(rows)))
    assert sum(c.count for c in f.classes.values()) == sum(1 for r in ts.rows if r.n >= 51) - 1
    assert f.limits[1] == pytest.approx(0.2, abs=1e-10)


def test_compare_volume_report():
    f = fit(synthetic_series(lambda n: 0.212213 + 1 / n))
    rep = compare_volume(f, 2.66674478344906)
    assert rep["verdict"] == "pass"
    assert rep["classes"]["1"]["abs_dev"] < 5e-4
    bad = compare_volume(f, 2.0)
    assert bad["verdict"] == "fail"
    odd = compare_volume(fit(synthetic_series(lambda n: 0.3, parity=1)), 2.0)
    assert odd["verdict"] == "no prediction"


def test_curves_csv():
    f = fit(synthetic_series(lambda n: 0.2 + 1 / n))
    lines = f.curves_csv().splitlines()
    assert lines[0] == "n,mode,ell_fit"
    n, mode, val = lines[1].split(",")
    assert int(n) % 4 == int(mode)
    assert float(val) == pytest.approx(0.2 + 1 / int(n), abs=1e-10)


@pytest.fixture(scope="module")
def ex1_series(llr, ex1_lift):
    return trace_engine.series(llr, ex1_lift, 3, 301)


def test_example1_limits(ex1_series):
    f = fit(ex1_series)
    for r in asymptotics.CLASSES:
        assert abs(f.limits[r] - 0.212213) < 5e-4


def test_degree_stability(ex1_series):
    f4, f3 = fit(ex1_series, degree=4), fit(ex1_series, degree=3)
    for r in asymptotics.CLASSES:
        assert abs(f4.limits[r] - f3.limits[r]) < 2e-3


def test_lr_hyperbolic_limit():
    w = charvar.MonodromyWord("LR")
    lg = lifting.lift(charvar.solve_hyperbolic(w))
    f = fit(trace_engine.series(w, lg, 3, 301))
    rep = compare_volume(f, charvar.volume(w))
    assert rep["verdict"] == "pass"
