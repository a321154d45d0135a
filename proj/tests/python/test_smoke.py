"""Smoke tests for the python bindings."""

import math

import pytest

import pricekit as pk


def test_filter_sales_a_lifts_v_cut():
    tx = [1000, 1000, 800, 800, 1000, 1000]
    filtered, flags = pk.filter_sales_a(tx, 6)
    assert filtered == [1000] * 6
    assert flags == [False, False, True, True, False, False]


def test_filter_sales_a_final_drop_is_regular():
    filtered, flags = pk.filter_sales_a([1000, 1000, 1000, 800], 6)
    assert filtered == [1000, 1000, 1000, 800]
    assert not any(flags)


def test_reference_prices_removes_spike():
    tx = [1000] * 20
    tx[9] = 1200
    assert pk.reference_prices(tx) == [1000] * 20


def test_sale_events():
    baseline = [1000] * 10
    tx = list(baseline)
    tx[2] = tx[3] = 800
    events = pk.sale_events(tx, baseline)
    assert events == [(3, 4, 200)]


def test_durations():
    assert pk.implied_duration(0.1383) == pytest.approx(6.72, abs=0.01)
    assert pk.implied_duration(0.2329) == pytest.approx(3.77, abs=0.01)
    assert math.isinf(pk.implied_duration(0.0))
    weeks, dropped = pk.expected_duration([0.5, 0.0])
    assert weeks == pytest.approx(1.4427, abs=1e-4)
    assert dropped == 1


def test_chi2_and_wilcoxon():
    chi2, p = pk.chi2_proportions(30, 100, 10, 100)
    assert chi2 == pytest.approx(12.5, abs=1e-12)
    assert 0 < p < 1e-3
    z, p = pk.wilcoxon_rank_sum([1, 2, 3], [4, 5, 6])
    assert z == pytest.approx(-1.9640, abs=1e-4)


def test_fk_index():
    assert pk.fk_index([[True, False], [True, True], [False, False]]) == pytest.approx(1 / 3)
    assert pk.fk_index([[False, False], [False, False]]) is None


def test_kurtosis_and_standardize():
    assert pk.kurtosis([-1, -1, 1, 1]) == pytest.approx(1.0)
    assert pk.kurtosis([-2, -1, 0, 1, 2]) == pytest.approx(1.7)
    z, excluded = pk.standardize([0.1, 0.3], ["g", "g"])
    assert z == pytest.approx([-0.7071, 0.7071], abs=1e-4)
    assert excluded == 0


def test_fit_cox_closed_form():
    rows = [
        (1, 1, 0, 0.0, 1.0, True, [1.0]),
        (2, 2, 0, 0.0, 2.0, True, [0.0]),
        (3, 3, 0, 0.0, 3.0, True, [1.0]),
    ]
    fit = pk.fit_cox(rows, ["x"])
    assert fit["converged"]
    assert fit["beta"][0] == pytest.approx(-0.34657, abs=1e-4)
    assert fit["hazard_ratio"][0] == pytest.approx(0.70711, abs=1e-4)


def test_simulate_store_roundtrip():
    data = pk.simulate_store(0.06, 0.10, products=30, weeks=52, seed=5)
    assert len(data) == 30
    for prod in data:
        tx = prod["transaction"]
        assert len(tx) == 52
        filtered, flags = pk.filter_sales_a(tx, 6)
        # Ground truth recovered outside the 6-week margins.
        assert flags[6:46] == prod["true_sale"][6:46]
