import math
import os

import numpy as np
import pytest

import reimpute


def four_unit():
    z = np.array([1, 0, 1, 0], dtype=np.uint8)
    y = np.array([[1.0], [0.0], [np.nan], [np.nan]])
    return z, y


def test_four_unit_exact():
    z, y = four_unit()
    r = reimpute.run_test(z, y, imputer="arm-mean", mode="exact")
    assert r["components"][0]["exact"] == (1, 3)
    assert r["p_hat"] == pytest.approx(1 / 3)


def test_one_shot_four_unit():
    z, y = four_unit()
    r = reimpute.run_one_shot(z, y, imputer="arm-mean", mode="exact")
    assert r["components"][0]["exact"] == (1, 2)


def test_stochastic_exact_refused():
    z, y = four_unit()
    with pytest.raises(reimpute.RefusalError):
        reimpute.run_test(z, y, imputer="stochastic-median", mode="exact")


def test_monte_carlo_reproducible():
    z, y = four_unit()
    a = reimpute.run_test(z, y, runs=500, seed=3)
    b = reimpute.run_test(z, y, runs=500, seed=3)
    assert a["p_hat"] == b["p_hat"]
    assert np.array_equal(a["draws"], b["draws"])


def test_helpers():
    assert reimpute.required_runs(0.01, 0.05) == 18445
    assert reimpute.hoeffding_bound(10000, 0.02) == pytest.approx(2 * math.exp(-8))
    adjusted, rejected = reimpute.holm_bonferroni([0.01, 0.04])
    assert adjusted == pytest.approx([0.02, 0.04])
    assert all(rejected)


def test_generate_and_ci():
    d = reimpute.generate(model=1, n=50, seed=1)
    assert int(np.isnan(d["y"]).sum()) == 25
    ci = reimpute.confidence_interval(d["z"], d["y"], x=d["x"], groups=d["groups"], design="stratified",
                                      imputer="arm-mean", runs=100, seed=2, side="two-sided",
                                      grid=(-2.0, 4.0, 0.5))
    assert len(ci["pvals"]) == 13
    assert all(0.0 <= p <= 1.0 for p in ci["pvals"])


def test_data_dir_present():
    assert os.path.exists(os.path.join(os.environ.get("REIMPUTE_TEST_DATA", "tests/data"), "four_unit.csv"))
