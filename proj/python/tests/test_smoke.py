import json
import math

import numpy as np
import pytest

import rbsn


def test_aligned_limits():
    ps = rbsn.predict_limit(0.0, "ps")
    assert ps["nu"] == pytest.approx(1 / 3, abs=1e-14)
    assert ps["E"] == pytest.approx(2 / 3, abs=1e-14)
    pe = rbsn.predict_limit(0.0, "pe")
    assert pe["nu"] == pytest.approx(0.25, abs=1e-14)
    assert pe["E"] == pytest.approx(5 / 8, abs=1e-14)
    three = rbsn.predict_limit(1.0, "3d", e0=2.5)
    assert three["nu"] == pytest.approx(0.0, abs=1e-14)
    assert three["E"] == pytest.approx(2.5, abs=1e-14)


def test_cone_moments_against_numeric_integration():
    for gamma in (0.3, 1.3, 2.6):
        x = np.linspace(-gamma, gamma, 200001)
        i1 = np.trapezoid(np.cos(x), x) / (2 * gamma)
        i2 = np.trapezoid(np.cos(2 * x), x) / (2 * gamma)
        got = rbsn.cone_moments(gamma, 2)
        assert got[0] == pytest.approx(i1, abs=1e-9)
        assert got[1] == pytest.approx(i2, abs=1e-9)


def test_general_prediction_matches_cone():
    for gamma in (0.5, 1.7, 2.9):
        i1, i2 = rbsn.cone_moments(gamma, 2)
        for alpha in (0.0, 0.4, 2.0):
            a = rbsn.predict_cone(alpha, gamma, "ps")
            b = rbsn.predict_general(alpha, i1, i2, "ps")
            assert a["nu"] == pytest.approx(b["nu"], abs=1e-12)
            assert a["E"] == pytest.approx(b["E"], rel=1e-12)


def test_stationary_angle_and_interval():
    g = rbsn.stationary_gammas(2)[1]
    assert abs(2 * g - math.tan(2 * g)) < 1e-9
    lo, hi = rbsn.nu_interval_cone("ps", g)
    assert lo == pytest.approx(-0.122, abs=1e-3)
    assert hi == pytest.approx(0.098, abs=1e-3)


def test_tessellation_round_trip(tmp_path):
    t = rbsn.generate("random", 8, 8, seed=3)
    assert t.kind == "random"
    assert t.nodes.shape == (len(t), 2)
    assert t.chi.shape == (t.contact_count,)
    text = t.to_json()
    assert json.loads(text)["kind"] == "random"
    assert rbsn.Tessellation.from_json(text).to_json() == text
    path = tmp_path / "t.json"
    t.save(path)
    assert rbsn.Tessellation.load(path).to_json() == text
    assert rbsn.generate("random", 8, 8, seed=3).to_json() == text


def test_voronoi_alpha_one_is_exact():
    t = rbsn.generate("voronoi", 20, 20, seed=2)
    r = rbsn.homogenize(t, alpha=1.0)
    assert abs(r["nu"]) <= 0.01
    assert r["E"] == pytest.approx(1.0, rel=0.02)
    assert r["residual_force"] < 1e-9
    assert r["sigma"].shape == (2, 2)
    st = rbsn.structure_tensor_check(t, 1.0)
    assert st["structure"].shape == (2, 2, 2, 2)
    assert st["I2"] == pytest.approx(1.0, abs=1e-12)


def test_sweep_rows():
    t = rbsn.generate("centered", 12, 12, seed=4)
    rows = rbsn.alpha_sweep(t, [0.2, -1.0, 1.5], threads=2)
    assert [r["alpha"] for r in rows] == [0.2, -1.0, 1.5]
    assert rows[0]["error"] is None and rows[2]["error"] is None
    assert rows[1]["error"]
    assert rows[0]["nu"] > rows[2]["nu"]


def test_expectation_check():
    r = rbsn.check_expectations(1.0, dim=2, samples=400000, seed=1, max_sigma=5.0)
    assert r["pass"]


def test_errors():
    with pytest.raises(ValueError):
        rbsn.predict_limit(0.0, "xy")
    with pytest.raises(ValueError):
        rbsn.predict_limit(-1.0, "ps")
    with pytest.raises(OSError):
        rbsn.Tessellation.from_json("{")
    with pytest.raises(rbsn.IoError):
        rbsn.Tessellation.load("/nonexistent/t.json")


def test_svg():
    svg = rbsn.alpha_curves_svg([0.0, 1.0])
    assert svg.startswith("<svg") or svg.startswith("<?xml")
    assert svg == rbsn.alpha_curves_svg([0.0, 1.0])

