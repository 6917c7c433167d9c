"""Smoke tests for the python bindings (module built by CMake)."""

import math

import pytest

_giniseq = pytest.importorskip("_giniseq")


def test_analytic_gini():
    assert _giniseq.analytic_gini("pareto:20000,5") == pytest.approx(1 / 9)
    assert _giniseq.analytic_gini("gamma:2.649,0.84") == pytest.approx(
        0.33075599146838256
    )


def test_equal_weight_gini():
    assert _giniseq.gini([1.0, 2.0, 3.0]) == pytest.approx(5 / 9)


def test_pilot_sizes_golden():
    out = _giniseq.pilot_sizes(0.05, 0.015, 2.0, [0.5, 0.5], [600, 600])
    assert out["per_stratum"] == [21, 21]
    assert out["realized"] == 42


def test_optimal_c():
    assert _giniseq.optimal_c(0.01307985, 0.05, 0.015) == 894


def test_run_adaptive_bounded_width():
    out = _giniseq.run_adaptive(
        "seq",
        "gamma:2.649,0.84",
        [60, 60],
        [(20, 40), (40, 80)],
        omega=0.08,
        seed=11,
        frame_seed=5,
    )
    assert out["final_n"] >= out["pilot"]
    if not out["hit_cap"]:
        assert out["width"] <= 0.08
    assert 0.0 < out["g_hat"] < 1.0
    assert math.isclose(out["ci_high"] - out["ci_low"], out["width"])


def test_simulate_deterministic_across_workers():
    kwargs = dict(
        procedure="two-stage",
        dist="lognormal:2.185,0.562",
        clusters=[50, 50],
        count_ranges=[(15, 30), (30, 60)],
        omega=0.08,
        reps=10,
        seed=99,
        oracle_reps=4,
        oracle_n=1000,
    )
    serial = _giniseq.simulate(workers=1, **kwargs)
    parallel = _giniseq.simulate(workers=4, **kwargs)
    assert serial == parallel
    assert serial["reps"] == 10
    assert 0.0 <= serial["coverage"] <= 1.0


def test_estimate_survey_errors(tmp_path):
    frame = tmp_path / "frame.csv"
    hh = tmp_path / "hh.csv"
    frame.write_text("stratum_id,cluster_id,m_sub1,m_sub2\n1,1,10\n")
    hh.write_text("stratum_id,cluster_id,substratum_id,household_id,income\n")
    with pytest.raises(_giniseq.DataError):
        _giniseq.estimate_survey(str(frame), str(hh))


def test_estimate_survey_roundtrip(tmp_path):
    frame = tmp_path / "frame.csv"
    hh = tmp_path / "hh.csv"
    frame.write_text(
        "stratum_id,cluster_id,m_sub1,m_sub2\n"
        "1,1,10,20\n1,2,15,15\n1,3,8,22\n"
    )
    rows = ["stratum_id,cluster_id,substratum_id,household_id,income"]
    incomes = [10, 20, 30, 40, 50, 60]
    for cid in (1, 2, 3):
        for sub in (1, 2):
            for h in (1, 2):
                rows.append(f"1,{cid},{sub},{h},{incomes[(cid + sub + h) % 6]}")
    hh.write_text("\n".join(rows) + "\n")
    out = _giniseq.estimate_survey(str(frame), str(hh))
    assert out["n"] == 3
    assert 0.0 <= out["g_hat"] <= 1.0
    assert out["ci_low"] <= out["g_hat"] <= out["ci_high"]
