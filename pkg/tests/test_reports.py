import json

import numpy as np
import pytest

from symcone.jordan import SpinFactor
from symcone.reports import CheckReport, dumps_line, render
from symcone.suites import SUITES, RunConfig, run_suite, stream


def test_render_is_json_lines_with_summary():
    reps = [CheckReport("a", 3, 1e-12, True, 1e-9, details={"v": np.float64(2.0)}),
            CheckReport("b", 3, 0.5, False, 1e-9, witness={"trial": np.int64(2)})]
    out = render(reps, {"suite": "demo"})
    records = [json.loads(line) for line in out.splitlines()]
    assert [r.get("check") for r in records[:2]] == ["a", "b"]
    summary = records[-1]["summary"]
    assert summary["pass"] is False and summary["checks"] == 2 and summary["suite"] == "demo"
    assert records[1]["witness"] == {"trial": 2}


def test_non_finite_values_stay_valid_json():
    line = dumps_line({"x": float("inf"), "y": np.nan})
    assert json.loads(line) == {"x": "inf", "y": "nan"}


def test_run_config_validation():
    with pytest.raises(ValueError):
        RunConfig(tol=0.0)
    with pytest.raises(ValueError):
        RunConfig(trials=0)
    with pytest.raises(KeyError):
        run_suite("bogus")


def test_streams_are_keyed():
    a = stream(1, "fundamental", 0, 5).standard_normal(3)
    assert np.array_equal(a, stream(1, "fundamental", 0, 5).standard_normal(3))
    assert not np.array_equal(a, stream(1, "fundamental", 0, 6).standard_normal(3))
    assert not np.array_equal(a, stream(1, "thm12", 0, 5).standard_normal(3))
    assert not np.array_equal(a, stream(2, "fundamental", 0, 5).standard_normal(3))


@pytest.mark.parametrize("name", sorted(SUITES))
def test_every_suite_runs_small(name):
    cfg = RunConfig(seed=3, trials=4, samples=20, algebras=[SpinFactor(3)] if name in
                    {"fundamental", "thm12", "geo-mean", "self-scaled", "decrement", "polar",
                     "alpha", "classification"} else None)
    reports = run_suite(name, cfg)
    assert reports and all(isinstance(r, CheckReport) for r in reports)
    assert all(r.passed for r in reports)
