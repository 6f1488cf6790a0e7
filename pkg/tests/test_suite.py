import json

import pytest

from grassqkz.config import SUITES, WORKERS_ENV, ConfigError, NumericTolerances, SuiteConfig
from grassqkz.suite import TASKS, plan, run_suite


def test_config_validation():
    with pytest.raises(ConfigError):
        SuiteConfig(max_n=0)
    with pytest.raises(ConfigError):
        SuiteConfig(which=frozenset({"everything"}))
    with pytest.raises(ConfigError):
        SuiteConfig(spectrum_max_n=1)
    with pytest.raises(ConfigError):
        SuiteConfig(workers=0)


def test_worker_count_from_environment(monkeypatch):
    monkeypatch.setenv(WORKERS_ENV, "3")
    assert SuiteConfig().worker_count() == 3
    assert SuiteConfig(workers=2).worker_count() == 2
    monkeypatch.setenv(WORKERS_ENV, "many")
    with pytest.raises(ConfigError):
        SuiteConfig().worker_count()


def test_config_json_is_serializable():
    d = SuiteConfig(tolerances=NumericTolerances(detprop=1e-9)).to_json()
    assert json.loads(json.dumps(d))["tolerances"]["detprop"] == 1e-9
    assert d["which"] == sorted(SUITES)


def test_plan_respects_filters():
    specs = plan(SuiteConfig(max_n=2, which=frozenset({"gauge"})))
    assert specs and all(s.suite == "gauge" and s.n <= 2 for s in specs)
    assert all(s.task in TASKS for s in plan(SuiteConfig(max_n=5)))
    ids = [s.id for s in plan(SuiteConfig(max_n=5))]
    assert len(ids) == len(set(ids))


def test_spectrum_checks_ignore_max_n():
    specs = plan(SuiteConfig(max_n=1, which=frozenset({"spectrum"})))
    assert [s.id for s in specs] == [f"spectrum/n={n}" for n in range(2, 11)]


def test_crashing_task_is_reported_as_failure(monkeypatch):
    import grassqkz.suite as suite_mod

    def boom(n):
        raise RuntimeError("boom")

    monkeypatch.setitem(suite_mod.TASKS, "spectrum", boom)
    rep = run_suite(SuiteConfig(max_n=1, which=frozenset({"spectrum"}), spectrum_max_n=2))
    assert not rep.passed
    assert rep.checks[0].detail == "RuntimeError: boom"


def test_parallel_run_matches_serial():
    cfg = SuiteConfig(max_n=3, which=frozenset({"compat", "cohomology"}))
    serial = run_suite(cfg)
    parallel = run_suite(SuiteConfig(max_n=3, which=frozenset({"compat", "cohomology"}), workers=2))
    assert serial.passed and serial.dumps() == parallel.dumps()


def test_full_suite_passes():
    rep = run_suite(SuiteConfig(max_n=5))
    failed = [c.id for c in rep.checks if c.status != "pass"]
    assert not failed
    assert "suite" in rep.text()
