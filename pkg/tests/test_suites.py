import pytest

from oddsymp import suites
from oddsymp.suites import SUITES, CheckSuiteConfig, UnknownSuite, convention_anchors, replay_command, run_suite


def test_unknown_suite():
    with pytest.raises(UnknownSuite):
        CheckSuiteConfig("nosuch")


def test_bad_trial_count():
    with pytest.raises(ValueError):
        CheckSuiteConfig("fourier", trials=0)


@pytest.mark.parametrize("suite", SUITES)
def test_every_suite_passes_small(suite):
    rep = run_suite(CheckSuiteConfig(suite, trials=3, seed=1))
    assert rep.ok, rep.to_text()


def test_report_body_is_deterministic():
    cfg = CheckSuiteConfig("lie-algebra", trials=4, seed=9)
    assert run_suite(cfg).body() == run_suite(cfg).body()


def test_anchors_all_hold():
    assert all(ok for _, ok in convention_anchors())


def test_failures_carry_replay(monkeypatch):
    def flaky(rng, cfg, k, rep):
        rep.record("parity_of_draw", rng.random() < 0.7, k, {"k": k})

    monkeypatch.setitem(suites._RUNNERS, "fourier", flaky)
    cfg = CheckSuiteConfig("fourier", trials=30, seed=4)
    rep = run_suite(cfg)
    assert rep.failures
    f = rep.failures[0]
    assert f.counterexample["replay"] == replay_command(cfg, f.offset)
    again = run_suite(CheckSuiteConfig("fourier", trials=1, seed=4, offset=f.offset))
    assert [g.offset for g in again.failures] == [f.offset]


def test_exceptions_become_failures(monkeypatch):
    def boom(rng, cfg, k, rep):
        raise RuntimeError("bad")

    monkeypatch.setitem(suites._RUNNERS, "fourier", boom)
    rep = run_suite(CheckSuiteConfig("fourier", trials=2))
    assert [f.check for f in rep.failures] == ["no_exception"] * 2
    assert rep.status == "fail"
