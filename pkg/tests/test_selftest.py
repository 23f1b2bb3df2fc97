import pytest

import selftest
from selftest import SUITES, SuiteReport, run_selftest
from unit_search import UnitSearchReport


def test_ramification_suite_passes(settings):
    (report,) = run_selftest("ramification", settings, seed=7)
    assert report.passed
    assert report.inconclusive == 0
    assert report.to_dict()["failed"] == []


def test_functor_suite_is_seeded(settings):
    first = run_selftest("functor", settings, seed=3)[0]
    second = run_selftest("functor", settings, seed=3)[0]
    assert first.passed
    assert [c.name for c in first.checks] == [c.name for c in second.checks]


def test_moduli_suite_passes(settings):
    (report,) = run_selftest("moduli", settings, seed=7)
    assert report.passed
    assert len(report.checks) == 6
    assert all(c["passed"] for c in report.to_dict()["inconclusive"])


def test_unknown_suite(settings):
    with pytest.raises(ValueError):
        run_selftest("lengths-z", settings, seed=7)


def test_suite_report_bookkeeping():
    report = SuiteReport("demo")
    assert report.check("fine", True)
    assert not report.check("broken", False, "detail")
    report.check("open", True, inconclusive=True)
    assert not report.passed
    assert report.inconclusive == 1
    data = report.to_dict(timings=True)
    assert data["failed"] == [{"name": "broken", "passed": False, "detail": "detail"}]
    assert "millis" in data


def test_suite_names():
    assert set(SUITES) == {"length-calculus", "ramification", "carlitz", "regression", "moduli", "functor"}


def test_moduli_suite_fails_on_short_complete_units(settings, monkeypatch):
    def empty_units(E, L, D, exp=None, horizon=None, guard=None):
        return UnitSearchReport(degree_bound=D, search_bound=0, window=(0, 0), generators=[], witnesses=[],
                                preimage_rank=0, rank_found=0, expected_rank=0, lattice_rank=0,
                                certified=True, certificate="rank-zero")

    monkeypatch.setattr(selftest, "unit_group_search", empty_units)
    (report,) = run_selftest("moduli", settings, seed=7)
    assert not report.passed
    assert report.inconclusive == 0
    assert report.to_dict()["failed"]
