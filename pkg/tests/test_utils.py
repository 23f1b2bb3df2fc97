import time

import pytest

from base_algebra import FiniteField
from exceptions import ConfigError, ResourceGuardExceeded
from utils import PathResolver, RangeParser, ResourceGuard


@pytest.mark.parametrize("text, expected", [
    ("1..4", [1, 2, 3, 4]),
    ("5", [5]),
    ("2,4,8", [2, 4, 8]),
    ("3..5, 1", [1, 3, 4, 5]),
    ("1..3,2..4", [1, 2, 3, 4]),
])
def test_parse_range(text, expected):
    assert RangeParser.parse_range(text) == expected


@pytest.mark.parametrize("text", ["", "4..2", "a..b", "1..", "0..3"])
def test_parse_range_rejects(text):
    with pytest.raises(ConfigError):
        RangeParser.parse_range(text, minimum=1)


def test_parse_list_keeps_order():
    assert RangeParser.parse_list("3,1,1,2") == [3, 1, 1, 2]
    with pytest.raises(ConfigError):
        RangeParser.parse_list("1,0")
    with pytest.raises(ConfigError):
        RangeParser.parse_list("1,x")
    with pytest.raises(ConfigError):
        RangeParser.parse_list(" , ")


def test_resolver_finds_bundled_inputs(tmp_path, monkeypatch):
    monkeypatch.chdir(tmp_path)
    assert PathResolver.resolve_file_path("carlitz_q2.json").name == "carlitz_q2.json"
    assert PathResolver.resolve_file_path("matrices/t_pi_0_t.json").exists()
    local = tmp_path / "local.json"
    local.write_text("{}", encoding="utf-8")
    assert PathResolver.resolve_file_path("local.json") == local.relative_to(tmp_path)
    with pytest.raises(FileNotFoundError):
        PathResolver.resolve_file_path("no_such_module.json")


def test_guard_limits():
    guard = ResourceGuard(max_field_order=8, max_window_dim=10, max_matrix_dim=5)
    guard.check_field(FiniteField(2, 3))
    with pytest.raises(ResourceGuardExceeded):
        guard.check_field(FiniteField(2, 4))
    guard.check_window(10)
    with pytest.raises(ResourceGuardExceeded):
        guard.check_window(11)
    with pytest.raises(ResourceGuardExceeded):
        guard.check_matrix(6)


def test_guard_time_budget():
    guard = ResourceGuard(time_budget_secs=5)
    guard.check_time("start")
    guard._started = time.monotonic() - 10
    with pytest.raises(ResourceGuardExceeded, match="during layer 3"):
        guard.check_time("layer 3")
    ResourceGuard().check_time()


def test_guard_from_config(settings):
    settings.update(max_exp_terms=5, time_budget_secs=60)
    guard = ResourceGuard.from_config(settings)
    assert guard.max_exp_terms == 5
    assert guard.time_budget_secs == 60
