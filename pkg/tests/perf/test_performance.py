"""
Tests for performance logging

Tests the timed_command decorator, the performance log format and the
per-command statistics.
"""

from unittest.mock import patch

import pytest

from src.perf.command import summarize
from src.perf.performance import DEFAULT_BUDGET_S, budget_for, log_performance, timed_command


@pytest.fixture
def project_root(tmp_path):
    with patch("src.core.core.get_project_root", return_value=tmp_path):
        yield tmp_path


class TestLogging:

    def test_log_line_format(self, project_root):
        log_performance("tomo", 0.1234)
        line = (project_root / "logs" / "performance.log").read_text().strip()
        assert line.split(",")[1:] == ["tomo", "0.123", "SUCCESS"]

    def test_error_commas_are_escaped(self, project_root):
        log_performance("dd", 1.0, success=False, error="bad, worse\nworst")
        line = (project_root / "logs" / "performance.log").read_text().strip()
        assert line.split(",")[1:] == ["dd", "1.000", "FAILED", "bad; worse worst"]

    def test_timed_command_logs_failures(self, project_root):
        @timed_command
        def cmd_broken(args):
            raise ValueError("nope")

        with pytest.raises(ValueError):
            cmd_broken(None)
        assert "broken" in (project_root / "logs" / "performance.log").read_text()

    def test_timed_command_returns_result(self, project_root):
        @timed_command
        def cmd_fine(args):
            return 0

        assert cmd_fine(None) == 0


class TestSummary:

    def test_missing_log(self, tmp_path):
        assert summarize(tmp_path / "absent.log") == []

    def test_statistics(self, tmp_path):
        log = tmp_path / "performance.log"
        log.write_text("\n".join([
            "t,tomo,1.0,SUCCESS",
            "t,tomo,3.0,FAILED,boom",
            "t,lgi,2.0,SUCCESS",
            "garbage",
            "t,lgi,oops,SUCCESS",
        ]))
        stats = {s.command: s for s in summarize(log)}
        assert sorted(stats) == ["lgi", "tomo"]
        assert stats["tomo"].count == 2
        assert stats["tomo"].avg_s == pytest.approx(2.0)
        assert stats["tomo"].failures == 1
        assert stats["lgi"].max_s == 2.0

    def test_budgets(self):
        assert budget_for("dd") > budget_for("tomo")
        assert budget_for("unknown") == DEFAULT_BUDGET_S
