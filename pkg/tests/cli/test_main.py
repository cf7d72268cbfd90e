"""
Tests for the spinlab command line

Runs each subcommand end to end on small inputs and checks exit codes and
the files it writes.
"""

import json
from unittest.mock import patch

import pytest

from src.__main__ import build_parser, main


@pytest.fixture(autouse=True)
def perf_log():
    with patch("src.perf.performance.log_performance") as log:
        yield log


def read_json(path):
    return json.loads(path.read_text(encoding="utf-8"))


class TestParser:

    def test_no_command(self):
        assert main([]) == 1

    def test_flags_default_to_none(self):
        args = build_parser().parse_args(["dd"])
        assert args.scheme is None
        assert args.relax is None


class TestTomo:

    def test_thermal_state(self, tmp_path):
        out = tmp_path / "tomo"
        assert main(["tomo", "--state", "thermal", "--output", str(out)]) == 0
        report = read_json(out / "report.json")
        assert report["condition_number"] == pytest.approx(3.7, abs=0.3)
        assert report["max_error"] < 1e-10
        assert (out / "constraints.csv").exists()

    def test_random_state_needs_seed(self, tmp_path):
        assert main(["tomo", "--output", str(tmp_path / "tomo")]) == 2

    def test_missing_system(self, tmp_path):
        assert main(["tomo", "--system", str(tmp_path / "absent.json"), "--state", "thermal"]) == 2

    def test_seeded_runs_repeat(self, tmp_path):
        first, second = tmp_path / "a", tmp_path / "b"
        assert main(["tomo", "--seed", "7", "--noise", "0.001", "--output", str(first)]) == 0
        assert main(["tomo", "--seed", "7", "--noise", "0.001", "--output", str(second)]) == 0
        assert (first / "elements.csv").read_text() == (second / "elements.csv").read_text()


class TestLgi:

    def test_three_time_string(self, tmp_path):
        out = tmp_path / "lgi"
        assert main(["lgi", "--n", "3", "--dt-max-ms", "20", "--steps", "120", "--output", str(out)]) == 0
        assert read_json(out / "summary.json")["max_k"] == pytest.approx(1.5, abs=1e-6)
        assert (out / "lgi.svg").exists()

    def test_too_few_times(self, tmp_path):
        assert main(["lgi", "--n", "2", "--output", str(tmp_path / "lgi")]) == 2


class TestPps:

    def test_three_qubits(self, tmp_path):
        out = tmp_path / "pps"
        assert main(["pps", "--qubits", "3", "--output", str(out)]) == 0
        report = read_json(out / "report.json")
        assert report["target_label"] == "010"
        assert report["correlation"] == pytest.approx(1.0, abs=1e-9)

    @pytest.mark.parametrize("qubits, system, label", [("3", "acrylonitrile", "010"), ("4", "aspirin", "0101")])
    def test_relaxed_on_default_systems(self, tmp_path, qubits, system, label):
        out = tmp_path / "pps"
        assert main(["pps", "--qubits", qubits, "--relaxed", "--output", str(out)]) == 0
        report = read_json(out / "report.json")
        assert report["mode"] == "finite"
        assert report["system"] == system
        assert report["target_label"] == label

    def test_demo(self, tmp_path):
        out = tmp_path / "demo"
        assert main(["pps", "--demo", "logical", "--output", str(out)]) == 0
        assert read_json(out / "demo.json")["correlation_00"] == pytest.approx(1.0)


class TestDd:

    def test_short_storage(self, tmp_path):
        out = tmp_path / "dd"
        assert main(["dd", "--scheme", "cpmg", "--order", "1", "--t-max-s", "0.5", "--steps", "3",
                     "--output", str(out)]) == 0
        summary = read_json(out / "summary.json")
        assert summary["scheme"] == "cpmg-1"
        assert (out / "storage.csv").exists()

    def test_trajectories_need_seed(self, tmp_path):
        assert main(["dd", "--t-max-s", "0.5", "--steps", "3", "--trajectories", "200",
                     "--output", str(tmp_path / "dd")]) == 2

    def test_bad_spectrum(self, tmp_path):
        assert main(["dd", "--spectrum", "pink:amp=1,cutoff=2", "--output", str(tmp_path / "dd")]) == 2


class TestValidate:

    def test_shipped_systems(self):
        assert main(["validate"]) == 0

    def test_broken_system(self, tmp_path):
        path = tmp_path / "broken.json"
        path.write_text("{")
        assert main(["validate", "--system", str(path)]) == 2


class TestPerformanceLog:

    def test_commands_are_logged(self, tmp_path, perf_log):
        main(["tomo", "--state", "thermal", "--output", str(tmp_path / "tomo")])
        command, _ = perf_log.call_args.args
        assert command == "tomo"
        assert perf_log.call_args.kwargs["success"] is True
