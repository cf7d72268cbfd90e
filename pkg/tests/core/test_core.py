"""
Tests for core utilities

Tests environment loading, parallelism settings, scenario merging and
deterministic output writers.
"""

import os
from argparse import Namespace
from unittest.mock import patch

import numpy as np
import pytest

from src.core.core import get_project_root, load_env, systems_dir, thread_count
from src.core.errors import ConfigError, NumericalError, SpinlabError
from src.core.output import PlotSeries, emit_plot, format_number, write_csv, write_json
from src.core.scenario import build_scenario, load_scenario_file, resolve_system_path

DEFAULTS = {"steps": 10, "t_max_s": 1.0}


class TestEnvironmentLoading:
    """Test .env file loading"""

    def test_load_env_with_valid_file(self, tmp_path):
        env_file = tmp_path / ".env"
        env_file.write_text("# comment\nSPINLAB_THREADS = 4\n\nOTHER=a=b\n")
        env = load_env(env_file)
        assert env == {"SPINLAB_THREADS": "4", "OTHER": "a=b"}

    def test_missing_env_is_empty(self, tmp_path):
        assert load_env(tmp_path / "absent.env") == {}


class TestThreadCount:

    def test_default_is_one(self):
        with patch.dict(os.environ, {}, clear=True):
            assert thread_count({}) == 1

    def test_env_file_value(self):
        with patch.dict(os.environ, {}, clear=True):
            assert thread_count({"SPINLAB_THREADS": "3"}) == 3

    def test_process_environment_wins(self):
        with patch.dict(os.environ, {"SPINLAB_THREADS": "2"}):
            assert thread_count({"SPINLAB_THREADS": "8"}) == 2

    @pytest.mark.parametrize("raw", ["0", "-1"])
    def test_non_positive_means_all_cores(self, raw):
        with patch.dict(os.environ, {"SPINLAB_THREADS": raw}):
            assert thread_count({}) == -1

    def test_garbage_falls_back_to_one(self):
        with patch.dict(os.environ, {"SPINLAB_THREADS": "many"}):
            assert thread_count({}) == 1


class TestPathManagement:
    """Test path utilities"""

    def test_get_project_root(self):
        root = get_project_root()
        assert (root / "src").exists()
        assert (root / "resources").exists()

    def test_project_structure(self):
        root = get_project_root()
        assert (root / "tests").exists()
        assert (root / ".env.dist").exists()
        assert (root / "README.md").exists()
        assert (root / "setup.py").exists()
        assert (root / "pyproject.toml").exists()

    @pytest.mark.parametrize("name", ["btp", "chloroform", "acrylonitrile", "aspirin"])
    def test_shipped_systems(self, name):
        assert (systems_dir() / f"{name}.json").exists()
        assert resolve_system_path(name) == systems_dir() / f"{name}.json"

    def test_unknown_system_names_the_path(self, tmp_path):
        missing = tmp_path / "nowhere.json"
        with pytest.raises(ConfigError, match="nowhere.json"):
            resolve_system_path(missing)


class TestErrors:

    def test_exit_codes(self):
        assert ConfigError("x").exit_code == 2
        assert NumericalError("x").exit_code == 3
        assert issubclass(ConfigError, SpinlabError)


# ---------------------------------------------------------------------------
# Scenarios
# ---------------------------------------------------------------------------

class TestScenario:

    def _args(self, **kwargs):
        base = {"scenario": None, "system": None, "output": None, "seed": None, "steps": None, "t_max_s": None}
        base.update(kwargs)
        return Namespace(**base)

    def test_defaults(self, tmp_path):
        scenario = build_scenario("singlet", self._args(output=str(tmp_path)), DEFAULTS)
        assert scenario["steps"] == 10
        assert scenario.output == tmp_path
        assert scenario.seed is None

    def test_default_output_directory(self):
        scenario = build_scenario("singlet", self._args(), DEFAULTS)
        assert scenario.output == get_project_root() / "out" / "singlet"

    def test_file_then_flags(self, tmp_path):
        path = tmp_path / "run.toml"
        path.write_text('command = "singlet"\nseed = 7\n\n[params]\nsteps = 20\nt_max_s = 5.0\n')
        scenario = build_scenario("singlet", self._args(scenario=str(path), steps=30), DEFAULTS)
        assert scenario["steps"] == 30
        assert scenario["t_max_s"] == 5.0
        assert scenario.seed == 7

    def test_unknown_top_level_key(self, tmp_path):
        path = tmp_path / "bad.toml"
        path.write_text('command = "singlet"\ncolour = "red"\n')
        with pytest.raises(ConfigError, match="colour"):
            load_scenario_file(path)

    def test_unknown_param(self, tmp_path):
        path = tmp_path / "bad.toml"
        path.write_text('command = "singlet"\n[params]\nwidth = 3\n')
        with pytest.raises(ConfigError, match="width"):
            build_scenario("singlet", self._args(scenario=str(path)), DEFAULTS)

    def test_wrong_command(self, tmp_path):
        path = tmp_path / "dd.toml"
        path.write_text('command = "dd"\n')
        with pytest.raises(ConfigError, match="dd"):
            build_scenario("singlet", self._args(scenario=str(path)), DEFAULTS)

    def test_missing_scenario_file(self, tmp_path):
        with pytest.raises(ConfigError, match="not found"):
            build_scenario("singlet", self._args(scenario=str(tmp_path / "none.toml")), DEFAULTS)

    def test_seed_required(self):
        scenario = build_scenario("tomo", self._args(), DEFAULTS)
        with pytest.raises(ConfigError, match="seed"):
            scenario.require_seed("random state")

    def test_rng_is_seeded(self):
        scenario = build_scenario("tomo", self._args(seed=5), DEFAULTS)
        assert scenario.rng("x").normal() == np.random.default_rng(5).normal()


# ---------------------------------------------------------------------------
# Output
# ---------------------------------------------------------------------------

class TestOutput:

    @pytest.mark.parametrize("value, text", [
        (1, "1"),
        (True, "1"),
        (0.1 + 0.2, "0.3"),
        (np.float64(1 / 3), "0.333333333333"),
        ("psi-plus", "psi-plus"),
    ])
    def test_format_number(self, value, text):
        assert format_number(value) == text

    def test_csv_layout(self, tmp_path):
        path = write_csv(tmp_path / "a" / "t.csv", ["t", "y"], [(0, 1.0), (1, 0.5)], metadata={"n": 3})
        assert path.read_text().splitlines() == ["# n=3", "t,y", "0,1", "1,0.5"]

    def test_json_keys_sorted(self, tmp_path):
        path = write_json(tmp_path / "r.json", {"b": 1, "a": np.float64(0.25), "c": np.array([1, 2])})
        text = path.read_text()
        assert text.index('"a"') < text.index('"b"') < text.index('"c"')

    def test_plot_is_deterministic(self, tmp_path):
        x = np.linspace(0, 1, 11)
        series = [PlotSeries("y", x, x ** 2), PlotSeries("z", x, x)]
        first = emit_plot(series, tmp_path / "a.svg", title="t").read_bytes()
        second = emit_plot(series, tmp_path / "b.svg", title="t").read_bytes()
        assert first == second
        assert first.lstrip().startswith(b"<?xml")
