"""
scenario.py — Scenario configuration shared by every simulation command.

A scenario is assembled from three layers, later layers winning:
command defaults, an optional TOML scenario file, explicit CLI flags.

Scenario file layout:

    command = "dd"
    system  = "btp.json"
    output  = "out/dd"
    seed    = 42

    [params]
    scheme = "udd"
    order  = 7
"""

import logging
import tomllib
from argparse import Namespace
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any

import numpy as np

from src.core.core import get_project_root, systems_dir
from src.core.errors import ConfigError


# ---------------------------------------------------------------------------
# Data types
# ---------------------------------------------------------------------------

_TOP_LEVEL_KEYS = {"command", "system", "output", "seed", "params"}


@dataclass(frozen=True)
class ScenarioConfig:
    command: str
    system: Path | None
    output: Path
    seed: int | None = None
    params: dict[str, Any] = field(default_factory=dict)

    def __getitem__(self, key: str) -> Any:
        return self.params[key]

    def require_seed(self, reason: str) -> int:
        if self.seed is None:
            raise ConfigError(f"{self.command}: --seed is required ({reason})")
        return self.seed

    def rng(self, reason: str) -> np.random.Generator:
        return np.random.default_rng(self.require_seed(reason))

    def require_system(self) -> Path:
        if self.system is None:
            raise ConfigError(f"{self.command}: --system is required")
        return self.system


# ---------------------------------------------------------------------------
# Loading
# ---------------------------------------------------------------------------

def load_scenario_file(path: Path) -> dict[str, Any]:
    if not path.exists():
        raise ConfigError(f"Scenario file not found: {path}")
    try:
        with open(path, "rb") as f:
            data = tomllib.load(f)
    except tomllib.TOMLDecodeError as e:
        raise ConfigError(f"Invalid scenario file {path}: {e}") from e

    unknown = sorted(set(data) - _TOP_LEVEL_KEYS)
    if unknown:
        raise ConfigError(f"Unknown scenario keys in {path}: {', '.join(unknown)}")
    if not isinstance(data.get("params", {}), dict):
        raise ConfigError(f"[params] in {path} must be a table")
    return data


def resolve_system_path(value: str | Path) -> Path:
    """Accept a literal path or the name of a shipped system file."""
    path = Path(value)
    if path.exists():
        return path
    for candidate in (systems_dir() / path.name, systems_dir() / f"{path.name}.json"):
        if candidate.exists():
            return candidate
    raise ConfigError(f"System file not found: {path}")


def build_scenario(command: str, args: Namespace, defaults: dict[str, Any]) -> ScenarioConfig:
    """
    Merge defaults, the optional --scenario file and CLI flags.

    CLI flags whose value is None count as "not given". Param keys are the
    argparse dest names, so `--t-max-s` maps to `t_max_s`.
    """
    scenario_path = getattr(args, "scenario", None)
    file_data = load_scenario_file(Path(scenario_path)) if scenario_path else {}

    file_command = file_data.get("command", command)
    if file_command != command:
        raise ConfigError(f"Scenario file is for '{file_command}', not '{command}'")

    file_params = file_data.get("params", {})
    unknown = sorted(set(file_params) - set(defaults))
    if unknown:
        raise ConfigError(f"Unknown {command} parameters: {', '.join(unknown)}")

    params = dict(defaults)
    params.update(file_params)
    for key in defaults:
        value = getattr(args, key, None)
        if value is not None:
            params[key] = value

    system_value = getattr(args, "system", None) or file_data.get("system")
    system = resolve_system_path(system_value) if system_value else None

    output_value = getattr(args, "output", None) or file_data.get("output")
    output = Path(output_value) if output_value else get_project_root() / "out" / command

    seed = getattr(args, "seed", None)
    if seed is None:
        seed = file_data.get("seed")
    if seed is not None and not isinstance(seed, int):
        raise ConfigError(f"Seed must be an integer, got {seed!r}")

    logging.info(f"Scenario {command}: system={system} output={output} seed={seed}")
    logging.debug(f"Scenario params: {params}")
    return ScenarioConfig(command=command, system=system, output=output, seed=seed, params=params)
