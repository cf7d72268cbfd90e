"""
output.py — CSV, JSON and SVG emission.

Every writer produces deterministic bytes for fixed input: CSV numbers use
12 significant digits, JSON keys are sorted, SVG output carries no date and
a fixed hash salt.
"""

import csv
import json
import logging
from dataclasses import dataclass
from pathlib import Path
from typing import Any, Iterable, Sequence

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402

from src.core.errors import ConfigError  # noqa: E402


@dataclass
class PlotSeries:
    label: str
    x: np.ndarray
    y: np.ndarray


def format_number(value: Any) -> str:
    if isinstance(value, (bool, np.bool_)):
        return str(int(value))
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    if isinstance(value, (float, np.floating)):
        return f"{float(value):.12g}"
    return str(value)


def _ensure_parent(path: Path):
    try:
        path.parent.mkdir(parents=True, exist_ok=True)
    except OSError as e:
        raise ConfigError(f"Cannot create output directory {path.parent}: {e}") from e


def write_csv(path: Path, header: Sequence[str], rows: Iterable[Sequence[Any]],
              metadata: dict[str, Any] | None = None) -> Path:
    """Write a header-first CSV; metadata becomes leading '# key=value' lines."""
    _ensure_parent(path)
    try:
        with open(path, "w", newline="", encoding="utf-8") as f:
            for key, value in (metadata or {}).items():
                f.write(f"# {key}={format_number(value)}\n")
            writer = csv.writer(f, lineterminator="\n")
            writer.writerow(header)
            for row in rows:
                writer.writerow([format_number(v) for v in row])
    except OSError as e:
        raise ConfigError(f"Cannot write {path}: {e}") from e
    logging.info(f"Wrote {path}")
    return path


def _jsonable(value: Any) -> Any:
    if isinstance(value, dict):
        return {str(k): _jsonable(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_jsonable(v) for v in value]
    if isinstance(value, np.ndarray):
        return [_jsonable(v) for v in value.tolist()]
    if isinstance(value, (bool, np.bool_)):
        return bool(value)
    if isinstance(value, (int, np.integer)):
        return int(value)
    if isinstance(value, (float, np.floating)):
        value = float(value)
        if not np.isfinite(value):
            return str(value)
        return float(f"{value:.12g}")
    if isinstance(value, Path):
        return value.as_posix()
    return value


def write_json(path: Path, payload: dict[str, Any]) -> Path:
    _ensure_parent(path)
    try:
        with open(path, "w", encoding="utf-8") as f:
            json.dump(_jsonable(payload), f, indent=2, sort_keys=True)
            f.write("\n")
    except OSError as e:
        raise ConfigError(f"Cannot write {path}: {e}") from e
    logging.info(f"Wrote {path}")
    return path


def emit_plot(series: Sequence[PlotSeries], path: Path, title: str = "",
              xlabel: str = "", ylabel: str = "") -> Path:
    """Self-contained SVG line plot with reproducible bytes."""
    _ensure_parent(path)
    with plt.rc_context({"svg.hashsalt": "spinlab", "svg.fonttype": "path"}):
        fig, ax = plt.subplots(figsize=(6.4, 4.0))
        for s in series:
            ax.plot(np.asarray(s.x), np.asarray(s.y), label=s.label)
        ax.set_title(title)
        ax.set_xlabel(xlabel)
        ax.set_ylabel(ylabel)
        if len(series) > 1:
            ax.legend()
        ax.grid(True, alpha=0.3)
        try:
            fig.savefig(path, format="svg", metadata={"Date": None})
        except OSError as e:
            raise ConfigError(f"Cannot write {path}: {e}") from e
        finally:
            plt.close(fig)
    logging.info(f"Wrote {path}")
    return path
