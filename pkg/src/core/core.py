"""
spinlab - Core Utilities

Shared utilities for environment loading, logging, path management and
parallelism settings.
"""

import logging
import os
import sys
from pathlib import Path


def setup_logging(verbosity: int):
    """Configure logging based on verbosity level"""
    levels = {
        0: logging.WARNING,
        1: logging.INFO,
        2: logging.DEBUG
    }
    level = levels.get(verbosity, logging.DEBUG)

    project_root = get_project_root()
    log_dir = project_root / "logs"
    log_dir.mkdir(exist_ok=True)
    log_file = log_dir / "spinlab.log"

    logging.basicConfig(
        level=level,
        format='%(asctime)s - %(levelname)s - %(message)s',
        handlers=[
            logging.FileHandler(log_file, mode='a', encoding='utf-8'),
            logging.StreamHandler(stream=open(sys.stdout.fileno(), mode='w', encoding='utf-8', closefd=False))
        ]
    )


def load_env(env_path: Path | None = None) -> dict[str, str]:
    """Load .env file; a missing file yields an empty mapping"""
    if env_path is None:
        env_path = get_project_root() / ".env"
    env = {}

    if not env_path.exists():
        logging.debug(f".env not found at {env_path}, using defaults")
        return env

    with open(env_path) as f:
        for line in f:
            line = line.strip()
            if line and not line.startswith('#') and '=' in line:
                key, value = line.split('=', 1)
                env[key.strip()] = value.strip()

    return env


def thread_count(env: dict[str, str] | None = None) -> int:
    """
    Resolve the worker count for joblib sweeps.

    SPINLAB_THREADS from the process environment wins over .env.
    Values <= 0 mean "all cores" (joblib's -1).
    """
    if env is None:
        env = load_env()
    raw = os.environ.get("SPINLAB_THREADS", env.get("SPINLAB_THREADS", "1"))
    try:
        value = int(raw)
    except ValueError:
        logging.warning(f"Ignoring non-integer SPINLAB_THREADS={raw!r}")
        return 1
    return -1 if value <= 0 else value


def get_project_root() -> Path:
    """Get project root directory (one level up from src/)"""
    # From src/core/core.py -> src/core/ -> src/ -> project_root/
    return Path(__file__).parent.parent.parent


def systems_dir() -> Path:
    """Directory holding the shipped example spin systems"""
    return get_project_root() / "resources" / "systems"
