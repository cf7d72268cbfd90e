"""
Validate command - Verify system files and environment
"""

import logging
import os
from pathlib import Path

from src.core.core import get_project_root, load_env, systems_dir
from src.core.errors import ConfigError
from src.hamiltonian.system import load_system
from src.perf.performance import timed_command


def check_system_file(path: Path) -> str | None:
    """Error message for an unusable system file, None when it loads."""
    try:
        system = load_system(path)
    except ConfigError as e:
        return str(e)
    for a, b in system.lock_pairs:
        if system.singlet is not None and system.pair_delta_hz(a, b) == 0:
            return f"{path}: lock pair ({a}, {b}) has no shift difference"
    logging.debug(f"Validated {path}: {system.n} spins")
    return None


@timed_command
def cmd_validate(args):
    """Validate system files and configuration"""
    print("spinlab - Configuration Validation")
    print("=" * 60)

    project_root = get_project_root()
    errors = []
    warnings = []

    env_file = project_root / ".env"
    if env_file.exists():
        print("[OK] .env file found")
    else:
        warnings.append(".env not found - defaults apply (template: .env.dist)")
        print("[WARN] .env file missing, using defaults")
    env = load_env()

    raw = os.environ.get("SPINLAB_THREADS", env.get("SPINLAB_THREADS"))
    if raw is not None:
        try:
            int(raw)
            print(f"[OK] SPINLAB_THREADS={raw}")
        except ValueError:
            errors.append(f"SPINLAB_THREADS must be an integer, got {raw!r}")
            print(f"[FAIL] SPINLAB_THREADS={raw!r} is not an integer")

    print("\nValidating system files...")
    given = getattr(args, "system", None)
    files = [Path(given)] if given else sorted(systems_dir().glob("*.json"))
    if not files:
        errors.append(f"No system files found in {systems_dir()}")
    for path in files:
        problem = check_system_file(path)
        if problem:
            errors.append(problem)
            print(f"  [FAIL] {path.name}: {problem}")
        else:
            print(f"  [OK] {path.name}")

    print("\nValidating .gitignore...")
    gitignore_file = project_root / ".gitignore"
    if not gitignore_file.exists():
        warnings.append(".gitignore not found - outputs and logs might be committed")
        print("  [WARN] .gitignore not found")
    else:
        content = gitignore_file.read_text(encoding="utf-8")
        missing = [entry for entry in (".env", "out/", "logs/") if entry not in content]
        if missing:
            warnings.append(f".gitignore lacks {', '.join(missing)}")
            print(f"  [WARN] .gitignore lacks {', '.join(missing)}")
        else:
            print("  [OK] .env, out/ and logs/ ignored")

    print("\n" + "=" * 60)
    if errors:
        print(f"[FAIL] Validation failed with {len(errors)} error(s)")
        for error in errors:
            print(f"  - {error}")
        return 2
    if warnings:
        print(f"[OK] Validation passed with {len(warnings)} warning(s)")
        for warning in warnings:
            print(f"  - {warning}")
        return 0
    print("[OK] All checks passed!")
    print("\nReady to use:")
    print("  spinlab singlet --system btp")
    print("  spinlab tomo --scheme 2spin --seed 1")
    print("  spinlab dd --scheme udd --order 7")
    return 0
