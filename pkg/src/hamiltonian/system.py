"""
system.py — Spin-system description and its JSON loader.

System file layout (frequencies in Hz, times in seconds):

    {
      "name": "btp",
      "n": 2,
      "shifts_hz": [-96.02, 96.02],
      "j_hz": [[0, 4.02], [4.02, 0]],
      "t1_s": [5.2, 6.2],
      "t2_s": [null, null],
      "singlet": {"ts_s": 16.6, "t_triplet_s": 2.83, "t_coh_s": 1.0},
      "lock_pairs": [[1, 2]]
    }
"""

import json
import logging
import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from src.core.errors import ConfigError


# ---------------------------------------------------------------------------
# Data types
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class SingletRelaxParams:
    ts_s: float
    t_triplet_s: float
    t_coh_s: float
    # Fraction of the thermal triplet polarisation the locked manifold relaxes toward
    lock_equilibrium: float = 0.0

    def __post_init__(self):
        if not self.ts_s > self.t_triplet_s > 0:
            raise ValueError(f"Singlet constants need ts_s > t_triplet_s > 0 (got {self.ts_s}, {self.t_triplet_s})")
        if not self.t_coh_s > 0:
            raise ValueError(f"t_coh_s must be positive (got {self.t_coh_s})")
        if not 0 <= self.lock_equilibrium <= 1:
            raise ValueError(f"lock_equilibrium must lie in [0, 1] (got {self.lock_equilibrium})")

    @classmethod
    def ideal(cls) -> "SingletRelaxParams":
        """T_S -> infinity, triplet equilibration and coherence decay instantaneous."""
        return cls(ts_s=math.inf, t_triplet_s=1e-12, t_coh_s=1e-12)


@dataclass(frozen=True, eq=False)
class SpinSystem:
    n: int
    shifts_hz: tuple[float, ...]
    j_hz: np.ndarray
    t1_s: tuple[float | None, ...] = ()
    t2_s: tuple[float | None, ...] = ()
    singlet: SingletRelaxParams | None = None
    lock_pairs: tuple[tuple[int, int], ...] = ((1, 2),)
    name: str = ""
    labels: tuple[str, ...] = field(default=())

    def __post_init__(self):
        if self.n < 1:
            raise ValueError("A spin system needs at least one spin")
        if len(self.shifts_hz) != self.n:
            raise ValueError(f"Expected {self.n} shifts, got {len(self.shifts_hz)}")

        j = np.zeros((self.n, self.n)) if self.j_hz is None else np.array(self.j_hz, dtype=float)
        if j.shape != (self.n, self.n):
            raise ValueError(f"j_hz must be {self.n}x{self.n}")
        if not np.allclose(j, j.T, atol=1e-12) or np.any(np.diag(j) != 0):
            raise ValueError("j_hz must be symmetric with a zero diagonal")
        j.setflags(write=False)
        object.__setattr__(self, "j_hz", j)
        object.__setattr__(self, "shifts_hz", tuple(float(v) for v in self.shifts_hz))

        t1 = tuple(self.t1_s) or (None,) * self.n
        t2 = tuple(self.t2_s) or (None,) * self.n
        if len(t1) != self.n or len(t2) != self.n:
            raise ValueError(f"t1_s and t2_s need {self.n} entries")
        for k, (a, b) in enumerate(zip(t1, t2), start=1):
            if a is not None and a <= 0 or b is not None and b <= 0:
                raise ValueError(f"Relaxation constants of spin {k} must be positive")
            if a is not None and b is not None and a < b:
                raise ValueError(f"Spin {k}: T1 ({a}) must not be shorter than T2 ({b})")
        object.__setattr__(self, "t1_s", t1)
        object.__setattr__(self, "t2_s", t2)

        pairs = tuple(tuple(int(k) for k in p) for p in self.lock_pairs) if self.n >= 2 else ()
        for a, b in pairs:
            if not (1 <= a <= self.n and 1 <= b <= self.n and a != b):
                raise ValueError(f"Invalid lock pair ({a}, {b})")
        object.__setattr__(self, "lock_pairs", pairs)

    def coupling(self, a: int, b: int) -> float:
        return float(self.j_hz[a - 1, b - 1])

    def delta_nu(self, a: int = 1, b: int = 2) -> float:
        """Shift difference nu_b - nu_a in Hz."""
        return self.shifts_hz[b - 1] - self.shifts_hz[a - 1]

    def pair_delta_hz(self, a: int = 1, b: int = 2) -> float:
        return abs(self.delta_nu(a, b))

    def with_singlet(self, singlet: SingletRelaxParams | None) -> "SpinSystem":
        return SpinSystem(self.n, self.shifts_hz, self.j_hz, self.t1_s, self.t2_s,
                          singlet, self.lock_pairs, self.name, self.labels)

    def with_relaxation(self, t1_s=None, t2_s=None) -> "SpinSystem":
        return SpinSystem(self.n, self.shifts_hz, self.j_hz,
                          tuple(t1_s) if t1_s is not None else (),
                          tuple(t2_s) if t2_s is not None else (),
                          self.singlet, self.lock_pairs, self.name, self.labels)

    def without_relaxation(self) -> "SpinSystem":
        return self.with_relaxation()


def two_spin_system(delta_nu_hz: float, j_hz: float, **kwargs) -> SpinSystem:
    """Convenience constructor with nu1 = -delta/2 and nu2 = +delta/2."""
    return SpinSystem(n=2, shifts_hz=(-delta_nu_hz / 2, delta_nu_hz / 2),
                      j_hz=np.array([[0, j_hz], [j_hz, 0]]), **kwargs)


# ---------------------------------------------------------------------------
# Loading
# ---------------------------------------------------------------------------

_SYSTEM_KEYS = {"name", "n", "shifts_hz", "j_hz", "t1_s", "t2_s", "singlet", "lock_pairs", "labels"}
_SINGLET_KEYS = {"ts_s", "t_triplet_s", "t_coh_s", "lock_equilibrium"}


def system_from_dict(data: dict, source: str = "<dict>") -> SpinSystem:
    unknown = sorted(set(data) - _SYSTEM_KEYS)
    if unknown:
        raise ConfigError(f"{source}: unknown system keys {', '.join(unknown)}")
    for key in ("n", "shifts_hz"):
        if key not in data:
            raise ConfigError(f"{source}: missing required field '{key}'")

    singlet = None
    if data.get("singlet") is not None:
        extra = sorted(set(data["singlet"]) - _SINGLET_KEYS)
        if extra:
            raise ConfigError(f"{source}: unknown singlet keys {', '.join(extra)}")
        try:
            singlet = SingletRelaxParams(**data["singlet"])
        except (TypeError, ValueError) as e:
            raise ConfigError(f"{source}: singlet: {e}") from e

    n = data["n"]
    try:
        return SpinSystem(
            n=n,
            shifts_hz=tuple(data["shifts_hz"]),
            j_hz=np.array(data.get("j_hz", np.zeros((n, n))), dtype=float),
            t1_s=tuple(data.get("t1_s", ())),
            t2_s=tuple(data.get("t2_s", ())),
            singlet=singlet,
            lock_pairs=tuple(tuple(p) for p in data.get("lock_pairs", [[1, 2]])),
            name=data.get("name", ""),
            labels=tuple(data.get("labels", ())),
        )
    except (TypeError, ValueError) as e:
        raise ConfigError(f"{source}: {e}") from e


def load_system(path: Path) -> SpinSystem:
    path = Path(path)
    if not path.exists():
        raise ConfigError(f"System file not found: {path}")
    try:
        with open(path, encoding="utf-8") as f:
            data = json.load(f)
    except json.JSONDecodeError as e:
        raise ConfigError(f"Invalid JSON in {path}: {e}") from e

    system = system_from_dict(data, source=str(path))
    logging.info(f"Loaded spin system '{system.name or path.stem}' ({system.n} spins) from {path}")
    return system
