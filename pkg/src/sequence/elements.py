"""
elements.py — Symbolic pulse-program elements and sequence files.

Sequences are listed in time order: elements[0] acts first. Compiled
operator products therefore put the last element leftmost.
"""

import json
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from src.core.errors import ConfigError


# ---------------------------------------------------------------------------
# Data types
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Pulse:
    angle: float
    phase: float = 0.0
    targets: tuple[int, ...] | None = None   # None: non-selective

    def __post_init__(self):
        if not np.isfinite(self.angle) or not np.isfinite(self.phase):
            raise ValueError("Pulse angle and phase must be finite")
        if self.targets is not None:
            object.__setattr__(self, "targets", tuple(self.targets))


@dataclass(frozen=True)
class Delay:
    t_s: float
    couplings_active: bool = True
    shifts_active: bool = True

    def __post_init__(self):
        if not self.t_s >= 0:
            raise ValueError(f"Delay must be non-negative, got {self.t_s}")


@dataclass(frozen=True)
class Gradient:
    """Crusher: keeps coherence-order-zero elements only."""


@dataclass(frozen=True)
class SpinLock:
    t_s: float
    amp_hz: float = 0.0
    offset_hz: float = 0.0
    pairs: tuple[tuple[int, int], ...] | None = None   # None: the system's lock pairs

    def __post_init__(self):
        if not self.t_s >= 0:
            raise ValueError(f"Spin-lock duration must be non-negative, got {self.t_s}")
        if self.pairs is not None:
            object.__setattr__(self, "pairs", tuple(tuple(p) for p in self.pairs))


@dataclass(frozen=True)
class Barrier:
    label: str = ""


@dataclass(frozen=True)
class ZRotation:
    """exp(-i sum_k angle_k I_z^k) with per-spin signed angles."""
    angles: tuple[tuple[int, float], ...]

    def __post_init__(self):
        object.__setattr__(self, "angles", tuple((int(k), float(a)) for k, a in dict(self.angles).items()))


@dataclass(frozen=True)
class CouplingRotation:
    """exp(-i angle 2 I_z^a I_z^b)"""
    pair: tuple[int, int]
    angle: float


@dataclass(frozen=True, eq=False)
class Gate:
    """Ideal unitary on `targets` (first target is the most significant bit of `matrix`)."""
    name: str
    targets: tuple[int, ...]
    matrix: np.ndarray = field(repr=False)

    def __post_init__(self):
        m = np.array(self.matrix, dtype=complex)
        if m.shape != (2 ** len(self.targets),) * 2:
            raise ValueError(f"Gate {self.name}: matrix shape {m.shape} does not fit {len(self.targets)} targets")
        m.setflags(write=False)
        object.__setattr__(self, "matrix", m)
        object.__setattr__(self, "targets", tuple(self.targets))


SequenceElement = Pulse | Delay | Gradient | SpinLock | Barrier | ZRotation | CouplingRotation | Gate

NON_UNITARY = (Gradient, SpinLock)


@dataclass(frozen=True)
class Sequence:
    name: str
    elements: tuple[SequenceElement, ...]

    def __post_init__(self):
        object.__setattr__(self, "elements", tuple(self.elements))
        if not self.elements:
            raise ValueError(f"Sequence '{self.name}' is empty")

    def __add__(self, other: "Sequence") -> "Sequence":
        return Sequence(f"{self.name}+{other.name}", self.elements + other.elements)

    @property
    def is_unitary(self) -> bool:
        return not any(isinstance(e, NON_UNITARY) for e in self.elements)

    @property
    def duration_s(self) -> float:
        return sum(e.t_s for e in self.elements if isinstance(e, (Delay, SpinLock)))


def concat(name: str, *parts: "Sequence | SequenceElement") -> Sequence:
    elements = []
    for part in parts:
        elements.extend(part.elements if isinstance(part, Sequence) else [part])
    return Sequence(name, tuple(elements))


# ---------------------------------------------------------------------------
# Sequence files
# ---------------------------------------------------------------------------

def _element_from_dict(item: dict, source: str) -> SequenceElement:
    kind = item.get("type")
    params = {k: v for k, v in item.items() if k != "type"}
    try:
        match kind:
            case "pulse":
                targets = params.get("targets")
                return Pulse(np.deg2rad(params["angle_deg"]), np.deg2rad(params.get("phase_deg", 0.0)),
                             tuple(targets) if targets else None)
            case "delay":
                return Delay(float(params["t_s"]), params.get("couplings_active", True),
                             params.get("shifts_active", True))
            case "gradient":
                return Gradient()
            case "spin_lock":
                pairs = params.get("pairs")
                return SpinLock(float(params["t_s"]), params.get("amp_hz", 0.0), params.get("offset_hz", 0.0),
                                tuple(tuple(p) for p in pairs) if pairs else None)
            case "barrier":
                return Barrier(params.get("label", ""))
            case "z_rotation":
                return ZRotation(tuple((int(k), np.deg2rad(a)) for k, a in params["angles_deg"].items()))
            case _:
                raise ConfigError(f"{source}: unknown element type {kind!r}")
    except KeyError as e:
        raise ConfigError(f"{source}: element '{kind}' is missing {e}") from e
    except (TypeError, ValueError) as e:
        raise ConfigError(f"{source}: element '{kind}': {e}") from e


def sequence_from_dict(data: dict, source: str = "<dict>", system=None) -> Sequence:
    """
    Elements are {"type": ..., params} objects, or {"type": "named",
    "name": ...} references resolved through the sequence library.
    """
    from src.sequence.library import named_sequence

    elements: list[SequenceElement] = []
    for item in data.get("elements", []):
        if item.get("type") == "named":
            if system is None:
                raise ConfigError(f"{source}: named sequence '{item.get('name')}' needs a spin system")
            elements.extend(named_sequence(item["name"], system).elements)
        else:
            elements.append(_element_from_dict(item, source))
    if not elements:
        raise ConfigError(f"{source}: sequence has no elements")
    return Sequence(data.get("name", Path(source).stem), tuple(elements))


def load_sequence(path: Path, system=None) -> Sequence:
    path = Path(path)
    if not path.exists():
        raise ConfigError(f"Sequence file not found: {path}")
    try:
        with open(path, encoding="utf-8") as f:
            data = json.load(f)
    except json.JSONDecodeError as e:
        raise ConfigError(f"Invalid JSON in {path}: {e}") from e
    return sequence_from_dict(data, str(path), system)
