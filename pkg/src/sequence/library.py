"""
library.py — Named pulse programs.

Two flavours exist for the singlet experiments: physical sequences timed from
the system's shift difference and J (singlet_prep, singlet_detect,
singlet_to_pps), and literal gate forms (u1_ideal, ud_ideal, u2_ideal) that
need no system. Both act identically on the deviations they are built for.

Time order throughout: the first element acts first.
"""

from collections.abc import Callable

import numpy as np

from src.hamiltonian.system import SpinSystem
from src.sequence.elements import (
    Barrier,
    CouplingRotation,
    Delay,
    Gate,
    Gradient,
    Pulse,
    Sequence,
    ZRotation,
)

HALF_PI = np.pi / 2
QUARTER_PI = np.pi / 4

_BELL_NAMES = ("psi-plus", "psi-minus", "phi-plus", "phi-minus")


def _pair_timing(system: SpinSystem, pair: tuple[int, int]) -> tuple[float, float]:
    delta = system.pair_delta_hz(*pair)
    j = abs(system.coupling(*pair))
    if delta == 0 or j == 0:
        raise ValueError(f"Pair {pair} needs a non-zero shift difference and coupling")
    return delta, j


# ---------------------------------------------------------------------------
# Singlet experiments (physical timing)
# ---------------------------------------------------------------------------

def singlet_prep(system: SpinSystem, pair: tuple[int, int] = (1, 2), echo: bool = True,
                 idealized: bool = True) -> Sequence:
    """
    90_0 - t1 - 180_90 - t1 - 1/(2 dnu) - 90_90 - 1/(4 dnu), t1 = 1/(4J).

    Maps I_z^a + I_z^b to |S0><S0| - |T0><T0|. With `idealized` the
    shift-evolution delays run with J switched off; otherwise every delay
    evolves under the full Hamiltonian. Without `echo` the J block is a
    single 1/(2J) delay with shifts switched off.
    """
    delta, j = _pair_timing(system, pair)
    tau1 = 1 / (4 * j)
    elements = [Pulse(HALF_PI, 0.0, pair)]
    if echo:
        # 180_90 keeps the echoed magnetization on its axis; 180_0 lands on |T0><T0| - |S0><S0|
        elements += [Delay(tau1), Pulse(np.pi, HALF_PI, pair), Delay(tau1)]
    else:
        elements += [Delay(2 * tau1, shifts_active=False)]
    elements += [
        Delay(1 / (2 * delta), couplings_active=not idealized),
        Pulse(HALF_PI, HALF_PI, pair),
        Delay(1 / (4 * delta), couplings_active=not idealized),
    ]
    return Sequence("singlet_prep", tuple(elements))


def singlet_detect(system: SpinSystem, pair: tuple[int, int] = (1, 2)) -> Sequence:
    """1/(4 dnu) shift evolution then 90_0: singlet order becomes antiphase signal."""
    delta, _ = _pair_timing(system, pair)
    return Sequence("singlet_detect", (
        Delay(1 / (4 * delta), couplings_active=False),
        Pulse(HALF_PI, 0.0, pair),
    ))


def singlet_to_pps(system: SpinSystem, pair: tuple[int, int] = (1, 2), refocus: bool = False) -> Sequence:
    """
    1/(4 dnu) - 90_0 - 1/(2J) - 90_180: singlet order to the |01> pseudopure
    state. With `refocus` the J block carries a 180_0 echo, which lands on |10>.
    """
    delta, j = _pair_timing(system, pair)
    tau1 = 1 / (4 * j)
    elements = [Delay(1 / (4 * delta), couplings_active=False), Pulse(HALF_PI, 0.0, pair)]
    if refocus:
        elements += [Delay(tau1), Pulse(np.pi, 0.0, pair), Delay(tau1)]
    else:
        elements += [Delay(2 * tau1, shifts_active=False)]
    elements += [Pulse(HALF_PI, np.pi, pair)]
    return Sequence("singlet_to_pps", tuple(elements))


# ---------------------------------------------------------------------------
# Singlet experiments (gate form)
# ---------------------------------------------------------------------------

def u1_ideal(pair: tuple[int, int] = (1, 2)) -> Sequence:
    a, b = pair
    return Sequence("u1", (
        Pulse(HALF_PI, 0.0, pair),
        CouplingRotation(pair, HALF_PI),
        ZRotation(((a, HALF_PI), (b, -HALF_PI))),
        Pulse(HALF_PI, HALF_PI, pair),
        ZRotation(((a, QUARTER_PI), (b, -QUARTER_PI))),
    ))


def ud_ideal(pair: tuple[int, int] = (1, 2)) -> Sequence:
    a, b = pair
    return Sequence("ud", (
        ZRotation(((a, -QUARTER_PI), (b, QUARTER_PI))),
        Pulse(HALF_PI, 0.0, pair),
    ))


def u2_ideal(pair: tuple[int, int] = (1, 2), refocus: bool = False) -> Sequence:
    a, b = pair
    elements = [
        ZRotation(((a, -QUARTER_PI), (b, QUARTER_PI))),
        Pulse(HALF_PI, 0.0, pair),
        CouplingRotation(pair, HALF_PI),
    ]
    if refocus:
        elements.append(Pulse(np.pi, 0.0, pair))
    elements.append(Pulse(HALF_PI, np.pi, pair))
    return Sequence("u2_refocused" if refocus else "u2", tuple(elements))


def bell_from_singlet(which: str, pair: tuple[int, int] = (1, 2)) -> Sequence:
    """psi-minus is the singlet itself; z(pi) on the first spin gives psi-plus, x(pi) on the second swaps psi/phi."""
    if which not in _BELL_NAMES:
        raise ValueError(f"Unknown Bell state {which!r}; expected one of {', '.join(_BELL_NAMES)}")
    a, b = pair
    elements = []
    if which.endswith("plus"):
        elements.append(ZRotation(((a, -np.pi),)))
    if which.startswith("phi"):
        elements.append(Pulse(np.pi, 0.0, (b,)))
    return Sequence(f"bell_{which}", tuple(elements) or (Barrier(which),))


# ---------------------------------------------------------------------------
# Gates
# ---------------------------------------------------------------------------

def cnot(control: int, target: int, polarity: int = 1) -> Sequence:
    """Ideal CNOT; polarity 0 (C'NOT) flips the target when the control is |0>."""
    if polarity not in (0, 1):
        raise ValueError(f"CNOT polarity must be 0 or 1, got {polarity}")
    flip = np.array([[0, 1], [1, 0]], dtype=complex)
    eye = np.eye(2, dtype=complex)
    p0 = np.diag([1, 0]).astype(complex)
    p1 = np.diag([0, 1]).astype(complex)
    matrix = np.kron(p1, flip) + np.kron(p0, eye) if polarity else np.kron(p0, flip) + np.kron(p1, eye)
    name = "cnot" if polarity else "c'not"
    return Sequence(f"{name}({control},{target})", (Gate(name, (control, target), matrix),))


def cnot_pulsed(system: SpinSystem, control: int = 1, target: int = 2) -> Sequence:
    """
    CNOT from pulses and J evolution, equal to `cnot` up to a global phase:
    (pi/2)_-y on the target, (pi/2)_-z on both, tau/2 - pi_y - tau/2 with
    tau = 1/(2J), pi_y on the control, (pi/2)_-y on the target. The
    trailing pi_y pair on the control is a 2pi rotation; the target pi_y folds
    into the last pulse.
    """
    j = system.coupling(control, target)
    if j == 0:
        raise ValueError(f"Spins {control} and {target} are not coupled")
    half = 1 / (4 * abs(j))
    sign = 1 if j > 0 else -1
    both = (control, target)
    return Sequence(f"cnot_pulsed({control},{target})", (
        Pulse(HALF_PI, -HALF_PI, (target,)),
        ZRotation(((control, -sign * HALF_PI), (target, -sign * HALF_PI))),
        Delay(half),
        Pulse(np.pi, HALF_PI, both),
        Delay(half),
        Pulse(np.pi, HALF_PI, (control,)),
        Pulse(HALF_PI, -HALF_PI, (target,)),
    ))


def pseudo_hadamard(k: int) -> Sequence:
    """(pi/2)_-y: |0> -> (|0> - |1>)/sqrt(2)."""
    return Sequence(f"h({k})", (Pulse(HALF_PI, -HALF_PI, (k,)),))


def not_gate(k: int) -> Sequence:
    return Sequence(f"not({k})", (Pulse(np.pi, 0.0, (k,)),))


def crusher() -> Sequence:
    return Sequence("gradient", (Gradient(),))


# ---------------------------------------------------------------------------
# Registry
# ---------------------------------------------------------------------------

NAMED_SEQUENCES: dict[str, Callable[[SpinSystem], Sequence]] = {
    "singlet_prep": singlet_prep,
    "singlet_detect": singlet_detect,
    "singlet_to_pps": singlet_to_pps,
    "u1": lambda system: u1_ideal(),
    "ud": lambda system: ud_ideal(),
    "u2": lambda system: u2_ideal(),
    "cnot": lambda system: cnot(1, 2),
    "cnot_pulsed": cnot_pulsed,
    "gradient": lambda system: crusher(),
}


def named_sequence(name: str, system: SpinSystem) -> Sequence:
    try:
        factory = NAMED_SEQUENCES[name]
    except KeyError:
        raise ValueError(f"Unknown named sequence {name!r}") from None
    return factory(system)
