"""
compile.py — Turn sequences into propagators, or run them element by element.
"""

import functools
import logging

import numpy as np

from src.hamiltonian.hamiltonian import weak_coupling
from src.hamiltonian.system import SpinSystem
from src.relax.channels import free_relax, lock_amplitude_warning, spin_lock
from src.sequence.elements import (
    Barrier,
    CouplingRotation,
    Delay,
    Gate,
    Gradient,
    Pulse,
    Sequence,
    SequenceElement,
    SpinLock,
    ZRotation,
)
from src.spinops.operators import (
    State,
    as_matrix,
    bit,
    conjugate,
    dim_of,
    embed,
    propagator,
    rotation,
    spin,
    z_rotation,
)


# ---------------------------------------------------------------------------
# Coherence orders
# ---------------------------------------------------------------------------

@functools.lru_cache(maxsize=None)
def coherence_order_mask(n: int) -> np.ndarray:
    """Entry (a, b) = m_a - m_b, the total z quantum number difference."""
    popcount = np.array([bin(i).count("1") for i in range(dim_of(n))])
    mask = popcount[None, :] - popcount[:, None]
    mask.setflags(write=False)
    return mask


def gradient_filter(deviation: np.ndarray) -> np.ndarray:
    n = int(np.log2(deviation.shape[0]))
    return np.where(coherence_order_mask(n) == 0, deviation, 0)


# ---------------------------------------------------------------------------
# Unitary elements
# ---------------------------------------------------------------------------

def embed_gate(n: int, targets: tuple[int, ...], matrix: np.ndarray) -> np.ndarray:
    """Lift a gate on `targets` (first target = most significant bit) to n spins."""
    m = len(targets)
    masks = [bit(n, k) for k in targets]
    size = dim_of(n)
    full = np.zeros((size, size), dtype=complex)
    for i in range(size):
        sub_in = 0
        for pos, mask in enumerate(masks):
            if i & mask:
                sub_in |= 1 << (m - 1 - pos)
        rest = i & ~sum(masks)
        for sub_out in range(2 ** m):
            j = rest
            for pos, mask in enumerate(masks):
                if sub_out >> (m - 1 - pos) & 1:
                    j |= mask
            full[j, i] = matrix[sub_out, sub_in]
    return full


def element_unitary(element: SequenceElement, system: SpinSystem, rf_error: float = 0.0) -> np.ndarray:
    n = system.n
    match element:
        case Pulse(angle=angle, phase=phase, targets=targets):
            return rotation(n, targets or range(1, n + 1), angle * (1 + rf_error), phase)
        case Delay(t_s=t, couplings_active=couplings, shifts_active=shifts):
            return propagator(weak_coupling(system, shifts=shifts, couplings=couplings), t)
        case ZRotation(angles=angles):
            return z_rotation(n, dict(angles))
        case CouplingRotation(pair=(a, b), angle=angle):
            return propagator(2 * embed(n, a, spin("z")) @ embed(n, b, spin("z")), angle)
        case Gate(targets=targets, matrix=matrix):
            return embed_gate(n, targets, matrix)
        case Barrier():
            return np.eye(dim_of(n), dtype=complex)
        case Gradient() | SpinLock():
            raise ValueError(f"{type(element).__name__} is not a unitary element")
    raise TypeError(f"Unknown sequence element {element!r}")


def compile_unitary(seq: Sequence, system: SpinSystem, rf_error: float = 0.0) -> np.ndarray:
    """Ordered product of element propagators; the first element acts first."""
    if not seq.is_unitary:
        raise ValueError(f"Sequence '{seq.name}' contains non-unitary elements")
    u = np.eye(dim_of(system.n), dtype=complex)
    for element in seq.elements:
        u = element_unitary(element, system, rf_error) @ u
    return u


# ---------------------------------------------------------------------------
# Element-wise simulation
# ---------------------------------------------------------------------------

def apply(seq: Sequence, system: SpinSystem, state: "State | np.ndarray", relax: bool = False,
          rf_error: float = 0.0) -> "State | np.ndarray":
    """
    Run `seq` element by element. Delays are followed by free relaxation when
    `relax` is set; gradients filter coherences; spin-locks delegate to the
    singlet/triplet channel.
    """
    d = as_matrix(state)
    for element in seq.elements:
        match element:
            case Gradient():
                d = gradient_filter(d)
            case SpinLock(t_s=t, amp_hz=amp, pairs=pairs):
                pairs = pairs or system.lock_pairs[:1]
                warning = lock_amplitude_warning(system, amp, pairs)
                if warning:
                    logging.warning(warning)
                d = spin_lock(d, system, t, pairs)
            case Delay(t_s=t):
                d = conjugate(element_unitary(element, system, rf_error), d)
                if relax:
                    d = free_relax(d, system, t)
            case _:
                d = conjugate(element_unitary(element, system, rf_error), d)
    logging.debug(f"Applied sequence '{seq.name}' ({len(seq.elements)} elements)")
    return state.with_deviation(d) if isinstance(state, State) else d
