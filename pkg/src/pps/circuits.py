"""
circuits.py — Pseudopure-state preparation through long-lived singlets.

A register is built pairwise: the first pair is driven into its singlet
(U1), a spin-lock keeps only the singlet branch, CNOT/h/C'NOT gates copy
that structure onto every further pair, a second lock discards every branch
that did not become a singlet, U2 turns each singlet into |01> and a gradient
removes the remaining coherences.

run_circuit supports two modes:
  ideal   the epsilon-part sigma = thermal + (n/2) 1 is carried as a positive
          operator and every lock projects it onto the singlet branch of its
          pairs; the discarded weight returns to the identity background.
  finite  the thermal deviation runs through the relaxation channels of the
          spin system (spin-lock constants, free relaxation on delays).
"""

import logging
import math
from dataclasses import dataclass
from functools import reduce

import numpy as np

from src.core.errors import ConfigError
from src.hamiltonian.system import SpinSystem
from src.relax.channels import pair_singlet_projector, thermal_deviation
from src.sequence.compile import apply, element_unitary, gradient_filter
from src.sequence.elements import CouplingRotation, Gradient, Pulse, Sequence, SpinLock, concat
from src.sequence.library import (
    cnot,
    crusher,
    pseudo_hadamard,
    singlet_prep,
    singlet_to_pps,
    u1_ideal,
    u2_ideal,
)
from src.spinops.operators import (
    as_matrix,
    conjugate,
    correlation,
    deviation_of,
    diagonal_correlation,
    dim_of,
    ket,
    ket_deviation,
    pps_deviation,
    spins_of,
)

MODES = ("ideal", "finite")

DEFAULT_LOCK_S = 12.4


# ---------------------------------------------------------------------------
# Data types
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class CircuitRun:
    circuit: str
    mode: str
    target: str
    deviation: np.ndarray
    input_weight: float       # tr(sigma) of the input epsilon-part


@dataclass(frozen=True)
class PpsReport:
    target_label: str
    correlation: float
    diagonal_correlation: float
    epsilon_retained: float

    def as_dict(self) -> dict:
        return {
            "target_label": self.target_label,
            "correlation": self.correlation,
            "diagonal_correlation": self.diagonal_correlation,
            "epsilon_retained": self.epsilon_retained,
        }


# ---------------------------------------------------------------------------
# Circuits
# ---------------------------------------------------------------------------

def register_pairs(n: int) -> tuple[tuple[int, int], ...]:
    return tuple((k, k + 1) for k in range(1, n, 2))


def target_label(n: int, refocus: bool = False) -> str:
    """|0101..> (trailing 0 for odd n); refocusing the first pair gives |10..>."""
    label = "01" * (n // 2) + "0" * (n % 2)
    return "10" + label[2:] if refocus else label


def _lock(pairs, lock_s: float) -> SpinLock:
    return SpinLock(lock_s, pairs=tuple(pairs))


def pps2_circuit(system: SpinSystem, lock_s: float = DEFAULT_LOCK_S, refocus: bool = False) -> Sequence:
    """Physical singlet preparation, lock, conversion to |01>, gradient."""
    if system.n != 2:
        raise ValueError(f"pps2_circuit needs a two-spin system, got {system.n} spins")
    if system.singlet is None:
        raise ConfigError(f"Spin system '{system.name}' has no singlet relaxation parameters")
    return concat("pps2", singlet_prep(system), _lock([(1, 2)], lock_s),
                  singlet_to_pps(system, refocus=refocus), crusher())


def general_register_circuit(n: int, lock_s: float = DEFAULT_LOCK_S, refocus: bool = False) -> Sequence:
    """
    Even and odd registers in gate form. Pair (2j+1, 2j+2) is attached by
    CNOT(2j+1 -> 2j), h(2j+1), C'NOT(2j+1 -> 2j+2); an unpaired last qubit
    only gets CNOT(n -> n-1) and is never locked.
    """
    if n < 2:
        raise ValueError(f"A register needs at least two qubits, got {n}")
    pairs = register_pairs(n)
    parts: list = [u1_ideal((1, 2)), _lock([(1, 2)], lock_s)]
    for a, b in pairs[1:]:
        parts += [cnot(a, a - 1), pseudo_hadamard(a), cnot(a, b, polarity=0)]
    if n % 2:
        parts.append(cnot(n, n - 1))
    if n > 2:
        parts.append(_lock(pairs, lock_s))
    for index, pair in enumerate(pairs):
        parts.append(u2_ideal(pair, refocus=refocus and index == 0))
    parts.append(crusher())
    name = f"register{n}" + ("_refocused" if refocus else "")
    return concat(name, *parts)


def _check_spins(system: SpinSystem, n: int, circuit: str):
    if system.n != n:
        raise ValueError(f"{circuit} needs a {n}-spin system, got {system.n} spins")


def pps3_circuit(system: SpinSystem, lock_s: float = DEFAULT_LOCK_S) -> Sequence:
    _check_spins(system, 3, "pps3_circuit")
    return general_register_circuit(3, lock_s)


def pps4_circuit(system: SpinSystem, lock_s: float = DEFAULT_LOCK_S, refocus: bool = False) -> Sequence:
    _check_spins(system, 4, "pps4_circuit")
    return general_register_circuit(4, lock_s, refocus)


# ---------------------------------------------------------------------------
# Execution
# ---------------------------------------------------------------------------

def initial_weight(n: int) -> np.ndarray:
    """Thermal epsilon-part shifted to be positive semidefinite: I_z sum + n/2."""
    return thermal_deviation(n) + n / 2 * np.eye(dim_of(n))


def _singlet_branch(sigma: np.ndarray, n: int, pairs) -> np.ndarray:
    keep = reduce(np.matmul, (pair_singlet_projector(n, a, b) for a, b in pairs))
    return keep @ sigma @ keep.conj().T


def _run_ideal(seq: Sequence, system: SpinSystem) -> np.ndarray:
    n = system.n
    sigma = initial_weight(n)
    for element in seq.elements:
        match element:
            case Gradient():
                sigma = gradient_filter(sigma)
            case SpinLock(pairs=pairs):
                sigma = _singlet_branch(sigma, n, pairs or system.lock_pairs[:1])
            case _:
                sigma = conjugate(element_unitary(element, system), sigma)
    return sigma


def run_circuit(seq: Sequence, system: SpinSystem, mode: str = "ideal", target: str | None = None) -> CircuitRun:
    """Run `seq` from thermal equilibrium; `target` defaults to the most populated basis state."""
    if mode not in MODES:
        raise ValueError(f"Unknown circuit mode {mode!r}; expected one of {', '.join(MODES)}")
    n = system.n
    if mode == "ideal":
        deviation = deviation_of(_run_ideal(seq, system))
    else:
        deviation = apply(seq, system, thermal_deviation(n), relax=True)
    if target is None:
        target = format(int(np.argmax(np.real(np.diag(deviation)))), f"0{n}b")
    if len(target) != n:
        raise ValueError(f"Target label {target!r} does not fit {n} qubits")
    weight = float(np.real(np.trace(initial_weight(n))))
    logging.info(f"Circuit '{seq.name}' ({mode}) on {n} spins, target |{target}>")
    return CircuitRun(seq.name, mode, target, deviation, weight)


def epsilon_ledger(run: CircuitRun) -> float:
    """Weight of |target><target| in the output, as a fraction of the input weight."""
    shape = ket_deviation(ket(run.target))
    coefficient = np.real(np.vdot(shape, run.deviation)) / np.real(np.vdot(shape, shape))
    return float(coefficient / run.input_weight)


def pps_report(run: CircuitRun) -> PpsReport:
    reference = pps_deviation(run.target)
    return PpsReport(
        target_label=run.target,
        correlation=correlation(run.deviation, reference),
        diagonal_correlation=diagonal_correlation(run.deviation, reference),
        epsilon_retained=epsilon_ledger(run),
    )


def population_rows(run: CircuitRun) -> list[tuple[str, float, float]]:
    """Diagonal bar-chart data: (basis label, population deviation, target shape)."""
    n = spins_of(run.deviation.shape[0])
    reference = pps_deviation(run.target)
    scale = np.max(np.abs(np.diag(reference)))
    observed = np.real(np.diag(run.deviation))
    peak = np.max(np.abs(observed)) or 1.0
    return [(format(i, f"0{n}b"), float(observed[i] / peak), float(np.real(reference[i, i]) / scale))
            for i in range(dim_of(n))]


# ---------------------------------------------------------------------------
# Reference methods
# ---------------------------------------------------------------------------

def spatial_averaging_sequence() -> Sequence:
    """pi/3 on spin 2, gradient, pi/4 on spin 1, 1/(2J) coupling evolution, (pi/4)_-y on spin 1, gradient."""
    return Sequence("spatial_averaging", (
        Pulse(np.pi / 3, 0.0, (2,)),
        Gradient(),
        Pulse(np.pi / 4, 0.0, (1,)),
        CouplingRotation((1, 2), np.pi / 2),
        Pulse(np.pi / 4, -np.pi / 2, (1,)),
        Gradient(),
    ))


def spatial_averaging_check(system: SpinSystem) -> np.ndarray:
    """Final deviation of the spatial-averaging chain from I_z1 + I_z2; ideally (1/2)(I_z1 + I_z2 + 2 I_z1 I_z2)."""
    if system.n != 2:
        raise ValueError(f"Spatial averaging is defined for two spins, got {system.n}")
    return apply(spatial_averaging_sequence(), system, thermal_deviation(2))


def pps_fraction(deviation: np.ndarray, label: str) -> float:
    """Projection coefficient of `deviation` on the product-operator-scale PPS of `label`."""
    reference = pps_deviation(label)
    d = as_matrix(deviation)
    return float(np.real(np.vdot(reference, d)) / np.real(np.vdot(reference, reference)))


def temporal_averaging_demo(n: int = 2) -> np.ndarray:
    """
    Sum of the thermal populations over every cyclic permutation of the
    excited levels; the ground level stands out, giving the |0..0> pattern.
    """
    pops = np.real(np.diag(thermal_deviation(n)))
    total = np.zeros_like(pops)
    for shift in range(dim_of(n) - 1):
        permuted = pops.copy()
        permuted[1:] = np.roll(pops[1:], shift)
        total += permuted
    return deviation_of(np.diag(total / (dim_of(n) - 1)))


def logical_levels(n: int) -> tuple[str, ...]:
    """
    |0..0> plus 2^m - 1 levels of one Hamming weight w, with m as large as
    possible and the heaviest w among ties. Equal-weight levels share a
    thermal population, so the set labels an m-qubit PPS.
    """
    if n < 2:
        raise ValueError(f"Logical labeling needs at least two spins, got {n}")
    best = (0, 0)
    for weight in range(1, n + 1):
        qubits = (math.comb(n, weight) + 1).bit_length() - 1
        best = max(best, (qubits, weight))
    qubits, weight = best
    levels = [i for i in range(dim_of(n)) if bin(i).count("1") == weight][:2 ** qubits - 1]
    return tuple(format(i, f"0{n}b") for i in [0, *levels])


def logical_labeling_demo(n: int = 3) -> np.ndarray:
    """Thermal n-spin populations restricted to levels that already form a smaller PPS."""
    pops = np.real(np.diag(thermal_deviation(n)))
    sub = np.array([pops[int(label, 2)] for label in logical_levels(n)])
    return deviation_of(np.diag(sub))

