"""
storage.py — Bell-state storage under repeated decoupling blocks.

A block of order N lasts N * BLOCK_UNIT_S; after m whole blocks the spins
wait freely for the remainder of the sampled time. Dephasing enters through
the filter of the whole repeated schedule, relaxation and imperfect flips
through explicit simulation of the flip train. Correlations are read from a
noiseless two-spin tomography of the stored state.
"""

import logging
import math
from dataclasses import dataclass

import numpy as np
from scipy.integrate import quad

from src.dd.noise import NoiseSpectrum
from src.dd.timing import DdSequence, flip_sequence, y_tilde
from src.hamiltonian.system import SpinSystem
from src.relax.channels import free_relax
from src.spinops.operators import conjugate, correlation, dim_of, ket_deviation, rotation
from src.tomography.constraints import build_constraints, reconstruct, simulate_readouts
from src.tomography.scheme import two_spin_scheme

CPMG_TAU_S = 2e-3
PULSE_WIDTH_S = 27.2e-6
BLOCK_UNIT_S = 2 * CPMG_TAU_S + PULSE_WIDTH_S

ODD_ORDERS = (1, 3, 5, 7, 9)

_GRID_SPACING = 0.02
_CHUNK = 200_000


# ---------------------------------------------------------------------------
# Data types
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class StorageCurve:
    label: str
    t_s: np.ndarray
    correlation: np.ndarray
    magnetization: np.ndarray
    chi: np.ndarray

    def rows(self) -> list[tuple[float, float, float]]:
        return list(zip(self.t_s.tolist(), self.correlation.tolist(), self.magnetization.tolist()))

    def count_above(self, threshold: float = 0.9) -> int:
        return int(np.sum(self.correlation > threshold))


def block_sequence(scheme: str, order: int, unit_s: float = BLOCK_UNIT_S,
                   pulse_width_s: float = 0.0) -> DdSequence:
    """One repetition unit: free evolution lasts a single unit."""
    if scheme == "none":
        return flip_sequence("none", 0, unit_s)
    return flip_sequence(scheme, order, order * unit_s, pulse_width_s)


# ---------------------------------------------------------------------------
# Dephasing
# ---------------------------------------------------------------------------

def storage_filter(block: DdSequence, omega: np.ndarray, t_s: float) -> np.ndarray:
    """
    Filter function of floor(t/T) repeated blocks followed by free evolution
    for the remainder r:

        F = |y~ G_m + s^m e^{i w m T} (e^{i w r} - 1)|^2,  s = (-1)^N,
        G_m = sum_{b<m} (s e^{i w T})^b.
    """
    omega = np.asarray(omega, dtype=float)
    if block.scheme == "none":
        return np.abs(np.exp(1j * omega * t_s) - 1) ** 2

    period = block.total_s
    m = int(math.floor(t_s / period + 1e-12))
    rest = max(t_s - m * period, 0.0)
    sign = (-1) ** block.n_pulses
    step = sign * np.exp(1j * omega * period)
    near_one = np.abs(1 - step) < 1e-12
    geometric = np.where(near_one, m, (1 - step ** m) / np.where(near_one, 1, 1 - step))
    tail = sign ** m * np.exp(1j * omega * m * period) * (np.exp(1j * omega * rest) - 1)
    return np.abs(y_tilde(block, omega) * geometric + tail) ** 2


def _flip_count(block: DdSequence, t_s: float) -> int:
    if block.scheme == "none":
        return 0
    return block.n_pulses * int(math.floor(t_s / block.total_s + 1e-12))


def storage_chi(block: DdSequence, spectrum: NoiseSpectrum, t_grid: np.ndarray,
                spacing: float = _GRID_SPACING) -> np.ndarray:
    """Single-spin decay exponent at each sampled time, midpoint rule on a dense grid."""
    t_grid = np.asarray(t_grid, dtype=float)
    if spectrum.amplitude == 0 or len(t_grid) == 0:
        return np.zeros(len(t_grid))
    t_max = max(float(t_grid.max()), block.total_s)
    step = min(spacing, np.pi / (8 * t_max))
    upper = spectrum.integration_limit
    count = int(math.ceil(upper / step))
    step = upper / count

    out = np.zeros(len(t_grid))
    for start in range(0, count, _CHUNK):
        omega = (np.arange(start, min(start + _CHUNK, count)) + 0.5) * step
        weight = spectrum.density(omega) / omega ** 2
        for i, t in enumerate(t_grid):
            if t > 0:
                out[i] += np.sum(weight * storage_filter(block, omega, float(t))) * step

    if spectrum.kind != "ohmic":
        tail, _ = quad(lambda w: float(spectrum.density(w)) / w ** 2, upper, np.inf)
        out += np.array([(2.0 + 4.0 * _flip_count(block, t)) * tail if t > 0 else 0.0 for t in t_grid])
    return 2 / np.pi * out


def dephasing_exponents(n: int = 2, collective: bool = False) -> np.ndarray:
    """
    Element (a, b) of the state decays as exp(-chi * E[a, b]). Independent
    noise: E counts the spins that differ; collective noise: E is the squared
    total z difference.
    """
    size = dim_of(n)
    z = np.array([[0.5 if not (a >> (n - k)) & 1 else -0.5 for k in range(1, n + 1)] for a in range(size)])
    diff = z[:, None, :] - z[None, :, :]
    return (diff.sum(axis=2) ** 2) if collective else (diff ** 2).sum(axis=2)


# ---------------------------------------------------------------------------
# Storage experiment
# ---------------------------------------------------------------------------

def _flip_times(block: DdSequence, t_max: float) -> np.ndarray:
    if block.scheme == "none":
        return np.array([])
    blocks = int(math.floor(t_max / block.total_s + 1e-12))
    offsets = np.arange(blocks)[:, None] * block.total_s
    return (offsets + np.array(block.times_s)[None, :]).ravel()


def _evolve(d: np.ndarray, system: SpinSystem, span: float, relax: bool) -> np.ndarray:
    if relax and span > 0:
        return free_relax(d, system, span, equilibrium=np.zeros_like(d))
    return d


def storage_experiment(bell_state: np.ndarray, scheme: str, order: int, system: SpinSystem,
                       spectrum: NoiseSpectrum, t_grid: np.ndarray, relax: bool = False,
                       rf_error: float = 0.0, collective: bool = False,
                       unit_s: float = BLOCK_UNIT_S) -> StorageCurve:
    """
    Store a two-spin state under `scheme` and sample it on `t_grid`.

    Flips are non-selective x pulses of angle pi (1 + rf_error). Relaxation
    runs between flips toward the identity background. Magnetization is the
    retained magnitude of the initial state's dominant coherence.
    """
    if system.n != 2:
        raise ValueError(f"Storage experiments need a two-spin system, got {system.n} spins")
    t_grid = np.asarray(t_grid, dtype=float)
    if np.any(t_grid < 0) or np.any(np.diff(t_grid) < 0):
        raise ValueError("Storage times must be non-negative and sorted")

    block = block_sequence(scheme, order, unit_s)
    initial = 2 * ket_deviation(np.asarray(bell_state, dtype=complex))
    exponents = dephasing_exponents(2, collective)
    chis = storage_chi(block, spectrum, t_grid)
    flip = rotation(2, (1, 2), np.pi * (1 + rf_error), 0.0)
    constraints = build_constraints(two_spin_scheme(system), system)

    off = np.abs(initial - np.diag(np.diag(initial)))
    probe = np.unravel_index(np.argmax(off), off.shape)
    reference = abs(initial[probe]) or 1.0

    flips = _flip_times(block, float(t_grid.max()) if len(t_grid) else 0.0)
    d, now, next_flip = initial.copy(), 0.0, 0
    corr, mag = [], []
    for t, chi_t in zip(t_grid, chis):
        # Flips of a partial block are not applied; the remainder is free evolution
        done = _flip_count(block, t)
        while next_flip < done:
            d = _evolve(d, system, flips[next_flip] - now, relax)
            d = conjugate(flip, d)
            now = flips[next_flip]
            next_flip += 1
        d = _evolve(d, system, t - now, relax)
        now = t

        stored = d * np.exp(-chi_t * exponents)
        measured = reconstruct(simulate_readouts(stored, constraints), constraints)
        corr.append(correlation(measured, initial))
        mag.append(abs(stored[probe]) / reference)

    label = block.label
    logging.info(f"Storage {label}: {len(t_grid)} samples, {len(flips)} flips, "
                 f"{sum(c > 0.9 for c in corr)} above 0.9")
    return StorageCurve(label, t_grid, np.array(corr), np.array(mag), chis)


def optimal_order(bell_state: np.ndarray, system: SpinSystem, spectrum: NoiseSpectrum, t_grid: np.ndarray,
                  orders: tuple[int, ...] = ODD_ORDERS, threshold: float = 0.9,
                  **kwargs) -> tuple[int, dict[int, int]]:
    """UDD order with the most sampled correlations above `threshold`; ties go to the lower order."""
    counts = {}
    for order in orders:
        curve = storage_experiment(bell_state, "udd", order, system, spectrum, t_grid, **kwargs)
        counts[order] = curve.count_above(threshold)
    best = max(orders, key=lambda o: (counts[o], -o))
    logging.info(f"Optimal UDD order {best}: {counts}")
    return best, counts
