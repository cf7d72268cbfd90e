"""
singlet.py — Long-lived singlet order under spin-lock.

singlet_decay_curve prepares singlet order from thermal equilibrium, holds it
under the lock channel and records, per lock time, the correlation with the
pure singlet deviation and the singlet-order magnitude normalised to t = 0.
"""

import logging
from dataclasses import dataclass

import numpy as np
from scipy.optimize import curve_fit

from src.core.errors import NumericalError
from src.hamiltonian.system import SpinSystem
from src.relax.channels import line_spectrum, pair_singlet_projector, spin_lock, thermal_deviation
from src.sequence.compile import apply
from src.sequence.library import singlet_detect, singlet_prep
from src.spinops.operators import State, as_matrix, correlation, dim_of


# ---------------------------------------------------------------------------
# Data types
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class SingletDecayCurve:
    t_s: np.ndarray
    correlation: np.ndarray
    magnitude: np.ndarray

    def rows(self) -> list[tuple[float, float, float]]:
        return list(zip(self.t_s.tolist(), self.correlation.tolist(), self.magnitude.tolist()))


# ---------------------------------------------------------------------------
# Observables
# ---------------------------------------------------------------------------

def singlet_order(state: "State | np.ndarray", pair: tuple[int, int] = (1, 2)) -> float:
    """Singlet population minus the mean triplet population of `pair`."""
    d = as_matrix(state)
    n = int(np.log2(d.shape[0]))
    p_s = pair_singlet_projector(n, *pair)
    p_t = np.eye(dim_of(n)) - p_s
    return float(np.real(np.trace(d @ (p_s - p_t / 3))))


def pair_singlet_deviation(n: int, pair: tuple[int, int] = (1, 2)) -> np.ndarray:
    """Singlet deviation of `pair`, identity on every other spin."""
    p_s = pair_singlet_projector(n, *pair)
    return p_s - np.trace(p_s) / dim_of(n) * np.eye(dim_of(n))


def antiphase_spectrum(state: "State | np.ndarray", system: SpinSystem,
                       pair: tuple[int, int] = (1, 2)) -> np.ndarray:
    """Real line amplitudes of `pair` after the singlet detection block, in frequency order."""
    detected = apply(singlet_detect(system, pair), system, as_matrix(state))
    return np.array([amp.real for _, amp in line_spectrum(detected, system, pair)])


# ---------------------------------------------------------------------------
# Decay curves
# ---------------------------------------------------------------------------

def prepared_singlet(system: SpinSystem, pair: tuple[int, int] = (1, 2), echo: bool = True) -> np.ndarray:
    """Thermal deviation after the singlet preparation block (|S0><S0| - |T0><T0| ideally)."""
    return apply(singlet_prep(system, pair, echo=echo), system, thermal_deviation(system.n))


def singlet_decay_curve(system: SpinSystem, t_grid: np.ndarray, pair: tuple[int, int] = (1, 2),
                        echo: bool = True) -> SingletDecayCurve:
    t_grid = np.asarray(t_grid, dtype=float)
    if np.any(t_grid < 0):
        raise ValueError("Lock times must be non-negative")
    initial = prepared_singlet(system, pair, echo)
    target = pair_singlet_deviation(system.n, pair)
    order0 = singlet_order(initial, pair)
    if abs(order0) < 1e-12:
        raise NumericalError("Preparation produced no singlet order")

    corr, mag = [], []
    for t in t_grid:
        locked = spin_lock(initial, system, float(t), (pair,))
        corr.append(correlation(locked, target))
        mag.append(singlet_order(locked, pair) / order0)
    logging.info(f"Singlet decay curve: {len(t_grid)} lock times up to {t_grid.max() if len(t_grid) else 0:.4g}s")
    return SingletDecayCurve(t_grid, np.array(corr), np.array(mag))


def _exponential(t, amplitude, constant):
    return amplitude * np.exp(-t / constant)


def fit_decay_constant(t: np.ndarray, y: np.ndarray, guess: float | None = None) -> tuple[float, float]:
    """Least-squares fit of y = A exp(-t/T); returns (T, A)."""
    t = np.asarray(t, dtype=float)
    y = np.asarray(y, dtype=float)
    if len(t) < 3:
        raise ValueError("Need at least three points to fit a decay")
    if guess is None:
        guess = max(t.max() - t.min(), 1e-9) / 2
        if np.all(y > 0):
            slope = np.polyfit(t, np.log(y), 1)[0]
            if slope < 0:
                guess = -1 / slope
    try:
        popt, _ = curve_fit(_exponential, t, y, p0=(y[0] or 1.0, guess), maxfev=20000)
    except RuntimeError as e:
        raise NumericalError(f"Exponential fit did not converge: {e}") from e
    amplitude, constant = popt
    return float(constant), float(amplitude)
