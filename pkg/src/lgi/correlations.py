"""
correlations.py — Leggett-Garg strings of a precessing spin.

Measurements of sigma_x happen at t_q = (q - 1) dt, q = 1..n. The string is
K_n = C_12 + C_23 + ... + C_(n-1)n - C_1n with C_ij the two-time correlation.
Correlations come from closed forms, from the ancilla-probe protocol
(moussa_correlation, Heisenberg picture) or from a probe-target simulation
with relaxation between the controlled operations (k_string_sim).

Probe is spin 1, target is spin 2 in every two-spin matrix here.
"""

import logging
import math
from dataclasses import dataclass

import numpy as np
from joblib import Parallel, delayed
from scipy.optimize import brentq, minimize_scalar

from src.core.errors import ConfigError
from src.hamiltonian.system import SpinSystem
from src.relax.channels import free_relax
from src.relax.singlet import fit_decay_constant
from src.spinops.operators import conjugate, dim_of, pauli, z_rotation

BOUND_GRID = 2001


# ---------------------------------------------------------------------------
# Data types
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class LgiBounds:
    classical_lo: float
    classical_hi: float
    quantum_lo: float
    quantum_hi: float


@dataclass(frozen=True)
class LgiConfig:
    omega_rad_s: float
    n_measurements: int
    dt_grid: tuple[float, ...]
    decay_tau_s: float | None = None

    def __post_init__(self):
        if self.n_measurements < 3:
            raise ValueError(f"A Leggett-Garg string needs n >= 3, got {self.n_measurements}")
        if any(dt < 0 for dt in self.dt_grid):
            raise ValueError("Measurement spacings must be non-negative")
        if self.decay_tau_s is not None and not self.decay_tau_s > 0:
            raise ValueError(f"Decay constant must be positive, got {self.decay_tau_s}")
        object.__setattr__(self, "dt_grid", tuple(float(dt) for dt in self.dt_grid))


def correlation_labels(n: int) -> list[str]:
    return [f"C{i}{i + 1}" for i in range(1, n)] + [f"C1{n}"]


# ---------------------------------------------------------------------------
# Closed forms
# ---------------------------------------------------------------------------

def ttcc(omega: float, dt: float) -> float:
    return math.cos(omega * dt)


def k_string(n: int, omega: float, dt: float) -> float:
    """(n - 1) cos(omega dt) - cos((n - 1) omega dt)"""
    if n < 3:
        raise ValueError(f"A Leggett-Garg string needs n >= 3, got {n}")
    x = omega * dt
    return (n - 1) * math.cos(x) - math.cos((n - 1) * x)


def decayed_k_string(n: int, omega: float, dt: float, t2_eff: float) -> float:
    """K_n with every C_ij damped by exp(-(t_j - t_i) / t2_eff)."""
    c = math.cos(omega * dt) * math.exp(-dt / t2_eff)
    c_long = math.cos((n - 1) * omega * dt) * math.exp(-(n - 1) * dt / t2_eff)
    return (n - 1) * c - c_long


def bounds(n: int) -> LgiBounds:
    """Classical bounds from the macrorealist rule, quantum extremes by 1-D optimisation."""
    if n < 3:
        raise ValueError(f"A Leggett-Garg string needs n >= 3, got {n}")
    classical = (-n, n - 2) if n % 2 else (-(n - 2), n - 2)

    grid = np.linspace(0.0, 2 * np.pi, BOUND_GRID)
    values = np.array([k_string(n, 1.0, x) for x in grid])
    step = grid[1] - grid[0]

    def refined(index: int, sign: float) -> float:
        lo, hi = max(grid[index] - step, 0.0), min(grid[index] + step, 2 * np.pi)
        res = minimize_scalar(lambda x: sign * k_string(n, 1.0, x), bounds=(lo, hi), method="bounded",
                              options={"xatol": 1e-12})
        return sign * min(sign * values[index], res.fun)

    q_hi = refined(int(np.argmax(values)), -1.0)
    q_lo = refined(int(np.argmin(values)), 1.0)
    return LgiBounds(float(classical[0]), float(classical[1]), float(q_lo), float(q_hi))


# ---------------------------------------------------------------------------
# Probe protocol
# ---------------------------------------------------------------------------

_PLUS = np.full((2, 2), 0.5, dtype=complex)


def _precession(omega: float, t: float) -> np.ndarray:
    """exp(-i omega t I_z) on one spin."""
    return z_rotation(1, [1], omega * t)


def _projectors(observable: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Eigenprojectors (+1, -1) of a dichotomic observable."""
    w, v = np.linalg.eigh(observable)
    if not np.allclose(np.abs(w), 1.0, atol=1e-10):
        raise ValueError("Observable is not dichotomic")
    plus = v[:, w > 0]
    minus = v[:, w < 0]
    return plus @ plus.conj().T, minus @ minus.conj().T


def controlled_operation(observable: np.ndarray) -> np.ndarray:
    """1_P (x) P+ + (sigma_z)_P (x) P-"""
    p_plus, p_minus = _projectors(observable)
    return np.kron(np.eye(2), p_plus) + np.kron(pauli("z"), p_minus)


def heisenberg_sigma_x(omega: float, t: float) -> np.ndarray:
    u = _precession(omega, t)
    return u.conj().T @ pauli("x") @ u


def moussa_correlation(rho_target: np.ndarray, omega: float, t_i: float, t_j: float) -> float:
    """<sigma_x of the probe> after controlled operations on sigma_x(t_i) then sigma_x(t_j)."""
    rho_target = np.asarray(rho_target, dtype=complex)
    if rho_target.shape != (2, 2) or abs(np.trace(rho_target) - 1) > 1e-10:
        raise ValueError("Target must be a single-spin density matrix with unit trace")
    if np.min(np.linalg.eigvalsh((rho_target + rho_target.conj().T) / 2)) < -1e-10:
        raise ValueError("Target density matrix is not positive")
    rho = np.kron(_PLUS, rho_target)
    for t in (t_i, t_j):
        rho = conjugate(controlled_operation(heisenberg_sigma_x(omega, t)), rho)
    return float(np.real(np.trace(rho @ np.kron(pauli("x"), np.eye(2)))))


def _probe_run(omega: float, delay: float, system: SpinSystem | None) -> float:
    """
    Schrodinger-picture probe run for one C_ij with t_j - t_i = delay: the
    probe is prepared just before the first controlled operation, the target
    is maximally mixed, J is switched off and relaxation runs toward zero.
    """
    rho = np.kron(_PLUS, np.eye(2) / 2)
    measure = controlled_operation(pauli("x"))
    rho = conjugate(measure, rho)
    u = np.kron(np.eye(2), _precession(omega, delay))
    rho = conjugate(u, rho)
    if system is not None and delay > 0:
        rho = free_relax(rho, system, delay, equilibrium=np.zeros(dim_of(2)))
    rho = conjugate(measure, rho)
    return float(np.real(np.trace(rho @ np.kron(pauli("x"), np.eye(2)))))


def simulated_correlations(n: int, omega: float, dt: float, system: SpinSystem | None = None) -> list[float]:
    """C_12 .. C_(n-1)n then C_1n from probe-target runs."""
    if system is not None and system.n != 2:
        raise ValueError(f"The probe-target model needs a 2-spin system, got {system.n}")
    times = [q * dt for q in range(n)]
    pairs = [(i, i + 1) for i in range(n - 1)] + [(0, n - 1)]
    return [_probe_run(omega, times[j] - times[i], system) for i, j in pairs]


def k_string_sim(n: int, omega: float, dt: float, system: SpinSystem | None = None) -> float:
    if n < 3:
        raise ValueError(f"A Leggett-Garg string needs n >= 3, got {n}")
    c = simulated_correlations(n, omega, dt, system)
    return sum(c[:-1]) - c[-1]


# ---------------------------------------------------------------------------
# Decay analysis
# ---------------------------------------------------------------------------

def string_envelope(dt: np.ndarray, k: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Local maxima of K; arrays with fewer than three maxima are returned whole."""
    dt, k = np.asarray(dt, float), np.asarray(k, float)
    idx = [i for i in range(1, len(k) - 1) if k[i] >= k[i - 1] and k[i] >= k[i + 1] and k[i] > 0]
    if len(idx) < 3:
        return dt, k
    return dt[idx], k[idx]


def fit_string_decay(dt: np.ndarray, k: np.ndarray) -> float:
    """Exponential decay constant of the K_n envelope."""
    env_dt, env_k = string_envelope(dt, k)
    constant, _ = fit_decay_constant(env_dt, env_k)
    return constant


def classical_crossing(dt: np.ndarray, k: np.ndarray, hi: float) -> float | None:
    """First dt beyond which the string never exceeds `hi` again."""
    dt, k = np.asarray(dt, float), np.asarray(k, float)
    above = np.nonzero(k > hi)[0]
    if len(above) == 0:
        return float(dt[0]) if len(dt) else None
    last = above[-1]
    return float(dt[last + 1]) if last + 1 < len(dt) else None


def peak_spacings(n: int, omega: float, dt_max: float) -> np.ndarray:
    """dt values of the string maxima theta* + 2 pi m up to dt_max."""
    theta = _argmax_phase(n)
    count = int(np.floor((omega * dt_max - theta) / (2 * np.pi))) + 1
    return (theta + 2 * np.pi * np.arange(max(count, 0))) / omega


def _argmax_phase(n: int) -> float:
    grid = np.linspace(0.0, 2 * np.pi, BOUND_GRID)
    values = [k_string(n, 1.0, x) for x in grid]
    i = int(np.argmax(values))
    step = grid[1] - grid[0]
    res = minimize_scalar(lambda x: -k_string(n, 1.0, x), bounds=(max(grid[i] - step, 0), grid[i] + step),
                          method="bounded", options={"xatol": 1e-12})
    return float(res.x)


def tune_target_t2(system: SpinSystem, omega: float, tau_s: float, n: int = 3,
                   dt_max: float = 0.3) -> SpinSystem:
    """
    Copy of `system` whose target T2 makes the fitted K_n envelope decay with
    constant tau_s over peaks up to dt_max. Only T2 of the target changes.
    """
    peaks = peak_spacings(n, omega, dt_max)
    if len(peaks) < 3:
        raise ConfigError(f"Need at least three string maxima below {dt_max}s to tune a decay")

    def fitted(t2_eff: float) -> float:
        k = [decayed_k_string(n, omega, dt, t2_eff) for dt in peaks]
        return fit_string_decay(peaks, np.array(k)) - tau_s

    lo, hi = tau_s / 4, tau_s * 8
    if fitted(lo) * fitted(hi) > 0:
        raise ConfigError(f"Cannot tune a {tau_s * 1000:.4g} ms string decay from maxima below "
                          f"{dt_max * 1000:.4g} ms; adjust --tau-ms or --dt-max-ms")
    t2_eff = brentq(fitted, lo, hi, xtol=1e-12)
    probe_t2 = system.t2_s[0]
    probe_rate = 0.0 if probe_t2 is None else 1 / probe_t2
    if 1 / t2_eff <= probe_rate:
        raise ConfigError(f"Probe T2 {probe_t2}s is too short for a {tau_s}s string decay")
    target_t2 = 1 / (1 / t2_eff - probe_rate)
    t1 = list(system.t1_s)
    if t1[1] is not None and t1[1] < target_t2:
        t1[1] = target_t2
    logging.info(f"Tuned target T2 to {target_t2:.4g}s (effective {t2_eff:.4g}s) for tau={tau_s:.4g}s")
    return system.with_relaxation(t1, (system.t2_s[0], target_t2))


# ---------------------------------------------------------------------------
# Sweeps
# ---------------------------------------------------------------------------

def _sweep_row(config: LgiConfig, dt: float, system: SpinSystem | None) -> list[float]:
    n, omega = config.n_measurements, config.omega_rad_s
    if system is None:
        c = [ttcc(omega, dt)] * (n - 1) + [ttcc(omega, (n - 1) * dt)]
    else:
        c = simulated_correlations(n, omega, dt, system)
    return [dt, omega * dt, *c, sum(c[:-1]) - c[-1]]


def lgi_sweep(config: LgiConfig, system: SpinSystem | None = None, n_jobs: int = 1) -> list[list[float]]:
    """Rows (dt, omega dt, C_12 .. C_1n, K_n); simulated when a system is given."""
    rows = Parallel(n_jobs=n_jobs)(delayed(_sweep_row)(config, dt, system) for dt in config.dt_grid)
    logging.info(f"LGI sweep: n={config.n_measurements}, {len(rows)} spacings")
    return rows
