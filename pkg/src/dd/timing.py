"""
timing.py — Pi-pulse placement and filter functions for dynamical decoupling.

Pulses are instantaneous flips of the toggling-frame sign y(t), which starts
at +1 and changes sign at every t_j. The filter function is

    F(w) = |1 + (-1)^(N+1) e^{iwT} + 2 sum_j (-1)^j e^{i w t_j}|^2

with w in rad/s and times in seconds.
"""

from dataclasses import dataclass

import numpy as np
from scipy.special import jv

SCHEMES = ("none", "cpmg", "udd")

# Below this w*T the UDD filter is evaluated from its Bessel expansion
_UDD_SERIES_LIMIT = 1.0
_UDD_SERIES_TERMS = 40


# ---------------------------------------------------------------------------
# Data types
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class DdSequence:
    scheme: str
    n_pulses: int
    total_s: float
    times_s: tuple[float, ...]
    pulse_width_s: float = 0.0

    def __post_init__(self):
        if self.scheme not in SCHEMES:
            raise ValueError(f"Unknown decoupling scheme {self.scheme!r}")
        if not self.total_s > 0:
            raise ValueError(f"Block length must be positive, got {self.total_s}")
        times = tuple(float(t) for t in self.times_s)
        if len(times) != self.n_pulses:
            raise ValueError(f"Expected {self.n_pulses} pulse times, got {len(times)}")
        edges = (0.0, *times, self.total_s)
        if any(b <= a for a, b in zip(edges, edges[1:])):
            raise ValueError("Pulse times must satisfy 0 < t_1 < ... < t_N < T")
        if any(b - a < self.pulse_width_s for a, b in zip(times, times[1:])):
            raise ValueError(f"Pulses of width {self.pulse_width_s}s overlap")
        object.__setattr__(self, "times_s", times)

    @property
    def label(self) -> str:
        return "none" if self.scheme == "none" else f"{self.scheme}-{self.n_pulses}"


def cpmg_times(n: int, total_s: float, pulse_width_s: float = 0.0) -> DdSequence:
    """t_j = T (2j - 1) / (2N)"""
    if n < 1:
        raise ValueError(f"CPMG needs at least one pulse, got {n}")
    times = [total_s * (2 * j - 1) / (2 * n) for j in range(1, n + 1)]
    return DdSequence("cpmg", n, total_s, tuple(times), pulse_width_s)


def udd_times(n: int, total_s: float, pulse_width_s: float = 0.0) -> DdSequence:
    """t_j = T sin^2(pi j / (2N + 2)); orders 1 and 2 coincide with CPMG."""
    if n < 1:
        raise ValueError(f"UDD needs at least one pulse, got {n}")
    if n <= 2:
        times = cpmg_times(n, total_s).times_s
    else:
        times = tuple(total_s * np.sin(np.pi * j / (2 * n + 2)) ** 2 for j in range(1, n + 1))
    return DdSequence("udd", n, total_s, times, pulse_width_s)


def free_evolution(total_s: float) -> DdSequence:
    return DdSequence("none", 0, total_s, ())


def flip_sequence(scheme: str, order: int, total_s: float, pulse_width_s: float = 0.0) -> DdSequence:
    match scheme:
        case "none":
            return free_evolution(total_s)
        case "cpmg":
            return cpmg_times(order, total_s, pulse_width_s)
        case "udd":
            return udd_times(order, total_s, pulse_width_s)
    raise ValueError(f"Unknown decoupling scheme {scheme!r}; expected one of {', '.join(SCHEMES)}")


# ---------------------------------------------------------------------------
# Filter functions
# ---------------------------------------------------------------------------

def _y_tilde_direct(seq: DdSequence, omega: np.ndarray) -> np.ndarray:
    n = seq.n_pulses
    y = 1 + (-1) ** (n + 1) * np.exp(1j * omega * seq.total_s)
    for j, t in enumerate(seq.times_s, start=1):
        y = y + 2 * (-1) ** j * np.exp(1j * omega * t)
    return y


def _square_wave_sine(k: int, period_count: int) -> float:
    """int_0^pi sgn(sin(M theta)) sin(k theta) d theta for integer k, M = period_count."""
    if k == 0:
        return 0.0
    sign = 1.0 if k > 0 else -1.0
    k = abs(k)
    q, rest = divmod(k, period_count)
    if rest or q % 2 == 0:
        return 0.0
    return sign * 2.0 / q


def _y_tilde_udd_series(seq: DdSequence, omega: np.ndarray) -> np.ndarray:
    """
    With t = T (1 - cos theta) / 2 the UDD sign function is sgn(sin((N+1) theta)),
    so only Bessel orders m = q(N+1) +- 1 (q odd) contribute and no term cancels.
    """
    n, total = seq.n_pulses, seq.total_s
    z = omega * total / 2
    acc = np.zeros_like(omega, dtype=complex)
    for m in range(1, n + 1 + _UDD_SERIES_TERMS):
        c_m = 0.5 * (_square_wave_sine(m + 1, n + 1) - _square_wave_sine(m - 1, n + 1))
        if c_m:
            acc = acc + 2 * (-1j) ** m * jv(m, z) * c_m
    # y~ = -(-i w) int_0^T y(t) e^{iwt} dt
    return 1j * omega * (total / 2) * np.exp(1j * z) * acc


def y_tilde(seq: DdSequence, omega) -> np.ndarray:
    omega = np.atleast_1d(np.asarray(omega, dtype=float))
    y = _y_tilde_direct(seq, omega)
    if seq.scheme == "udd" and seq.n_pulses > 2:
        small = np.abs(omega * seq.total_s) < _UDD_SERIES_LIMIT
        if np.any(small):
            y[small] = _y_tilde_udd_series(seq, omega[small])
    return y


def filter_function(seq: DdSequence, omega):
    """|y~(w)|^2; scalar in, scalar out."""
    values = np.abs(y_tilde(seq, omega)) ** 2
    return float(values[0]) if np.ndim(omega) == 0 else values


def sign_integral(seq: DdSequence, omega: np.ndarray) -> np.ndarray:
    """
    G(w) = int_0^T y(t) e^{iwt} dt, with y = 0 during each pulse of finite
    width (centred on t_j). w must be non-zero.
    """
    omega = np.asarray(omega, dtype=float)
    g = 1j * y_tilde(seq, omega) / omega
    half = seq.pulse_width_s / 2
    if half > 0:
        for j, t in enumerate(seq.times_s, start=1):
            before, after = (-1) ** (j - 1), (-1) ** j
            g = g - (before * (np.exp(1j * omega * t) - np.exp(1j * omega * (t - half)))
                     + after * (np.exp(1j * omega * (t + half)) - np.exp(1j * omega * t))) / (1j * omega)
    return g
