"""
channels.py — Phenomenological relaxation channels on deviation matrices.

free_relax: element-wise Bloch-type decay in the computational basis.
spin_lock:  singlet/triplet-basis channel of a locked pair.

Both accept a State or a bare deviation matrix and return the same kind.
"""

import functools
import logging
import math

import numpy as np
import scipy.linalg

from src.core.errors import ConfigError
from src.hamiltonian.system import SingletRelaxParams, SpinSystem
from src.spinops.operators import (
    State,
    as_matrix,
    bit,
    dim_of,
    singlet_triplet_basis,
    total,
)

# Triplet populations of the thermal pair deviation I_z^a + I_z^b (T+, T0, T-)
_THERMAL_TRIPLET = np.array([1.0, 0.0, -1.0])


def _wrap(template: "State | np.ndarray", deviation: np.ndarray) -> "State | np.ndarray":
    return template.with_deviation(deviation) if isinstance(template, State) else deviation


def _rate(t: float | None) -> float:
    return 0.0 if t is None or math.isinf(t) else 1.0 / t


def _decay(t_s: float, constant: float) -> float:
    return 1.0 if math.isinf(constant) else math.exp(-t_s / constant)


def thermal_deviation(n: int) -> np.ndarray:
    """Unit I_z per spin; epsilon is factored out globally."""
    return total(n, "z")


# ---------------------------------------------------------------------------
# Free relaxation
# ---------------------------------------------------------------------------

@functools.lru_cache(maxsize=None)
def _flip_masks(n: int) -> np.ndarray:
    """masks[k-1, a, b] is True when spin k differs between basis states a and b."""
    idx = np.arange(dim_of(n))
    diff = idx[:, None] ^ idx[None, :]
    masks = np.stack([(diff & bit(n, k)) != 0 for k in range(1, n + 1)])
    masks.setflags(write=False)
    return masks


def free_relax(state: "State | np.ndarray", system: SpinSystem, t_s: float,
               equilibrium: np.ndarray | None = None) -> "State | np.ndarray":
    """
    Coherence (a, b) decays with the summed 1/T2 of the spins that differ
    between a and b. The diagonal is expanded in z-order products
    (Walsh-Hadamard transform); a product over spin set K relaxes toward its
    equilibrium value with rate sum_{k in K} 1/T1_k.
    """
    if t_s < 0:
        raise ValueError(f"Relaxation time must be non-negative, got {t_s}")
    d = as_matrix(state)
    n = system.n
    if t_s == 0:
        return _wrap(state, d.copy())

    r1 = np.array([_rate(t) for t in system.t1_s])
    r2 = np.array([_rate(t) for t in system.t2_s])

    masks = _flip_masks(n)
    off_rate = np.tensordot(r2, masks.astype(float), axes=1)
    out = d * np.exp(-off_rate * t_s)

    size = dim_of(n)
    walsh = scipy.linalg.hadamard(size).astype(float)
    if equilibrium is None:
        equilibrium = thermal_deviation(n)
    eq_diag = np.real(np.diag(equilibrium)) if np.ndim(equilibrium) == 2 else np.asarray(equilibrium, float)

    c = walsh @ np.real(np.diag(d)) / size
    c_eq = walsh @ eq_diag / size
    subset_rate = np.array([sum(r1[k - 1] for k in range(1, n + 1) if s & bit(n, k)) for s in range(size)])
    f = np.exp(-subset_rate * t_s)
    c_new = c_eq + (c - c_eq) * f
    # The identity component is conserved exactly
    c_new[0] = c[0]
    np.fill_diagonal(out, walsh @ c_new)
    return _wrap(state, out)


# ---------------------------------------------------------------------------
# Spin lock
# ---------------------------------------------------------------------------

@functools.lru_cache(maxsize=None)
def singlet_triplet_frame(n: int, a: int, b: int) -> np.ndarray:
    """
    Unitary whose columns are |X>_ab (x) |r>_rest, X in (T+, T0, T-, S0),
    ordered column = X * 2^(n-2) + r.
    """
    if n < 2 or not (1 <= a <= n and 1 <= b <= n) or a == b:
        raise ValueError(f"Invalid lock pair ({a}, {b}) for {n} spins")
    st = list(singlet_triplet_basis().values())
    others = [k for k in range(1, n + 1) if k not in (a, b)]
    rest = 2 ** len(others)
    frame = np.zeros((dim_of(n), dim_of(n)), dtype=complex)
    for r in range(rest):
        base = 0
        for pos, k in enumerate(others):
            if (r >> (len(others) - 1 - pos)) & 1:
                base |= bit(n, k)
        for x, vec in enumerate(st):
            for two in range(4):
                idx = base | (bit(n, a) if two & 2 else 0) | (bit(n, b) if two & 1 else 0)
                frame[idx, x * rest + r] = vec[two]
    frame.setflags(write=False)
    return frame


def pair_singlet_projector(n: int, a: int, b: int) -> np.ndarray:
    """|S0><S0| on pair (a, b) tensored with identity on the other spins."""
    frame = singlet_triplet_frame(n, a, b)
    rest = dim_of(n) // 4
    cols = frame[:, 3 * rest:]
    return cols @ cols.conj().T


def _lock_pair(d: np.ndarray, n: int, pair: tuple[int, int], params: SingletRelaxParams, t_s: float) -> np.ndarray:
    frame = singlet_triplet_frame(n, *pair)
    rest = dim_of(n) // 4
    blocks = (frame.conj().T @ d @ frame).reshape(4, rest, 4, rest)

    f_coh = _decay(t_s, params.t_coh_s)
    f_singlet = _decay(t_s, params.ts_s)
    f_triplet = _decay(t_s, params.t_triplet_s)

    pops = np.stack([blocks[x, :, x, :] for x in range(4)])
    mean = pops.mean(axis=0)
    excess = (pops[3] - mean) * f_singlet

    triplet = pops[:3]
    spread = triplet - triplet.mean(axis=0)
    target = params.lock_equilibrium * _THERMAL_TRIPLET[:, None, None] * np.eye(rest)
    spread = target + (spread - target) * f_triplet

    out = blocks * f_coh
    out[3, :, 3, :] = mean + excess
    for x in range(3):
        out[x, :, x, :] = mean - excess / 3 + spread[x]
    size = dim_of(n)
    return frame @ out.reshape(size, size) @ frame.conj().T


def spin_lock(state: "State | np.ndarray", system: SpinSystem, t_s: float,
              pairs: tuple[tuple[int, int], ...] | None = None) -> "State | np.ndarray":
    """
    In the singlet/triplet basis of each locked pair: the singlet excess over
    the manifold mean decays with T_S, triplet populations equilibrate with
    t_triplet, every coherence involving the pair decays with t_coh.
    """
    if system.singlet is None:
        raise ConfigError(f"Spin system '{system.name}' has no singlet relaxation parameters")
    if t_s < 0:
        raise ValueError(f"Spin-lock duration must be non-negative, got {t_s}")
    pairs = tuple(pairs) if pairs else system.lock_pairs[:1]
    d = as_matrix(state)
    for pair in pairs:
        d = _lock_pair(d, system.n, pair, system.singlet, t_s)
    logging.debug(f"spin_lock {t_s:.4g}s on pairs {pairs}")
    return _wrap(state, d)


def lock_amplitude_warning(system: SpinSystem, amp_hz: float, pairs) -> str | None:
    """Message when the RF lock is too weak to enforce magnetic equivalence."""
    if amp_hz <= 0:
        return None
    for a, b in pairs:
        delta = abs(system.delta_nu(a, b))
        if amp_hz < 5 * delta:
            return (f"Spin-lock amplitude {amp_hz:.4g} Hz is below 5x the shift difference "
                    f"{delta:.4g} Hz of pair ({a}, {b})")
    return None


# ---------------------------------------------------------------------------
# Spectra
# ---------------------------------------------------------------------------

def line_spectrum(state: "State | np.ndarray", system: SpinSystem,
                  spins: tuple[int, ...] | None = None) -> list[tuple[float, complex]]:
    """
    Single-quantum lines (frequency Hz, complex amplitude) of every spin,
    sorted by frequency. A line of spin k sits at nu_k + sum_l J_kl m_l with
    m_l the partner's z quantum number.
    """
    d = as_matrix(state)
    n = system.n
    lines = []
    for k in spins or range(1, n + 1):
        for a in range(dim_of(n)):
            if a & bit(n, k):
                continue
            freq = system.shifts_hz[k - 1]
            for l in range(1, n + 1):
                if l != k:
                    m = -0.5 if a & bit(n, l) else 0.5
                    freq += system.coupling(k, l) * m
            lines.append((freq, complex(d[a, a | bit(n, k)])))
    lines.sort(key=lambda line: line[0])
    return lines


def antiphase_pattern(state: "State | np.ndarray", system: SpinSystem, tol: float = 1e-9) -> str:
    """Signs of the real line amplitudes in frequency order, e.g. 'up-down-down-up'."""
    words = []
    for _, amp in line_spectrum(state, system):
        value = amp.real
        words.append("up" if value > tol else "down" if value < -tol else "zero")
    return "-".join(words)
