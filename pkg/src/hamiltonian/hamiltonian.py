"""
hamiltonian.py — Rotating-frame Hamiltonians in rad/s.

User-facing frequencies are Hz; the 2*pi conversion happens here and nowhere
else.
"""

from collections.abc import Iterable

import numpy as np

from src.hamiltonian.system import SpinSystem
from src.spinops.operators import dim_of, embed, spin

TWO_PI = 2 * np.pi


def _zz(n: int, a: int, b: int) -> np.ndarray:
    return embed(n, a, spin("z")) @ embed(n, b, spin("z"))


def _coupled_pairs(system: SpinSystem) -> list[tuple[int, int]]:
    return [(a, b) for a in range(1, system.n + 1) for b in range(a + 1, system.n + 1)
            if system.coupling(a, b) != 0]


def weak_coupling(system: SpinSystem, shifts: bool = True, couplings: bool = True) -> np.ndarray:
    """2pi sum nu_k I_z^k + 2pi sum_{k<l} J_kl I_z^k I_z^l (diagonal)."""
    n = system.n
    h = np.zeros((dim_of(n), dim_of(n)), dtype=complex)
    if shifts:
        for k, nu in enumerate(system.shifts_hz, start=1):
            h += TWO_PI * nu * embed(n, k, spin("z"))
    if couplings:
        for a, b in _coupled_pairs(system):
            h += TWO_PI * system.coupling(a, b) * _zz(n, a, b)
    return h


def scalar_product(n: int, a: int, b: int) -> np.ndarray:
    """I^a . I^b"""
    return sum(embed(n, a, spin(axis)) @ embed(n, b, spin(axis)) for axis in "xyz")


def isotropic_j(system: SpinSystem, pairs: Iterable[tuple[int, int]] | None = None) -> np.ndarray:
    """2pi J (I_x I_x + I_y I_y + I_z I_z) summed over the coupled pairs."""
    n = system.n
    pairs = _coupled_pairs(system) if pairs is None else pairs
    h = np.zeros((dim_of(n), dim_of(n)), dtype=complex)
    for a, b in pairs:
        h += TWO_PI * system.coupling(a, b) * scalar_product(n, a, b)
    return h


def rf_effective(system: SpinSystem, rf_amp_hz: float, offset_hz: float = 0.0,
                 pair: tuple[int, int] = (1, 2)) -> np.ndarray:
    """
    Spin-lock frame Hamiltonian of one pair: shifts, carrier offset on
    sum I_z, isotropic J and an x-phase RF field of amplitude rf_amp_hz.
    """
    n = system.n
    a, b = pair
    h = np.zeros((dim_of(n), dim_of(n)), dtype=complex)
    for k in pair:
        h += TWO_PI * (system.shifts_hz[k - 1] + offset_hz) * embed(n, k, spin("z"))
        h += TWO_PI * rf_amp_hz * embed(n, k, spin("x"))
    h += TWO_PI * system.coupling(a, b) * scalar_product(n, a, b)
    return h
