"""
constraints.py — Linear readout model, constraint assembly and least-squares
reconstruction.

Readout of spin k is the sum of its single-quantum elements rho'[a, a | k]
over rows a with spin k up (spin readout), or each such element on its own
(transition readout). R is the real part, S the imaginary part; rows of one
experiment list every R before every S.
"""

import logging
from dataclasses import dataclass

import numpy as np

from src.core.errors import NumericalError
from src.hamiltonian.system import SpinSystem
from src.sequence.compile import compile_unitary
from src.spinops.operators import State, as_matrix, bit, conjugate, deviation_of, dim_of
from src.tomography.scheme import (
    READOUT_SPIN,
    READOUT_TRANSITION,
    TomographyScheme,
    basis_element,
    coherence_pairs,
    unknown_labels,
    unknown_vector,
)

SVD_CUTOFF = 1e-10


# ---------------------------------------------------------------------------
# Data types
# ---------------------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class ConstraintSystem:
    scheme: TomographyScheme
    matrix: np.ndarray
    labels: tuple[str, ...]
    row_labels: tuple[str, ...]
    unitaries: tuple[np.ndarray, ...]

    @property
    def shape(self) -> tuple[int, int]:
        return self.matrix.shape

    @property
    def readout(self) -> str:
        return self.scheme.readout

    def singular_values(self) -> np.ndarray:
        return np.linalg.svd(self.matrix, compute_uv=False)

    def rank(self) -> int:
        sv = self.singular_values()
        return int(np.sum(sv > SVD_CUTOFF * sv[0])) if sv.size else 0

    @property
    def full_rank(self) -> bool:
        return self.rank() == len(self.labels)


# ---------------------------------------------------------------------------
# Readout
# ---------------------------------------------------------------------------

def _lines(n: int, k: int) -> list[tuple[int, int]]:
    return [(a, a | bit(n, k)) for a in range(dim_of(n)) if not a & bit(n, k)]


def readout_vector(deviation: np.ndarray, n: int, readout: str = READOUT_SPIN) -> np.ndarray:
    """R then S values of one already-propagated deviation."""
    signals = []
    for k in range(1, n + 1):
        values = [deviation[a, b] for a, b in _lines(n, k)]
        signals.extend([sum(values)] if readout == READOUT_SPIN else values)
    signals = np.array(signals, dtype=complex)
    return np.concatenate([signals.real, signals.imag])


def _row_labels(scheme: TomographyScheme) -> list[str]:
    n = scheme.n
    labels = []
    for e in range(1, len(scheme.experiments) + 1):
        for part in "RS":
            for k in range(1, n + 1):
                if scheme.readout == READOUT_SPIN:
                    labels.append(f"{part}{k}^{e}")
                else:
                    labels.extend(f"{part}{k}[{a}]^{e}" for a, _ in _lines(n, k))
    return labels


def readout_matrix(scheme: TomographyScheme, system: SpinSystem) -> tuple[np.ndarray, list[np.ndarray]]:
    n = scheme.n
    labels = unknown_labels(n, scheme.diagonal_only)
    elements = [basis_element(n, label) for label in labels]
    unitaries = [compile_unitary(seq, system) for seq in scheme.experiments]
    blocks = []
    for u in unitaries:
        cols = [readout_vector(conjugate(u, e), n, scheme.readout) for e in elements]
        blocks.append(np.column_stack(cols))
    return np.vstack(blocks), unitaries


def build_constraints(scheme: TomographyScheme, system: SpinSystem, fallback: bool = True) -> ConstraintSystem:
    """
    Assemble A numerically from the propagated basis elements. A rank-deficient
    spin readout switches to transition readout when `fallback` is set.
    """
    if system.n != scheme.n:
        raise ValueError(f"Scheme '{scheme.name}' is for {scheme.n} spins, system has {system.n}")
    matrix, unitaries = readout_matrix(scheme, system)
    constraints = ConstraintSystem(scheme, matrix, tuple(unknown_labels(scheme.n, scheme.diagonal_only)),
                                   tuple(_row_labels(scheme)), tuple(unitaries))
    if not constraints.full_rank:
        if fallback and scheme.readout == READOUT_SPIN:
            logging.warning(f"Scheme '{scheme.name}': spin readout has rank {constraints.rank()} "
                            f"< {len(constraints.labels)}; falling back to transition readout")
            return build_constraints(scheme.with_readout(READOUT_TRANSITION), system, fallback=False)
        raise NumericalError(f"Scheme '{scheme.name}' is rank deficient: rank {constraints.rank()} "
                             f"for {len(constraints.labels)} unknowns")
    logging.info(f"Built {matrix.shape[0]}x{matrix.shape[1]} constraint system for '{scheme.name}' "
                 f"({scheme.readout} readout)")
    return constraints


def simulate_readouts(state: "State | np.ndarray", constraints: ConstraintSystem, noise_sd: float = 0.0,
                      rng: np.random.Generator | None = None) -> np.ndarray:
    """Readouts of `state` by direct propagation, optionally with Gaussian noise."""
    d = as_matrix(state)
    if constraints.scheme.diagonal_only:
        d = np.diag(np.diag(d))
    y = np.concatenate([readout_vector(conjugate(u, d), constraints.scheme.n, constraints.readout)
                        for u in constraints.unitaries])
    if noise_sd > 0:
        if rng is None:
            raise ValueError("Readout noise needs a random generator")
        y = y + rng.normal(0.0, noise_sd, size=y.shape)
    return y


# ---------------------------------------------------------------------------
# Reconstruction
# ---------------------------------------------------------------------------

def solve(y: np.ndarray, constraints: ConstraintSystem) -> np.ndarray:
    """Least-squares unknowns via SVD with a relative singular-value cutoff."""
    u, sv, vt = np.linalg.svd(constraints.matrix, full_matrices=False)
    keep = sv > SVD_CUTOFF * sv[0]
    if keep.sum() < len(constraints.labels):
        raise NumericalError(f"Constraint system is rank deficient ({keep.sum()} < {len(constraints.labels)})")
    return vt.T @ ((u.T @ np.asarray(y, dtype=float)) / sv)


def assemble(x: np.ndarray, n: int, diagonal_only: bool = False) -> np.ndarray:
    d = dim_of(n)
    m = np.zeros((d, d), dtype=complex)
    m[np.arange(d - 1), np.arange(d - 1)] = x[:d - 1]
    if not diagonal_only:
        pairs = coherence_pairs(n)
        count = len(pairs)
        for idx, (a, b) in enumerate(pairs):
            value = x[d - 1 + idx] + 1j * x[d - 1 + count + idx]
            m[a, b] = value
            m[b, a] = np.conj(value)
    return deviation_of(m)


def reconstruct(y: np.ndarray, constraints: ConstraintSystem) -> np.ndarray:
    """Hermitian traceless deviation from readouts."""
    scheme = constraints.scheme
    return assemble(solve(y, constraints), scheme.n, scheme.diagonal_only)


def diagonal_reconstruct(y: np.ndarray, constraints: ConstraintSystem) -> np.ndarray:
    """Population-only reconstruction; the result is a diagonal traceless deviation."""
    if not constraints.scheme.diagonal_only:
        raise ValueError("diagonal_reconstruct needs a diagonal-only scheme")
    return reconstruct(y, constraints)


def condition_number(constraints: ConstraintSystem) -> float:
    sv = constraints.singular_values()
    return float(sv[0] / sv[-1]) if sv[-1] > 0 else float("inf")


def element_table(reconstructed: np.ndarray, target: np.ndarray | None = None,
                  diagonal_only: bool = False) -> list[tuple]:
    """Rows (label, reconstructed[, target]) over every unknown."""
    n = int(round(np.log2(reconstructed.shape[0])))
    labels = unknown_labels(n, diagonal_only)
    got = unknown_vector(reconstructed, diagonal_only)
    if target is None:
        return list(zip(labels, got.tolist()))
    want = unknown_vector(as_matrix(target), diagonal_only)
    return list(zip(labels, got.tolist(), want.tolist()))
