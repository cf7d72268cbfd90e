"""
operators.py — Dense spin-1/2 operators, propagators and state metrics.

Conventions:
  - Basis is lexicographic |00..0>, |00..1>, ..., |11..1>; spin 1 is the most
    significant bit and |0> is spin-up (m = +1/2).
  - hbar = 1; Hamiltonians are in rad/s.
  - Spin indices are 1-based everywhere in the public API.
"""

from collections.abc import Iterable, Mapping
from dataclasses import dataclass

import numpy as np
import scipy.linalg

from src.core.errors import NumericalError


# ---------------------------------------------------------------------------
# Single-spin building blocks
# ---------------------------------------------------------------------------

_PAULI = {
    "x": np.array([[0, 1], [1, 0]], dtype=complex),
    "y": np.array([[0, -1j], [1j, 0]], dtype=complex),
    "z": np.array([[1, 0], [0, -1]], dtype=complex),
}

HERMITIAN_TOL = 1e-12
UNITARY_TOL = 1e-10


def pauli(axis: str) -> np.ndarray:
    try:
        return _PAULI[axis].copy()
    except KeyError:
        raise ValueError(f"Unknown Pauli axis: {axis!r}") from None


def spin(axis: str) -> np.ndarray:
    """Spin operator I_axis = pauli(axis) / 2."""
    return pauli(axis) / 2


def dim_of(n: int) -> int:
    return 2 ** n


def spins_of(dim: int) -> int:
    n = int(round(np.log2(dim)))
    if n < 1 or 2 ** n != dim:
        raise ValueError(f"Dimension {dim} is not a power of two")
    return n


def embed(n: int, k: int, op: np.ndarray) -> np.ndarray:
    """op acting on spin k (1-based) of an n-spin register, identity elsewhere."""
    if not 1 <= k <= n:
        raise ValueError(f"Spin index {k} out of range for {n} spins")
    left = np.eye(2 ** (k - 1), dtype=complex)
    right = np.eye(2 ** (n - k), dtype=complex)
    return np.kron(np.kron(left, op), right)


def total(n: int, axis: str, targets: Iterable[int] | None = None) -> np.ndarray:
    targets = range(1, n + 1) if targets is None else targets
    out = np.zeros((dim_of(n), dim_of(n)), dtype=complex)
    for k in targets:
        out += embed(n, k, spin(axis))
    return out


def bit(n: int, k: int) -> int:
    """Bit mask of spin k inside a basis index."""
    return 1 << (n - k)


# ---------------------------------------------------------------------------
# Propagators
# ---------------------------------------------------------------------------

def is_hermitian(a: np.ndarray, tol: float = HERMITIAN_TOL) -> bool:
    scale = max(1.0, float(np.max(np.abs(a)))) if a.size else 1.0
    return bool(np.max(np.abs(a - a.conj().T)) <= tol * scale)


def is_unitary(u: np.ndarray, tol: float = UNITARY_TOL) -> bool:
    return bool(np.max(np.abs(u @ u.conj().T - np.eye(u.shape[0]))) <= tol)


def propagator(h: np.ndarray, t: float) -> np.ndarray:
    """exp(-i H t) through the Hermitian eigendecomposition of H."""
    if not is_hermitian(h):
        raise ValueError("propagator requires a Hermitian generator")
    w, v = scipy.linalg.eigh((h + h.conj().T) / 2)
    return (v * np.exp(-1j * w * t)) @ v.conj().T


def rotation(n: int, targets: Iterable[int], angle: float, phase: float = 0.0) -> np.ndarray:
    """exp(-i angle sum_k (cos(phase) I_x^k + sin(phase) I_y^k))."""
    targets = tuple(targets)
    if not targets:
        raise ValueError("rotation needs at least one target spin")
    generator = np.cos(phase) * total(n, "x", targets) + np.sin(phase) * total(n, "y", targets)
    return propagator(generator, angle)


def z_rotation(n: int, targets: Iterable[int] | Mapping[int, float], angle: float | None = None) -> np.ndarray:
    """
    exp(-i sum_k angle_k I_z^k).

    `targets` is either a set of spins sharing `angle`, or a mapping of
    spin -> signed angle.
    """
    if isinstance(targets, Mapping):
        angles = dict(targets)
    else:
        if angle is None:
            raise ValueError("z_rotation needs an angle for a plain target set")
        angles = {k: angle for k in targets}

    diagonal = np.zeros(dim_of(n))
    for k, theta in angles.items():
        if not 1 <= k <= n:
            raise ValueError(f"Spin index {k} out of range for {n} spins")
        m = np.real(np.diag(embed(n, k, spin("z"))))
        diagonal += theta * m
    return np.diag(np.exp(-1j * diagonal))


def conjugate(u: np.ndarray, a: np.ndarray) -> np.ndarray:
    return u @ a @ u.conj().T


# ---------------------------------------------------------------------------
# States
# ---------------------------------------------------------------------------

def deviation_of(a: np.ndarray) -> np.ndarray:
    """Traceless part of a square matrix."""
    d = a.shape[0]
    return a - np.trace(a) / d * np.eye(d)


@dataclass(frozen=True, eq=False)
class State:
    """
    Ensemble state stored through its traceless deviation.

    rho = 1/d + epsilon * deviation. Dynamics act on the deviation only; the
    small epsilon keeps rho a valid density matrix for any bounded deviation.
    """
    deviation: np.ndarray
    epsilon: float = 1e-5

    def __post_init__(self):
        dev = np.array(self.deviation, dtype=complex)
        if dev.ndim != 2 or dev.shape[0] != dev.shape[1]:
            raise ValueError("State deviation must be a square matrix")
        spins_of(dev.shape[0])
        dev = deviation_of(dev)
        dev.setflags(write=False)
        object.__setattr__(self, "deviation", dev)

    @property
    def dim(self) -> int:
        return self.deviation.shape[0]

    @property
    def n(self) -> int:
        return spins_of(self.dim)

    @property
    def rho(self) -> np.ndarray:
        return np.eye(self.dim) / self.dim + self.epsilon * self.deviation

    def with_deviation(self, deviation: np.ndarray) -> "State":
        return State(deviation, self.epsilon)

    def is_valid(self, tol: float = 1e-10) -> bool:
        rho = self.rho
        if abs(np.trace(rho) - 1) > 1e-12 or not is_hermitian(rho):
            return False
        return bool(np.min(np.linalg.eigvalsh((rho + rho.conj().T) / 2)) >= -tol)

    @classmethod
    def from_deviation(cls, deviation: np.ndarray, epsilon: float = 1e-5) -> "State":
        return cls(deviation, epsilon)

    @classmethod
    def from_rho(cls, rho: np.ndarray, epsilon: float = 1.0) -> "State":
        return cls(deviation_of(np.asarray(rho, dtype=complex)) / epsilon, epsilon)

    @classmethod
    def thermal(cls, n: int, epsilon: float = 1e-5) -> "State":
        return cls(total(n, "z"), epsilon)


def as_matrix(a: "State | np.ndarray") -> np.ndarray:
    return a.deviation if isinstance(a, State) else np.asarray(a, dtype=complex)


# ---------------------------------------------------------------------------
# Kets and named states
# ---------------------------------------------------------------------------

def ket(label: str) -> np.ndarray:
    """Computational basis ket from a bit string such as '0101'."""
    if not label or set(label) - {"0", "1"}:
        raise ValueError(f"Invalid basis label: {label!r}")
    v = np.zeros(2 ** len(label), dtype=complex)
    v[int(label, 2)] = 1
    return v


def projector(v: np.ndarray) -> np.ndarray:
    return np.outer(v, v.conj())


def basis_projector(label: str) -> np.ndarray:
    return projector(ket(label))


def ket_deviation(v: np.ndarray) -> np.ndarray:
    return deviation_of(projector(v))


def pps_deviation(label: str) -> np.ndarray:
    """
    Deviation of the pseudopure state |label> in product-operator scale, so
    that every single-spin I_z term has unit weight (|00> gives
    I_z1 + I_z2 + 2 I_z1 I_z2).
    """
    n = len(label)
    return 2 ** (n - 1) * ket_deviation(ket(label))


def singlet_triplet_basis() -> dict[str, np.ndarray]:
    s = 1 / np.sqrt(2)
    return {
        "T+": ket("00"),
        "T0": s * (ket("01") + ket("10")),
        "T-": ket("11"),
        "S0": s * (ket("01") - ket("10")),
    }


def bell_states() -> dict[str, np.ndarray]:
    s = 1 / np.sqrt(2)
    return {
        "psi-plus": s * (ket("01") + ket("10")),
        "psi-minus": s * (ket("01") - ket("10")),
        "phi-plus": s * (ket("00") + ket("11")),
        "phi-minus": s * (ket("00") - ket("11")),
    }


def singlet_deviation() -> np.ndarray:
    return ket_deviation(singlet_triplet_basis()["S0"])


# ---------------------------------------------------------------------------
# Metrics
# ---------------------------------------------------------------------------

def _normalized_overlap(a: np.ndarray, b: np.ndarray, what: str) -> float:
    norm = np.sqrt(np.real(np.vdot(a, a)) * np.real(np.vdot(b, b)))
    if norm < 1e-300:
        raise NumericalError(f"{what} of a zero-norm deviation is undefined")
    value = np.real(np.vdot(a, b)) / norm
    return float(np.clip(value, -1.0, 1.0))


def correlation(a: "State | np.ndarray", b: "State | np.ndarray") -> float:
    """tr(a b) / sqrt(tr(a^2) tr(b^2)) on the traceless parts."""
    da = deviation_of(as_matrix(a))
    db = deviation_of(as_matrix(b))
    return _normalized_overlap(da, db, "correlation")


def diagonal_correlation(a: "State | np.ndarray", b: "State | np.ndarray") -> float:
    da = np.diag(deviation_of(as_matrix(a)))
    db = np.diag(deviation_of(as_matrix(b)))
    return _normalized_overlap(da, db, "diagonal correlation")


def trace_distance(a: "State | np.ndarray", b: "State | np.ndarray") -> float:
    diff = as_matrix(a) - as_matrix(b)
    diff = (diff + diff.conj().T) / 2
    return float(0.5 * np.sum(np.abs(np.linalg.eigvalsh(diff))))


def random_deviation(n: int, rng: np.random.Generator) -> np.ndarray:
    """Traceless Hermitian matrix with unit-variance Gaussian entries."""
    d = dim_of(n)
    m = rng.normal(size=(d, d)) + 1j * rng.normal(size=(d, d))
    return deviation_of((m + m.conj().T) / 2)
