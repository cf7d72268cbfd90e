"""
scheme.py — Tomography experiment sets and the unknown labelling.

Unknowns of an n-spin deviation (d = 2^n):
  p_0 .. p_{d-2}   populations relative to the last level (rho_jj - rho_{d-1,d-1})
  r_k, s_k         real and imaginary parts of the upper-triangle coherences,
                   single-quantum pairs first (grouped by spin, ascending row),
                   then the remaining pairs by Hamming distance 2..n,
                   lexicographic within a distance.
"""

from dataclasses import dataclass

import numpy as np

from src.hamiltonian.system import SpinSystem
from src.sequence.elements import Barrier, Delay, Pulse, Sequence
from src.spinops.operators import bit, dim_of

READOUT_SPIN = "spin"
READOUT_TRANSITION = "transition"
READOUTS = (READOUT_SPIN, READOUT_TRANSITION)


# ---------------------------------------------------------------------------
# Data types
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class TomographyScheme:
    name: str
    n: int
    experiments: tuple[Sequence, ...]
    readout: str = READOUT_SPIN
    diagonal_only: bool = False

    def __post_init__(self):
        if self.readout not in READOUTS:
            raise ValueError(f"Unknown readout {self.readout!r}; expected one of {', '.join(READOUTS)}")
        if not self.experiments:
            raise ValueError(f"Scheme '{self.name}' has no experiments")

    @property
    def unknown_count(self) -> int:
        d = dim_of(self.n)
        return d - 1 if self.diagonal_only else d * d - 1

    @property
    def rows_per_experiment(self) -> int:
        lines = 1 if self.readout == READOUT_SPIN else dim_of(self.n) // 2
        return 2 * self.n * lines

    @property
    def equation_count(self) -> int:
        return len(self.experiments) * self.rows_per_experiment

    def with_readout(self, readout: str) -> "TomographyScheme":
        return TomographyScheme(self.name, self.n, self.experiments, readout, self.diagonal_only)


# ---------------------------------------------------------------------------
# Unknown labelling
# ---------------------------------------------------------------------------

def coherence_pairs(n: int) -> list[tuple[int, int]]:
    """Upper-triangle (a, b) pairs in r/s numbering order."""
    d = dim_of(n)
    pairs = []
    for k in range(1, n + 1):
        pairs += [(a, a | bit(n, k)) for a in range(d) if not a & bit(n, k)]
    for distance in range(2, n + 1):
        pairs += [(a, b) for a in range(d) for b in range(a + 1, d) if bin(a ^ b).count("1") == distance]
    return pairs


def unknown_labels(n: int, diagonal_only: bool = False) -> list[str]:
    d = dim_of(n)
    labels = [f"p{j}" for j in range(d - 1)]
    if diagonal_only:
        return labels
    count = len(coherence_pairs(n))
    return labels + [f"r{k}" for k in range(1, count + 1)] + [f"s{k}" for k in range(1, count + 1)]


def unknown_vector(deviation: np.ndarray, diagonal_only: bool = False) -> np.ndarray:
    """Unknown values of a (possibly non-traceless) matrix in labelling order."""
    m = np.asarray(deviation, dtype=complex)
    n = int(round(np.log2(m.shape[0])))
    diag = np.real(np.diag(m))
    values = list(diag[:-1] - diag[-1])
    if not diagonal_only:
        pairs = coherence_pairs(n)
        values += [m[a, b].real for a, b in pairs]
        values += [m[a, b].imag for a, b in pairs]
    return np.array(values)


def basis_element(n: int, label: str) -> np.ndarray:
    """Hermitian matrix whose coefficient is the unknown `label`."""
    d = dim_of(n)
    e = np.zeros((d, d), dtype=complex)
    kind, index = label[0], int(label[1:])
    if kind == "p":
        e[index, index] = 1
        return e
    a, b = coherence_pairs(n)[index - 1]
    if kind == "r":
        e[a, b] = e[b, a] = 1
    elif kind == "s":
        e[a, b], e[b, a] = 1j, -1j
    else:
        raise ValueError(f"Unknown label {label!r}")
    return e


# ---------------------------------------------------------------------------
# Schemes
# ---------------------------------------------------------------------------

def _j_echo(j_hz: float) -> tuple:
    tau = 1 / (4 * abs(j_hz))
    return Delay(tau), Pulse(np.pi, 0.0), Delay(tau)


def two_spin_scheme(system: SpinSystem, readout: str = READOUT_SPIN) -> TomographyScheme:
    """
    Six one-dimensional experiments: identity, 90_x, the 1/(2J) echo, 45_x or
    45_y before the echo, and a 1/(2 dnu) shift evolution before 45_x and the
    echo. Assumes nu_1 < nu_2 with the carrier midway.
    """
    if system.n != 2:
        raise ValueError(f"The two-spin scheme needs a 2-spin system, got {system.n}")
    j = system.coupling(1, 2)
    delta = system.pair_delta_hz(1, 2)
    if j == 0 or delta == 0:
        raise ValueError("The two-spin scheme needs non-zero J and shift difference")
    echo = _j_echo(j)
    experiments = (
        Sequence("identity", (Barrier("identity"),)),
        Sequence("90_x", (Pulse(np.pi / 2, 0.0),)),
        Sequence("echo", echo),
        Sequence("45_x+echo", (Pulse(np.pi / 4, 0.0),) + echo),
        Sequence("45_y+echo", (Pulse(np.pi / 4, np.pi / 2),) + echo),
        Sequence("shift+45_x+echo", (Delay(1 / (2 * delta), couplings_active=False), Pulse(np.pi / 4, 0.0)) + echo),
    )
    return TomographyScheme("two_spin", 2, experiments, readout)


def three_spin_scheme(system: SpinSystem, readout: str = READOUT_SPIN) -> TomographyScheme:
    """
    Thirteen experiments built from full-Hamiltonian delays 1/J13, 1/(2J13),
    1/J23 and non-selective pulses. Composite entries run left to right in time.
    """
    if system.n != 3:
        raise ValueError(f"The three-spin scheme needs a 3-spin system, got {system.n}")
    j13, j23 = abs(system.coupling(1, 3)), abs(system.coupling(2, 3))
    if j13 == 0 or j23 == 0:
        raise ValueError("The three-spin scheme needs non-zero J13 and J23")

    def pulse(angle_deg: float, phase_deg: float) -> Pulse:
        return Pulse(np.deg2rad(angle_deg), np.deg2rad(phase_deg))

    long13, half13, long23 = Delay(1 / j13), Delay(1 / (2 * j13)), Delay(1 / j23)
    recipes = [
        ("identity", (Barrier("identity"),)),
        ("1/J13", (long13,)),
        ("1/2J13", (half13,)),
        ("1/J23", (long23,)),
        ("1/2J13+60_90", (half13, pulse(60, 90))),
        ("1/J13+90_45", (long13, pulse(90, 45))),
        ("1/2J13+90_135", (half13, pulse(90, 135))),
        ("1/2J13+45_0", (half13, pulse(45, 0))),
        ("1/J23+60_45", (long23, pulse(60, 45))),
        ("1/J13+45_135", (long13, pulse(45, 135))),
        ("1/2J13+30_45", (half13, pulse(30, 45))),
        ("1/J13+90_0+1/2J13+90_0", (long13, pulse(90, 0), half13, pulse(90, 0))),
        ("1/2J13+60_90+1/J13+90_135", (half13, pulse(60, 90), long13, pulse(90, 135))),
    ]
    experiments = tuple(Sequence(name, elements) for name, elements in recipes)
    return TomographyScheme("three_spin", 3, experiments, readout)


def diagonal_scheme(n: int) -> TomographyScheme:
    """Selective (90)_y on each spin in turn, read line by line: populations only."""
    experiments = tuple(Sequence(f"90_y({k})", (Pulse(np.pi / 2, np.pi / 2, (k,)),)) for k in range(1, n + 1))
    return TomographyScheme(f"diagonal_{n}", n, experiments, READOUT_TRANSITION, diagonal_only=True)
