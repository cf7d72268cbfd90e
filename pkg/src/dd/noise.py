"""
noise.py — Classical dephasing noise: spectra, filter-function decay and a
Monte-Carlo oracle.

The coherence of a spin under H = beta(t) y(t) I_z decays as W = exp(-chi),

    chi = (2/pi) int_0^inf S(w) F(w) / w^2 dw.

The Monte-Carlo path synthesises beta(t) as a sum of random-phase cosines on
a midpoint frequency grid (resolution 1/(10T), up to 10 w_c) and averages
exp(-i phi) over trajectories.
"""

import logging
import math
from dataclasses import dataclass

import numpy as np
from joblib import Parallel, delayed
from scipy.integrate import quad

from src.core.errors import NumericalError
from src.dd.timing import DdSequence, filter_function, sign_integral
from src.spinops.operators import correlation, ket_deviation

SPECTRUM_KINDS = ("ohmic", "lorentzian", "gaussian")

MIN_TRAJECTORIES = 100
CHUNK_TRAJECTORIES = 250

_ABS_TOL = 1e-6
_REL_TOL = 1e-4


# ---------------------------------------------------------------------------
# Spectra
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class NoiseSpectrum:
    """
    ohmic:      A w_c (w/w_c)^s below w_c, zero above (s = 1 ohmic, s = 0 flat)
    lorentzian: A / (1 + (w/w_c)^2)
    gaussian:   A exp(-(w/w_c)^2)
    """
    kind: str
    amplitude: float
    cutoff: float
    exponent: float = 1.0

    def __post_init__(self):
        if self.kind not in SPECTRUM_KINDS:
            raise ValueError(f"Unknown spectrum kind {self.kind!r}; expected one of {', '.join(SPECTRUM_KINDS)}")
        if not self.amplitude >= 0:
            raise ValueError(f"Spectrum amplitude must be non-negative, got {self.amplitude}")
        if not self.cutoff > 0:
            raise ValueError(f"Spectrum cutoff must be positive, got {self.cutoff}")
        if not self.exponent >= 0:
            raise ValueError(f"Spectrum exponent must be non-negative, got {self.exponent}")

    @classmethod
    def parse(cls, text: str) -> "NoiseSpectrum":
        """'ohmic:amp=0.1,cutoff=500[,exponent=0]'"""
        kind, _, rest = text.partition(":")
        values = {}
        for item in filter(None, (p.strip() for p in rest.split(","))):
            key, sep, value = item.partition("=")
            if not sep:
                raise ValueError(f"Malformed spectrum parameter {item!r} in {text!r}")
            try:
                values[key.strip()] = float(value)
            except ValueError as e:
                raise ValueError(f"Spectrum parameter {key!r} is not a number: {value!r}") from e
        unknown = sorted(set(values) - {"amp", "cutoff", "exponent"})
        if unknown:
            raise ValueError(f"Unknown spectrum parameters: {', '.join(unknown)}")
        if "amp" not in values or "cutoff" not in values:
            raise ValueError(f"Spectrum {text!r} needs amp= and cutoff=")
        return cls(kind.strip(), values["amp"], values["cutoff"], values.get("exponent", 1.0))

    def density(self, omega) -> np.ndarray:
        w = np.abs(np.asarray(omega, dtype=float))
        x = w / self.cutoff
        match self.kind:
            case "ohmic":
                return np.where(w < self.cutoff, self.amplitude * self.cutoff * x ** self.exponent, 0.0)
            case "lorentzian":
                return self.amplitude / (1 + x ** 2)
            case "gaussian":
                return self.amplitude * np.exp(-x ** 2)

    @property
    def integration_limit(self) -> float:
        """Upper end of the explicitly integrated band; beyond it F is replaced by its mean."""
        return {"ohmic": 1.0, "lorentzian": 50.0, "gaussian": 8.0}[self.kind] * self.cutoff

    def scaled(self, factor: float) -> "NoiseSpectrum":
        return NoiseSpectrum(self.kind, self.amplitude * factor, self.cutoff, self.exponent)


# ---------------------------------------------------------------------------
# Filter-function decay
# ---------------------------------------------------------------------------

def _tail(spectrum: NoiseSpectrum, mean_filter: float) -> tuple[float, float]:
    if spectrum.kind == "ohmic":
        return 0.0, 0.0
    value, err = quad(lambda w: float(spectrum.density(w)) / w ** 2, spectrum.integration_limit, np.inf)
    return mean_filter * value, mean_filter * err


def chi(seq: DdSequence, spectrum: NoiseSpectrum) -> float:
    """Decay exponent of a single-spin coherence after one block of `seq`."""
    if spectrum.amplitude == 0:
        return 0.0

    def integrand(w):
        return float(spectrum.density(w)) * filter_function(seq, w) / w ** 2

    upper = spectrum.integration_limit
    width = 20 * np.pi / seq.total_s
    edges = np.append(np.arange(0.0, upper, width), upper)
    total, error = 0.0, 0.0
    for lo, hi in zip(edges, edges[1:]):
        if hi <= lo:
            continue
        value, err = quad(integrand, lo, hi, limit=200)
        total += value
        error += err
    # Far above every filter feature the cross terms average out
    value, err = _tail(spectrum, 2.0 + 4.0 * seq.n_pulses)
    total += value
    error += err

    total *= 2 / np.pi
    error *= 2 / np.pi
    if error > _ABS_TOL + _REL_TOL * abs(total):
        raise NumericalError(f"Decay integral for {seq.label} did not converge (estimate {total:.6g}, error {error:.2g})")
    logging.debug(f"chi({seq.label}, {spectrum.kind}) = {total:.6g} (+- {error:.1g})")
    return total


def coherence_decay(seq: DdSequence, spectrum: NoiseSpectrum) -> float:
    """W = exp(-chi) in (0, 1]."""
    return math.exp(-chi(seq, spectrum))


# ---------------------------------------------------------------------------
# Monte-Carlo oracle
# ---------------------------------------------------------------------------

def synthesis_grid(spectrum: NoiseSpectrum, total_s: float) -> tuple[np.ndarray, np.ndarray]:
    """Midpoint frequencies and cosine amplitudes c = sqrt(S dw / pi)."""
    step = 1 / (10 * total_s)
    count = max(1, int(math.ceil(10 * spectrum.cutoff / step)))
    omega = (np.arange(count) + 0.5) * step
    return omega, np.sqrt(spectrum.density(omega) * step / np.pi)


def _chunks(n_traj: int) -> list[int]:
    full, rest = divmod(n_traj, CHUNK_TRAJECTORIES)
    return [CHUNK_TRAJECTORIES] * full + ([rest] if rest else [])


def _check_trajectories(n_traj: int):
    if n_traj < MIN_TRAJECTORIES:
        raise ValueError(f"Monte-Carlo needs at least {MIN_TRAJECTORIES} trajectories, got {n_traj}")


def _phases(rng: np.random.Generator, size: int, weights: np.ndarray) -> np.ndarray:
    """
    phi = 2 sum_w c (a Re G + b Im G) for `size` trajectories; `weights` holds
    c*G with shape (times, frequencies). Returns shape (size, times).
    """
    a = rng.normal(size=(size, weights.shape[1]))
    b = rng.normal(size=(size, weights.shape[1]))
    return 2 * (a @ weights.real.T + b @ weights.imag.T)


def _coherence_sum(size: int, seed: np.random.SeedSequence, weights: np.ndarray) -> np.ndarray:
    phi = _phases(np.random.default_rng(seed), size, weights)
    return np.exp(-1j * phi).sum(axis=0)


def monte_carlo_chi(seq: DdSequence, spectrum: NoiseSpectrum, n_traj: int, seed: int,
                    n_jobs: int = 1) -> float:
    """Single-spin decay exponent -ln|<exp(-i phi)>| estimated from `n_traj` trajectories."""
    _check_trajectories(n_traj)
    omega, amplitude = synthesis_grid(spectrum, seq.total_s)
    weights = (amplitude * sign_integral(seq, omega))[None, :]
    sizes = _chunks(n_traj)
    seeds = np.random.SeedSequence(seed).spawn(len(sizes))
    parts = Parallel(n_jobs=n_jobs)(delayed(_coherence_sum)(size, s, weights) for size, s in zip(sizes, seeds))
    mean = abs(np.sum(parts, axis=0)[0]) / n_traj
    if mean <= 0:
        raise NumericalError(f"Monte-Carlo coherence of {seq.label} vanished")
    logging.debug(f"Monte-Carlo chi({seq.label}) from {n_traj} trajectories: {-math.log(mean):.6g}")
    return -math.log(mean)


def repeated_sign_integral(seq: DdSequence, omega: np.ndarray, blocks: int) -> np.ndarray:
    """
    G after 0..blocks back-to-back repetitions of `seq`, shape (blocks + 1, len(omega)).
    Odd-N blocks leave the spin inverted, so successive blocks alternate in sign.
    """
    single = sign_integral(seq, omega)
    step = (-1) ** seq.n_pulses * np.exp(1j * omega * seq.total_s)
    out = np.zeros((blocks + 1, len(omega)), dtype=complex)
    factor = np.ones_like(omega, dtype=complex)
    for m in range(1, blocks + 1):
        out[m] = out[m - 1] + factor * single
        factor = factor * step
    return out


def _bell_sums(size: int, seed: np.random.SeedSequence, weights: np.ndarray, collective: bool) -> np.ndarray:
    """sum over trajectories of exp(-i (w1 phi_1 + w2 phi_2)) for w1, w2 in {-1, 0, 1}."""
    rng = np.random.default_rng(seed)
    phi1 = _phases(rng, size, weights)
    phi2 = phi1 if collective else _phases(rng, size, weights)
    sums = np.zeros((3, 3, weights.shape[0]), dtype=complex)
    for w1 in (-1, 0, 1):
        for w2 in (-1, 0, 1):
            sums[w1 + 1, w2 + 1] = np.exp(-1j * (w1 * phi1 + w2 * phi2)).sum(axis=0)
    return sums


def _z_values(n: int, a: int) -> np.ndarray:
    """z quantum numbers (+1/2 for bit 0) of basis state a, spin 1 first."""
    return np.array([0.5 if not (a >> (n - k)) & 1 else -0.5 for k in range(1, n + 1)])


def monte_carlo_decay(seq: DdSequence, spectrum: NoiseSpectrum, n_traj: int, bell_state: np.ndarray,
                      seed: int, blocks: int = 10, collective: bool = False,
                      n_jobs: int = 1) -> tuple[np.ndarray, np.ndarray]:
    """
    Two-spin state under independent (or fully correlated) noise, sampled
    after 0..blocks repetitions of `seq`. Returns (times, correlation with
    the initial state). Ideal X(x)X flips leave Bell deviations unchanged, so
    the averaging is done in the toggling frame.
    """
    _check_trajectories(n_traj)
    initial = ket_deviation(np.asarray(bell_state, dtype=complex))
    if initial.shape != (4, 4):
        raise ValueError("monte_carlo_decay expects a two-spin state vector")

    omega, amplitude = synthesis_grid(spectrum, seq.total_s)
    weights = amplitude[None, :] * repeated_sign_integral(seq, omega, blocks)
    sizes = _chunks(n_traj)
    seeds = np.random.SeedSequence(seed).spawn(len(sizes))
    parts = Parallel(n_jobs=n_jobs)(
        delayed(_bell_sums)(size, s, weights, collective) for size, s in zip(sizes, seeds))
    factors = np.sum(parts, axis=0) / n_traj

    times = np.arange(blocks + 1) * seq.total_s
    corr = []
    for m in range(blocks + 1):
        d = np.empty_like(initial)
        for a in range(4):
            for b in range(4):
                w = (_z_values(2, a) - _z_values(2, b)).astype(int)
                d[a, b] = initial[a, b] * factors[w[0] + 1, w[1] + 1, m]
        corr.append(correlation(d, initial))
    logging.info(f"Monte-Carlo storage ({seq.label}, {'collective' if collective else 'independent'} noise): "
                 f"{n_traj} trajectories, {blocks} blocks")
    return times, np.array(corr)
