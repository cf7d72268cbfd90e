"""
Tests for Bell-state storage under repeated decoupling blocks

Tests the repeated-block filter, dephasing exponents, relaxation and flip
errors during storage, and the ordering of schemes under a flat bath.
"""

import numpy as np
import pytest

from src.core.core import systems_dir
from src.dd.command import DEFAULT_SPECTRUM
from src.dd.noise import NoiseSpectrum
from src.dd.storage import (
    BLOCK_UNIT_S,
    block_sequence,
    dephasing_exponents,
    optimal_order,
    storage_experiment,
    storage_filter,
)
from src.dd.timing import cpmg_times, filter_function, free_evolution
from src.hamiltonian.system import load_system
from src.spinops.operators import bell_states

SILENT = NoiseSpectrum("ohmic", 0.0, 100.0)
PSI_PLUS = bell_states()["psi-plus"]
PSI_MINUS = bell_states()["psi-minus"]


@pytest.fixture(scope="module")
def btp():
    return load_system(systems_dir() / "btp.json")


@pytest.fixture(scope="module")
def flat_bath_counts(btp):
    spectrum = NoiseSpectrum.parse(DEFAULT_SPECTRUM)
    t_grid = np.linspace(0, 30, 121)
    none = storage_experiment(PSI_PLUS, "none", 1, btp, spectrum, t_grid).count_above()
    cpmg = storage_experiment(PSI_PLUS, "cpmg", 1, btp, spectrum, t_grid).count_above()
    best, udd = optimal_order(PSI_PLUS, btp, spectrum, t_grid)
    return none, cpmg, best, udd


# ---------------------------------------------------------------------------
# Repeated-block filter
# ---------------------------------------------------------------------------

class TestStorageFilter:

    OMEGA = np.linspace(0.5, 400, 60)

    def test_free_storage(self):
        t = 0.37
        assert np.allclose(storage_filter(free_evolution(1.0), self.OMEGA, t), 4 * np.sin(self.OMEGA * t / 2) ** 2)

    def test_nothing_stored_at_zero(self):
        assert np.allclose(storage_filter(cpmg_times(3, 0.1), self.OMEGA, 0.0), 0)

    def test_single_block(self):
        block = cpmg_times(3, 0.1)
        assert np.allclose(storage_filter(block, self.OMEGA, 0.1), filter_function(block, self.OMEGA))

    def test_two_echo_blocks_make_cpmg_pair(self):
        got = storage_filter(cpmg_times(1, 0.1), self.OMEGA, 0.2)
        assert np.allclose(got, filter_function(cpmg_times(2, 0.2), self.OMEGA))

    def test_block_lengths(self):
        assert block_sequence("udd", 5).total_s == pytest.approx(5 * BLOCK_UNIT_S)
        assert block_sequence("none", 5).total_s == pytest.approx(BLOCK_UNIT_S)


class TestDephasingExponents:

    def test_independent(self):
        e = dephasing_exponents()
        assert (e[1, 2], e[0, 3], e[0, 1], e[2, 2]) == (2, 2, 1, 0)

    def test_collective(self):
        e = dephasing_exponents(collective=True)
        assert (e[1, 2], e[0, 3], e[0, 1]) == (0, 4, 1)


# ---------------------------------------------------------------------------
# Storage runs
# ---------------------------------------------------------------------------

class TestStorageExperiment:

    def test_silent_bath_keeps_state(self, btp):
        curve = storage_experiment(PSI_PLUS, "udd", 3, btp, SILENT, np.linspace(0, 0.5, 6))
        assert np.allclose(curve.correlation, 1, atol=1e-9)
        assert np.allclose(curve.magnetization, 1)
        assert curve.label == "udd-3"
        assert len(curve.rows()) == 6

    def test_transverse_relaxation(self):
        chloroform = load_system(systems_dir() / "chloroform.json")
        curve = storage_experiment(PSI_PLUS, "none", 1, chloroform, SILENT, [0.0, 1.0], relax=True)
        assert curve.magnetization[1] == pytest.approx(np.exp(-(1 / 4.0 + 1 / 0.8)))

    def test_flip_errors_accumulate(self, btp):
        # ten flips over-rotated by 5% add up to a quarter turn
        curve = storage_experiment(PSI_PLUS, "cpmg", 1, btp, SILENT, [0.0, 10 * BLOCK_UNIT_S], rf_error=0.05)
        assert curve.correlation[0] == pytest.approx(1.0)
        assert curve.correlation[1] < 0.5

    def test_collective_noise_spares_singlet(self, btp):
        spectrum = NoiseSpectrum.parse(DEFAULT_SPECTRUM)
        curve = storage_experiment(PSI_MINUS, "none", 1, btp, spectrum, np.linspace(0, 30, 7), collective=True)
        assert np.all(curve.correlation > 0.999)

    def test_ties_go_to_lower_order(self, btp):
        best, counts = optimal_order(PSI_PLUS, btp, SILENT, [0.0, 0.1])
        assert best == 1
        assert set(counts.values()) == {2}

    def test_two_spins_only(self):
        system = load_system(systems_dir() / "acrylonitrile.json")
        with pytest.raises(ValueError, match="two-spin"):
            storage_experiment(PSI_PLUS, "none", 1, system, SILENT, [0.0])

    def test_sorted_times(self, btp):
        with pytest.raises(ValueError, match="sorted"):
            storage_experiment(PSI_PLUS, "none", 1, btp, SILENT, [1.0, 0.5])


class TestFlatBath:

    def test_decoupling_extends_storage(self, flat_bath_counts):
        none, cpmg, _, udd = flat_bath_counts
        assert none < cpmg < udd[7]

    def test_interior_optimal_order(self, flat_bath_counts):
        _, _, best, udd = flat_bath_counts
        assert best == 7
        assert udd[5] < udd[7] and udd[9] < udd[7]
