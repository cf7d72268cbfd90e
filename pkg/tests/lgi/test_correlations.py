"""
Tests for Leggett-Garg strings

Tests closed forms and bounds, the probe protocol, the probe-target
simulation and the decaying-string analysis.
"""

import math
from unittest.mock import patch

import numpy as np
import pytest

from src.core.core import systems_dir
from src.core.errors import ConfigError
from src.hamiltonian.system import SpinSystem, load_system
from src.lgi.correlations import (
    LgiConfig,
    bounds,
    classical_crossing,
    correlation_labels,
    decayed_k_string,
    k_string,
    k_string_sim,
    lgi_sweep,
    moussa_correlation,
    peak_spacings,
    ttcc,
    tune_target_t2,
)

OMEGA = 2 * np.pi * 100.0


@pytest.fixture(scope="module")
def tuned_chloroform():
    base = load_system(systems_dir() / "chloroform.json")
    return tune_target_t2(base, OMEGA, 0.288, n=3, dt_max=0.3)


def effective_t2(system: SpinSystem) -> float:
    return 1 / (1 / system.t2_s[0] + 1 / system.t2_s[1])


# ---------------------------------------------------------------------------
# Closed forms
# ---------------------------------------------------------------------------

class TestBounds:

    def test_three_measurement_bounds(self):
        b = bounds(3)
        assert (b.classical_lo, b.classical_hi) == (-3.0, 1.0)
        assert b.quantum_lo == pytest.approx(-3.0, abs=1e-9)
        assert b.quantum_hi == pytest.approx(1.5, abs=1e-9)

    def test_four_measurement_bounds(self):
        b = bounds(4)
        assert (b.classical_lo, b.classical_hi) == (-2.0, 2.0)
        assert b.quantum_hi == pytest.approx(2 * math.sqrt(2), abs=1e-6)
        assert b.quantum_lo == pytest.approx(-2 * math.sqrt(2), abs=1e-6)

    @pytest.mark.parametrize("n", [1, 2])
    def test_too_few_measurements(self, n):
        with pytest.raises(ValueError):
            bounds(n)

    def test_k3_maximum_on_grid(self):
        grid = np.arange(361) * 4 * np.pi / 360
        assert max(k_string(3, 1.0, x) for x in grid) == pytest.approx(1.5, abs=1e-12)

    def test_labels(self):
        assert correlation_labels(4) == ["C12", "C23", "C34", "C14"]

    def test_decay_reduces_to_closed_form(self):
        assert decayed_k_string(3, OMEGA, 0.01, math.inf) == pytest.approx(k_string(3, OMEGA, 0.01))

    def test_peak_spacings(self):
        peaks = peak_spacings(3, OMEGA, 0.3)
        assert peaks[0] * OMEGA == pytest.approx(np.pi / 3, abs=1e-9)
        assert np.allclose(np.diff(peaks), 2 * np.pi / OMEGA)


# ---------------------------------------------------------------------------
# Probe protocol
# ---------------------------------------------------------------------------

class TestProbeProtocol:

    @pytest.mark.parametrize("t_i, t_j", [(0.0, 0.001), (0.002, 0.0075), (0.01, 0.0)])
    def test_mixed_target(self, t_i, t_j):
        got = moussa_correlation(np.eye(2) / 2, OMEGA, t_i, t_j)
        assert got == pytest.approx(ttcc(OMEGA, t_j - t_i), abs=1e-9)

    def test_state_independent(self):
        up = np.diag([1.0, 0.0])
        assert moussa_correlation(up, OMEGA, 0.0, 0.003) == pytest.approx(ttcc(OMEGA, 0.003), abs=1e-9)

    def test_invalid_target(self):
        with pytest.raises(ValueError, match="unit trace"):
            moussa_correlation(np.eye(2), OMEGA, 0.0, 0.001)

    @pytest.mark.parametrize("n", [3, 4, 5])
    @pytest.mark.parametrize("dt", [0.0, 0.0007, 0.00166, 0.0042])
    def test_simulation_matches_closed_form(self, n, dt):
        assert k_string_sim(n, OMEGA, dt) == pytest.approx(k_string(n, OMEGA, dt), abs=1e-9)

    def test_simulation_needs_two_spins(self):
        system = load_system(systems_dir() / "acrylonitrile.json")
        with pytest.raises(ValueError, match="2-spin"):
            k_string_sim(3, OMEGA, 0.001, system)


# ---------------------------------------------------------------------------
# Decaying strings
# ---------------------------------------------------------------------------

class TestDecay:

    def test_only_target_t2_changes(self, tuned_chloroform):
        base = load_system(systems_dir() / "chloroform.json")
        assert tuned_chloroform.t2_s[0] == base.t2_s[0]
        assert tuned_chloroform.shifts_hz == base.shifts_hz

    @pytest.mark.parametrize("dt", [0.0021, 0.05, 0.1234])
    def test_simulation_matches_damped_form(self, tuned_chloroform, dt):
        expected = decayed_k_string(3, OMEGA, dt, effective_t2(tuned_chloroform))
        assert k_string_sim(3, OMEGA, dt, tuned_chloroform) == pytest.approx(expected, abs=1e-9)

    def test_classical_crossing(self, tuned_chloroform):
        grid = [k * 0.3 / 360 for k in range(361)]
        rows = lgi_sweep(LgiConfig(OMEGA, 3, tuple(grid)), tuned_chloroform)
        dt = np.array([r[0] for r in rows])
        k = np.array([r[-1] for r in rows])
        crossing = classical_crossing(dt, k, bounds(3).classical_hi)
        assert crossing is not None
        assert 20 * np.pi <= OMEGA * crossing <= 32 * np.pi
        assert np.max(k) > 1.0

    def test_untunable_decay(self):
        base = load_system(systems_dir() / "chloroform.json")
        with patch("src.lgi.correlations.fit_string_decay", return_value=1.0):
            with pytest.raises(ConfigError, match="--tau-ms"):
                tune_target_t2(base, OMEGA, 0.288, n=3, dt_max=0.3)

    def test_crossing_rules(self):
        dt = np.arange(5.0)
        assert classical_crossing(dt, np.array([2, 0.5, 1.2, 0.3, 0.1]), 1.0) == 3.0
        assert classical_crossing(dt, np.zeros(5), 1.0) == 0.0
        assert classical_crossing(dt, np.array([0, 0, 0, 0, 2.0]), 1.0) is None


class TestSweep:

    def test_rows(self):
        config = LgiConfig(OMEGA, 4, (0.0, 0.001, 0.002))
        rows = lgi_sweep(config)
        assert len(rows) == 3
        assert all(len(row) == 2 + 4 + 1 for row in rows)
        assert rows[1][-1] == pytest.approx(k_string(4, OMEGA, 0.001))

    def test_config_validation(self):
        with pytest.raises(ValueError):
            LgiConfig(OMEGA, 2, (0.0,))
        with pytest.raises(ValueError):
            LgiConfig(OMEGA, 3, (-0.1,))
