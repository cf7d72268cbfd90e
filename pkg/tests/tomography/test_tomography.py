"""
Tests for state tomography

Tests the two-spin constraint matrix against its closed form, conditioning,
and reconstruction of random states for two and three spins.
"""

import numpy as np
import pytest

from src.core.core import systems_dir
from src.core.errors import NumericalError
from src.hamiltonian.system import load_system, two_spin_system
from src.spinops.operators import random_deviation, total
from src.tomography.constraints import (
    build_constraints,
    condition_number,
    diagonal_reconstruct,
    element_table,
    reconstruct,
    simulate_readouts,
    solve,
)
from src.tomography.scheme import (
    READOUT_TRANSITION,
    basis_element,
    coherence_pairs,
    diagonal_scheme,
    three_spin_scheme,
    two_spin_scheme,
    unknown_labels,
    unknown_vector,
)

H, Q, W = 0.5, 0.25, 1 / np.sqrt(2)
COLUMNS = ["p0", "p1", "p2"] + [f"r{k}" for k in range(1, 7)] + [f"s{k}" for k in range(1, 7)]

# Closed-form readout equations of the six two-spin experiments (R1, R2, S1, S2 each)
CLOSED_FORM_ROWS = [
    {"r1": 1, "r2": 1},
    {"r3": 1, "r4": 1},
    {"s1": 1, "s2": 1},
    {"s3": 1, "s4": 1},
    {"r1": 1, "r2": 1},
    {"r3": 1, "r4": 1},
    {"p0": H, "p1": H, "p2": -H},
    {"p0": H, "p1": -H, "p2": H},
    {"s1": 1, "s2": -1},
    {"s3": 1, "s4": -1},
    {"r1": 1, "r2": -1},
    {"r3": 1, "r4": -1},
    {"p0": Q, "p1": -Q, "p2": -Q, "r5": H, "r6": -H, "s1": H, "s2": -H, "s3": -H, "s4": H},
    {"p0": Q, "p1": -Q, "p2": -Q, "r5": H, "r6": -H, "s1": -H, "s2": H, "s3": H, "s4": -H},
    {"r1": W, "r2": -W, "s5": -W, "s6": W},
    {"r3": W, "r4": -W, "s5": -W, "s6": -W},
    {"s1": W, "s2": -W, "s5": -W, "s6": -W},
    {"s3": W, "s4": -W, "s5": -W, "s6": W},
    {"p0": Q, "p1": -Q, "p2": -Q, "r1": H, "r2": -H, "r3": -H, "r4": H, "r5": -H, "r6": -H},
    {"p0": Q, "p1": -Q, "p2": -Q, "r1": -H, "r2": H, "r3": H, "r4": -H, "r5": -H, "r6": -H},
    {"p0": Q, "p1": -Q, "p2": -Q, "r1": H, "r2": -H, "r3": H, "r4": -H, "r5": H, "r6": H},
    {"p0": Q, "p1": -Q, "p2": -Q, "r1": -H, "r2": H, "r3": -H, "r4": H, "r5": H, "r6": H},
    {"s1": -W, "s2": W, "s5": -W, "s6": -W},
    {"s3": W, "s4": -W, "s5": -W, "s6": W},
]


def closed_form_matrix() -> np.ndarray:
    return np.array([[row.get(c, 0.0) for c in COLUMNS] for row in CLOSED_FORM_ROWS])


@pytest.fixture(scope="module")
def btp():
    return load_system(systems_dir() / "btp.json")


@pytest.fixture(scope="module")
def two_spin(btp):
    return build_constraints(two_spin_scheme(btp), btp)


@pytest.fixture(scope="module")
def three_spin():
    system = load_system(systems_dir() / "acrylonitrile.json")
    return build_constraints(three_spin_scheme(system), system)


# ---------------------------------------------------------------------------
# Unknown labelling
# ---------------------------------------------------------------------------

class TestLabelling:

    def test_two_spin_labels(self):
        assert unknown_labels(2) == COLUMNS

    @pytest.mark.parametrize("n, count", [(1, 3), (2, 15), (3, 63)])
    def test_unknown_count(self, n, count):
        assert len(unknown_labels(n)) == count

    def test_single_quantum_pairs_first(self):
        assert coherence_pairs(2)[:4] == [(0, 2), (1, 3), (0, 1), (2, 3)]

    def test_basis_element_is_hermitian(self):
        e = basis_element(2, "s5")
        assert np.allclose(e, e.conj().T)
        assert unknown_vector(e)[COLUMNS.index("s5")] == 1.0


# ---------------------------------------------------------------------------
# Two spins
# ---------------------------------------------------------------------------

class TestTwoSpinMatrix:

    def test_shape(self, two_spin):
        assert two_spin.shape == (24, 15)
        assert list(two_spin.labels) == COLUMNS

    def test_matches_closed_form(self, two_spin):
        assert np.max(np.abs(two_spin.matrix - closed_form_matrix())) < 1e-12

    def test_condition_number(self, two_spin):
        assert condition_number(two_spin) == pytest.approx(3.7, abs=0.3)

    def test_full_rank(self, two_spin):
        assert two_spin.full_rank


class TestTwoSpinReconstruction:

    def test_random_states(self, two_spin):
        rng = np.random.default_rng(2024)
        worst = 0.0
        for _ in range(100):
            target = random_deviation(2, rng)
            got = reconstruct(simulate_readouts(target, two_spin), two_spin)
            worst = max(worst, np.max(np.abs(got - target)))
        assert worst < 1e-10

    def test_thermal_state(self, two_spin):
        got = reconstruct(simulate_readouts(total(2, "z"), two_spin), two_spin)
        assert np.allclose(got, total(2, "z"), atol=1e-12)

    def test_noise_needs_generator(self, two_spin):
        with pytest.raises(ValueError, match="random generator"):
            simulate_readouts(total(2, "z"), two_spin, noise_sd=0.01)

    def test_noise_degrades_gracefully(self, two_spin):
        rng = np.random.default_rng(3)
        target = random_deviation(2, rng)
        got = reconstruct(simulate_readouts(target, two_spin, 1e-3, rng), two_spin)
        assert 0 < np.max(np.abs(got - target)) < 0.05

    def test_element_table(self, two_spin):
        target = random_deviation(2, np.random.default_rng(4))
        table = element_table(reconstruct(simulate_readouts(target, two_spin), two_spin), target)
        assert [row[0] for row in table] == COLUMNS
        assert all(abs(got - want) < 1e-10 for _, got, want in table)

    def test_transition_readout(self, btp):
        constraints = build_constraints(two_spin_scheme(btp, READOUT_TRANSITION), btp)
        assert constraints.shape == (48, 15)
        target = random_deviation(2, np.random.default_rng(5))
        assert np.allclose(reconstruct(simulate_readouts(target, constraints), constraints), target, atol=1e-10)

    def test_rank_deficient_subset(self, btp):
        scheme = two_spin_scheme(btp)
        partial = type(scheme)("partial", 2, scheme.experiments[:2])
        with pytest.raises(NumericalError, match="rank deficient"):
            build_constraints(partial, btp, fallback=False)

    def test_solve_checks_rank(self, two_spin):
        truncated = type(two_spin)(two_spin.scheme, two_spin.matrix[:4], two_spin.labels,
                                   two_spin.row_labels[:4], two_spin.unitaries[:1])
        with pytest.raises(NumericalError, match="rank deficient"):
            solve(np.zeros(4), truncated)


# ---------------------------------------------------------------------------
# Three spins and populations
# ---------------------------------------------------------------------------

class TestThreeSpin:

    def test_full_rank(self, three_spin):
        assert three_spin.full_rank
        assert three_spin.shape[1] == 63

    def test_random_states(self, three_spin):
        rng = np.random.default_rng(7)
        for _ in range(20):
            target = random_deviation(3, rng)
            got = reconstruct(simulate_readouts(target, three_spin), three_spin)
            assert np.max(np.abs(got - target)) < 1e-6


class TestDiagonal:

    @pytest.mark.parametrize("n", [2, 3])
    def test_populations_only(self, n):
        system = two_spin_system(100.0, 7.0) if n == 2 else load_system(systems_dir() / "acrylonitrile.json")
        constraints = build_constraints(diagonal_scheme(n), system)
        target = random_deviation(n, np.random.default_rng(n))
        got = diagonal_reconstruct(simulate_readouts(target, constraints), constraints)
        expected = np.diag(np.diag(target))
        assert np.allclose(got, expected - np.trace(expected) / 2 ** n * np.eye(2 ** n), atol=1e-10)

    def test_requires_diagonal_scheme(self, two_spin):
        with pytest.raises(ValueError):
            diagonal_reconstruct(np.zeros(24), two_spin)
