"""
Tests for spin operators

Tests embedding conventions, propagators, named states and the state
metrics used by every simulation.
"""

import numpy as np
import pytest

from src.core.errors import NumericalError
from src.spinops.operators import (
    State,
    bell_states,
    bit,
    conjugate,
    correlation,
    diagonal_correlation,
    embed,
    is_hermitian,
    is_unitary,
    ket,
    ket_deviation,
    pauli,
    pps_deviation,
    propagator,
    random_deviation,
    rotation,
    singlet_deviation,
    singlet_triplet_basis,
    spin,
    total,
    trace_distance,
    z_rotation,
)


def iz(n, k):
    return embed(n, k, spin("z"))


class TestConventions:

    def test_spin_one_is_most_significant(self):
        assert bit(2, 1) == 2
        assert bit(2, 2) == 1
        assert np.allclose(np.diag(iz(2, 1)).real, [0.5, 0.5, -0.5, -0.5])
        assert np.allclose(np.diag(iz(2, 2)).real, [0.5, -0.5, 0.5, -0.5])

    def test_ket_index(self):
        assert np.argmax(np.abs(ket("01"))) == 1
        assert np.argmax(np.abs(ket("110"))) == 6

    @pytest.mark.parametrize("label", ["", "012", "ab"])
    def test_invalid_ket(self, label):
        with pytest.raises(ValueError):
            ket(label)

    def test_unknown_axis(self):
        with pytest.raises(ValueError, match="axis"):
            pauli("w")

    def test_embed_range(self):
        with pytest.raises(ValueError):
            embed(2, 3, spin("x"))

    @pytest.mark.parametrize("k, j", [(1, 2), (1, 3), (3, 2)])
    @pytest.mark.parametrize("a, b", [("x", "y"), ("z", "x"), ("y", "y")])
    def test_embedded_spins_commute(self, k, j, a, b):
        first, second = embed(3, k, spin(a)), embed(3, j, spin(b))
        assert np.allclose(first @ second, second @ first, atol=1e-15)


class TestPropagators:

    def test_propagator_is_unitary(self):
        h = 2 * np.pi * (total(2, "x") + 0.3 * iz(2, 1) @ iz(2, 2))
        assert is_unitary(propagator(h, 0.37))

    def test_non_hermitian_generator(self):
        with pytest.raises(ValueError, match="Hermitian"):
            propagator(np.array([[0, 1], [0, 0]], dtype=complex), 1.0)

    def test_conjugate_preserves_trace(self):
        u = propagator(2 * np.pi * (total(3, "x") + iz(3, 1) @ iz(3, 3)), 0.21)
        a = random_deviation(3, np.random.default_rng(11)) + 0.7 * np.eye(8)
        assert abs(np.trace(conjugate(u, a)) - np.trace(a)) < 1e-12

    def test_pi_pulse_inverts_spin(self):
        u = rotation(1, (1,), np.pi, 0.0)
        assert np.allclose(conjugate(u, spin("z")), -spin("z"))

    def test_x_rotation_sense(self):
        # I_z -> I_z cos(a) - I_y sin(a) about +x
        u = rotation(1, (1,), np.pi / 2, 0.0)
        assert np.allclose(conjugate(u, spin("z")), -spin("y"))

    def test_y_rotation_sense(self):
        u = rotation(1, (1,), np.pi / 2, np.pi / 2)
        assert np.allclose(conjugate(u, spin("z")), spin("x"))

    def test_selective_rotation_leaves_other_spin(self):
        u = rotation(2, (2,), np.pi, 0.0)
        assert np.allclose(conjugate(u, iz(2, 1)), iz(2, 1))
        assert np.allclose(conjugate(u, iz(2, 2)), -iz(2, 2))

    def test_z_rotation_mapping(self):
        u = z_rotation(2, {1: 0.3, 2: -1.1})
        expected = z_rotation(2, (1,), 0.3) @ z_rotation(2, (2,), -1.1)
        assert np.allclose(u, expected)

    def test_z_rotation_needs_angle(self):
        with pytest.raises(ValueError):
            z_rotation(2, (1, 2))


class TestStates:

    def test_pps_scale(self):
        expected = iz(2, 1) + iz(2, 2) + 2 * iz(2, 1) @ iz(2, 2)
        assert np.allclose(pps_deviation("00"), expected)

    def test_bell_states_orthonormal(self):
        vectors = np.array(list(bell_states().values()))
        assert np.allclose(vectors.conj() @ vectors.T, np.eye(4))

    def test_singlet_is_antisymmetric(self):
        s0 = singlet_triplet_basis()["S0"]
        swap = np.eye(4)[[0, 2, 1, 3]]
        assert np.allclose(swap @ s0, -s0)

    def test_singlet_deviation_is_psi_minus(self):
        assert np.allclose(singlet_deviation(), ket_deviation(bell_states()["psi-minus"]))

    def test_state_is_traceless_and_valid(self):
        state = State.thermal(3)
        assert abs(np.trace(state.deviation)) < 1e-15
        assert state.is_valid()
        assert abs(np.trace(state.rho) - 1) < 1e-12

    def test_from_rho_recovers_deviation(self):
        rho = np.diag([0.7, 0.1, 0.1, 0.1]).astype(complex)
        state = State.from_rho(rho)
        assert np.allclose(state.rho, rho)

    def test_non_square_deviation(self):
        with pytest.raises(ValueError):
            State(np.zeros((4, 2)))

    def test_random_deviation(self):
        d = random_deviation(2, np.random.default_rng(1))
        assert is_hermitian(d)
        assert abs(np.trace(d)) < 1e-12


class TestMetrics:

    def test_correlation_bounds(self):
        d = random_deviation(2, np.random.default_rng(2))
        assert correlation(d, d) == pytest.approx(1.0)
        assert correlation(d, -d) == pytest.approx(-1.0)
        assert correlation(d, 3 * d) == pytest.approx(1.0)

    def test_correlation_ignores_identity(self):
        d = pps_deviation("01")
        assert correlation(d + 5 * np.eye(4), d) == pytest.approx(1.0)

    def test_zero_norm(self):
        with pytest.raises(NumericalError):
            correlation(np.zeros((4, 4)), pps_deviation("00"))

    def test_diagonal_correlation_ignores_coherences(self):
        d = pps_deviation("10") + 0.3 * embed(2, 1, spin("x"))
        assert diagonal_correlation(d, pps_deviation("10")) == pytest.approx(1.0)
        assert correlation(d, pps_deviation("10")) < 1.0

    def test_trace_distance(self):
        a = ket_deviation(ket("01"))
        assert trace_distance(a, a) == pytest.approx(0.0, abs=1e-14)
        assert trace_distance(a, ket_deviation(ket("10"))) == pytest.approx(1.0)
