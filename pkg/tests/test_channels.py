import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from src.channels import (CHANNELS, ChannelDomainError, ChannelKind, InvalidChannelError, amplitude_decay, apply,
                          apply_hadamard, channel_g, classify, completeness_residual, compose_permutations,
                          cyclic_permutation, get_builtin_channel, identity_channel, make_channel, permute_channel,
                          qubit_paper_channel, qutrit_phase_damping, random_gio, transfer_from_mcs, transfer_matrix)
from src.measures import g_coherence, mcs_density
from src.qstate import DimensionMismatchError, QStateError, diagonal_state, random_density

S2 = np.sqrt(2) / 2


class TestMakeChannel:
    def test_identity_is_gio(self):
        assert classify(make_channel([np.eye(3)])).kind == ChannelKind.GIO

    @pytest.mark.parametrize('theta2', np.arange(0, 46, 3.))
    def test_qubit_channel_valid(self, theta2):
        assert completeness_residual(qubit_paper_channel(theta2).operators) <= 1e-12

    def test_incomplete(self):
        with pytest.raises(InvalidChannelError, match='Completeness'):
            make_channel([np.diag([1, 1]), np.diag([1, 0])])

    def test_shape_mismatch(self):
        with pytest.raises(InvalidChannelError):
            make_channel([np.eye(2), np.eye(3)])

    def test_empty(self):
        with pytest.raises(InvalidChannelError):
            make_channel([])


class TestBuiltins:
    def test_qubit_channel_angles(self):
        np.testing.assert_array_equal(qubit_paper_channel(0).operators, [np.diag([0, 1]), np.diag([1, 0])])
        np.testing.assert_allclose(qubit_paper_channel(22.5).operators,
                                   [np.diag([S2, S2]), np.diag([S2, 1j * S2])], atol=1e-15)
        np.testing.assert_array_equal(qubit_paper_channel(45).operators, [np.diag([1, 0]), np.diag([0, 1j])])

    def test_qutrit_phase_damping_angles(self):
        np.testing.assert_array_equal(qutrit_phase_damping(0).operators, [np.eye(3), np.zeros((3, 3))])
        np.testing.assert_array_equal(qutrit_phase_damping(45).operators,
                                      [np.diag([0, 0, 1]), np.diag([1, 1, 0])])
        np.testing.assert_allclose(qutrit_phase_damping(15).operators,
                                   [np.diag([np.sqrt(3) / 2, np.sqrt(3) / 2, 1]), np.diag([0.5, 0.5, 0])],
                                   atol=1e-15)
        assert classify(qutrit_phase_damping(15)).kind == ChannelKind.GIO

    def test_amplitude_decay(self):
        ch = amplitude_decay(0.5)
        np.testing.assert_allclose(ch.operators[0], np.diag([1, np.sqrt(0.5)]))
        np.testing.assert_allclose(ch.operators[1], [[0, np.sqrt(0.5)], [0, 0]])

    @pytest.mark.parametrize('epsilon', [0., 1., -0.1, 1.5])
    def test_amplitude_decay_domain(self, epsilon):
        with pytest.raises(ChannelDomainError):
            amplitude_decay(epsilon)

    @pytest.mark.parametrize('epsilon', [0.05, 0.5, 0.95])
    def test_amplitude_decay_is_other(self, epsilon):
        assert classify(amplitude_decay(epsilon)).kind == ChannelKind.OTHER

    def test_amplitude_decay_small_epsilon(self):
        m = transfer_matrix(amplitude_decay(1e-9)).entries
        assert abs(m[0, 1]) == pytest.approx(1., abs=1e-8)

    @pytest.mark.parametrize('name', ['qubit-paper', 'qutrit-pd'])
    def test_angle_is_required(self, name):
        with pytest.raises(ChannelDomainError, match='angle'):
            get_builtin_channel(name)

    def test_registry(self):
        assert {'qubit-paper', 'qutrit-pd', 'amp-decay', 'identity'} <= set(CHANNELS)
        assert get_builtin_channel('identity', 3).d == 3
        with pytest.raises(InvalidChannelError, match='Unknown builtin'):
            get_builtin_channel('nope', 1.)


class TestClassify:
    def test_cyclic_permutation_placement(self):
        gio = qutrit_phase_damping(15)
        perm = cyclic_permutation(3)
        permuted = permute_channel(gio, perm)
        cls = classify(permuted)
        assert cls.kind == ChannelKind.PERMUTED_GIO
        assert cls.permutation == (2, 0, 1)
        for k, kp in zip(gio.operators, permuted.operators):
            expected = np.array([[0, k[1, 1], 0], [0, 0, k[2, 2]], [k[0, 0], 0, 0]])
            np.testing.assert_array_equal(kp, expected)

    def test_identity_permutation_is_gio(self):
        gio = random_gio(3, 2, 5)
        permuted = permute_channel(gio, (0, 1, 2))
        np.testing.assert_array_equal(permuted.operators, gio.operators)
        assert classify(permuted).kind == ChannelKind.GIO

    def test_bad_permutation(self):
        with pytest.raises(QStateError):
            permute_channel(qutrit_phase_damping(15), (0, 0, 1))

    def test_two_permutations_are_other(self):
        ch = compose_permutations(qubit_paper_channel(15.), [(0, 1), (1, 0)])
        assert classify(ch).kind == ChannelKind.OTHER


class TestApply:
    def test_identity(self):
        rho = random_density(3, 2)
        np.testing.assert_allclose(apply(identity_channel(3), rho).matrix, rho.matrix, atol=1e-15)

    def test_gio_preserves_incoherent(self):
        delta = diagonal_state([0.2, 0.3, 0.5])
        np.testing.assert_allclose(apply(random_gio(3, 3, 1), delta).matrix, delta.matrix, atol=1e-14)

    @pytest.mark.parametrize('epsilon', [0.1, 0.5, 0.9])
    def test_amplitude_decay_offdiag(self, epsilon):
        rho = random_density(2, 4)
        out = apply(amplitude_decay(epsilon), rho)
        assert out.matrix[0, 1] == pytest.approx(np.sqrt(1 - epsilon) * rho.matrix[0, 1], abs=1e-14)

    def test_rounded_kraus_coefficients(self):
        # 10-digit 1/sqrt2 leaves a 4e-11 completeness residual
        s = 0.7071067812
        ch = make_channel([np.diag([s, s]), np.diag([s, -s])])
        out = apply(ch, mcs_density(2))
        assert np.trace(out.matrix).real == pytest.approx(1., abs=1e-9)
        assert abs(out.matrix[0, 1]) <= 1e-12
        assert g_coherence(apply(ch, random_density(2, 3))).value <= 1e-11

    def test_dimension_mismatch(self):
        with pytest.raises(DimensionMismatchError):
            apply(identity_channel(2), random_density(3, 0))


class TestTransfer:
    def test_identity_all_ones(self):
        np.testing.assert_allclose(transfer_matrix(identity_channel(3)).entries, np.ones((3, 3)))

    def test_all_ones_keeps_state(self):
        rho = random_density(3, 6)
        out = apply_hadamard(transfer_matrix(identity_channel(3)), rho)
        np.testing.assert_allclose(out.matrix, rho.matrix)

    def test_qutrit_mcs_pattern(self, mcs3):
        c = np.cos(np.deg2rad(30))
        out = apply_hadamard(transfer_matrix(qutrit_phase_damping(15)), mcs3).matrix
        np.testing.assert_allclose(np.abs([out[0, 1], out[0, 2], out[1, 2]]), [1 / 3, c / 3, c / 3], atol=1e-15)

    def test_qubit_transfer(self):
        s, c = np.sin(np.deg2rad(30)), np.cos(np.deg2rad(30))
        m = transfer_matrix(qubit_paper_channel(15)).entries
        assert m[0, 1] == pytest.approx(s * c * (1 - 1j), abs=1e-15)

    def test_dimension_mismatch(self):
        with pytest.raises(DimensionMismatchError):
            apply_hadamard(transfer_matrix(identity_channel(2)), random_density(3, 0))

    @given(st.integers(min_value=2, max_value=6), st.integers(min_value=1, max_value=4),
           st.integers(min_value=0, max_value=10 ** 6))
    @settings(max_examples=40, deadline=None)
    def test_transfer_equals_d_times_mcs_output(self, d, m, seed):
        ch = random_gio(d, m, seed)
        np.testing.assert_allclose(transfer_matrix(ch).entries, transfer_from_mcs(ch).entries, atol=1e-12)

    def test_channel_g_qubit(self):
        assert channel_g(qubit_paper_channel(22.5)) == pytest.approx(1 / np.sqrt(2), abs=1e-12)
        assert channel_g(identity_channel(4)) == pytest.approx(1.0, abs=1e-12)


class TestRandomGio:
    @pytest.mark.parametrize('d', [2, 3, 4, 5])
    def test_transfer_matrix_invariants(self, d):
        for seed in range(250):
            m = transfer_matrix(random_gio(d, 1 + seed % 4, seed)).entries
            np.testing.assert_allclose(np.diag(m), np.ones(d), atol=1e-12)
            np.testing.assert_allclose(m, m.conj().T, atol=1e-14)
            assert np.linalg.eigvalsh(m).min() >= -1e-12
            assert np.abs(m).max() <= 1 + 1e-12

    def test_gio_and_complete(self):
        ch = random_gio(3, 2, 5)
        assert classify(ch).kind == ChannelKind.GIO
        assert completeness_residual(ch.operators) <= 1e-12

    def test_single_kraus_unit_modulus(self):
        ch = random_gio(2, 1, 3)
        np.testing.assert_allclose(np.abs(np.diag(ch.operators[0])), [1, 1], atol=1e-15)

    def test_deterministic(self):
        np.testing.assert_array_equal(random_gio(4, 3, 8).operators, random_gio(4, 3, 8).operators)


def test_gio_never_increases_g():
    for seed in range(20):
        ch = random_gio(3, 3, seed)
        assert 0 <= channel_g(ch) <= 1 + 1e-12
        rho = random_density(3, seed)
        assert g_coherence(apply(ch, rho)).value <= g_coherence(rho).value + 1e-12
    assert g_coherence(mcs_density(3)).value == pytest.approx(1.)
