import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from src.qstate import (DimensionMismatchError, InvalidDimensionError, InvalidMixtureError, InvalidStateError,
                        density_from_matrix, density_from_pure, diagonal_state, is_incoherent, mcs, min_eigenvalue,
                        mix, permutation_matrix, permute_state, project_psd, pure_state_from_amplitudes,
                        qubit_initial_state, qutrit_initial_state, random_density)


class TestPureState:
    def test_basis_state(self):
        psi = pure_state_from_amplitudes([1, 0])
        np.testing.assert_array_equal(psi.amplitudes, [1, 0])

    def test_normalization(self):
        psi = pure_state_from_amplitudes([1, 1, 1])
        np.testing.assert_allclose(psi.amplitudes, np.full(3, 1 / np.sqrt(3)), atol=1e-15)
        psi = pure_state_from_amplitudes([3, 4j])
        np.testing.assert_allclose(psi.amplitudes, [0.6, 0.8j], atol=1e-15)

    def test_zero_vector(self):
        with pytest.raises(InvalidStateError):
            pure_state_from_amplitudes([0, 0, 0])

    def test_non_finite(self):
        with pytest.raises(InvalidStateError):
            pure_state_from_amplitudes([np.nan, 1])

    def test_single_amplitude(self):
        with pytest.raises(InvalidDimensionError):
            pure_state_from_amplitudes([1])

    def test_qubit_initial_state_is_mcs_at_22_5(self):
        np.testing.assert_allclose(qubit_initial_state(22.5).amplitudes, mcs(2).amplitudes, atol=1e-15)

    def test_amplitudes_read_only(self):
        psi = mcs(2)
        with pytest.raises(ValueError):
            psi.amplitudes[0] = 1


class TestMcs:
    @pytest.mark.parametrize('d', [2, 3, 4])
    def test_amplitudes(self, d):
        np.testing.assert_allclose(mcs(d).amplitudes, np.full(d, 1 / np.sqrt(d)))

    @pytest.mark.parametrize('d', [1, 0, -3])
    def test_invalid_dimension(self, d):
        with pytest.raises(InvalidDimensionError):
            mcs(d)


class TestDensity:
    def test_mcs_qubit(self):
        np.testing.assert_allclose(density_from_pure(mcs(2)).matrix, np.full((2, 2), 0.5), atol=1e-15)

    def test_basis_projector(self):
        np.testing.assert_array_equal(density_from_pure(pure_state_from_amplitudes([1, 0])).matrix, np.diag([1, 0]))

    def test_qutrit_initial_state_at_22_5(self):
        rho = density_from_pure(qutrit_initial_state(22.5))
        np.testing.assert_allclose(rho.matrix, np.full((3, 3), 1 / 3), atol=1e-15)

    def test_not_hermitian(self):
        with pytest.raises(InvalidStateError, match='Hermitian'):
            density_from_matrix([[0.5, 0.1], [0.2, 0.5]])

    def test_bad_trace(self):
        with pytest.raises(InvalidStateError, match='trace'):
            density_from_matrix(np.eye(2))

    def test_not_psd(self):
        with pytest.raises(InvalidStateError, match='PSD'):
            density_from_matrix(np.diag([1.5, -0.5]))

    def test_not_square(self):
        with pytest.raises(InvalidStateError):
            density_from_matrix(np.ones((2, 3)) / 2)

    def test_unvalidated_carrier(self):
        rho = density_from_matrix(np.diag([1.5, -0.5]), validate=False)
        assert not rho.validated
        assert rho.d == 2

    def test_diagonal_state_is_incoherent(self):
        assert is_incoherent(diagonal_state([0.2, 0.3, 0.5]))
        assert not is_incoherent(density_from_pure(mcs(3)))


class TestMix:
    def test_endpoints(self, mcs3, psi_prime):
        np.testing.assert_array_equal(mix([(1., mcs3), (0., psi_prime)]).matrix, mcs3.matrix)
        np.testing.assert_array_equal(mix([(0., mcs3), (1., psi_prime)]).matrix, psi_prime.matrix)

    def test_half(self, mcs3, psi_prime):
        rho = mix([(0.5, mcs3), (0.5, psi_prime)])
        np.testing.assert_allclose(rho.matrix, (mcs3.matrix + psi_prime.matrix) / 2, atol=1e-15)

    def test_weights_must_sum_to_one(self, mcs3, psi_prime):
        with pytest.raises(InvalidMixtureError):
            mix([(0.5, mcs3), (0.6, psi_prime)])

    def test_negative_weight(self, mcs3, psi_prime):
        with pytest.raises(InvalidMixtureError):
            mix([(1.5, mcs3), (-0.5, psi_prime)])

    def test_dimension_mismatch(self, mcs3):
        with pytest.raises(DimensionMismatchError):
            mix([(0.5, mcs3), (0.5, density_from_pure(mcs(2)))])


class TestRandomDensity:
    def test_deterministic(self):
        np.testing.assert_array_equal(random_density(2, 1).matrix, random_density(2, 1).matrix)

    def test_valid(self):
        rho = random_density(3, 7)
        assert np.all(rho.eigenvalues() >= -1e-12)
        assert abs(np.trace(rho.matrix) - 1) < 1e-12

    def test_hermitian(self):
        m = random_density(4, 9).matrix
        assert np.max(np.abs(m - m.conj().T)) <= 1e-14

    @given(st.integers(min_value=2, max_value=8), st.integers(min_value=0, max_value=2 ** 32 - 1))
    @settings(max_examples=50, deadline=None)
    def test_always_a_state(self, d, seed):
        rho = random_density(d, seed)
        assert min_eigenvalue(rho.matrix) >= -1e-12
        assert abs(np.trace(rho.matrix).real - 1) <= 1e-12


class TestPermutations:
    def test_permutation_matrix(self):
        p = permutation_matrix((2, 0, 1))
        # basis state j goes to row perm[j]
        np.testing.assert_array_equal(p @ np.array([1, 0, 0]), [0, 0, 1])
        np.testing.assert_array_equal(p @ np.array([0, 1, 0]), [1, 0, 0])

    def test_permute_state_moves_elements(self):
        rho = random_density(3, 3)
        out = permute_state(rho, (2, 0, 1)).matrix
        assert out[2, 0] == pytest.approx(rho.matrix[0, 1])
        assert out[0, 1] == pytest.approx(rho.matrix[1, 2])

    def test_not_a_bijection(self):
        with pytest.raises(Exception, match='bijection'):
            permutation_matrix((0, 0, 1))


class TestProjectPsd:
    def test_clips_negative_eigenvalue(self):
        m = np.array([[0.5, 0.6], [0.6, 0.5]])
        rho = project_psd(m)
        assert rho.validated
        assert min_eigenvalue(rho.matrix) >= -1e-12

    def test_keeps_valid_state(self):
        rho = random_density(3, 11)
        np.testing.assert_allclose(project_psd(rho.matrix).matrix, rho.matrix, atol=1e-12)
