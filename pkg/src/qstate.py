'''
    Quantum-state core: pure states, density matrices and the checks every constructor runs.

    A ComplexMatrix is a 2-D numpy complex128 array. States are frozen dataclasses whose
    arrays are marked read-only, so they can be shared between threads and worker processes.
'''
from dataclasses import dataclass, field
from typing import Sequence, Tuple

import numpy as np
import scipy.linalg

from utils import cos_deg, sin_deg

NORM_TOL = 1e-12
MIN_NORM = 1e-9
HERMITIAN_TOL = 1e-12
TRACE_TOL = 1e-12
PSD_TOL = 1e-9


class QStateError(Exception):
    pass


class InvalidStateError(QStateError):
    pass


class InvalidDimensionError(QStateError):
    pass


class InvalidMixtureError(QStateError):
    pass


class DimensionMismatchError(QStateError):
    pass


def _frozen(arr):
    arr = np.array(arr, dtype=np.complex128, copy=True)
    arr.flags.writeable = False
    return arr


def as_complex_matrix(entries):
    """Validate and return a 2-D complex128 array built from a nested sequence or array."""
    arr = np.asarray(entries, dtype=np.complex128)
    if arr.ndim != 2 or arr.shape[0] < 1 or arr.shape[1] < 1:
        raise InvalidStateError(f'Expected a non-empty 2-D matrix, got shape {arr.shape}')
    if not np.all(np.isfinite(arr)):
        raise InvalidStateError('Matrix contains NaN or Inf entries')
    return arr


def check_dimension(d):
    if int(d) != d or d < 2:
        raise InvalidDimensionError(f'Dimension must be an integer >= 2, got {d}')
    return int(d)


def hermiticity_residual(matrix):
    return float(np.max(np.abs(matrix - matrix.conj().T)))


def min_eigenvalue(matrix):
    herm = (matrix + matrix.conj().T) / 2
    return float(scipy.linalg.eigvalsh(herm)[0])


@dataclass(frozen=True, eq=False)
class PureState:
    amplitudes: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, 'amplitudes', _frozen(self.amplitudes))

    @property
    def d(self):
        return self.amplitudes.shape[0]

    def __repr__(self):
        return f'PureState(d={self.d}, amplitudes={np.round(self.amplitudes, 6).tolist()})'


@dataclass(frozen=True, eq=False)
class DensityMatrix:
    """
        d x d density matrix.
        validated=False marks an unchecked carrier (e.g. a linear-inversion tomography
        estimate) that may be slightly non-Hermitian, non-PSD or off unit trace.
    """
    matrix: np.ndarray
    validated: bool = field(default=True)

    def __post_init__(self):
        object.__setattr__(self, 'matrix', _frozen(self.matrix))

    @property
    def d(self):
        return self.matrix.shape[0]

    def offdiag(self, i, j):
        return complex(self.matrix[i, j])

    def eigenvalues(self):
        return scipy.linalg.eigvalsh((self.matrix + self.matrix.conj().T) / 2)

    def __repr__(self):
        return f'DensityMatrix(d={self.d}, validated={self.validated})'


def validate_density(matrix, psd_tol=PSD_TOL, trace_tol=TRACE_TOL):
    """Raise InvalidStateError unless matrix is Hermitian, unit-trace and PSD."""
    if matrix.ndim != 2 or matrix.shape[0] != matrix.shape[1]:
        raise InvalidStateError(f'Density matrix must be square, got shape {matrix.shape}')
    check_dimension(matrix.shape[0])
    herm = hermiticity_residual(matrix)
    if herm > HERMITIAN_TOL:
        raise InvalidStateError(f'Density matrix is not Hermitian (residual {herm:.3e})')
    trace = complex(np.trace(matrix))
    if abs(trace - 1) > trace_tol:
        raise InvalidStateError(f'Density matrix trace is {trace.real:.15g}, expected 1')
    lam_min = min_eigenvalue(matrix)
    if lam_min < -psd_tol:
        raise InvalidStateError(f'Density matrix is not PSD (smallest eigenvalue {lam_min:.3e})')


def density_from_matrix(matrix, validate=True) -> DensityMatrix:
    matrix = as_complex_matrix(matrix)
    if validate:
        validate_density(matrix)
    elif matrix.shape[0] != matrix.shape[1]:
        raise InvalidStateError(f'Density matrix must be square, got shape {matrix.shape}')
    return DensityMatrix(matrix, validated=validate)


def pure_state_from_amplitudes(amplitudes: Sequence[complex]) -> PureState:
    amplitudes = np.asarray(amplitudes, dtype=np.complex128).reshape(-1)
    if amplitudes.size == 0:
        raise InvalidStateError('Amplitude vector is empty')
    check_dimension(amplitudes.size)
    if not np.all(np.isfinite(amplitudes)):
        raise InvalidStateError('Amplitude vector contains NaN or Inf')
    norm = float(np.linalg.norm(amplitudes))
    if norm <= MIN_NORM:
        raise InvalidStateError(f'Amplitude vector has (near-)zero norm {norm:.3e}')
    if abs(norm - 1) > NORM_TOL:
        amplitudes = amplitudes / norm
    return PureState(amplitudes)


def mcs(d) -> PureState:
    """Maximally coherent state: all amplitudes 1/sqrt(d)."""
    d = check_dimension(d)
    return PureState(np.full(d, 1 / np.sqrt(d), dtype=np.complex128))


def qubit_initial_state(theta1) -> PureState:
    # sin2θ1|1> + cos2θ1|2>, MCS at θ1 = 22.5°
    return pure_state_from_amplitudes([sin_deg(2 * theta1), cos_deg(2 * theta1)])


def qutrit_initial_state(theta2) -> PureState:
    # √(1/3)|1> + √(2/3)cos2θ2|2> + √(2/3)sin2θ2|3>, MCS at θ2 = 22.5°
    c = np.sqrt(2 / 3)
    return pure_state_from_amplitudes([np.sqrt(1 / 3), c * cos_deg(2 * theta2), c * sin_deg(2 * theta2)])


def density_from_pure(psi: PureState) -> DensityMatrix:
    a = psi.amplitudes
    rho = np.outer(a, a.conj())
    validate_density(rho)
    return DensityMatrix(rho)


def diagonal_state(populations: Sequence[float]) -> DensityMatrix:
    populations = np.asarray(populations, dtype=np.float64)
    return density_from_matrix(np.diag(populations))


def mix(states: Sequence[Tuple[float, DensityMatrix]]) -> DensityMatrix:
    """Convex combination sum_k w_k rho_k."""
    if len(states) == 0:
        raise InvalidMixtureError('Mixture needs at least one component')
    weights = np.array([w for w, _ in states], dtype=np.float64)
    if np.any(weights < 0):
        raise InvalidMixtureError(f'Mixture weights must be nonnegative, got {weights.tolist()}')
    if abs(weights.sum() - 1) > 1e-12:
        raise InvalidMixtureError(f'Mixture weights sum to {weights.sum():.15g}, expected 1')
    d = states[0][1].d
    for _, rho in states:
        if rho.d != d:
            raise DimensionMismatchError(f'Cannot mix d={rho.d} with d={d}')
    out = np.zeros((d, d), dtype=np.complex128)
    for w, rho in states:
        out = out + w * rho.matrix
    validate_density(out)
    return DensityMatrix(out)


def random_pure_state(d, rng: np.random.Generator) -> PureState:
    d = check_dimension(d)
    v = rng.standard_normal(d) + 1j * rng.standard_normal(d)
    return pure_state_from_amplitudes(v)


def random_density(d, seed) -> DensityMatrix:
    """rho = A A^dagger / tr(A A^dagger), A a seeded d x d complex Gaussian (Ginibre) matrix."""
    d = check_dimension(d)
    rng = np.random.default_rng(seed)
    a = (rng.standard_normal((d, d)) + 1j * rng.standard_normal((d, d))) / np.sqrt(2)
    rho = a @ a.conj().T
    rho = (rho + rho.conj().T) / 2
    rho = rho / np.trace(rho).real
    validate_density(rho)
    return DensityMatrix(rho)


def is_incoherent(rho: DensityMatrix, atol=1e-12):
    off = rho.matrix - np.diag(np.diag(rho.matrix))
    return bool(np.max(np.abs(off)) <= atol)


def check_permutation(permutation, d):
    perm = tuple(int(p) for p in permutation)
    if len(perm) != d or sorted(perm) != list(range(d)):
        raise QStateError(f'Not a bijection on {{0..{d - 1}}}: {list(permutation)}')
    return perm


def permutation_matrix(permutation):
    """P = sum_j |perm[j]><j|: basis state j is moved to position perm[j] (0-based)."""
    d = len(permutation)
    perm = check_permutation(permutation, d)
    p = np.zeros((d, d), dtype=np.complex128)
    p[list(perm), list(range(d))] = 1
    return p


def permute_state(rho: DensityMatrix, permutation) -> DensityMatrix:
    p = permutation_matrix(permutation)
    if p.shape[0] != rho.d:
        raise DimensionMismatchError(f'Permutation of size {p.shape[0]} applied to d={rho.d}')
    return DensityMatrix(p @ rho.matrix @ p.conj().T, validated=rho.validated)


def project_psd(matrix) -> DensityMatrix:
    """Nearest PSD unit-trace matrix by clipping negative eigenvalues (opt-in for tomography)."""
    matrix = as_complex_matrix(matrix)
    herm = (matrix + matrix.conj().T) / 2
    w, v = scipy.linalg.eigh(herm)
    w = np.clip(w, 0, None)
    if w.sum() <= 0:
        raise InvalidStateError('Matrix has no positive spectrum to project onto')
    rho = (v * (w / w.sum())) @ v.conj().T
    rho = (rho + rho.conj().T) / 2
    validate_density(rho)
    return DensityMatrix(rho)
