'''
    Kraus-operator channels.
    1. *make_channel* / *apply*:
        construction with completeness check, and the Kraus sum rho -> sum_n K_n rho K_n^dagger;
    2. *classify*:
        GIO (all K_n diagonal), PERMUTED_GIO (K_n = P D_n with one common permutation P), OTHER;
    3. *transfer_matrix* / *apply_hadamard*:
        M = Phi(J_d) and the element-wise fast path Phi(rho) = rho o M, valid for GIO;
    4. builtin channels, registered in CHANNELS by name for the CLI and experiment configs.
'''
import logging
from dataclasses import dataclass, field
from enum import Enum
from typing import Optional, Sequence, Tuple

import numpy as np

from src.measures import g_coherence, mcs_density
from src.qstate import (TRACE_TOL, QStateError, DensityMatrix, DimensionMismatchError, as_complex_matrix,
                        check_dimension, check_permutation, permutation_matrix, validate_density)
from utils import cos_deg, sin_deg
from utils.hparams import hparam

logger = logging.getLogger(__name__)

COMPLETENESS_TOL = 1e-9
DIAG_TOL = 1e-12


class InvalidChannelError(QStateError):
    pass


class ChannelDomainError(QStateError):
    pass


class ChannelKind(str, Enum):
    GIO = 'GIO'
    PERMUTED_GIO = 'PERMUTED_GIO'
    OTHER = 'OTHER'


@dataclass(frozen=True)
class ChannelClass:
    kind: ChannelKind
    permutation: Optional[Tuple[int, ...]] = None

    def __post_init__(self):
        assert (self.permutation is not None) == (self.kind == ChannelKind.PERMUTED_GIO), \
            'A permutation is present iff the class is PERMUTED_GIO'


@dataclass(frozen=True, eq=False)
class KrausChannel:
    operators: np.ndarray  # [n, d, d]
    label: str = field(default='')

    def __post_init__(self):
        ops = np.array(self.operators, dtype=np.complex128, copy=True)
        ops.flags.writeable = False
        object.__setattr__(self, 'operators', ops)

    @property
    def d(self):
        return self.operators.shape[1]

    @property
    def num_kraus(self):
        return self.operators.shape[0]

    def __repr__(self):
        return f'KrausChannel(d={self.d}, num_kraus={self.num_kraus}, label={self.label!r})'


@dataclass(frozen=True, eq=False)
class TransferMatrix:
    entries: np.ndarray

    def __post_init__(self):
        arr = np.array(self.entries, dtype=np.complex128, copy=True)
        arr.flags.writeable = False
        object.__setattr__(self, 'entries', arr)

    @property
    def d(self):
        return self.entries.shape[0]


def completeness_residual(operators):
    ops = np.asarray(operators)
    total = np.einsum('nki,nkj->ij', ops.conj(), ops)
    return float(np.max(np.abs(total - np.eye(ops.shape[1]))))


def make_channel(operators: Sequence, label='') -> KrausChannel:
    if len(operators) == 0:
        raise InvalidChannelError('A channel needs at least one Kraus operator')
    ops = [as_complex_matrix(k) for k in operators]
    d = ops[0].shape[0]
    for k in ops:
        if k.shape != (d, d):
            raise InvalidChannelError(f'Kraus operators must all be {d}x{d}, got {k.shape}')
    check_dimension(d)
    ops = np.stack(ops)
    residual = completeness_residual(ops)
    tol = hparam('completeness_tolerance', COMPLETENESS_TOL)
    if residual > tol:
        raise InvalidChannelError(f'Completeness violated: max|sum K^dagger K - I| = {residual:.3e} > {tol:.0e}')
    return KrausChannel(ops, label)


def _is_diagonal(k, tol):
    off = k - np.diag(np.diag(k))
    return bool(np.max(np.abs(off)) <= tol)


def _row_placement(operators, tol, max_exhaustive_dim):
    """
        Find perm with K_n[perm[j], j] the only nonzero of column j, for every n.
        Columns that are zero in every K_n take the unused rows in order.
    """
    d = operators.shape[1]
    nonzero = np.any(np.abs(operators) > tol, axis=0)  # [d, d] union pattern
    perm = [None] * d
    for j in range(d):
        rows = np.flatnonzero(nonzero[:, j])
        if len(rows) > 1:
            return None
        if len(rows) == 1:
            perm[j] = int(rows[0])
    used = [p for p in perm if p is not None]
    if len(used) != len(set(used)):
        return None
    free_cols = [j for j in range(d) if perm[j] is None]
    if len(free_cols) == 0:
        return tuple(perm)
    if d > max_exhaustive_dim:
        logger.info(f'| classify: {len(free_cols)} all-zero columns at d={d} > {max_exhaustive_dim}, reporting OTHER')
        return None
    free_rows = [i for i in range(d) if i not in used]
    # those columns vanish in every K_n, so any placement of them is valid
    for j, i in zip(free_cols, free_rows):
        perm[j] = i
    return tuple(perm)


def classify(channel: KrausChannel) -> ChannelClass:
    tol = hparam('diag_tolerance', DIAG_TOL)
    ops = channel.operators
    if all(_is_diagonal(k, tol) for k in ops):
        return ChannelClass(ChannelKind.GIO)
    perm = _row_placement(ops, tol, hparam('max_exhaustive_dim', 8))
    if perm is None:
        return ChannelClass(ChannelKind.OTHER)
    p = permutation_matrix(perm)
    if all(_is_diagonal(p.T @ k, tol) for k in ops):
        if perm == tuple(range(channel.d)):
            return ChannelClass(ChannelKind.GIO)
        return ChannelClass(ChannelKind.PERMUTED_GIO, perm)
    return ChannelClass(ChannelKind.OTHER)


def apply(channel: KrausChannel, rho: DensityMatrix) -> DensityMatrix:
    """Phi(rho) = sum_n K_n rho K_n^dagger. Unvalidated inputs give unvalidated outputs."""
    if rho.d != channel.d:
        raise DimensionMismatchError(f'Channel d={channel.d} applied to state d={rho.d}')
    ops = channel.operators
    out = np.einsum('nij,jk,nlk->il', ops, rho.matrix, ops.conj())
    if rho.validated:
        # |tr Phi(rho) - 1| <= d * max|sum K^dagger K - I| for a unit-trace rho
        validate_density(out, trace_tol=TRACE_TOL + channel.d * completeness_residual(ops))
    return DensityMatrix(out, validated=rho.validated)


def transfer_matrix(channel: KrausChannel) -> TransferMatrix:
    """
        M = Phi(J_d), J_d the all-ones matrix. For a GIO this is M_ij = sum_n K_{n,i} K*_{n,j};
        for any other channel it is the Kraus sum on J_d.
    """
    ops = channel.operators
    j_d = np.ones((channel.d, channel.d), dtype=np.complex128)
    m = np.einsum('nij,jk,nlk->il', ops, j_d, ops.conj())
    return TransferMatrix(m)


def transfer_from_mcs(channel: KrausChannel) -> TransferMatrix:
    """d * Phi(|psi+><psi+|), the same matrix reached through the MCS."""
    return TransferMatrix(channel.d * apply(channel, mcs_density(channel.d)).matrix)


def apply_hadamard(transfer: TransferMatrix, rho: DensityMatrix) -> DensityMatrix:
    """Phi(rho) = rho o Phi(J_d). The caller guarantees the transfer matrix comes from a GIO."""
    if transfer.d != rho.d:
        raise DimensionMismatchError(f'Transfer matrix d={transfer.d} applied to state d={rho.d}')
    return DensityMatrix(rho.matrix * transfer.entries, validated=False)


def channel_g(channel: KrausChannel):
    """The operation factor G[Phi(MCS)]."""
    return g_coherence(apply(channel, mcs_density(channel.d))).value


def permute_channel(channel: KrausChannel, permutation) -> KrausChannel:
    """K_n -> P K_n with one common permutation P (basis j moved to row permutation[j])."""
    perm = check_permutation(permutation, channel.d)
    p = permutation_matrix(perm)
    return make_channel([p @ k for k in channel.operators], label=f'{channel.label}|perm{list(perm)}')


def compose_permutations(channel: KrausChannel, permutations) -> KrausChannel:
    """K_n -> P_n K_n with a separate permutation per operator."""
    if len(permutations) != channel.num_kraus:
        raise InvalidChannelError(f'Need {channel.num_kraus} permutations, got {len(permutations)}')
    ops = [permutation_matrix(check_permutation(perm, channel.d)) @ k
           for perm, k in zip(permutations, channel.operators)]
    return make_channel(ops, label=f'{channel.label}|perms')


def cyclic_permutation(d):
    """perm[j] = (j - 1) mod d: K_{n,1} lands in the last row, K_{n,j+1} in row j."""
    d = check_dimension(d)
    return tuple((j - 1) % d for j in range(d))


def random_gio(d, num_kraus, seed) -> KrausChannel:
    """
        Per column i, a seeded complex Gaussian vector (K_{1,i}, ..., K_{m,i}) normalised to
        unit length, so sum_n |K_{n,i}|^2 = 1 holds column by column.
    """
    d = check_dimension(d)
    assert num_kraus >= 1, f'num_kraus must be >= 1, got {num_kraus}'
    rng = np.random.default_rng(seed)
    cols = rng.standard_normal((num_kraus, d)) + 1j * rng.standard_normal((num_kraus, d))
    cols = cols / np.linalg.norm(cols, axis=0, keepdims=True)
    ops = np.zeros((num_kraus, d, d), dtype=np.complex128)
    idx = np.arange(d)
    ops[:, idx, idx] = cols
    return make_channel(ops, label=f'random_gio(d={d},m={num_kraus},seed={seed})')


CHANNELS = {}


def register_channel(name):
    def decorator(fn):
        CHANNELS[name] = fn
        return fn
    return decorator


def get_builtin_channel(name, param=None) -> KrausChannel:
    if name not in CHANNELS:
        raise InvalidChannelError(f'Unknown builtin channel {name!r}; available: {sorted(CHANNELS)}')
    return CHANNELS[name](param)


def _require_angle(name, theta):
    if theta is None:
        raise ChannelDomainError(f'Builtin channel {name!r} needs an angle in degrees (--param)')


@register_channel('identity')
def identity_channel(d=None) -> KrausChannel:
    d = check_dimension(2 if d is None else int(d))
    return make_channel([np.eye(d)], label=f'identity(d={d})')


@register_channel('qubit-paper')
def qubit_paper_channel(theta2) -> KrausChannel:
    _require_angle('qubit-paper', theta2)
    # K1 = diag(sin2θ2, cos2θ2), K2 = diag(cos2θ2, i sin2θ2)
    s, c = sin_deg(2 * theta2), cos_deg(2 * theta2)
    return make_channel([np.diag([s, c]), np.diag([c, 1j * s])], label=f'qubit-paper(theta2={theta2})')


@register_channel('qutrit-pd')
def qutrit_phase_damping(theta3) -> KrausChannel:
    _require_angle('qutrit-pd', theta3)
    # K1 = diag(cos2θ3, cos2θ3, 1), K2 = diag(sin2θ3, sin2θ3, 0)
    s, c = sin_deg(2 * theta3), cos_deg(2 * theta3)
    return make_channel([np.diag([c, c, 1.]), np.diag([s, s, 0.])], label=f'qutrit-pd(theta3={theta3})')


@register_channel('amp-decay')
def amplitude_decay(epsilon) -> KrausChannel:
    if epsilon is None or not 0 < epsilon < 1:
        raise ChannelDomainError(f'Amplitude decay needs 0 < epsilon < 1, got {epsilon}')
    k1 = np.array([[1., 0.], [0., np.sqrt(1 - epsilon)]])
    k2 = np.array([[0., np.sqrt(epsilon)], [0., 0.]])
    return make_channel([k1, k2], label=f'amp-decay(epsilon={epsilon})')
