'''
    Projective measurement settings for tomography.
    Qubit: {|D>,|A>} (sigma_x) and {|L>,|R>} (sigma_y).
    Qutrit: the 15 eigenvectors |lambda_1..15> of the Gell-Mann matrices, grouped into the
    7 complete orthonormal settings they are measured in.
'''
from dataclasses import dataclass
from typing import Dict, Tuple

import numpy as np

from src.qstate import DensityMatrix, DimensionMismatchError, PureState, pure_state_from_amplitudes

GROUP_TOL = 1e-12


@dataclass(frozen=True, eq=False)
class ProjectorSet:
    d: int
    projectors: Tuple[Tuple[int, PureState], ...]
    groups: Tuple[Tuple[int, ...], ...]
    labels: Tuple[str, ...] = ()

    def __post_init__(self):
        ids = self.ids
        assert len(set(ids)) == len(ids), f'Duplicate projector ids: {ids}'
        for _, psi in self.projectors:
            assert psi.d == self.d, f'Projector of dimension {psi.d} in a d={self.d} set'
            assert abs(np.linalg.norm(psi.amplitudes) - 1) <= GROUP_TOL, 'Projector vectors must be unit-norm'
        for group in self.groups:
            vecs = np.stack([self.vector(pid) for pid in group])
            assert len(group) == self.d, f'Group {group} is not a complete setting for d={self.d}'
            gram = vecs.conj() @ vecs.T
            assert np.max(np.abs(gram - np.eye(len(group)))) <= GROUP_TOL, f'Group {group} is not orthonormal'
            total = np.einsum('ni,nj->ij', vecs, vecs.conj())
            assert np.max(np.abs(total - np.eye(self.d))) <= GROUP_TOL, f'Group {group} does not sum to I'

    @property
    def ids(self):
        return tuple(pid for pid, _ in self.projectors)

    def index(self, pid):
        return self.ids.index(pid)

    def vector(self, pid):
        return self.projectors[self.index(pid)][1].amplitudes

    @property
    def vectors(self):
        return np.stack([psi.amplitudes for _, psi in self.projectors])


def qubit_projectors() -> ProjectorSet:
    s = 1 / np.sqrt(2)
    vectors = {
        1: [s, s],  # D
        2: [-s, s],  # A
        3: [s, 1j * s],  # L
        4: [s, -1j * s],  # R
    }
    return ProjectorSet(
        d=2,
        projectors=tuple((pid, pure_state_from_amplitudes(v)) for pid, v in vectors.items()),
        groups=((1, 2), (3, 4)),
        labels=('D', 'A', 'L', 'R'),
    )


def qutrit_projectors() -> ProjectorSet:
    s = 1 / np.sqrt(2)
    vectors = {
        1: [1, 0, 0],
        2: [0, 1, 0],
        3: [0, 0, 1],
        4: [-s, s, 0],
        5: [s, s, 0],
        6: [1j * s, s, 0],
        7: [-1j * s, s, 0],
        8: [-s, 0, s],
        9: [s, 0, s],
        10: [-1j * s, 0, s],
        11: [1j * s, 0, s],
        12: [0, -s, s],
        13: [0, s, s],
        14: [0, 1j * s, s],
        15: [0, -1j * s, s],
    }
    return ProjectorSet(
        d=3,
        projectors=tuple((pid, pure_state_from_amplitudes(v)) for pid, v in vectors.items()),
        groups=((4, 5, 3), (6, 7, 3), (1, 2, 3), (8, 9, 2), (10, 11, 2), (12, 13, 1), (14, 15, 1)),
        labels=tuple(f'lambda{pid}' for pid in vectors),
    )


PROJECTOR_SETS = {2: qubit_projectors, 3: qutrit_projectors}


def projectors_for(d) -> ProjectorSet:
    if d not in PROJECTOR_SETS:
        raise DimensionMismatchError(f'No tomography projector set for d={d}; supported: {sorted(PROJECTOR_SETS)}')
    return PROJECTOR_SETS[d]()


def ideal_probabilities(rho: DensityMatrix, projectors: ProjectorSet) -> Dict[int, float]:
    """<P_i> = Tr(rho |lambda_i><lambda_i|) for every projector id."""
    if rho.d != projectors.d:
        raise DimensionMismatchError(f'State d={rho.d} vs projector set d={projectors.d}')
    vecs = projectors.vectors
    probs = np.einsum('ni,ij,nj->n', vecs.conj(), rho.matrix, vecs).real
    probs = np.clip(probs, 0., 1.)
    return {pid: float(p) for pid, p in zip(projectors.ids, probs)}
