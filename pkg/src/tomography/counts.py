'''
    Photon-count records: seeded Poisson simulation, noiseless counts and the
    weighted-average protocol that turns two pure-state records into a mixed-state one.
'''
from dataclasses import dataclass, field
from typing import Dict, Optional

import numpy as np

from src.qstate import DensityMatrix, InvalidMixtureError, QStateError
from src.tomography.projectors import ProjectorSet, ideal_probabilities
from utils.hparams import hparam


class CountMismatchError(QStateError):
    pass


@dataclass(frozen=True, eq=False)
class CountRecord:
    """
        counts maps projector id -> count. Simulated counts are integers; the noiseless
        path (exact_counts) stores float counts so linear inversion stays exact.
    """
    d: int
    shots_per_group: int
    counts: Dict[int, float]
    seed: Optional[int] = None
    background_rate: float = field(default=0.)

    def __post_init__(self):
        assert self.shots_per_group >= 1, f'shots_per_group must be >= 1, got {self.shots_per_group}'
        assert self.background_rate >= 0, f'background_rate must be >= 0, got {self.background_rate}'
        counts = {int(k): v for k, v in self.counts.items()}
        assert all(v >= 0 for v in counts.values()), 'Counts must be nonnegative'
        object.__setattr__(self, 'counts', counts)

    def as_array(self, projectors: ProjectorSet):
        check_counts(self, projectors)
        return np.array([self.counts[pid] for pid in projectors.ids], dtype=np.float64)


def check_counts(record: CountRecord, projectors: ProjectorSet):
    if record.d != projectors.d:
        raise CountMismatchError(f'Count record d={record.d} vs projector set d={projectors.d}')
    missing = [pid for pid in projectors.ids if pid not in record.counts]
    if missing:
        raise CountMismatchError(f'Count record is missing projector ids {missing}')


def simulate_counts(rho: DensityMatrix, projectors: ProjectorSet, shots_per_group=None,
                    background_rate=None, seed=None) -> CountRecord:
    """C_i ~ Poisson(shots_per_group * <P_i> + background_rate), drawn in projector-id order."""
    if shots_per_group is None:
        shots_per_group = hparam('shots_per_group', 100000)
    if background_rate is None:
        background_rate = hparam('background_rate', 0.)
    if seed is None:
        seed = hparam('seed', 1234)
    assert shots_per_group >= 1, f'shots_per_group must be >= 1, got {shots_per_group}'
    probs = ideal_probabilities(rho, projectors)
    rng = np.random.default_rng(seed)
    lam = np.array([shots_per_group * probs[pid] + background_rate for pid in projectors.ids])
    draws = rng.poisson(lam)
    return CountRecord(
        d=projectors.d,
        shots_per_group=int(shots_per_group),
        counts={pid: int(c) for pid, c in zip(projectors.ids, draws)},
        seed=seed,
        background_rate=float(background_rate),
    )


def exact_counts(rho: DensityMatrix, projectors: ProjectorSet, shots_per_group=1_000_000) -> CountRecord:
    """Noiseless counts shots_per_group * <P_i> (floats, no rounding)."""
    probs = ideal_probabilities(rho, projectors)
    return CountRecord(
        d=projectors.d,
        shots_per_group=int(shots_per_group),
        counts={pid: shots_per_group * probs[pid] for pid in projectors.ids},
    )


def mixed_counts(counts_a: CountRecord, counts_b: CountRecord, p) -> CountRecord:
    """count_i = round_half_up((1 - p) a_i + p b_i): the weighted-count mixed-state protocol."""
    if not 0 <= p <= 1:
        raise InvalidMixtureError(f'Mixing weight must lie in [0, 1], got {p}')
    if set(counts_a.counts) != set(counts_b.counts):
        raise CountMismatchError(f'Projector ids differ: {sorted(counts_a.counts)} vs {sorted(counts_b.counts)}')
    if counts_a.shots_per_group != counts_b.shots_per_group or counts_a.d != counts_b.d:
        raise CountMismatchError('Count records must share d and shots_per_group')
    counts = {pid: int(np.floor((1 - p) * counts_a.counts[pid] + p * counts_b.counts[pid] + 0.5))
              for pid in counts_a.counts}
    return CountRecord(
        d=counts_a.d,
        shots_per_group=counts_a.shots_per_group,
        counts=counts,
        seed=counts_a.seed,
        background_rate=(1 - p) * counts_a.background_rate + p * counts_b.background_rate,
    )
