'''
    Linear-inversion reconstruction of density-matrix elements from count records.
    The per-dimension formulas work on a leading batch axis so the parametric bootstrap
    reconstructs every resample in one pass.
'''
import logging
import warnings
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Tuple

import numpy as np

from src.measures import g_coherence, g_from_moduli
from src.qstate import DensityMatrix, QStateError, density_from_matrix, project_psd
from src.tomography.counts import CountRecord, check_counts
from src.tomography.projectors import ProjectorSet, projectors_for
from utils.hparams import hparam

logger = logging.getLogger(__name__)

SQRT3 = np.sqrt(3)


class DegenerateDataError(QStateError):
    pass


@dataclass
class TomographyResult:
    """off_diagonals / diagonals use 1-based indices, (i, j) with i < j."""
    d: int
    off_diagonals: Dict[Tuple[int, int], complex]
    diagonals: Optional[Dict[int, float]]
    g_value: float
    g_sigma3: float = 0.
    warnings: List[str] = field(default_factory=list)

    def density_matrix(self) -> DensityMatrix:
        """Unvalidated matrix; unknown diagonals (qubit bases) are filled with 1/d."""
        m = np.zeros((self.d, self.d), dtype=np.complex128)
        for (i, j), v in self.off_diagonals.items():
            m[i - 1, j - 1] = v
            m[j - 1, i - 1] = np.conj(v)
        for i in range(1, self.d + 1):
            m[i - 1, i - 1] = self.diagonals[i] if self.diagonals is not None else 1 / self.d
        return density_from_matrix(m, validate=False)

    @property
    def min_offdiag(self):
        return min(abs(v) for v in self.off_diagonals.values())


RECONSTRUCTORS = {}


def register_reconstructor(d):
    def decorator(fn):
        RECONSTRUCTORS[d] = fn
        return fn
    return decorator


def _normalized(c, projectors: ProjectorSet, group):
    """<P_i> = C_i / sum_{k in group} C_k for each id of one measurement setting."""
    idx = [projectors.index(pid) for pid in group]
    sub = c[..., idx]
    total = sub.sum(axis=-1)
    with np.errstate(invalid='ignore', divide='ignore'):
        probs = sub / total[..., None]
    return {pid: probs[..., k] for k, pid in enumerate(group)}, total > 0


@register_reconstructor(2)
def qubit_formulas(c, projectors: ProjectorSet):
    px, vx = _normalized(c, projectors, (1, 2))
    py, vy = _normalized(c, projectors, (3, 4))
    sx = px[1] - px[2]
    sy = py[3] - py[4]
    rho12 = (sx - 1j * sy) / 2
    return {
        'pairs': [(1, 2)],
        'offdiag': rho12[..., None],
        'diag': None,
        'g': g_from_moduli(np.abs(rho12)[..., None], 2),
        'valid': vx & vy,
    }


@register_reconstructor(3)
def qutrit_formulas(c, projectors: ProjectorSet):
    p_a, v_a = _normalized(c, projectors, (4, 5, 3))
    p_b, v_b = _normalized(c, projectors, (6, 7, 3))
    p_z, v_z = _normalized(c, projectors, (1, 2, 3))
    p_c, v_c = _normalized(c, projectors, (8, 9, 2))
    p_d, v_d = _normalized(c, projectors, (10, 11, 2))
    p_e, v_e = _normalized(c, projectors, (12, 13, 1))
    p_f, v_f = _normalized(c, projectors, (14, 15, 1))
    l1 = p_a[5] - p_a[4]
    l2 = p_b[7] - p_b[6]
    l3 = p_z[1] - p_z[2]
    l4 = p_c[9] - p_c[8]
    # |lambda_10> = (-i, 0, 1)/sqrt2 is the +1 eigenvector of Lambda_5
    l5 = p_d[10] - p_d[11]
    l6 = p_e[13] - p_e[12]
    l7 = p_f[15] - p_f[14]
    l8 = (p_z[1] + p_z[2] - 2 * p_z[3]) / SQRT3
    offdiag = np.stack([(l1 - 1j * l2) / 2, (l4 - 1j * l5) / 2, (l6 - 1j * l7) / 2], axis=-1)
    diag = np.stack([1 / 3 + l3 / 2 + l8 / (2 * SQRT3),
                     1 / 3 - l3 / 2 + l8 / (2 * SQRT3),
                     1 / 3 - l8 / SQRT3], axis=-1)
    g = g_from_moduli(np.abs(offdiag), 3)
    return {
        'pairs': [(1, 2), (1, 3), (2, 3)],
        'offdiag': offdiag,
        'diag': diag,
        'g': g,
        'valid': v_a & v_b & v_z & v_c & v_d & v_e & v_f,
    }


def _corrected(raw, background_rate):
    """Dark-count subtraction, clamped at zero."""
    return np.clip(raw - background_rate, 0., None)


def _near_zero_warnings(result: TomographyResult, shots_per_group):
    floor = 1 / np.sqrt(shots_per_group)
    factor = hparam('near_zero_factor', 10.)
    if result.min_offdiag < factor * floor:
        return [f'near-zero coherence: min |rho_ij| = {result.min_offdiag:.3e} < '
                f'{factor:g} x shot-noise floor {floor:.3e}; G is unreliable']
    return []


def reconstruct(counts: CountRecord, psd_project=None, resamples=0, seed=None) -> TomographyResult:
    """
        Reconstruct from a count record of any supported dimension.
        psd_project (default off) clips the estimate to the PSD cone before reading elements;
        resamples > 0 also fills g_sigma3 with the parametric-bootstrap 3 sigma.
    """
    if counts.d not in RECONSTRUCTORS:
        raise DegenerateDataError(f'No reconstruction formulas for d={counts.d}')
    if psd_project is None:
        psd_project = hparam('psd_project', False)
    projectors = projectors_for(counts.d)
    c = _corrected(counts.as_array(projectors), counts.background_rate)
    out = RECONSTRUCTORS[counts.d](c, projectors)
    if not out['valid']:
        raise DegenerateDataError('A measurement setting has zero total counts after dark-count subtraction')

    off = {pair: complex(v) for pair, v in zip(out['pairs'], out['offdiag'])}
    diag = None if out['diag'] is None else {i + 1: float(v) for i, v in enumerate(out['diag'])}
    result = TomographyResult(d=counts.d, off_diagonals=off, diagonals=diag, g_value=float(out['g']))

    if psd_project:
        projected = project_psd(result.density_matrix().matrix)
        result.off_diagonals = {(i, j): complex(projected.matrix[i - 1, j - 1]) for i, j in out['pairs']}
        if diag is not None:
            result.diagonals = {i + 1: float(projected.matrix[i, i].real) for i in range(counts.d)}
        result.g_value = g_coherence(projected).value

    result.warnings.extend(_near_zero_warnings(result, counts.shots_per_group))
    for w in result.warnings:
        warnings.warn(w, category=UserWarning)
    if resamples > 0:
        result.g_sigma3 = bootstrap_sigma(counts, projectors, resamples, seed)
    return result


def reconstruct_qubit(counts: CountRecord, **kwargs) -> TomographyResult:
    """rho_12 = (<sigma_x> - i <sigma_y>)/2, G = sqrt(<sigma_x>^2 + <sigma_y>^2)."""
    assert counts.d == 2, f'Expected a qubit count record, got d={counts.d}'
    return reconstruct(counts, **kwargs)


def reconstruct_qutrit(counts: CountRecord, **kwargs) -> TomographyResult:
    """Gell-Mann averages from per-setting normalised counts, then rho_ij and G."""
    assert counts.d == 3, f'Expected a qutrit count record, got d={counts.d}'
    return reconstruct(counts, **kwargs)


def bootstrap_sigma(counts: CountRecord, projectors: ProjectorSet = None, resamples=None, seed=None):
    """
        Parametric bootstrap: redraw every count as Poisson(observed count), reconstruct G for
        each resample, and return 3 x the sample standard deviation.
    """
    if projectors is None:
        projectors = projectors_for(counts.d)
    if resamples is None:
        resamples = hparam('bootstrap_resamples', 1000)
    if seed is None:
        seed = hparam('seed', 1234)
    if resamples < 100:
        raise ValueError(f'Bootstrap needs at least 100 resamples, got {resamples}')
    check_counts(counts, projectors)
    raw = counts.as_array(projectors)
    rng = np.random.default_rng(seed)
    draws = rng.poisson(raw, size=(resamples, raw.size)).astype(np.float64)
    out = RECONSTRUCTORS[counts.d](_corrected(draws, counts.background_rate), projectors)
    valid = out['valid']
    n_bad = int(resamples - valid.sum())
    if n_bad > 0:
        warnings.warn(f'{n_bad}/{resamples} bootstrap resamples had an empty measurement setting and were skipped',
                      category=UserWarning)
    g = out['g'][valid]
    if g.size < 2:
        raise DegenerateDataError('Fewer than two usable bootstrap resamples')
    sigma3 = 3 * float(np.std(g, ddof=1))
    logger.debug(f'| bootstrap d={counts.d}: {g.size}/{resamples} resamples, 3 sigma = {sigma3:.3e}')
    return sigma3
