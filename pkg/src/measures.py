'''
    Coherence quantifiers: G-coherence (d times the geometric mean of the off-diagonal
    moduli) and the l1-norm coherence, plus closed forms for the parametrized initial states.
'''
import warnings
from dataclasses import dataclass
from enum import Enum
from typing import Optional

import numpy as np

from src.qstate import DensityMatrix, check_dimension, density_from_pure, mcs
from utils import sin_deg


class MeasureKind(str, Enum):
    G = 'G'
    L1 = 'L1'


@dataclass(frozen=True)
class CoherenceValue:
    value: float
    measure_kind: MeasureKind
    min_offdiag: float = 0.
    near_zero: bool = False

    def __float__(self):
        return float(self.value)


def _offdiag_mask(d):
    return ~np.eye(d, dtype=bool)


def offdiag_moduli(rho: DensityMatrix):
    """d x d table of |rho_ij| (diagonal included, for the element panels)."""
    return np.abs(rho.matrix)


def g_coherence(rho: DensityMatrix, noise_floor=0.0) -> CoherenceValue:
    """
        G(rho) = d * prod_{i != j} |rho_ij| ** (1 / (d(d-1))).
        Works on unvalidated (e.g. reconstructed) matrices too; PSD is not required.
        near_zero is set when min |rho_ij| < 10 * noise_floor, where the cube-root style
        amplification makes a measured G unreliable.
    """
    d = rho.matrix.shape[0]
    check_dimension(d)
    moduli = np.abs(rho.matrix[_offdiag_mask(d)])
    min_offdiag = float(moduli.min())
    near_zero = bool(min_offdiag < 10 * noise_floor)
    if min_offdiag == 0:
        return CoherenceValue(0., MeasureKind.G, min_offdiag, near_zero)
    value = float(g_from_moduli(moduli, d))
    return CoherenceValue(value, MeasureKind.G, min_offdiag, near_zero)


def g_from_moduli(moduli, d):
    """
        G from off-diagonal moduli on the last axis, batched over leading axes.
        The upper triangle alone is enough since |rho_ij| = |rho_ji|.
    """
    moduli = np.asarray(moduli, dtype=np.float64)
    # log domain keeps precision for many small elements
    with np.errstate(divide='ignore'):
        logs = np.log(moduli)
    value = d * np.exp(np.mean(logs, axis=-1))
    return np.where(np.min(moduli, axis=-1) == 0, 0., value)


def l1_coherence(rho: DensityMatrix) -> CoherenceValue:
    d = rho.matrix.shape[0]
    moduli = np.abs(rho.matrix[_offdiag_mask(d)])
    return CoherenceValue(float(moduli.sum()), MeasureKind.L1, float(moduli.min()))


def warn_if_near_zero(value: CoherenceValue, context='') -> Optional[str]:
    """Emit a UserWarning for a near-zero G and return its message, or None."""
    if not value.near_zero:
        return None
    message = (f'near-zero coherence: min |rho_ij| = {value.min_offdiag:.3e}{context}; '
               f'G = {value.value:.4g} is at the noise floor and unreliable')
    warnings.warn(message, category=UserWarning)
    return message


def qubit_initial_g(theta1):
    return abs(sin_deg(4 * theta1))


def qutrit_initial_g(theta2):
    return abs(sin_deg(4 * theta2)) ** (2 / 3)


def mcs_density(d) -> DensityMatrix:
    return density_from_pure(mcs(d))
