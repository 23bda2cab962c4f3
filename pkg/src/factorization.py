'''
    Checks of the coherence factorization law against the brute-force Kraus sum:
        element-wise:  Phi(rho)_ij = rho_ij * Phi(J_d)_ij
        G-law:         G[Phi(rho)] = G(rho) * G[Phi(MCS)]
    and the seeded randomized sweep over the GIO class.
'''
import logging
from dataclasses import asdict, dataclass, field
from typing import List

import numpy as np
from tqdm import tqdm

from src.channels import KrausChannel, apply, channel_g, random_gio, transfer_matrix, transfer_from_mcs
from src.measures import g_coherence
from src.qstate import (DensityMatrix, DimensionMismatchError, check_dimension, density_from_pure, mix,
                        random_pure_state)
from utils import ResidualMeter, derive_seed
from utils.hparams import hparam
from utils.multiprocess_utils import multiprocess_map

logger = logging.getLogger(__name__)

DEFAULT_TOLERANCE = 1e-10


@dataclass(frozen=True)
class LawReport:
    element_law_max_residual: float
    g_law_residual: float
    g_lhs: float
    g_rhs_product: float
    holds_elementwise: bool
    holds_g: bool
    tolerance: float
    transfer_mcs_residual: float = 0.


def _law_report(channel: KrausChannel, rho: DensityMatrix, tolerance) -> LawReport:
    if tolerance is None:
        tolerance = hparam('tolerance', DEFAULT_TOLERANCE)
    if channel.d != rho.d:
        raise DimensionMismatchError(f'Channel d={channel.d} vs state d={rho.d}')
    out = apply(channel, rho)
    transfer = transfer_matrix(channel)
    element_residual = float(np.max(np.abs(out.matrix - rho.matrix * transfer.entries)))
    mcs_residual = float(np.max(np.abs(transfer.entries - transfer_from_mcs(channel).entries)))

    g_lhs = g_coherence(out).value
    g_rhs = g_coherence(rho).value * channel_g(channel)
    g_residual = abs(g_lhs - g_rhs)
    if g_lhs == 0 or g_rhs == 0:
        # an exact zero on either side is compared as a zero, not through the residual
        holds_g = g_lhs == 0 and g_rhs == 0
    else:
        holds_g = g_residual <= tolerance
    return LawReport(
        element_law_max_residual=element_residual,
        g_law_residual=g_residual,
        g_lhs=g_lhs,
        g_rhs_product=g_rhs,
        holds_elementwise=element_residual <= tolerance,
        holds_g=bool(holds_g),
        tolerance=tolerance,
        transfer_mcs_residual=mcs_residual,
    )


def check_elementwise(channel: KrausChannel, rho: DensityMatrix, tolerance=None) -> LawReport:
    """Compare the Kraus sum with rho o Phi(J_d) on all d^2 elements; the G fields are filled too."""
    return _law_report(channel, rho, tolerance)


def check_g_law(channel: KrausChannel, rho: DensityMatrix, tolerance=None) -> LawReport:
    """G[Phi(rho)] (brute force) against G(rho) * G[Phi(MCS)]."""
    return _law_report(channel, rho, tolerance)


def stick_breaking_weights(rng: np.random.Generator, k):
    """Uniform weights on the (k-1)-simplex from k-1 seeded uniforms (Beta(1, k-i) sticks)."""
    u = rng.uniform(size=k - 1)
    weights = np.empty(k)
    remaining = 1.
    for i in range(k - 1):
        v = 1 - u[i] ** (1 / (k - 1 - i))
        weights[i] = remaining * v
        remaining -= weights[i]
    weights[-1] = remaining
    return weights


def random_test_state(d, rng: np.random.Generator, mixed: bool) -> DensityMatrix:
    if not mixed:
        return density_from_pure(random_pure_state(d, rng))
    k = int(rng.integers(2, 5))
    weights = stick_breaking_weights(rng, k)
    return mix([(float(w), density_from_pure(random_pure_state(d, rng))) for w in weights])


def sweep_trial(d, sub_seed, mixed, tolerance):
    rng = np.random.default_rng([sub_seed, 1])
    num_kraus = int(rng.integers(1, 5))
    channel = random_gio(d, num_kraus, sub_seed)
    rho = random_test_state(d, rng, mixed)
    report = _law_report(channel, rho, tolerance)
    return {
        'sub_seed': sub_seed,
        'element': report.element_law_max_residual,
        'g': report.g_law_residual,
        'holds_elementwise': report.holds_elementwise,
        'holds_g': report.holds_g,
        'g_margin': g_coherence(rho).value - report.g_lhs,
    }


@dataclass
class SweepSummary:
    d: int
    trials: int
    seed: int
    tolerance: float
    passes_elementwise: int = 0
    passes_g: int = 0
    max_residual_elementwise: float = 0.
    max_residual_g: float = 0.
    min_g_margin: float = float('inf')
    failing_seeds: List[int] = field(default_factory=list)

    @property
    def all_passed(self):
        return self.passes_elementwise == self.trials and self.passes_g == self.trials

    def to_dict(self):
        return asdict(self)


def property_sweep(d, trials, seed, tolerance=None, num_workers=None) -> SweepSummary:
    """
        Draw `trials` (random GIO with 1-4 Kraus operators, random state) pairs, alternating pure
        and mixed states, and run both checks. Trial t uses sub-seed seed + t, so the summary
        does not depend on the execution order or the number of workers.
    """
    d = check_dimension(d)
    assert trials >= 1, f'trials must be >= 1, got {trials}'
    if tolerance is None:
        tolerance = hparam('tolerance', DEFAULT_TOLERANCE)
    if num_workers is None:
        num_workers = hparam('num_workers', 1)
    args = [(d, derive_seed(seed, t), t % 2 == 1, tolerance) for t in range(trials)]
    results = multiprocess_map(sweep_trial, args, num_workers=num_workers)

    summary = SweepSummary(d=d, trials=trials, seed=seed, tolerance=tolerance)
    element_meter, g_meter = ResidualMeter(tolerance), ResidualMeter(tolerance)
    progress = tqdm(results, total=trials, desc=f'sweep d={d}',
                    disable=hparam('disable_progress', False) or trials < 100)
    for res in progress:
        element_meter.update(res['element'])
        g_meter.update(res['g'])
        summary.passes_elementwise += int(res['holds_elementwise'])
        summary.passes_g += int(res['holds_g'])
        summary.min_g_margin = min(summary.min_g_margin, res['g_margin'])
        if not (res['holds_elementwise'] and res['holds_g']):
            summary.failing_seeds.append(res['sub_seed'])
    summary.max_residual_elementwise = element_meter.max
    summary.max_residual_g = g_meter.max
    logger.info(f'| sweep d={d}: elementwise {summary.passes_elementwise}/{trials}, '
                f'G-law {summary.passes_g}/{trials}, max residuals '
                f'{summary.max_residual_elementwise:.3e} / {summary.max_residual_g:.3e}')
    return summary
