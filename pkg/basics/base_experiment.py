import logging
import os
from dataclasses import dataclass, field
from enum import Enum
from typing import Dict, List, Optional

import numpy as np
from tqdm import tqdm

from src.measures import g_coherence, warn_if_near_zero
from src.tomography import CountRecord, projectors_for, reconstruct, simulate_counts
from utils import angle_grid, format_sig, setup_logging, stream_seeds
from utils.hparams import hparam, hparams, set_hparams
from utils.io_utils import ensure_dir, write_table
from utils.multiprocess_utils import multiprocess_map

logger = logging.getLogger(__name__)

ROW_COLUMNS = ['g_direct', 'g_product', 'g_theory', 'sigma3_direct', 'sigma3_product', 'warning']
SWEEP_STREAM, PANEL_STREAM, BOOTSTRAP_STREAM = 0, 1, 2


class Mode(str, Enum):
    EXACT = 'exact'
    SHOT_NOISE = 'shot_noise'

    @classmethod
    def parse(cls, value):
        if isinstance(value, cls):
            return value
        value = str(value).lower()
        if value in ('shots', 'shot-noise'):
            return cls.SHOT_NOISE
        return cls(value)


class ExperimentKind(str, Enum):
    QUBIT_FIG3 = 'fig3'
    QUTRIT_FIG4 = 'fig4'
    MIXED_FIG5 = 'fig5'
    CUSTOM = 'custom'


@dataclass
class SweepConfig:
    """
        grids maps a parameter name to its values (degrees for angles); a grid may be given
        as a list or as {start, stop, step}. options carries experiment-specific scalars.
    """
    experiment: ExperimentKind
    grids: Dict[str, List[float]] = field(default_factory=dict)
    shots_per_group: int = 100000
    seed: int = 1234
    mode: Mode = Mode.EXACT
    bootstrap_resamples: int = 1000
    background_rate: float = 0.
    num_workers: int = 1
    options: Dict = field(default_factory=dict)

    def __post_init__(self):
        self.experiment = ExperimentKind(self.experiment)
        self.mode = Mode.parse(self.mode)
        self.grids = {k: [float(x) for x in angle_grid(v)] for k, v in self.grids.items()}
        if self.mode == Mode.SHOT_NOISE and self.shots_per_group < 1:
            raise ValueError(f'shots_per_group must be >= 1 in shot-noise mode, got {self.shots_per_group}')
        if self.background_rate < 0:
            raise ValueError(f'background_rate must be >= 0, got {self.background_rate}')

    def grid(self, name):
        return self.grids[name]

    @classmethod
    def from_dict(cls, doc):
        unknown = set(doc) - set(cls.__dataclass_fields__)
        if unknown:
            raise ValueError(f'Unknown SweepConfig fields: {sorted(unknown)}')
        return cls(**doc)

    @classmethod
    def from_hparams(cls, experiment, grid_keys=(), option_keys=()):
        return cls(
            experiment=experiment,
            grids={k: hparam(k) for k in grid_keys},
            shots_per_group=int(hparam('shots_per_group', 100000)),
            seed=int(hparam('seed', 1234)),
            mode=Mode.parse(hparam('mode', 'exact')),
            bootstrap_resamples=int(hparam('bootstrap_resamples', 1000)),
            background_rate=float(hparam('background_rate', 0.)),
            num_workers=int(hparam('num_workers', 1)),
            options={k: hparam(k) for k in option_keys},
        )


@dataclass
class SweepRow:
    parameters: Dict[str, float]
    g_direct: float
    g_product: float
    g_theory: float
    sigma3_direct: Optional[float] = None
    sigma3_product: Optional[float] = None
    warning: Optional[str] = None

    @property
    def residual(self):
        return abs(self.g_direct - self.g_product)

    def flat(self):
        row = dict(self.parameters)
        row.update({k: getattr(self, k) for k in ROW_COLUMNS})
        return row


@dataclass
class MeasuredG:
    value: float
    sigma3: Optional[float] = None
    warnings: List[str] = field(default_factory=list)


def measure_g(rho, config: SweepConfig, seed) -> MeasuredG:
    """
        EXACT: G of the density matrix itself.
        SHOT_NOISE: simulate the tomography counts of rho and reconstruct, with bootstrap 3 sigma.
    """
    if config.mode == Mode.EXACT:
        value = g_coherence(rho, noise_floor=1 / np.sqrt(config.shots_per_group))
        message = warn_if_near_zero(value)
        return MeasuredG(value.value, None, [message] if message else [])
    counts = simulate_counts(rho, projectors_for(rho.d), config.shots_per_group, config.background_rate, seed)
    return measure_counts(counts, config, bootstrap_seed(seed))


def measure_counts(counts: CountRecord, config: SweepConfig, seed) -> MeasuredG:
    """Reconstruct G from a count record; `seed` drives the bootstrap resampling."""
    result = reconstruct(counts, resamples=config.bootstrap_resamples, seed=seed)
    return MeasuredG(result.g_value, result.g_sigma3, list(result.warnings))


def sigma3_product(a, sigma_a, b, sigma_b):
    """First-order propagation for a product a * b of independent estimates."""
    if sigma_a is None or sigma_b is None:
        return None
    return float(np.sqrt((b * sigma_a) ** 2 + (a * sigma_b) ** 2))


def product_row(parameters, direct: MeasuredG, initial: MeasuredG, factor: MeasuredG, g_theory) -> SweepRow:
    """Row from the measured final state (direct) and the two factors of the law."""
    warnings = []
    for m in (direct, initial, factor):
        warnings.extend(w for w in m.warnings if w not in warnings)
    return SweepRow(
        parameters=parameters,
        g_direct=direct.value,
        g_product=initial.value * factor.value,
        g_theory=float(g_theory),
        sigma3_direct=direct.sigma3,
        sigma3_product=sigma3_product(initial.value, initial.sigma3, factor.value, factor.sigma3),
        warning='; '.join(warnings) or None,
    )


def point_seeds(seed, index, n, stream=SWEEP_STREAM):
    """n count-simulation seeds for grid point `index`; each panel draws from its own stream."""
    return stream_seeds(seed, (stream, index), n)


def bootstrap_seed(seed, slot=0):
    """Resampling seed kept apart from the seed that simulated the counts."""
    return stream_seeds(seed, (BOOTSTRAP_STREAM, slot))[0]


def evaluate_points(func, args, desc, num_workers=1):
    """func(*arg) for every grid point, in order; num_workers > 1 uses the worker pool."""
    rows = []
    results = multiprocess_map(func, args, num_workers=num_workers)
    for res in tqdm(results, total=len(args), desc=desc, disable=hparam('disable_progress', False)):
        rows.append(res)
    return rows


def max_residual(rows: List[SweepRow]):
    return max((r.residual for r in rows), default=0.)


def write_sweep(rows: List[SweepRow], path, format='csv', digits=None):
    """Parameter columns (first-seen order) then the fixed value columns."""
    if digits is None:
        digits = hparam('significant_digits', 12)
    params = []
    for r in rows:
        params.extend(k for k in r.parameters if k not in params)
    return write_table([r.flat() for r in rows], path, format, columns=params + ROW_COLUMNS, digits=digits)


EXPERIMENTS = {}


def register_experiment(name):
    def decorator(cls):
        EXPERIMENTS[name] = cls
        return cls
    return decorator


class BaseExperiment:
    '''
        Base class for figure reproductions.
        1. *run*:
            evaluate every panel of the figure;
        2. *write*:
            one table per panel, named <figure>_<panel>.<format>;
        3. *start*:
            load the config chain, run, and write into the work dir.

        Subclasses should define:
        1. *kind*, *grid_keys*, *option_keys*:
            which hparams build the SweepConfig;
        2. *build_panels*:
            panel name -> list of SweepRow (or of flat dicts for element tables).
    '''
    kind: ExperimentKind = None
    grid_keys = ()
    option_keys = ()

    def __init__(self, config: SweepConfig = None):
        if config is None:
            config = SweepConfig.from_hparams(self.kind, self.grid_keys, self.option_keys)
        self.config = config
        self.panels = {}

    def build_panels(self):
        raise NotImplementedError

    def run(self):
        self.panels = self.build_panels()
        return self.panels

    def sweep_rows(self):
        return [r for rows in self.panels.values() for r in rows if isinstance(r, SweepRow)]

    def max_residual(self):
        return max_residual(self.sweep_rows())

    def write(self, out_dir, fmt='csv'):
        ensure_dir(out_dir)
        paths = []
        for name, rows in self.panels.items():
            path = os.path.join(out_dir, f'{self.kind.value}_{name}.{fmt}')
            if len(rows) > 0 and not isinstance(rows[0], SweepRow):
                write_table(rows, path, fmt, columns=list(rows[0].keys()), digits=hparam('significant_digits', 12))
            else:
                write_sweep(rows, path, fmt)
            paths.append(path)
            logger.info(f'| {self.kind.value} panel {name}: {len(rows)} rows -> {path}')
        return paths

    @classmethod
    def start(cls):
        if len(hparams) == 0:
            set_hparams()
        setup_logging(logging.DEBUG if hparams.get('debug') else logging.INFO)
        experiment = cls()
        experiment.run()
        out_dir = hparams.get('work_dir') or os.path.join('results', cls.kind.value)
        paths = experiment.write(out_dir, hparam('out_format', 'csv'))
        print(f'| {cls.kind.value}: wrote {len(paths)} tables to {out_dir}')
        print(f'| max |g_direct - g_product| = {format_sig(experiment.max_residual())}')
        return experiment
