import logging
import sys

import numpy as np

log_format = '%(asctime)s %(message)s'


def setup_logging(level=logging.INFO):
    logging.basicConfig(stream=sys.stdout, level=level,
                        format=log_format, datefmt='%m/%d %I:%M:%S %p')


class ResidualMeter(object):
    """Running maximum / mean of absolute residuals, plus how many stayed within tolerance."""

    def __init__(self, tolerance):
        self.tolerance = tolerance
        self.reset()

    def reset(self):
        self.max = 0.
        self.sum = 0.
        self.cnt = 0
        self.passed = 0

    def update(self, val):
        val = float(val)
        self.max = max(self.max, val)
        self.sum += val
        self.cnt += 1
        self.passed += int(val <= self.tolerance)

    @property
    def avg(self):
        return self.sum / self.cnt if self.cnt > 0 else 0.


def angle_grid(grid):
    """
        Turn a grid description into a float array.
        Accepts a list of values or {start, stop, step}; stop is included when it lies on the grid.
    """
    if isinstance(grid, dict):
        start, stop, step = float(grid['start']), float(grid['stop']), float(grid['step'])
        assert step > 0, f'Grid step must be positive, got {step}'
        n = int(np.floor((stop - start) / step + 1e-9)) + 1
        values = np.round(start + step * np.arange(n), 12)
    else:
        values = np.asarray(list(grid), dtype=np.float64)
    if values.size == 0:
        raise ValueError(f'Grid must not be empty: {grid}')
    return values


def derive_seed(seed, index):
    return (int(seed) + int(index)) & 0xffff_ffff


def stream_seeds(seed, key, n=1):
    """n 32-bit seeds for the independent stream named by the int tuple `key`."""
    ss = np.random.SeedSequence(int(seed) & 0xffff_ffff, spawn_key=tuple(int(k) for k in key))
    return [int(s) for s in ss.generate_state(n)]


def format_sig(x, digits=12):
    """Fixed 12-significant-digit text for diffable output; exact zero prints as '0'."""
    if x is None:
        return ''
    x = float(x)
    if x == 0:
        return '0'
    return f'{x:.{digits}g}'


def format_fixed(x, digits=12):
    """'G = 1.000000000000' style; exact zero prints as '0'."""
    x = float(x)
    if x == 0:
        return '0'
    return f'{x:.{digits}f}'


def sin_deg(theta):
    """sin of an angle in degrees, exact (0, +-1) on multiples of 90 degrees."""
    r = float(theta) % 360.
    if r % 90. == 0:
        return (0., 1., 0., -1.)[int(r // 90.)]
    return float(np.sin(np.deg2rad(theta)))


def cos_deg(theta):
    return sin_deg(float(theta) + 90.)
