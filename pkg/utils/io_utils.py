'''
    JSON / CSV file formats.
    State:   {"d": int, "re": [[...]], "im": [[...]]} (density matrix) or {"d": int, "re": [...], "im": [...]} (pure state)
    Channel: {"d": int, "label": str, "kraus": [{"re": [[...]], "im": [[...]]}, ...]}
    Counts:  {"d": int, "shots_per_group": int, "background_rate": float, "seed": int, "counts": {"1": int, ...}}
    Result:  TomographyResult fields, (i, j) keys written as "ij" strings.
'''
import json
import os

import numpy as np
import pandas as pd

from src.channels import make_channel
from src.qstate import QStateError, density_from_matrix, density_from_pure, pure_state_from_amplitudes
from src.tomography.counts import CountRecord


class FormatError(QStateError):
    def __init__(self, path, location, msg):
        self.path = path
        self.location = location
        super().__init__(f'{path}: {location}: {msg}')


def load_json(path):
    with open(path, encoding='utf-8') as f:
        text = f.read()
    try:
        return json.loads(text)
    except json.JSONDecodeError as e:
        raise FormatError(path, f'line {e.lineno} column {e.colno}', e.msg) from e


def write_json(obj, path):
    try:
        with open(path, 'w', encoding='utf-8') as f:
            json.dump(obj, f, indent=2)
            f.write('\n')
    except OSError as e:
        raise OSError(e.errno, f'Cannot write JSON: {e.strerror}', str(path)) from e


def _require(doc, key, path, location='$'):
    if not isinstance(doc, dict) or key not in doc:
        raise FormatError(path, location, f'missing field {key!r}')
    return doc[key]


def _complex_array(doc, path, location, ndim, d):
    re_ = _require(doc, 're', path, location)
    im_ = _require(doc, 'im', path, location)
    try:
        arr = np.asarray(re_, dtype=np.float64) + 1j * np.asarray(im_, dtype=np.float64)
    except (TypeError, ValueError) as e:
        raise FormatError(path, location, f'"re"/"im" must be numeric arrays of equal shape ({e})') from e
    shape = (d,) * ndim
    if arr.shape != shape:
        raise FormatError(path, location, f'expected shape {shape}, got {arr.shape}')
    return arr


def _dimension(doc, path):
    d = _require(doc, 'd', path)
    if not isinstance(d, int) or isinstance(d, bool):
        raise FormatError(path, '$.d', f'expected an integer, got {d!r}')
    return d


# States
def state_from_dict(doc, path='<memory>'):
    """DensityMatrix for 2-D "re", PureState for 1-D "re"."""
    d = _dimension(doc, path)
    re_ = _require(doc, 're', path)
    is_matrix = isinstance(re_, list) and len(re_) > 0 and isinstance(re_[0], list)
    arr = _complex_array(doc, path, '$', 2 if is_matrix else 1, d)
    if is_matrix:
        return density_from_matrix(arr)
    return pure_state_from_amplitudes(arr)


def state_to_dict(state):
    arr = state.matrix if hasattr(state, 'matrix') else state.amplitudes
    return {'d': int(state.d), 're': arr.real.tolist(), 'im': arr.imag.tolist()}


def read_state(path):
    return state_from_dict(load_json(path), path)


def read_density(path):
    state = read_state(path)
    return state if hasattr(state, 'matrix') else density_from_pure(state)


def write_state(state, path):
    write_json(state_to_dict(state), path)


# Channels
def channel_from_dict(doc, path='<memory>'):
    d = _dimension(doc, path)
    kraus = _require(doc, 'kraus', path)
    if not isinstance(kraus, list) or len(kraus) == 0:
        raise FormatError(path, '$.kraus', 'expected a non-empty list of operators')
    ops = [_complex_array(k, path, f'$.kraus[{n}]', 2, d) for n, k in enumerate(kraus)]
    return make_channel(ops, label=str(doc.get('label', '')))


def channel_to_dict(channel):
    return {
        'd': int(channel.d),
        'label': channel.label,
        'kraus': [{'re': k.real.tolist(), 'im': k.imag.tolist()} for k in channel.operators],
    }


def read_channel(path):
    return channel_from_dict(load_json(path), path)


def write_channel(channel, path):
    write_json(channel_to_dict(channel), path)


# Counts
def counts_from_dict(doc, path='<memory>'):
    d = _dimension(doc, path)
    counts = _require(doc, 'counts', path)
    if not isinstance(counts, dict):
        raise FormatError(path, '$.counts', 'expected an object of projector id -> count')
    parsed = {}
    for k, v in counts.items():
        if not str(k).isdigit() or not isinstance(v, (int, float)) or v < 0:
            raise FormatError(path, f'$.counts.{k}', f'expected a nonnegative count, got {v!r}')
        parsed[int(k)] = v
    shots = _require(doc, 'shots_per_group', path)
    if not isinstance(shots, int) or shots < 1:
        raise FormatError(path, '$.shots_per_group', f'expected an integer >= 1, got {shots!r}')
    background = doc.get('background_rate', 0.)
    if not isinstance(background, (int, float)) or background < 0:
        raise FormatError(path, '$.background_rate', f'expected a nonnegative number, got {background!r}')
    return CountRecord(d=d, shots_per_group=shots, counts=parsed, seed=doc.get('seed'),
                       background_rate=float(background))


def counts_to_dict(record):
    return {
        'd': int(record.d),
        'shots_per_group': int(record.shots_per_group),
        'background_rate': float(record.background_rate),
        'seed': record.seed,
        'counts': {str(k): v for k, v in sorted(record.counts.items())},
    }


def read_counts(path):
    return counts_from_dict(load_json(path), path)


def write_counts(record, path):
    write_json(counts_to_dict(record), path)


# Tomography results
def result_to_dict(result):
    return {
        'd': int(result.d),
        'off_diagonals': {f'{i}{j}': {'re': v.real, 'im': v.imag, 'abs': abs(v)}
                          for (i, j), v in sorted(result.off_diagonals.items())},
        'diagonals': None if result.diagonals is None else {str(i): v for i, v in sorted(result.diagonals.items())},
        'g_value': result.g_value,
        'g_sigma3': result.g_sigma3,
        'warnings': list(result.warnings),
    }


def write_result(result, path):
    write_json(result_to_dict(result), path)


# Tables
def write_table(rows, path, fmt='csv', columns=None, digits=12):
    """
        rows: list of flat dicts. Floats keep `digits` significant digits, None is written empty
        in CSV and as null in JSON; an empty row list gives a header-only CSV / empty JSON array.
    """
    fmt = fmt.lower()
    assert fmt in ('csv', 'json'), f'Unknown table format {fmt!r}'
    df = pd.DataFrame(rows, columns=columns)
    try:
        if fmt == 'csv':
            df.to_csv(path, index=False, float_format=f'%.{digits}g')
        else:
            records = [{k: _round_sig(v, digits) for k, v in row.items()} for row in rows]
            with open(path, 'w', encoding='utf-8') as f:
                json.dump(records, f, indent=2)
                f.write('\n')
    except OSError as e:
        raise OSError(e.errno, f'Cannot write {fmt.upper()} table: {e.strerror}', str(path)) from e
    return path


def _round_sig(v, digits):
    if isinstance(v, (float, np.floating)):
        return float(f'{float(v):.{digits}g}')
    return v


def ensure_dir(path):
    try:
        os.makedirs(path, exist_ok=True)
    except OSError as e:
        raise OSError(e.errno, f'Cannot create output directory: {e.strerror}', str(path)) from e
    return path
