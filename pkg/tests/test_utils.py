import json

import numpy as np
import pytest

from src.channels import qutrit_phase_damping
from src.measures import mcs_density
from src.qstate import InvalidStateError, pure_state_from_amplitudes, random_density
from src.tomography import exact_counts, qubit_projectors, qutrit_projectors, reconstruct
from utils import ResidualMeter, angle_grid, cos_deg, derive_seed, format_fixed, format_sig, sin_deg, stream_seeds
from utils.hparams import hparam, hparams, override_config, parse_hparams_str, set_hparams
from utils.io_utils import (FormatError, channel_from_dict, channel_to_dict, counts_from_dict, counts_to_dict,
                            read_channel, read_counts, read_density, read_state, result_to_dict, state_from_dict,
                            write_channel, write_counts, write_state)
from utils.multiprocess_utils import WorkerError, multiprocess_map


def _square(x):
    return x * x


def _fail_on_three(x):
    if x == 3:
        raise ValueError('three')
    return x


class TestHparams:
    def test_override_config_is_deep(self):
        old = {'a': 1, 'grid': {'start': 0, 'step': 1}}
        override_config(old, {'grid': {'step': 0.5}, 'b': 2})
        assert old == {'a': 1, 'b': 2, 'grid': {'start': 0, 'step': 0.5}}

    def test_parse_hparams_str(self):
        assert parse_hparams_str('') == {}
        assert parse_hparams_str('mode=shot_noise,seed=7,tolerance=1.0e-8') == \
            {'mode': 'shot_noise', 'seed': 7, 'tolerance': 1e-8}
        assert parse_hparams_str('theta3_values=[0,15,30],debug=true') == \
            {'theta3_values': [0, 15, 30], 'debug': True}

    def test_parse_hparams_str_needs_pairs(self):
        with pytest.raises(AssertionError):
            parse_hparams_str('seed')

    def test_config_chain(self, tmp_path):
        base = tmp_path / 'base.yaml'
        base.write_text('seed: 1\nshots_per_group: 10\ngrid: {start: 0, stop: 45, step: 15}\n')
        child = tmp_path / 'child.yaml'
        child.write_text(f'base_config:\n  - {base}\nseed: 2\ngrid: {{step: 5}}\n')
        out = set_hparams(config=str(child), hparams_str='shots_per_group=20', print_hparams=False)
        assert out['seed'] == 2
        assert out['shots_per_group'] == 20
        assert out['grid'] == {'start': 0, 'stop': 45, 'step': 5}
        assert hparams['seed'] == 2

    def test_relative_base_config(self, tmp_path):
        (tmp_path / 'base.yaml').write_text('seed: 5\n')
        child = tmp_path / 'child.yaml'
        child.write_text('base_config: ./base.yaml\nmode: exact\n')
        out = set_hparams(config=str(child), print_hparams=False)
        assert out['seed'] == 5 and out['mode'] == 'exact'

    def test_json_config(self, tmp_path):
        path = tmp_path / 'sweep.json'
        path.write_text(json.dumps({'seed': 11, 'p_grid': [0, 1]}))
        assert set_hparams(config=str(path), print_hparams=False)['p_grid'] == [0, 1]

    def test_shipped_experiment_config(self):
        out = set_hparams(config='configs/experiments/fig5.yaml', print_hparams=False)
        assert out['mixed_theta2'] == 7.5
        assert out['tolerance'] == 1e-10
        assert out['experiment_cls'] == 'src.experiments.mixed_fig5.MixedFig5'

    def test_hparam_falls_back_to_base(self):
        assert hparam('near_zero_factor') == 10.0
        assert hparam('not_a_key', 3) == 3
        hparams['near_zero_factor'] = 4.0
        assert hparam('near_zero_factor') == 4.0


class TestHelpers:
    def test_angle_grid(self):
        assert angle_grid({'start': 0, 'stop': 45, 'step': 7.5}).tolist() == [0, 7.5, 15, 22.5, 30, 37.5, 45]
        assert angle_grid({'start': 0, 'stop': 1, 'step': 0.05})[-1] == 1.0
        assert angle_grid([22.5, 7.5]).tolist() == [22.5, 7.5]
        with pytest.raises(ValueError):
            angle_grid([])
        with pytest.raises(AssertionError):
            angle_grid({'start': 0, 'stop': 1, 'step': 0})

    def test_exact_trig_on_right_angles(self):
        assert sin_deg(90) == 1. and sin_deg(180) == 0. and sin_deg(-90) == -1.
        assert cos_deg(90) == 0. and cos_deg(0) == 1.
        assert sin_deg(30) == pytest.approx(0.5, abs=1e-15)

    def test_formatting(self):
        assert format_fixed(1.0) == '1.000000000000'
        assert format_fixed(0.) == '0'
        assert format_sig(1 / 3) == '0.333333333333'
        assert format_sig(0.) == '0'
        assert format_sig(None) == ''

    def test_derive_seed(self):
        assert derive_seed(42, 3) == 45
        assert derive_seed(2 ** 32 - 1, 1) == 0

    def test_residual_meter(self):
        meter = ResidualMeter(1e-10)
        for v in (1e-12, 3e-11, 1e-9):
            meter.update(v)
        assert meter.max == 1e-9
        assert meter.passed == 2
        assert meter.avg == pytest.approx((1e-12 + 3e-11 + 1e-9) / 3)

    def test_multiprocess_map_keeps_order(self):
        args = [(i,) for i in range(10)]
        assert list(multiprocess_map(_square, args, num_workers=1)) == [i * i for i in range(10)]
        assert list(multiprocess_map(_square, args, num_workers=3)) == [i * i for i in range(10)]

    def test_worker_failure_is_raised(self):
        with pytest.raises(WorkerError, match='ValueError: three'):
            list(multiprocess_map(_fail_on_three, [(i,) for i in range(6)], num_workers=2))

    def test_stream_seeds(self):
        assert stream_seeds(5, (0, 1), 3) == stream_seeds(5, (0, 1), 3)
        assert stream_seeds(5, (0, 1)) != stream_seeds(5, (1, 1))
        assert len(set(stream_seeds(5, (2,), 4))) == 4


class TestStateFiles:
    def test_density_round_trip(self, tmp_path):
        rho = random_density(3, 4)
        path = tmp_path / 'rho.json'
        write_state(rho, path)
        np.testing.assert_allclose(read_density(path).matrix, rho.matrix, atol=1e-15)

    def test_pure_state_becomes_density(self, tmp_path):
        path = tmp_path / 'psi.json'
        write_state(pure_state_from_amplitudes([1, 1j]), path)
        assert read_state(path).d == 2
        np.testing.assert_allclose(read_density(path).matrix, [[0.5, -0.5j], [0.5j, 0.5]], atol=1e-15)

    def test_shape_mismatch(self):
        with pytest.raises(FormatError, match='expected shape'):
            state_from_dict({'d': 3, 're': [[1, 0], [0, 0]], 'im': [[0, 0], [0, 0]]})

    def test_non_numeric(self):
        with pytest.raises(FormatError, match='numeric'):
            state_from_dict({'d': 2, 're': [['a', 0], [0, 1]], 'im': [[0, 0], [0, 0]]})

    def test_bad_dimension_field(self):
        with pytest.raises(FormatError, match=r'\$\.d'):
            state_from_dict({'d': '2', 're': [1, 0], 'im': [0, 0]})

    def test_invalid_density(self):
        with pytest.raises(InvalidStateError):
            state_from_dict({'d': 2, 're': [[1.5, 0], [0, -0.5]], 'im': [[0, 0], [0, 0]]})

    def test_malformed_json_location(self, tmp_path):
        path = tmp_path / 'bad.json'
        path.write_text('{\n  "d": 2,\n  "re": [1, 0\n}')
        with pytest.raises(FormatError, match='line 4'):
            read_state(path)


class TestChannelFiles:
    def test_round_trip(self, tmp_path):
        ch = qutrit_phase_damping(15.)
        path = tmp_path / 'ch.json'
        write_channel(ch, path)
        loaded = read_channel(path)
        np.testing.assert_allclose(loaded.operators, ch.operators, atol=1e-15)
        assert loaded.label == ch.label

    def test_empty_kraus_list(self):
        with pytest.raises(FormatError, match='kraus'):
            channel_from_dict({'d': 2, 'kraus': []})

    def test_operator_location(self):
        doc = channel_to_dict(qutrit_phase_damping(15.))
        doc['kraus'][1]['re'] = [[1, 0], [0, 1]]
        with pytest.raises(FormatError, match=r'kraus\[1\]'):
            channel_from_dict(doc)


class TestCountFiles:
    def test_round_trip(self, tmp_path):
        record = exact_counts(mcs_density(3), qutrit_projectors(), 1000)
        path = tmp_path / 'counts.json'
        write_counts(record, path)
        loaded = read_counts(path)
        assert loaded.counts == record.counts
        assert loaded.shots_per_group == 1000

    def test_keys_are_ids(self):
        with pytest.raises(FormatError):
            counts_from_dict({'d': 2, 'shots_per_group': 10, 'counts': {'D': 1}})

    def test_shots_must_be_positive(self):
        with pytest.raises(FormatError, match='shots_per_group'):
            counts_from_dict({'d': 2, 'shots_per_group': 0, 'counts': {'1': 1}})

    def test_negative_background(self):
        with pytest.raises(FormatError, match='background_rate'):
            counts_from_dict({'d': 2, 'shots_per_group': 10, 'background_rate': -1, 'counts': {'1': 1}})

    def test_string_keys_written(self):
        doc = counts_to_dict(exact_counts(mcs_density(2), qubit_projectors()))
        assert set(doc['counts']) == {'1', '2', '3', '4'}


def test_result_document(mcs3):
    result = reconstruct(exact_counts(mcs3, qutrit_projectors()))
    doc = result_to_dict(result)
    assert set(doc['off_diagonals']) == {'12', '13', '23'}
    assert doc['off_diagonals']['12']['abs'] == pytest.approx(1 / 3, abs=1e-12)
    assert doc['warnings'] == []
    assert json.loads(json.dumps(doc))['g_value'] == pytest.approx(1., abs=1e-12)
