import argparse
import multiprocessing
import os
import re

import yaml

global_print_hparams = True
hparams = {}
root_dir = os.path.dirname(os.path.dirname(os.path.abspath(__file__)))


class Args:
    def __init__(self, **kwargs):
        for k, v in kwargs.items():
            self.__setattr__(k, v)


def override_config(old_config: dict, new_config: dict):
    for k, v in new_config.items():
        if isinstance(v, dict) and k in old_config and isinstance(old_config[k], dict):
            override_config(old_config[k], new_config[k])
        else:
            old_config[k] = v


def parse_hparams_str(hparams_str: str) -> dict:
    """
        Parse "k=v,k2=v2" into a dict. Values are read as YAML scalars,
        so `tolerance=1e-8`, `mode=exact` and `theta3_grid=[0,45]` all work.
        Brackets may contain commas.
    """
    ret = {}
    if hparams_str == '':
        return ret
    parts, depth, buf = [], 0, ''
    for ch in hparams_str:
        if ch == ',' and depth == 0:
            parts.append(buf)
            buf = ''
            continue
        depth += ch in '[{'
        depth -= ch in ']}'
        buf += ch
    parts.append(buf)
    for new_hparam in parts:
        assert '=' in new_hparam, f'Invalid hparams override: {new_hparam!r} (expected k=v)'
        k, v = new_hparam.split('=', 1)
        ret[k.strip()] = yaml.safe_load(v)
    return ret


def set_hparams(config='', exp_name='', hparams_str='', print_hparams=True, global_hparams=True, reset=False):
    """
        Load hparams from multiple sources:
        1. config chain (i.e. first load base_config, then load config);
        2. if reset == False, load from the (auto-saved) complete config file ('config.yaml')
           in the work dir, which contains all settings and does not rely on base_config;
        3. load from argument --hparams or hparams_str, as temporary modification.
        JSON documents are valid YAML, so sweep configs written as JSON load the same way.
    """
    if config == '' and exp_name == '':
        parser = argparse.ArgumentParser(description='coherence factorization experiments')
        parser.add_argument('--config', type=str, default='',
                            help='location of the experiment config (YAML or JSON)')
        parser.add_argument('--exp_name', type=str, default='', help='exp_name')
        parser.add_argument('--hparams', type=str, default='',
                            help='temporary overrides, e.g. "mode=shot_noise,seed=7"')
        parser.add_argument('--reset', action='store_true', help='reset hparams')
        parser.add_argument('--debug', action='store_true', help='debug')
        args, unknown = parser.parse_known_args()
    else:
        args = Args(config=config, exp_name=exp_name, hparams=hparams_str, reset=reset, debug=False)

    args_work_dir = ''
    if args.exp_name != '':
        args_work_dir = os.path.join('results', args.exp_name)

    config_chains = []
    loaded_config = set()

    def load_config(config_fn):  # deep first
        if not os.path.exists(config_fn) and not os.path.isabs(config_fn):
            config_fn = os.path.join(root_dir, config_fn)
        with open(config_fn, encoding='utf-8') as f:
            hparams_ = yaml.safe_load(f) or {}
        loaded_config.add(config_fn)
        if 'base_config' in hparams_:
            ret_hparams = {}
            if not isinstance(hparams_['base_config'], list):
                hparams_['base_config'] = [hparams_['base_config']]
            for c in hparams_['base_config']:
                if c not in loaded_config:
                    if c.startswith('.'):
                        c = f'{os.path.dirname(config_fn)}/{c}'
                        c = os.path.normpath(c)
                    override_config(ret_hparams, load_config(c))
            override_config(ret_hparams, hparams_)
        else:
            ret_hparams = hparams_
        config_chains.append(config_fn)
        return ret_hparams

    global hparams
    assert args.config != '' or args_work_dir != '', 'Either config or exp name should be specified.'
    saved_hparams = {}
    ckpt_config_path = f'{args_work_dir}/config.yaml'
    if args_work_dir != '' and os.path.exists(ckpt_config_path):
        with open(ckpt_config_path, encoding='utf-8') as f:
            saved_hparams.update(yaml.safe_load(f) or {})

    hparams_ = {}
    if args.config != '':
        hparams_.update(load_config(args.config))

    if not args.reset:
        hparams_.update(saved_hparams)
    hparams_['work_dir'] = args_work_dir

    override_config(hparams_, parse_hparams_str(args.hparams))

    if args_work_dir != '' and (not os.path.exists(ckpt_config_path) or args.reset):
        os.makedirs(hparams_['work_dir'], exist_ok=True)
        if not bool(re.match(r'Process-\d+', multiprocessing.current_process().name)):
            # Only the main process will save the config file
            with open(ckpt_config_path, 'w', encoding='utf-8') as f:
                hparams_non_recursive = hparams_.copy()
                hparams_non_recursive['base_config'] = []
                yaml.safe_dump(hparams_non_recursive, f, allow_unicode=True, encoding='utf-8')

    hparams_['debug'] = args.debug
    global global_print_hparams
    if global_hparams:
        hparams.clear()
        hparams.update(hparams_)

    if print_hparams and global_print_hparams and global_hparams:
        print('| Hparams chains: ', config_chains)
        print('| Hparams: ')
        for i, (k, v) in enumerate(sorted(hparams_.items())):
            print(f"\033[;33;m{k}\033[0m: {v}, ", end="\n" if i % 5 == 4 else "")
        print("")
        global_print_hparams = False
    if hparams.get('exp_name') is None:
        hparams['exp_name'] = args.exp_name
    if hparams_.get('exp_name') is None:
        hparams_['exp_name'] = args.exp_name
    return hparams_


def hparam(key, default=None):
    """Look up a library default: loaded hparams first, then the shipped base config."""
    if key in hparams:
        return hparams[key]
    return base_defaults().get(key, default)


_base_defaults = {}


def base_defaults():
    if not _base_defaults:
        base_fn = os.path.join(root_dir, 'configs', 'basics', 'base.yaml')
        if os.path.exists(base_fn):
            with open(base_fn, encoding='utf-8') as f:
                _base_defaults.update(yaml.safe_load(f) or {})
    return _base_defaults
