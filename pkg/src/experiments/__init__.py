import os

from basics.base_experiment import EXPERIMENTS, BaseExperiment, Mode
from src.experiments import custom, mixed_fig5, qubit_fig3, qutrit_fig4
from src.experiments.custom import load_channel, run_custom
from src.experiments.mixed_fig5 import run_mixed_fig5
from src.experiments.qubit_fig3 import run_qubit_fig3, run_qubit_initial
from src.experiments.qutrit_fig4 import qutrit_element_table, run_qutrit_fig4
from utils.hparams import hparams, set_hparams

FIGURES = ('fig3', 'fig4', 'fig5')


def reproduce(figure, out_dir, mode=None, shots=None, seed=None, fmt='csv') -> BaseExperiment:
    """Load configs/experiments/<figure>.yaml, apply the overrides, run and write one table per panel."""
    if figure not in FIGURES:
        raise ValueError(f'Unknown figure {figure!r}; choose from {list(FIGURES)}')
    set_hparams(config=os.path.join('configs', 'experiments', f'{figure}.yaml'), print_hparams=False)
    if mode is not None:
        hparams['mode'] = Mode.parse(mode).value
    if shots is not None:
        hparams['shots_per_group'] = int(shots)
    if seed is not None:
        hparams['seed'] = int(seed)
    experiment = EXPERIMENTS[figure]()
    experiment.run()
    experiment.paths = experiment.write(out_dir, fmt)
    return experiment
