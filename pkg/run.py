import importlib

from utils import setup_logging
from utils.hparams import set_hparams, hparams

set_hparams(print_hparams=False)
setup_logging()


def run_experiment():
    assert hparams['experiment_cls'] != '', 'experiment_cls must name an experiment class, e.g. in configs/experiments/'
    pkg = ".".join(hparams["experiment_cls"].split(".")[:-1])
    cls_name = hparams["experiment_cls"].split(".")[-1]
    experiment_cls = getattr(importlib.import_module(pkg), cls_name)
    experiment_cls.start()


if __name__ == '__main__':
    run_experiment()
