import numpy as np
import pytest

from src.measures import mcs_density
from src.qstate import density_from_pure, qutrit_initial_state
from utils.hparams import hparams


@pytest.fixture(autouse=True)
def reset_hparams():
    hparams.clear()
    hparams['disable_progress'] = True
    yield
    hparams.clear()


@pytest.fixture
def rng():
    return np.random.default_rng(20240607)


@pytest.fixture
def mcs3():
    return mcs_density(3)


@pytest.fixture
def psi_prime():
    return density_from_pure(qutrit_initial_state(7.5))
