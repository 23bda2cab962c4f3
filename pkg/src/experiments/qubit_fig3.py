'''
    Qubit sweep: initial state sin2θ1|1> + cos2θ1|2> through the two-operator GIO
    K1 = diag(sin2θ2, cos2θ2), K2 = diag(cos2θ2, i sin2θ2).
    Panel a is the initial-state G against θ1; the following panels, one per θ1, sweep θ2.
'''
import numpy as np

from basics.base_experiment import (BaseExperiment, ExperimentKind, MeasuredG, SweepConfig, evaluate_points, measure_g,
                                    PANEL_STREAM, point_seeds, product_row, register_experiment)
from src.channels import apply, qubit_paper_channel
from src.qstate import density_from_pure, qubit_initial_state
from utils import sin_deg

MCS_THETA1 = 22.5


def qubit_theory(theta1, theta2):
    return abs(sin_deg(4 * theta1) * sin_deg(4 * theta2)) / np.sqrt(2)


def qubit_point(theta1, theta2, config: SweepConfig, seeds):
    channel = qubit_paper_channel(theta2)
    rho = density_from_pure(qubit_initial_state(theta1))
    mcs_theta1 = config.options.get('mcs_theta1')
    if mcs_theta1 is None:
        mcs_theta1 = MCS_THETA1
    reference = density_from_pure(qubit_initial_state(mcs_theta1))
    direct = measure_g(apply(channel, rho), config, seeds[0])
    initial = measure_g(rho, config, seeds[1])
    factor = measure_g(apply(channel, reference), config, seeds[2])
    return product_row({'theta1': theta1, 'theta2': theta2}, direct, initial, factor, qubit_theory(theta1, theta2))


def initial_point(theta1, config: SweepConfig, seed):
    initial = measure_g(density_from_pure(qubit_initial_state(theta1)), config, seed)
    # no operation: the product column repeats the measured value
    return product_row({'theta1': theta1}, initial, initial, MeasuredG(1.), abs(sin_deg(4 * theta1)))


def run_qubit_fig3(config: SweepConfig):
    """One row per (θ1, θ2); G[Phi(MCS)] comes from the θ1 = mcs_theta1 run at the same θ2."""
    args = []
    for theta1 in config.grid('theta1_values'):
        for theta2 in config.grid('theta2_grid'):
            args.append((theta1, theta2, config, point_seeds(config.seed, len(args), 3)))
    return evaluate_points(qubit_point, args, 'fig3', config.num_workers)


def run_qubit_initial(config: SweepConfig):
    args = [(theta1, config, point_seeds(config.seed, i, 1, PANEL_STREAM)[0])
            for i, theta1 in enumerate(config.grid('theta1_grid'))]
    return [initial_point(*a) for a in args]


@register_experiment('fig3')
class QubitFig3(BaseExperiment):
    kind = ExperimentKind.QUBIT_FIG3
    grid_keys = ('theta1_grid', 'theta1_values', 'theta2_grid')
    option_keys = ('mcs_theta1',)

    def build_panels(self):
        panels = {'a': run_qubit_initial(self.config)}
        rows = run_qubit_fig3(self.config)
        for k, theta1 in enumerate(self.config.grid('theta1_values')):
            panels[chr(ord('b') + k)] = [r for r in rows if r.parameters['theta1'] == theta1]
        return panels
