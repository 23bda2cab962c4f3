'''
    Qutrit phase damping: initial state √(1/3)|1> + √(2/3)cos2θ2|2> + √(2/3)sin2θ2|3> through
    K1 = diag(cos2θ3, cos2θ3, 1), K2 = diag(sin2θ3, sin2θ3, 0).
    Panel a tabulates |rho_ij| of the MCS after the channel; panel b sweeps θ3 for each θ2.
'''
from basics.base_experiment import (BaseExperiment, ExperimentKind, Mode, SweepConfig, evaluate_points, measure_g,
                                    PANEL_STREAM, point_seeds, product_row, register_experiment)
from src.channels import apply, qutrit_phase_damping
from src.measures import offdiag_moduli
from src.qstate import density_from_pure, qutrit_initial_state
from src.tomography import projectors_for, reconstruct, simulate_counts
from utils import cos_deg, sin_deg

MCS_THETA2 = 22.5
PAIRS = ((1, 2), (1, 3), (2, 3))


def qutrit_theory(theta2, theta3):
    return abs(sin_deg(4 * theta2) * cos_deg(2 * theta3)) ** (2 / 3)


def qutrit_point(theta2, theta3, config: SweepConfig, seeds):
    channel = qutrit_phase_damping(theta3)
    rho = density_from_pure(qutrit_initial_state(theta2))
    reference = density_from_pure(qutrit_initial_state(MCS_THETA2))
    direct = measure_g(apply(channel, rho), config, seeds[0])
    initial = measure_g(rho, config, seeds[1])
    factor = measure_g(apply(channel, reference), config, seeds[2])
    return product_row({'theta2': theta2, 'theta3': theta3}, direct, initial, factor, qutrit_theory(theta2, theta3))


def run_qutrit_fig4(config: SweepConfig):
    args = []
    for theta2 in config.grid('theta2_values'):
        for theta3 in config.grid('theta3_grid'):
            args.append((theta2, theta3, config, point_seeds(config.seed, len(args), 3)))
    return evaluate_points(qutrit_point, args, 'fig4', config.num_workers)


def element_row(theta3, config: SweepConfig, seed):
    """|rho_ij| of Phi(MCS), measured (or exact) next to the 1/3, |cos2θ3|/3 pattern."""
    final = apply(qutrit_phase_damping(theta3), density_from_pure(qutrit_initial_state(MCS_THETA2)))
    if config.mode == Mode.EXACT:
        moduli = offdiag_moduli(final)
        measured = {pair: float(moduli[pair[0] - 1, pair[1] - 1]) for pair in PAIRS}
    else:
        counts = simulate_counts(final, projectors_for(3), config.shots_per_group, config.background_rate, seed)
        result = reconstruct(counts)
        measured = {pair: abs(result.off_diagonals[pair]) for pair in PAIRS}
    c = abs(cos_deg(2 * theta3)) / 3
    row = {'theta3': theta3}
    row.update({f'abs_rho{i}{j}': measured[(i, j)] for i, j in PAIRS})
    row.update({'theory_rho12': 1 / 3, 'theory_rho13': c, 'theory_rho23': c})
    return row


def qutrit_element_table(config: SweepConfig):
    return [element_row(theta3, config, point_seeds(config.seed, i, 1, PANEL_STREAM)[0])
            for i, theta3 in enumerate(config.grid('panel_a_theta3'))]


@register_experiment('fig4')
class QutritFig4(BaseExperiment):
    kind = ExperimentKind.QUTRIT_FIG4
    grid_keys = ('theta2_values', 'theta3_grid', 'panel_a_theta3')

    def build_panels(self):
        return {
            'a': qutrit_element_table(self.config),
            'b': run_qutrit_fig4(self.config),
        }
