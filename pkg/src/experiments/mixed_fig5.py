'''
    Mixed states rho = (1-p)|psi+><psi+| + p|psi'><psi'| through the qutrit phase damping,
    psi+ the MCS and psi' the θ2 = mixed_theta2 initial state.
    In shot-noise mode the mixture is formed from the two pure-state count records
    (count_i = (1-p) a_i + p b_i), as in the laboratory protocol.
'''
from basics.base_experiment import (BaseExperiment, ExperimentKind, Mode, SweepConfig, bootstrap_seed, evaluate_points,
                                    measure_counts, measure_g, point_seeds, product_row, register_experiment)
from src.channels import apply, qutrit_phase_damping
from src.measures import g_coherence
from src.qstate import density_from_pure, mix, qutrit_initial_state
from src.tomography import mixed_counts, projectors_for, simulate_counts
from utils import cos_deg

MCS_THETA2 = 22.5
MIXED_THETA2 = 7.5


def mixed_point(theta3, p, config: SweepConfig, seeds):
    channel = qutrit_phase_damping(theta3)
    mixed_theta2 = config.options.get('mixed_theta2')
    plus = density_from_pure(qutrit_initial_state(MCS_THETA2))
    prime = density_from_pure(qutrit_initial_state(MIXED_THETA2 if mixed_theta2 is None else mixed_theta2))
    rho = mix([(1 - p, plus), (p, prime)])
    g_theory = g_coherence(rho).value * abs(cos_deg(2 * theta3)) ** (2 / 3)

    if config.mode == Mode.EXACT:
        direct = measure_g(apply(channel, rho), config, seeds[0])
        initial = measure_g(rho, config, seeds[1])
        factor = measure_g(apply(channel, plus), config, seeds[2])
    else:
        projectors = projectors_for(3)

        def counts_of(state, seed):
            return simulate_counts(state, projectors, config.shots_per_group, config.background_rate, seed)

        plus_final = counts_of(apply(channel, plus), seeds[0])
        prime_final = counts_of(apply(channel, prime), seeds[1])
        plus_initial = counts_of(plus, seeds[2])
        prime_initial = counts_of(prime, seeds[3])
        direct = measure_counts(mixed_counts(plus_final, prime_final, p), config, bootstrap_seed(seeds[0], 1))
        initial = measure_counts(mixed_counts(plus_initial, prime_initial, p), config, bootstrap_seed(seeds[2], 1))
        # the MCS through the channel is the p = 0 record
        factor = measure_counts(plus_final, config, bootstrap_seed(seeds[0]))
    return product_row({'theta3': theta3, 'p': p}, direct, initial, factor, g_theory)


def run_mixed_fig5(config: SweepConfig):
    args = []
    for theta3 in config.grid('theta3_values'):
        for p in config.grid('p_grid'):
            if not 0 <= p <= 1:
                raise ValueError(f'Mixing weight p must lie in [0, 1], got {p}')
            args.append((theta3, p, config, point_seeds(config.seed, len(args), 4)))
    return evaluate_points(mixed_point, args, 'fig5', config.num_workers)


@register_experiment('fig5')
class MixedFig5(BaseExperiment):
    kind = ExperimentKind.MIXED_FIG5
    grid_keys = ('theta3_values', 'p_grid')
    option_keys = ('mixed_theta2',)

    def build_panels(self):
        rows = run_mixed_fig5(self.config)
        return {chr(ord('a') + k): [r for r in rows if r.parameters['theta3'] == theta3]
                for k, theta3 in enumerate(self.config.grid('theta3_values'))}
