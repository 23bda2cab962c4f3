'''
    Exact pipeline for any dimension: a user channel and state, checked three ways
    (Kraus sum, factorized product, Hadamard fast path).
'''
from basics.base_experiment import BaseExperiment, ExperimentKind, SweepRow, register_experiment
from src.channels import ChannelKind, KrausChannel, apply, apply_hadamard, channel_g, classify, get_builtin_channel, \
    transfer_matrix
from src.measures import g_coherence
from src.qstate import DensityMatrix, DimensionMismatchError
from utils.io_utils import read_channel, read_density


def run_custom(channel: KrausChannel, rho: DensityMatrix) -> SweepRow:
    """
        g_direct: G of the Kraus sum; g_product: G(rho) * G[Phi(MCS)];
        g_theory: G of rho o Phi(J_d), which agrees with g_direct only for GIO.
    """
    if channel.d != rho.d:
        raise DimensionMismatchError(f'Channel d={channel.d} vs state d={rho.d}')
    direct = g_coherence(apply(channel, rho))
    hadamard = g_coherence(apply_hadamard(transfer_matrix(channel), rho))
    kind = classify(channel).kind
    warning = None
    if kind != ChannelKind.GIO:
        warning = f'channel classified {kind.value}; the element-wise form is not guaranteed'
    elif direct.min_offdiag == 0:
        warning = 'zero off-diagonal element; G is exactly 0'
    return SweepRow(
        parameters={'d': rho.d},
        g_direct=direct.value,
        g_product=g_coherence(rho).value * channel_g(channel),
        g_theory=hadamard.value,
        warning=warning,
    )


def load_channel(source, param=None) -> KrausChannel:
    """'builtin:NAME' or a channel JSON path."""
    if source.startswith('builtin:'):
        return get_builtin_channel(source[len('builtin:'):], param)
    return read_channel(source)


@register_experiment('custom')
class CustomExperiment(BaseExperiment):
    kind = ExperimentKind.CUSTOM
    option_keys = ('custom_channel', 'custom_state', 'custom_param')

    def build_panels(self):
        options = self.config.options
        assert options.get('custom_channel') and options.get('custom_state'), \
            'custom_channel and custom_state must be set for the custom experiment'
        channel = load_channel(options['custom_channel'], options.get('custom_param'))
        return {'main': [run_custom(channel, read_density(options['custom_state']))]}
