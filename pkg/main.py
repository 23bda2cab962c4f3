# coding=utf8
import argparse
import logging
import sys
import warnings

from src.channels import ChannelKind, apply, apply_hadamard, classify, transfer_matrix
from src.experiments import FIGURES, load_channel, reproduce
from src.factorization import property_sweep
from src.measures import g_coherence, l1_coherence, warn_if_near_zero
from src.qstate import QStateError
from src.tomography import projectors_for, reconstruct, simulate_counts
from utils import format_fixed, format_sig, setup_logging
from utils.io_utils import read_counts, read_density, write_counts, write_json, write_result, write_state
from utils.multiprocess_utils import WorkerError

EXIT_OK, EXIT_VALIDATION, EXIT_IO = 0, 1, 2


class CliParser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_VALIDATION, f'{self.prog}: error: {message}\n')


def cmd_coherence(args):
    rho = read_density(args.state)
    if args.measure in ('g', 'both'):
        g = g_coherence(rho, noise_floor=args.noise_floor)
        print(f'G = {format_fixed(g.value)}')
        with warnings.catch_warnings():
            warnings.simplefilter('ignore')
            message = warn_if_near_zero(g)
        if message:
            print(f'warning: {message}')
    if args.measure in ('l1', 'both'):
        print(f'l1 = {format_fixed(l1_coherence(rho).value)}')
    return EXIT_OK


def cmd_channel(args):
    rho = read_density(args.state)
    param = args.param
    if args.channel == 'builtin:identity' and param is None:
        param = rho.d
    channel = load_channel(args.channel, param)
    transfer = transfer_matrix(channel)
    if args.hadamard:
        cls = classify(channel)
        if cls.kind != ChannelKind.GIO:
            perm = '' if cls.permutation is None else f' (permutation {list(cls.permutation)})'
            print(f'classification: {cls.kind.value}{perm}')
            print('error: --hadamard needs a GIO channel (all Kraus operators diagonal)', file=sys.stderr)
            return EXIT_VALIDATION
        out = apply_hadamard(transfer, rho)
    else:
        out = apply(channel, rho)
    print(f'channel: {channel.label or args.channel} (d={channel.d}, {channel.num_kraus} Kraus operators)')
    print(f'G before = {format_fixed(g_coherence(rho).value)}')
    print(f'G after  = {format_fixed(g_coherence(out).value)}')
    for i in range(channel.d):
        for j in range(i + 1, channel.d):
            print(f'|M_{i + 1}{j + 1}| = {format_fixed(abs(transfer.entries[i, j]))}')
    if args.out:
        write_state(out, args.out)
        print(f'| wrote {args.out}')
    return EXIT_OK


def cmd_verify(args):
    summary = property_sweep(args.d, args.trials, args.seed, tolerance=args.tolerance, num_workers=args.workers)
    print(f'verify d={summary.d} trials={summary.trials} seed={summary.seed}: '
          f'elementwise {summary.passes_elementwise}/{summary.trials}, G-law {summary.passes_g}/{summary.trials}, '
          f'max residuals {format_sig(summary.max_residual_elementwise)} / {format_sig(summary.max_residual_g)}')
    if args.out:
        write_json(summary.to_dict(), args.out)
    if not summary.all_passed:
        print(f'failing seeds: {summary.failing_seeds}', file=sys.stderr)
        return EXIT_VALIDATION
    return EXIT_OK


def cmd_tomo_simulate(args):
    rho = read_density(args.state)
    record = simulate_counts(rho, projectors_for(rho.d), args.shots, args.background, args.seed)
    write_counts(record, args.out)
    print(f'| simulated d={record.d} shots_per_group={record.shots_per_group} seed={record.seed} -> {args.out}')
    return EXIT_OK


def cmd_tomo_reconstruct(args):
    record = read_counts(args.counts)
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter('always')
        result = reconstruct(record, psd_project=args.psd_project, resamples=args.resamples, seed=args.seed)
    for (i, j), v in sorted(result.off_diagonals.items()):
        print(f'rho_{i}{j} = {format_sig(v.real)} {"-" if v.imag < 0 else "+"} {format_sig(abs(v.imag))}i'
              f'  |rho_{i}{j}| = {format_sig(abs(v))}')
    print(f'G = {format_fixed(result.g_value)}')
    if args.resamples > 0:
        print(f'3 sigma = {format_fixed(result.g_sigma3)}')
    for w in dict.fromkeys(result.warnings + [str(c.message) for c in caught]):
        print(f'warning: {w}')
    if args.out:
        write_result(result, args.out)
    return EXIT_OK


def cmd_reproduce(args):
    experiment = reproduce(args.figure, args.out, mode=args.mode, shots=args.shots, seed=args.seed, fmt=args.format)
    for path in experiment.paths:
        print(f'| wrote {path}')
    print(f'max |g_direct - g_product| = {format_sig(experiment.max_residual())}')
    return EXIT_OK


def build_parser():
    parser = CliParser(prog='main.py', description='G-coherence and factorization-law toolkit')
    parser.add_argument('--log-level', type=str, default='warning',
                        choices=['debug', 'info', 'warning', 'error'], help='logging verbosity')
    subparsers = parser.add_subparsers(dest='command', required=True)

    p = subparsers.add_parser('coherence', help='evaluate coherence measures of a state file')
    p.add_argument('--state', type=str, required=True, help='state JSON (density matrix or pure state)')
    p.add_argument('--measure', type=str, default='g', choices=['g', 'l1', 'both'])
    p.add_argument('--noise-floor', type=float, default=0.0, help='flag G when min |rho_ij| < 10 x this')
    p.set_defaults(func=cmd_coherence)

    p = subparsers.add_parser('channel', help='apply a channel to a state')
    p.add_argument('--channel', type=str, required=True, help='channel JSON or builtin:NAME')
    p.add_argument('--param', type=float, default=None, help='parameter of a builtin channel (degrees or epsilon)')
    p.add_argument('--state', type=str, required=True)
    p.add_argument('--out', type=str, default=None)
    p.add_argument('--hadamard', action='store_true', help='use the element-wise path (GIO only)')
    p.set_defaults(func=cmd_channel)

    p = subparsers.add_parser('verify', help='randomized check of the factorization law over GIO')
    p.add_argument('--d', type=int, required=True)
    p.add_argument('--trials', type=int, required=True)
    p.add_argument('--seed', type=int, required=True)
    p.add_argument('--tolerance', type=float, default=None)
    p.add_argument('--workers', type=int, default=None)
    p.add_argument('--out', type=str, default=None, help='write the summary JSON here')
    p.set_defaults(func=cmd_verify)

    p = subparsers.add_parser('tomo-simulate', help='simulate tomography counts for a state')
    p.add_argument('--state', type=str, required=True)
    p.add_argument('--out', type=str, required=True)
    p.add_argument('--shots', type=int, default=None)
    p.add_argument('--background', type=float, default=None)
    p.add_argument('--seed', type=int, default=None)
    p.set_defaults(func=cmd_tomo_simulate)

    p = subparsers.add_parser('tomo-reconstruct', help='reconstruct rho_ij and G from counts')
    p.add_argument('--counts', type=str, required=True)
    p.add_argument('--out', type=str, default=None)
    p.add_argument('--resamples', type=int, default=0, help='bootstrap resamples (>= 100), 0 to skip')
    p.add_argument('--seed', type=int, default=None)
    p.add_argument('--psd-project', action='store_true')
    p.set_defaults(func=cmd_tomo_reconstruct)

    p = subparsers.add_parser('reproduce', help='write the figure tables')
    p.add_argument('--figure', type=str, required=True, choices=list(FIGURES))
    p.add_argument('--out', type=str, required=True, help='output directory')
    p.add_argument('--mode', type=str, default='exact', choices=['exact', 'shots'])
    p.add_argument('--shots', type=int, default=None)
    p.add_argument('--seed', type=int, default=None)
    p.add_argument('--format', type=str, default='csv', choices=['csv', 'json'])
    p.set_defaults(func=cmd_reproduce)
    return parser


def main(argv=None):
    args = build_parser().parse_args(argv)
    setup_logging(getattr(logging, args.log_level.upper()))
    try:
        return args.func(args)
    except (QStateError, ValueError, AssertionError, WorkerError) as e:
        print(f'error: {e}', file=sys.stderr)
        return EXIT_VALIDATION
    except OSError as e:
        print(f'I/O error: {e}', file=sys.stderr)
        return EXIT_IO


if __name__ == '__main__':
    sys.exit(main())
