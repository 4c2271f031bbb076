import argparse
import logging
import sys
from os import getenv
from pathlib import Path

from .. import __version__
from .._constants import Optimizers, Poolings, SelectionStrategies
from .._utils import parse_float_list
from ..exceptions import ConfigError, GroundingError
from ..logging import level_from_name, setup_logger
from ..metrics import DEFAULT_THRESHOLDS
from ._commands import ANNOT_COMMANDS, COMMANDS
from ._config import LOG_LEVEL_ENV, RunConfig, load_env


def _float_list(value):
    try:
        return parse_float_list(value)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got `{value}`")


def _name_list(value):
    return [v.strip() for v in value.split(',') if v.strip()]


def _common(output_required=True):
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument('-o', '--output', required=output_required, help='output directory; nothing is written outside it')
    common.add_argument('--config', help='JSON file with config sections (synth, sinkhorn, attention, train, infer, bench)')
    common.add_argument('--seed', type=int, help='seed for every random stream (default 7)')
    common.add_argument('--threads', type=int, help=f"worker threads (fallback env STGROUND_THREADS, default 1)")
    common.add_argument('--log-level', help=f"DEBUG, INFO, WARNING... (fallback env {LOG_LEVEL_ENV})")
    common.add_argument('--log-file', help='log file name, created inside the output directory')
    return common


def _sinkhorn_flags(p):
    p.add_argument('--epsilon', dest='sinkhorn.epsilon', type=float, help='entropic smoothness (default 0.1)')
    p.add_argument('--iters', dest='sinkhorn.max_iters', type=int, help='max scaling iterations (default 500)')
    p.add_argument('--tol', dest='sinkhorn.tol', type=float, help='marginal tolerance (default 1e-6)')
    p.add_argument('--log-domain', dest='sinkhorn.log_domain', action='store_const', const=True, help='scale in the log domain')


def _attention_flags(p):
    p.add_argument('--stack', dest='attention.stack', type=_name_list, help='comma-separated layers ending with cross (default cross,self,cross)')
    p.add_argument('--residual-weight', dest='attention.residual_weight', type=float, help='rollout identity weight (default 0.5)')
    p.add_argument('--video-pooling', dest='attention.video_pooling', choices=Poolings.VIDEO)
    p.add_argument('--text-pooling', dest='attention.text_pooling', choices=Poolings.TEXT)


def _strategy_flag(p):
    p.add_argument('--strategy', choices=SelectionStrategies.ALL, default=SelectionStrategies.SINKHORN)


def build_parser():
    parser = argparse.ArgumentParser(prog='stground', description='Self-supervised spatio-temporal grounding on precomputed features.')
    parser.add_argument('--version', action='version', version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest='command', required=True)
    common = _common()

    p = sub.add_parser('synth', parents=[common], help='generate a synthetic dataset')
    for flag, field, kind in (
        ('--classes', 'classes', int), ('--train-clips', 'train_clips', int), ('--videos', 'videos', int),
        ('--frames-per-video', 'frames_per_video', int), ('--U', 'U', int), ('--N', 'N', int),
        ('--dim', 'dim', int), ('--signal', 'signal', float), ('--noise', 'noise', float),
        ('--planted-cells', 'planted_cells', int), ('--words-per-clip', 'words_per_clip', int),
        ('--sentence-signal', 'sentence_signal', float), ('--segments-per-video', 'segments_per_video', int),
        ('--width', 'width', float), ('--height', 'height', float), ('--fps', 'fps', float),
    ):
        p.add_argument(flag, dest=f"synth.{field}", type=kind)
    p.add_argument('--T', dest='synth.T', type=int, help='planted frames per training clip')
    p.set_defaults(func=COMMANDS['synth'])

    p = sub.add_parser('select', parents=[common], help='select training frames per clip')
    p.add_argument('--clips', dest='input.clips', required=True)
    p.add_argument('--params', dest='input.params', help='projections (default: seeded random)')
    p.add_argument('--clip-gt', dest='input.clip_gt', help='planted segments, to report selection recall')
    p.add_argument('--T', dest='train.T', type=int, help='frames to select (default 8)')
    p.add_argument('--proj-dim', dest='train.proj_dim', type=int)
    _strategy_flag(p)
    _sinkhorn_flags(p)
    _attention_flags(p)
    p.set_defaults(func=COMMANDS['select'])

    p = sub.add_parser('train', parents=[common], help='train the four projections')
    p.add_argument('--clips', dest='input.clips', required=True)
    p.add_argument('--bank', dest='input.bank')
    p.add_argument('--params', dest='input.params', help='initial projections (default: seeded random)')
    p.add_argument('--batch-size', dest='train.batch_size', type=int)
    p.add_argument('--margin', dest='train.margin', type=float)
    p.add_argument('--lr', dest='train.learning_rate', type=float)
    p.add_argument('--epochs', dest='train.epochs', type=int)
    p.add_argument('--no-global', dest='train.use_global', action='store_const', const=False)
    p.add_argument('--no-local', dest='train.use_local', action='store_const', const=False)
    p.add_argument('--optimizer', dest='train.optimizer', choices=Optimizers.ALL)
    p.add_argument('--T', dest='train.T', type=int)
    p.add_argument('--proj-dim', dest='train.proj_dim', type=int)
    p.add_argument('--reselect-every-epoch', dest='train.reselect_every_epoch', action='store_const', const=True)
    p.add_argument('--no-reselect-every-epoch', dest='train.reselect_every_epoch', action='store_const', const=False)
    _strategy_flag(p)
    _sinkhorn_flags(p)
    _attention_flags(p)
    p.set_defaults(func=COMMANDS['train'])

    p = sub.add_parser('infer', parents=[common], help='ground untrimmed videos')
    p.add_argument('--videos', dest='input.videos', required=True)
    p.add_argument('--bank', dest='input.bank', required=True)
    p.add_argument('--params', dest='input.params', required=True)
    p.add_argument('--gt', dest='input.gt', help='ground truth for frame geometry, transcripts and trimmed clips')
    p.add_argument('--theta', dest='infer.theta_temporal', type=float)
    p.add_argument('--tau', dest='infer.tau_spatial', type=float)
    p.add_argument('--bg-score', dest='infer.background_score', type=float)
    p.add_argument('--width', dest='infer.width', type=float)
    p.add_argument('--height', dest='infer.height', type=float)
    mode = p.add_mutually_exclusive_group()
    mode.add_argument('--align', action='store_true', help='label frames by monotone alignment to the GT transcript')
    mode.add_argument('--trimmed', action='store_true', help='ground single-action clips cut around GT segments')
    _attention_flags(p)
    p.set_defaults(func=COMMANDS['infer'])

    p = sub.add_parser('eval', parents=[common], help='evaluate predictions')
    p.add_argument('--pred', dest='input.pred', required=True)
    p.add_argument('--gt', dest='input.gt', required=True)
    p.add_argument('--metric', help='comma-separated among pg, smap, vmap, ioupg, temporal (default all)')
    p.add_argument('--iou', type=float, default=0.3)
    p.add_argument('--vmap-thresholds', type=_float_list, default=list(DEFAULT_THRESHOLDS))
    p.add_argument('--tau-sweep', type=_float_list, help='recompute masks at these spatial thresholds')
    p.add_argument('--spread-split', action='store_true', help='also report widespread and narrow actions separately')
    p.add_argument('--widespread-area', dest='bench.widespread_area_A', type=float)
    p.add_argument('--dataset', help='dataset name in the report (default: GT file stem)')
    p.set_defaults(func=COMMANDS['eval'])

    p = sub.add_parser('annot', help='benchmark annotation tools')
    annot = p.add_subparsers(dest='annot_command', required=True)
    bench_common = argparse.ArgumentParser(add_help=False)
    bench_common.add_argument('--majority-k', dest='bench.majority_k', type=int)
    bench_common.add_argument('--margin-frac', dest='bench.bbox_margin_frac', type=float)
    bench_common.add_argument('--widespread-area', dest='bench.widespread_area_A', type=float)

    a = annot.add_parser('aggregate', parents=[common, bench_common], help='majority vote per frame')
    a.add_argument('--annot', dest='input.annot', required=True)
    a = annot.add_parser('bbox', parents=[common, bench_common], help='ground truth boxes from keypoints')
    a.add_argument('--annot', dest='input.annot', required=True)
    a = annot.add_parser('widespread', parents=[common, bench_common], help='share of boxes above the area threshold')
    a.add_argument('--gt', dest='input.gt', required=True)
    a = annot.add_parser('sample-size', parents=[common], help='QC sample size with finite population correction')
    a.add_argument('--alpha', type=float, default=0.95)
    a.add_argument('--eps', type=float, default=0.03)
    a.add_argument('--p', type=float, default=0.5)
    a.add_argument('--N', type=int, default=26987)
    a = annot.add_parser('clips', parents=[common], help='single-action clips around GT segments')
    a.add_argument('--gt', dest='input.gt', required=True)
    a = annot.add_parser('agreement', parents=[common, bench_common], help='aggregated presence vs a specialist')
    a.add_argument('--annot', dest='input.annot', required=True)
    a.add_argument('--specialist', dest='input.specialist', required=True)
    for name, func in ANNOT_COMMANDS.items():
        annot.choices[name].set_defaults(func=func)

    p = sub.add_parser('report', parents=[common], help='merge evaluation reports into one table')
    p.add_argument('reports', nargs='+')
    p.set_defaults(func=COMMANDS['report'])
    return parser


def _missing_inputs(args):
    paths = []
    for key, value in vars(args).items():
        if key.startswith('input.') and value is not None:
            paths.extend(value if isinstance(value, list) else [value])
    if getattr(args, 'config', None):
        paths.append(args.config)
    return [p for p in paths if not Path(p).is_file()]


def main(argv=None):
    load_env()
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return e.code

    if getattr(args, 'reports', None):
        setattr(args, 'input.reports', args.reports)
    setup_logger(
        level_from_name(args.log_level or getenv(LOG_LEVEL_ENV)),
        file_name=args.log_file, log_dir=args.output,
    )

    missing = _missing_inputs(args)
    if missing:
        print(f"error: input file `{missing[0]}` not found", file=sys.stderr)
        return 1
    try:
        run = RunConfig.from_args(args)
        args.func(args, run)
    except ConfigError as e:
        print(f"error: {e}", file=sys.stderr)
        return 2
    except GroundingError as e:
        print(f"error: {e}", file=sys.stderr)
        return 1
    except OSError as e:
        print(f"error: {e}", file=sys.stderr)
        return 1
    logging.info(f"`{run.subcommand}` finished")
    return 0
