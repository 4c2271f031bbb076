import json
import logging
from collections import defaultdict
from pathlib import Path

from .._constants import FORMAT_VERSION, Metrics
from .._utils import iter_lines, write_json, write_jsonl
from ..benchtools import (
    aggregate_frame,
    build_gt,
    build_single_action_clips,
    load_keypoints,
    partition_widespread,
    qc_agreement,
    qc_sample_size,
    widespread_fraction,
)
from ..datamodel import (
    LabelBank,
    SpatioTemporalPrediction,
    load_clips,
    load_gt,
    load_predictions,
    save_clips,
    save_gt,
    save_predictions,
    synth_generate,
)
from ..exceptions import ConfigError, NoSamplesError, ParseError
from ..groundnet import ModelParams, Trainer, load_params, save_params
from ..infer import ground_clip, ground_videos
from ..metrics import evaluate, format_table, load_reports, merge_reports, restrict, save_reports, threshold_sweep
from ..otselect import planted_recall, select_frames


def _out(run, name):
    path = Path(run.output)/name
    path.parent.mkdir(parents=True, exist_ok=True)
    return path


def _header(run):
    return {'kind': 'header', 'format_version': FORMAT_VERSION, 'run_config': run.to_dict()}


def _initial_params(run, clips):
    if run.inputs.get('params'):
        return load_params(run.inputs['params'])
    return ModelParams.random(clips[0].dim, run.train.proj_dim, run.train.seed)


def synth(args, run):
    dataset = synth_generate(run.synth)
    echo = run.to_dict()
    save_clips(dataset.clips, _out(run, 'clips.jsonl'), echo)
    save_gt(dataset.clip_gt, _out(run, 'clip_gt.jsonl'), echo)
    save_clips(dataset.videos, _out(run, 'videos.jsonl'), echo)
    save_gt(dataset.gt, _out(run, 'gt.jsonl'), echo)
    dataset.bank.save(_out(run, 'bank.json'), echo)
    print(f"{dataset} written to {run.output}")


def select(args, run):
    clips = sorted(load_clips(run.inputs['clips']), key=lambda c: c.clip_id)
    if not clips:
        raise NoSamplesError('select')
    params = _initial_params(run, clips)
    gts = {g.video_id: g for g in load_gt(run.inputs['clip_gt'])} if run.inputs.get('clip_gt') else {}

    rows, recalls = [], []
    for clip in clips:
        frames = select_frames(clip, args.strategy, run.train.T, params, run.sinkhorn, run.attention)
        row = {'clip_id': clip.clip_id, 'video_id': clip.video_id, 'strategy': args.strategy, 'frames': frames}
        if clip.video_id in gts:
            row['recall'] = planted_recall(frames, gts[clip.video_id])
            recalls.append(row['recall'])
        rows.append(row)
    write_jsonl(_out(run, 'selection.jsonl'), [_header(run)] + rows)
    if recalls:
        mean = sum(recalls)/len(recalls)
        write_json(_out(run, 'selection_summary.json'), {
            'format_version': FORMAT_VERSION, 'run_config': run.to_dict(),
            'strategy': args.strategy, 'clips': len(recalls), 'mean_recall': mean,
        })
        print(f"{args.strategy}: mean planted-frame recall {mean:.4f} over {len(recalls)} clips")


def train(args, run):
    clips = load_clips(run.inputs['clips'])
    if not clips:
        raise NoSamplesError('train')
    params = _initial_params(run, clips)
    if run.inputs.get('bank'):
        params.check_dim(LabelBank.load(run.inputs['bank']).dim)

    trainer = Trainer(run.train, run.attention, args.strategy, run.sinkhorn)

    @trainer.on_epoch_end
    def report_epoch(entry, _params):
        print(f"epoch {entry['epoch']}: loss {entry['loss_total']:.6f}")

    @trainer.on_handler_error
    def report_errors(errors):
        for e in errors:
            logging.error(f"training hook failed: {e}")

    result = trainer.fit(clips, params)
    save_params(result.params, _out(run, 'params.json'), run.to_dict())
    write_jsonl(_out(run, 'train_log.jsonl'), [_header(run)] + result.log)


def _trimmed_predictions(videos, gts, bank, params, run):
    by_video = defaultdict(list)
    for gt in gts:
        video = videos.get(gt.video_id)
        if video is None:
            continue
        for clip in build_single_action_clips(gt):
            pred = ground_clip(video, clip.class_id, clip.frames, bank, params, run.attention, run.infer, (gt.width, gt.height))
            action = range(clip.action_start, clip.action_end)
            by_video[gt.video_id].extend(f for f in pred.frames if f.frame_index in action)
    return [SpatioTemporalPrediction(video_id, frames) for video_id, frames in sorted(by_video.items())]


def infer(args, run):
    videos = {v.video_id: v for v in load_clips(run.inputs['videos'])}
    bank = LabelBank.load(run.inputs['bank'])
    params = load_params(run.inputs['params'])
    gts = load_gt(run.inputs['gt']) if run.inputs.get('gt') else []
    if (args.align or args.trimmed) and not gts:
        raise ConfigError('gt', None, 'a ground-truth file for --align and --trimmed')

    if args.trimmed:
        preds = _trimmed_predictions(videos, gts, bank, params, run)
    else:
        frame_sizes = {g.video_id: (g.width, g.height) for g in gts}
        transcripts = {g.video_id: g.ordered_transcript for g in gts} if args.align else None
        preds = ground_videos(
            videos.values(), bank, params, run.attention, run.infer,
            run.threads, frame_sizes, transcripts,
        )
    save_predictions(preds, _out(run, 'pred.jsonl'), run.to_dict())
    print(f"grounded {len(preds)} videos, {sum(len(p.segments) for p in preds)} segments")


def _metrics(value):
    metrics = [m.strip() for m in value.split(',') if m.strip()] if value else list(Metrics.ALL)
    for m in metrics:
        if m not in Metrics.ALL:
            raise ConfigError('metric', m, f"one of {Metrics.ALL}")
    return metrics


def _evaluate_all(metrics, preds, gts, args, dataset):
    reports = []
    for metric in metrics:
        try:
            reports.append(evaluate(metric, preds, gts, args.iou, args.vmap_thresholds, dataset))
        except NoSamplesError:
            logging.warning(f"skipping `{metric}` on `{dataset}`: nothing to evaluate")
    return reports


def eval_(args, run):
    metrics = _metrics(args.metric)
    preds = load_predictions(run.inputs['pred'])
    gts = load_gt(run.inputs['gt'])
    dataset = args.dataset or Path(run.inputs['gt']).stem

    reports = _evaluate_all(metrics, preds, gts, args, dataset)
    if args.tau_sweep:
        for tau, report in threshold_sweep(preds, gts, args.tau_sweep, args.vmap_thresholds).items():
            report.metric = f"{Metrics.VIDEO_MAP}/tau={tau:g}"
            report.dataset = dataset
            reports.append(report)
    if args.spread_split:
        wide, narrow = partition_widespread(gts, run.bench)
        for name, subset in (('widespread', wide), ('narrow', narrow)):
            sub_preds, sub_gts = restrict(preds, gts, subset)
            reports.extend(_evaluate_all(metrics, sub_preds, sub_gts, args, f"{dataset}/{name}"))
    if not reports:
        raise NoSamplesError(','.join(metrics))

    save_reports(reports, _out(run, 'report.json'), run.to_dict())
    table = format_table(merge_reports(reports))
    _out(run, 'report.txt').write_text(table + '\n', encoding='utf8')
    print(table)


def report(args, run):
    reports = [r for path in run.inputs['reports'] for r in load_reports(path)]
    table = merge_reports(reports)
    write_json(_out(run, 'table.json'), {
        'format_version': FORMAT_VERSION,
        'run_config': run.to_dict(),
        'rows': [
            {'dataset': dataset, 'metric': metric, 'values': values}
            for (dataset, metric), values in table.items()
        ],
    })
    text = format_table(table)
    _out(run, 'table.txt').write_text(text + '\n', encoding='utf8')
    print(text)


def annot_aggregate(args, run):
    rows = []
    for record in sorted(load_keypoints(run.inputs['annot']), key=lambda r: (r.video_id, r.class_id, r.frame_index)):
        rows.append({
            'video_id': record.video_id, 'frame_index': record.frame_index, 'class_id': record.class_id,
            **aggregate_frame(record, run.bench).to_dict(),
        })
    write_jsonl(_out(run, 'aggregates.jsonl'), [_header(run)] + rows)
    print(f"{sum(r['present'] for r in rows)}/{len(rows)} frames present")


def annot_bbox(args, run):
    gts = build_gt(load_keypoints(run.inputs['annot']), run.bench)
    save_gt(gts, _out(run, 'gt.jsonl'), run.to_dict())
    print(f"{sum(len(g.segments) for g in gts)} segments over {len(gts)} videos")


def annot_widespread(args, run):
    gts = load_gt(run.inputs['gt'])
    boxes = [b for g in gts for s in g.segments for b in s.boxes]
    wide, narrow = partition_widespread(gts, run.bench)
    summary = {
        'format_version': FORMAT_VERSION,
        'run_config': run.to_dict(),
        'box_fraction': widespread_fraction(boxes, run.bench),
        'widespread_segments': len(wide),
        'narrow_segments': len(narrow),
    }
    write_json(_out(run, 'widespread.json'), summary)
    print(f"widespread boxes: {summary['box_fraction']:.4f} ({len(wide)} widespread / {len(narrow)} narrow segments)")


def annot_sample_size(args, run):
    n = qc_sample_size(args.alpha, args.eps, args.p, args.N)
    write_json(_out(run, 'sample_size.json'), {
        'format_version': FORMAT_VERSION, 'run_config': run.to_dict(),
        'alpha': args.alpha, 'eps': args.eps, 'p': args.p, 'N': args.N, 'sample_size': n,
    })
    print(n)


def annot_clips(args, run):
    rows = [c.to_dict() for g in load_gt(run.inputs['gt']) for c in build_single_action_clips(g)]
    write_jsonl(_out(run, 'clips.jsonl'), [_header(run)] + rows)
    print(f"{len(rows)} single-action clips")


def annot_agreement(args, run):
    """Specialist file: one `{video_id, frame_index, class_id, present}` object per line."""
    specialist = {}
    path = run.inputs['specialist']
    for number, line in iter_lines(path):
        try:
            d = json.loads(line)
            if d.get('kind') == 'header':
                continue
            specialist[(d['video_id'], d['class_id'], d['frame_index'])] = bool(d['present'])
        except json.JSONDecodeError as e:
            raise ParseError(path, line=number, reason=e.msg)
        except (KeyError, AttributeError) as e:
            raise ParseError(path, line=number, reason=f"missing field {e}")
    aggregated = {
        (r.video_id, r.class_id, r.frame_index): aggregate_frame(r, run.bench).present
        for r in load_keypoints(run.inputs['annot'])
    }
    rates = qc_agreement(specialist, aggregated)
    write_json(_out(run, 'agreement.json'), {'format_version': FORMAT_VERSION, 'run_config': run.to_dict(), **rates})
    print(', '.join(f"{k} {v:.4f}" for k, v in sorted(rates.items())))


COMMANDS = {
    'synth': synth,
    'select': select,
    'train': train,
    'infer': infer,
    'eval': eval_,
    'report': report,
}

ANNOT_COMMANDS = {
    'aggregate': annot_aggregate,
    'bbox': annot_bbox,
    'widespread': annot_widespread,
    'sample-size': annot_sample_size,
    'clips': annot_clips,
    'agreement': annot_agreement,
}
