import logging
from collections import defaultdict

import numpy as np

from .._constants import Metrics
from ..datamodel import FrameRecord, SpatioTemporalPrediction
from ..exceptions import NoSamplesError
from ._ap import average_precision, voxel_iou
from ._report import EvalReport


DEFAULT_THRESHOLDS = (0.1, 0.2, 0.3, 0.4, 0.5)


def _num_cells(pred):
    for record in pred.frames:
        return len(record.mask)
    return 0


def video_map(preds, gts, iou_thresholds=DEFAULT_THRESHOLDS):
    """
    Tube-level AP per class and IoU threshold. Predicted segments are ranked
    by confidence, ties by `(video_id, start)`, and greedily matched one to
    one: each takes the unmatched GT tube of its class and video with the
    highest voxel IoU, and is a true positive when that IoU reaches the
    threshold. The mask grid comes from the predictions.
    """

    preds = {p.video_id: p for p in preds}
    gt_tubes = defaultdict(list)
    for gt in gts:
        pred = preds.get(gt.video_id)
        num_cells = _num_cells(pred) if pred is not None else 0
        for i, segment in enumerate(gt.segments):
            tube = gt.tube(segment, num_cells) if num_cells else set()
            gt_tubes[segment.class_id].append((gt.video_id, i, tube))
    if not gt_tubes:
        raise NoSamplesError(Metrics.VIDEO_MAP)

    detections = defaultdict(list)
    for pred in preds.values():
        for segment in pred.segments:
            detections[segment.class_id].append(
                (-segment.confidence, pred.video_id, segment.start, pred.tube(segment))
            )

    values, per_class, counts = {}, {}, {}
    for thr in iou_thresholds:
        aps = {}
        tp_total = 0
        for class_id in sorted(gt_tubes):
            matched = set()
            hits = []
            for _, video_id, _, tube in sorted(detections.get(class_id, []), key=lambda d: d[:3]):
                best, best_iou = None, -1.0
                for video, i, gt_tube in gt_tubes[class_id]:
                    if video != video_id or (video, i) in matched:
                        continue
                    iou = voxel_iou(tube, gt_tube)
                    if iou > best_iou:
                        best, best_iou = (video, i), iou
                hit = best is not None and best_iou >= thr
                if hit:
                    matched.add(best)
                hits.append(hit)
            tp_total += sum(hits)
            aps[class_id] = average_precision(hits, len(gt_tubes[class_id]))
        key = f"{thr:g}"
        values[key] = float(np.mean(list(aps.values())))
        per_class.update({f"{c}@{key}": ap for c, ap in aps.items()})
        counts[f"tp@{key}"] = tp_total
        logging.info(f"video mAP@{key}: {values[key]:.4f}")
    counts['gt'] = sum(len(t) for t in gt_tubes.values())
    counts['detections'] = sum(len(d) for d in detections.values())
    return EvalReport(Metrics.VIDEO_MAP, values, per_class, counts, {'iou_thresholds': list(iou_thresholds)})


def threshold_sweep(preds, gts, taus, iou_thresholds=DEFAULT_THRESHOLDS):
    """
    Video mAP with masks recomputed from the stored heatmaps at each spatial
    threshold. Returns `{tau: EvalReport}`.
    """

    reports = {}
    for tau in taus:
        rethresholded = []
        for pred in preds:
            frames = [
                f if f.is_background else FrameRecord(
                    f.video_id, f.frame_index, f.label, f.score, f.heatmap, f.argmax_point, f.heatmap >= tau,
                )
                for f in pred.frames
            ]
            rethresholded.append(SpatioTemporalPrediction(pred.video_id, frames))
        report = video_map(rethresholded, gts, iou_thresholds)
        report.config['tau'] = tau
        reports[tau] = report
    return reports
