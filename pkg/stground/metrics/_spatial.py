import logging
from collections import defaultdict

import numpy as np

from .._constants import Metrics
from ..datamodel import point_in_box, rasterize_box
from ..exceptions import NoSamplesError
from ._ap import average_precision, mask_iou
from ._report import EvalReport


def _by_video(items):
    return {item.video_id: item for item in items}


def pointing_game(preds, gts):
    """
    Fraction of annotated frames whose predicted argmax point lies inside the
    closed GT box. Frames with a prediction record but no point are misses;
    frames the predictions never mention are not evaluated.
    """

    preds = _by_video(preds)
    hits, misses = defaultdict(int), defaultdict(int)
    for gt in sorted(gts, key=lambda g: g.video_id):
        pred = preds.get(gt.video_id)
        if pred is None:
            continue
        records = {f.frame_index: f for f in pred.frames}
        for frame, (class_id, box) in sorted(gt.frame_boxes().items()):
            record = records.get(frame)
            if record is None:
                continue
            if record.argmax_point is not None and point_in_box(record.argmax_point, box):
                hits[class_id] += 1
            else:
                misses[class_id] += 1

    total_hits, total_misses = sum(hits.values()), sum(misses.values())
    if total_hits + total_misses == 0:
        raise NoSamplesError(Metrics.POINTING_GAME)
    classes = sorted(set(hits) | set(misses))
    accuracy = total_hits/(total_hits + total_misses)
    logging.info(f"pointing game: {total_hits}/{total_hits + total_misses} hits")
    return EvalReport(
        Metrics.POINTING_GAME,
        {'accuracy': accuracy},
        {c: hits[c]/(hits[c] + misses[c]) for c in classes},
        {'hits': total_hits, 'misses': total_misses},
    )


def spatial_map(preds, gts, iou_thr=0.3):
    """
    Frame-level detection AP per class: every non-background frame record is
    a detection ranked by its score, correct when its mask overlaps the
    rasterized GT box of the same class with IoU above `iou_thr`.
    """

    gts = _by_video(gts)
    num_gt = defaultdict(int)
    for gt in gts.values():
        for class_id, _ in gt.frame_boxes().values():
            num_gt[class_id] += 1
    if not num_gt:
        raise NoSamplesError(Metrics.SPATIAL_MAP)

    detections = defaultdict(list)
    for pred in preds:
        gt = gts.get(pred.video_id)
        boxes = gt.frame_boxes() if gt is not None else {}
        for record in pred.frames:
            if record.is_background:
                continue
            correct = False
            if record.frame_index in boxes:
                class_id, box = boxes[record.frame_index]
                if class_id == record.label:
                    cells = rasterize_box(box, len(record.mask), gt.width, gt.height)
                    correct = mask_iou(record.mask, cells) > iou_thr
            detections[record.label].append((-record.score, pred.video_id, record.frame_index, correct))

    per_class, tp, fp = {}, 0, 0
    for class_id in sorted(num_gt):
        ranked = sorted(detections.get(class_id, []))
        hits = [d[3] for d in ranked]
        tp += sum(hits)
        fp += len(hits) - sum(hits)
        per_class[class_id] = average_precision(hits, num_gt[class_id])
    value = float(np.mean(list(per_class.values())))
    logging.info(f"spatial mAP@{iou_thr}: {value:.4f}")
    return EvalReport(
        Metrics.SPATIAL_MAP, {'mAP': value}, per_class,
        {'tp': tp, 'fp': fp, 'gt': sum(num_gt.values())}, {'iou': iou_thr},
    )


def iou_pointing_game(preds, gts):
    """
    Per class, frames predicted as the class and pointing inside its GT box,
    over the union of frames predicted as or annotated with the class;
    averaged over the classes present in the GT.
    """

    preds = _by_video(preds)
    tp, union = defaultdict(int), defaultdict(int)
    for gt in gts:
        boxes = gt.frame_boxes()
        gt_frames = defaultdict(set)
        for frame, (class_id, _) in boxes.items():
            gt_frames[class_id].add(frame)
        pred_frames = defaultdict(set)
        records = {}
        pred = preds.get(gt.video_id)
        if pred is not None:
            for record in pred.frames:
                records[record.frame_index] = record
                if not record.is_background:
                    pred_frames[record.label].add(record.frame_index)
        for class_id in set(gt_frames) | set(pred_frames):
            union[class_id] += len(gt_frames[class_id] | pred_frames[class_id])
            for frame in gt_frames[class_id] & pred_frames[class_id]:
                point = records[frame].argmax_point
                if point is not None and point_in_box(point, boxes[frame][1]):
                    tp[class_id] += 1

    classes = sorted({class_id for gt in gts for class_id, _ in gt.frame_boxes().values()})
    if not classes:
        raise NoSamplesError(Metrics.IOU_POINTING_GAME)
    per_class = {c: tp[c]/union[c] for c in classes}
    value = float(np.mean(list(per_class.values())))
    return EvalReport(
        Metrics.IOU_POINTING_GAME, {'score': value}, per_class,
        {'tp': sum(tp[c] for c in classes), 'union': sum(union[c] for c in classes)},
    )
