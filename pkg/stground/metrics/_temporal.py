from collections import defaultdict

import numpy as np

from .._constants import BACKGROUND, Metrics
from ..exceptions import NoSamplesError
from ._ap import interval_iod_jaccard
from ._report import EvalReport


def iod_jaccard(pred_segments, gt_segments):
    """
    Segments are `(video_id, class_id, start, end)` tuples. Each GT instance
    is matched to the same-class prediction in its video with the largest
    overlap (earliest start on ties); unmatched instances score 0.
    """

    by_key = defaultdict(list)
    for video_id, class_id, start, end in pred_segments:
        by_key[(video_id, class_id)].append((start, end))

    instances = []
    for video_id, class_id, start, end in sorted(gt_segments):
        best, best_overlap = None, 0
        for det in sorted(by_key.get((video_id, class_id), [])):
            overlap = min(end, det[1]) - max(start, det[0])
            if overlap > best_overlap:
                best, best_overlap = det, overlap
        iod, jaccard = interval_iod_jaccard((start, end), best) if best is not None else (0.0, 0.0)
        instances.append({
            'video_id': video_id, 'class_id': class_id, 'start': start, 'end': end,
            'iod': iod, 'jaccard': jaccard,
        })
    return {
        'instances': instances,
        'iod': float(np.mean([i['iod'] for i in instances])) if instances else 0.0,
        'jaccard': float(np.mean([i['jaccard'] for i in instances])) if instances else 0.0,
    }


def frame_accuracy(preds, gts):
    """Mean over frames of label agreement, background included; frames without a prediction count as background."""
    preds = {p.video_id: p for p in preds}
    correct = total = 0
    for gt in gts:
        pred = preds.get(gt.video_id)
        labels = pred.labels() if pred is not None else {}
        for frame, label in enumerate(gt.frame_labels()):
            correct += labels.get(frame, BACKGROUND) == label
            total += 1
    return correct, total


def temporal_metrics(preds, gts):
    gt_segments = [(g.video_id, s.class_id, s.start_frame, s.end_frame) for g in gts for s in g.segments]
    if not gt_segments:
        raise NoSamplesError(Metrics.TEMPORAL)
    pred_segments = [(s.video_id, s.class_id, s.start, s.end) for p in preds for s in p.segments]
    result = iod_jaccard(pred_segments, gt_segments)
    correct, total = frame_accuracy(preds, gts)

    per_class = {}
    for class_id in sorted({i['class_id'] for i in result['instances']}):
        per_class[f"{class_id}/jaccard"] = float(np.mean(
            [i['jaccard'] for i in result['instances'] if i['class_id'] == class_id]
        ))
    return EvalReport(
        Metrics.TEMPORAL,
        {'iod': result['iod'], 'jaccard': result['jaccard'], 'mof': correct/total},
        per_class,
        {'instances': len(result['instances']), 'detections': len(pred_segments), 'frames': total},
    )
