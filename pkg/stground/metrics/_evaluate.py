import numpy as np

from .._constants import BACKGROUND, Metrics
from ..datamodel import FrameRecord, SpatioTemporalPrediction, VideoGt
from ..exceptions import ConfigError
from ._spatial import iou_pointing_game, pointing_game, spatial_map
from ._temporal import temporal_metrics
from ._video import DEFAULT_THRESHOLDS, video_map


def evaluate(metric, preds, gts, iou=0.3, vmap_thresholds=DEFAULT_THRESHOLDS, dataset=''):
    if metric == Metrics.POINTING_GAME:
        report = pointing_game(preds, gts)
    elif metric == Metrics.SPATIAL_MAP:
        report = spatial_map(preds, gts, iou)
    elif metric == Metrics.VIDEO_MAP:
        report = video_map(preds, gts, vmap_thresholds)
    elif metric == Metrics.IOU_POINTING_GAME:
        report = iou_pointing_game(preds, gts)
    elif metric == Metrics.TEMPORAL:
        report = temporal_metrics(preds, gts)
    else:
        raise ConfigError('metric', metric, f"one of {Metrics.ALL}")
    report.dataset = dataset
    return report


def restrict(preds, gts, segments):
    """
    Keeps only the GT segments in `segments` (a set of `(video_id, index)`)
    and, in the predictions, only the labels of classes those segments carry
    in each video. Other predicted frames become background.
    """

    kept_gts, kept_classes = [], {}
    for gt in gts:
        kept = [s for i, s in enumerate(gt.segments) if (gt.video_id, i) in segments]
        kept_classes[gt.video_id] = {s.class_id for s in kept}
        kept_gts.append(VideoGt(gt.video_id, gt.width, gt.height, gt.num_frames, kept))

    kept_preds = []
    for pred in preds:
        classes = kept_classes.get(pred.video_id, set())
        frames = [
            f if f.label in classes or f.is_background else FrameRecord(
                f.video_id, f.frame_index, BACKGROUND, f.score, np.zeros_like(f.heatmap), None, np.zeros_like(f.mask),
            )
            for f in pred.frames
        ]
        kept_preds.append(SpatioTemporalPrediction(pred.video_id, frames))
    return kept_preds, kept_gts
