import numpy as np

from .._constants import BACKGROUND, Poolings
from .._utils import label_runs
from ..datamodel import PredictedSegment
from ..groundnet import frame_globals, project_globals
from ._config import InferConfig


def _as_clips(video):
    if isinstance(video, (list, tuple)):
        return list(video)
    return [video]


def class_globals(bank, text_pooling=Poolings.CLS):
    if text_pooling == Poolings.MAX:
        return np.stack([np.max(np.stack(c.words), axis=0) for c in bank.classes])
    return bank.sentences


def class_similarity(video, bank, params, attn_cfg=None):
    """Frames x classes cosines of projected frame globals and projected class sentences."""
    video_pooling = attn_cfg.video_pooling if attn_cfg else Poolings.CLS
    text_pooling = attn_cfg.text_pooling if attn_cfg else Poolings.CLS
    params.check_dim(bank.dim)
    classes = project_globals(class_globals(bank, text_pooling), params.W_g)
    sims = []
    for clip in _as_clips(video):
        params.check_dim(clip.dim)
        frames = project_globals(frame_globals(clip, range(clip.num_frames), video_pooling), params.W_f)
        sims.append(frames @ classes.T)
    return np.clip(np.concatenate(sims, axis=0), -1.0, 1.0)


def temporal_classify(video, bank, params, cfg=None, attn_cfg=None):
    """
    Labels each frame with its most similar class, or BACKGROUND when the
    best cosine is below `theta_temporal`. `video` is one clip or an ordered
    list of clips. Returns `(labels, best_scores)`.
    """

    cfg = cfg or InferConfig()
    sims = class_similarity(video, bank, params, attn_cfg)
    best = np.argmax(sims, axis=1)
    scores = sims[np.arange(len(best)), best]
    labels = [int(c) if s >= cfg.theta_temporal else BACKGROUND for c, s in zip(best, scores)]
    return labels, [float(s) for s in scores]


def segments_from_labels(labels, scores=None, video_id=''):
    """Maximal non-background runs; confidence is the mean score over the run (0 without scores)."""
    segments = []
    for class_id, start, end in label_runs(labels, BACKGROUND):
        confidence = float(np.mean(scores[start:end])) if scores is not None else 0.0
        segments.append(PredictedSegment(video_id, class_id, start, end, confidence))
    return segments


def labels_from_segments(segments, num_frames):
    labels = [BACKGROUND]*num_frames
    for s in segments:
        labels[s.start:s.end] = [s.class_id]*(s.end - s.start)
    return labels
