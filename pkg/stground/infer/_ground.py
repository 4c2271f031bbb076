import logging
from multiprocessing.pool import ThreadPool

import numpy as np

from .._constants import BACKGROUND
from .._utils import widen_float32
from ..datamodel import FrameRecord, SpatioTemporalPrediction, argmax_point
from ..groundnet import AttentionConfig, local_forward, rollout_heatmap
from ._align import aligned_labels
from ._config import InferConfig
from ._temporal import class_similarity, segments_from_labels, temporal_classify


def segment_heatmaps(video, frames, class_id, bank, params, attn_cfg=None):
    """
    T x N heatmaps of one class over the given frames. The text side is the
    whole bank vocabulary and the query is the class's own words.
    """

    attn_cfg = attn_cfg or AttentionConfig()
    vocabulary, positions = bank.vocabulary()
    out = local_forward(video, frames, params, attn_cfg, words=vocabulary)
    return rollout_heatmap(out['trace'], positions[class_id], attn_cfg.residual_weight)


def _frame_record(video_id, index, label, score, heatmap, cfg, frame_size):
    heatmap = widen_float32(heatmap)
    width, height = frame_size
    return FrameRecord(
        video_id, index, label, score, heatmap,
        argmax_point(heatmap, width, height), heatmap >= cfg.tau_spatial,
    )


def _background_record(video_id, index, score, num_cells):
    return FrameRecord(video_id, index, BACKGROUND, score, np.zeros(num_cells), None, np.zeros(num_cells, dtype=bool))


def ground_labels(video, labels, scores, bank, params, attn_cfg=None, cfg=None, frame_size=None):
    """Spatial grounding of every labeled run of a video whose frame labels are already decided."""

    cfg = cfg or InferConfig()
    frame_size = frame_size or (cfg.width, cfg.height)
    records = {}
    for segment in segments_from_labels(labels, scores, video.video_id):
        frames = list(segment.frames)
        heatmaps = segment_heatmaps(video, frames, segment.class_id, bank, params, attn_cfg)
        for i, f in enumerate(frames):
            records[f] = _frame_record(video.video_id, f, segment.class_id, scores[f], heatmaps[i], cfg, frame_size)
    for f, score in enumerate(scores):
        if f not in records:
            records[f] = _background_record(video.video_id, f, score, video.num_cells)
    return SpatioTemporalPrediction(video.video_id, list(records.values()))


def st_ground(video, bank, params, attn_cfg=None, cfg=None, frame_size=None, transcript=None):
    """
    Temporal classification followed by per-segment rollout heatmaps. With a
    `transcript` the frame labels come from the monotone alignment instead
    of thresholding.
    """

    if transcript is not None:
        labels, scores = aligned_labels(video, transcript, bank, params, cfg, attn_cfg)
    else:
        labels, scores = temporal_classify(video, bank, params, cfg, attn_cfg)
    prediction = ground_labels(video, labels, scores, bank, params, attn_cfg, cfg, frame_size)
    logging.info(f"{video.video_id}: {len(prediction.segments)} segments, {prediction.voxel_count} voxels")
    return prediction


def ground_clip(video, class_id, frames, bank, params, attn_cfg=None, cfg=None, frame_size=None):
    """Grounds a known class over given frames (single-action clips); no background filtering."""

    cfg = cfg or InferConfig()
    frame_size = frame_size or (cfg.width, cfg.height)
    frames = list(frames)
    sims = class_similarity(video.subset(frames), bank, params, attn_cfg)[:, class_id]
    heatmaps = segment_heatmaps(video, frames, class_id, bank, params, attn_cfg)
    records = [
        _frame_record(video.video_id, f, class_id, float(sims[i]), heatmaps[i], cfg, frame_size)
        for i, f in enumerate(frames)
    ]
    return SpatioTemporalPrediction(video.video_id, records)


def ground_videos(videos, bank, params, attn_cfg=None, cfg=None, threads=1, frame_sizes=None, transcripts=None):
    """
    Runs `st_ground` over independent videos on a thread pool. Results come
    back sorted by video id whatever the number of threads.
    """

    frame_sizes = frame_sizes or {}
    transcripts = transcripts or {}

    def work(video):
        return st_ground(
            video, bank, params, attn_cfg, cfg,
            frame_sizes.get(video.video_id), transcripts.get(video.video_id),
        )

    videos = sorted(videos, key=lambda v: v.video_id)
    if threads <= 1 or len(videos) <= 1:
        return [work(v) for v in videos]
    with ThreadPool(threads) as pool:
        return pool.map(work, videos)
