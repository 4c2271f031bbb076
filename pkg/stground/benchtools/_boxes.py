import logging
from collections import defaultdict

import numpy as np

from .._utils import label_runs
from ..datamodel import GtSegment, VideoGt, box_area
from ..exceptions import NoPointsError, NoSamplesError
from ._keypoints import aggregate_frame


MIN_EXTENT = 1.0


def points_to_bbox(points, width, height, cfg):
    """
    Hull of the points grown by `bbox_margin_frac` of W and H on each side,
    clamped to the frame. A degenerate box is widened to one pixel.
    """

    if not points:
        raise NoPointsError()
    pts = np.asarray(points, dtype=np.float64)
    mx, my = cfg.bbox_margin_frac*width, cfg.bbox_margin_frac*height
    x0, y0 = pts.min(axis=0) - (mx, my)
    x1, y1 = pts.max(axis=0) + (mx, my)
    x0, x1 = max(0.0, x0), min(width, x1)
    y0, y1 = max(0.0, y0), min(height, y1)
    if x1 - x0 < MIN_EXTENT:
        x1 = min(width, x0 + MIN_EXTENT)
        x0 = max(0.0, x1 - MIN_EXTENT)
    if y1 - y0 < MIN_EXTENT:
        y1 = min(height, y0 + MIN_EXTENT)
        y0 = max(0.0, y1 - MIN_EXTENT)
    return [float(x0), float(y0), float(x1), float(y1)]


def refine_boundaries(presence):
    """Maximal runs of present frames as half-open `(start, end)` intervals."""
    return [(start, end) for _, start, end in label_runs([bool(p) for p in presence], False)]


def widespread_fraction(boxes, cfg):
    if not boxes:
        raise NoSamplesError('widespread_fraction')
    wide = sum(1 for b in boxes if box_area(b) > cfg.widespread_area_A)
    return wide/len(boxes)


def partition_widespread(gts, cfg):
    """
    Splits GT segments by mean box area against `widespread_area_A`.
    Returns `(widespread, narrow)` sets of `(video_id, segment_index)`.
    """

    wide, narrow = set(), set()
    for gt in gts:
        for i, segment in enumerate(gt.segments):
            (wide if segment.mean_area > cfg.widespread_area_A else narrow).add((gt.video_id, i))
    return wide, narrow


def build_gt(records, cfg, num_frames=None):
    """
    Ground truth from keypoint records: per video and class, the
    majority-present frames form refined segments boxed frame by frame.
    `num_frames` maps video ids to their length (default: last annotated frame + 1).
    """

    num_frames = num_frames or {}
    by_video = defaultdict(lambda: defaultdict(dict))
    geometry = {}
    for record in records:
        by_video[record.video_id][record.class_id][record.frame_index] = record
        geometry[record.video_id] = (record.width, record.height)

    gts = []
    for video_id in sorted(by_video):
        width, height = geometry[video_id]
        last = max(f for frames in by_video[video_id].values() for f in frames) + 1
        length = num_frames.get(video_id, last)
        segments = []
        for class_id in sorted(by_video[video_id]):
            frames = by_video[video_id][class_id]
            aggregates = {f: aggregate_frame(r, cfg) for f, r in frames.items()}
            presence = [f in aggregates and aggregates[f].present for f in range(length)]
            for start, end in refine_boundaries(presence):
                boxes = [points_to_bbox(aggregates[f].points, width, height, cfg) for f in range(start, end)]
                segments.append(GtSegment(class_id, start, end, boxes))
        gts.append(VideoGt(video_id, width, height, length, segments))
        logging.info(f"{video_id}: {len(segments)} segments from {sum(len(v) for v in by_video[video_id].values())} annotated frames")
    return gts
