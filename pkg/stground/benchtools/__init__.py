from ._config import BenchConfig
from ._keypoints import (
    AnnotatorEntry,
    FrameAggregate,
    KeypointRecord,
    aggregate_frame,
    load_keypoints,
    save_keypoints,
)
from ._boxes import build_gt, partition_widespread, points_to_bbox, refine_boundaries, widespread_fraction
from ._quality import qc_agreement, qc_sample_size
from ._clips import SingleActionClip, build_single_action_clips
