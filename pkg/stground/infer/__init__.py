from ._config import InferConfig
from ._temporal import (
    class_globals,
    class_similarity,
    labels_from_segments,
    segments_from_labels,
    temporal_classify,
)
from ._align import align_transcript, aligned_labels, alignment_score, transcript_similarity
from ._ground import ground_clip, ground_labels, ground_videos, segment_heatmaps, st_ground
