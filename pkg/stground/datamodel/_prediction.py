from collections import defaultdict

import numpy as np

from .._constants import BACKGROUND
from .._utils import float32_list, label_runs, widen_float32
from ..exceptions import SchemaError
from ._records import Record, load_jsonl, save_jsonl


class FrameRecord(Record):
    """Per-frame grounding output. Background frames carry an all-zero heatmap, no point and an empty mask."""

    def __init__(self, video_id, frame_index, label, score, heatmap, argmax_point, mask, source='<memory>'):
        self.video_id = str(video_id)
        self.frame_index = int(frame_index)
        self.label = int(label)
        self.score = float(score)
        self.heatmap = np.asarray(heatmap, dtype=np.float64)
        self.argmax_point = None if argmax_point is None else (float(argmax_point[0]), float(argmax_point[1]))
        self.mask = np.asarray(mask, dtype=bool)
        self.validate(source)

    def __repr__(self):
        return f"FrameRecord(video_id='{self.video_id}', frame_index={self.frame_index}, label={self.label})"

    @property
    def is_background(self):
        return self.label == BACKGROUND

    def validate(self, source='<memory>'):
        if self.heatmap.ndim != 1 or self.mask.shape != self.heatmap.shape:
            raise SchemaError(source, 'heatmap and mask must both have N entries')
        if np.any(self.heatmap < 0) or np.any(self.heatmap > 1):
            raise SchemaError(source, 'heatmap scores must lie in [0, 1]')
        if not np.isfinite(self.score):
            raise SchemaError(source, 'score must be finite')
        if self.label != BACKGROUND and self.label < 0:
            raise SchemaError(source, f"invalid label {self.label}")

    def to_dict(self):
        return {
            'video_id': self.video_id,
            'frame_index': self.frame_index,
            'label': self.label,
            'score': float(widen_float32(self.score)),
            'heatmap': float32_list(self.heatmap),
            'argmax_point': None if self.argmax_point is None else list(self.argmax_point),
            'mask': [bool(m) for m in self.mask],
        }

    @classmethod
    def from_dict(cls, d, source='<memory>', line=None):
        req = lambda field: cls.require(d, field, source, line)
        return cls(
            req('video_id'), req('frame_index'), req('label'), req('score'),
            widen_float32(req('heatmap')), req('argmax_point'), req('mask'),
            source=source if line is None else f"{source}:{line}",
        )


class PredictedSegment:
    def __init__(self, video_id, class_id, start, end, confidence):
        self.video_id = str(video_id)
        self.class_id = int(class_id)
        self.start = int(start)
        self.end = int(end)
        self.confidence = float(confidence)

    def __repr__(self):
        return f"PredictedSegment(class_id={self.class_id}, frames=[{self.start},{self.end}), confidence={self.confidence:.4f})"

    @property
    def frames(self):
        return range(self.start, self.end)


class SpatioTemporalPrediction:
    """Frame records of one video, plus the segments derived from their labels."""

    def __init__(self, video_id, frames):
        self.video_id = str(video_id)
        self.frames = sorted(frames, key=lambda f: f.frame_index)
        self.segments = self.derive_segments()

    def __repr__(self):
        return f"SpatioTemporalPrediction(video_id='{self.video_id}', segments={self.segments})"

    def derive_segments(self):
        by_index = {f.frame_index: f for f in self.frames}
        if not by_index:
            return []
        first = min(by_index)
        labels = [by_index[i].label if i in by_index else BACKGROUND for i in range(first, max(by_index) + 1)]
        segments = []
        for class_id, start, end in label_runs(labels, BACKGROUND):
            start, end = start + first, end + first
            confidence = float(np.mean([by_index[i].score for i in range(start, end)]))
            segments.append(PredictedSegment(self.video_id, class_id, start, end, confidence))
        return segments

    def labels(self):
        return {f.frame_index: f.label for f in self.frames}

    def tube(self, segment):
        """Voxel set `{(frame, cell)}` of a predicted segment's masks."""
        by_index = {f.frame_index: f for f in self.frames}
        return {(i, int(c)) for i in segment.frames for c in by_index[i].mask.nonzero()[0]}

    @property
    def voxel_count(self):
        return int(sum(f.mask.sum() for f in self.frames))


def load_predictions(path):
    grouped = defaultdict(list)
    for record in load_jsonl(FrameRecord, path):
        grouped[record.video_id].append(record)
    return [SpatioTemporalPrediction(video_id, grouped[video_id]) for video_id in sorted(grouped)]


def save_predictions(preds, path, run_config=None):
    records = [f for p in sorted(preds, key=lambda p: p.video_id) for f in p.frames]
    save_jsonl(records, path, run_config)
