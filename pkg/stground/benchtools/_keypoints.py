import numpy as np

from ..datamodel import Record, load_jsonl, save_jsonl
from ..exceptions import SchemaError
from ._config import MAX_ANNOTATORS


class AnnotatorEntry:
    """One annotator's answer for a frame: a point, "can't solve", or flagged corrupt."""

    def __init__(self, point=None, cant_solve=False, corrupt=False):
        self.point = None if point is None else (float(point[0]), float(point[1]))
        self.cant_solve = bool(cant_solve)
        self.corrupt = bool(corrupt)

    def __repr__(self):
        if self.corrupt:
            return 'AnnotatorEntry(corrupt)'
        if self.cant_solve:
            return 'AnnotatorEntry(cant_solve)'
        return f"AnnotatorEntry(point={self.point})"

    @property
    def has_point(self):
        return self.point is not None and not self.corrupt

    def to_dict(self):
        return {
            'point': None if self.point is None else list(self.point),
            'cant_solve': self.cant_solve,
            'corrupt': self.corrupt,
        }


class KeypointRecord(Record):
    def __init__(self, video_id, frame_index, class_id, width, height, entries, source='<memory>'):
        self.video_id = str(video_id)
        self.frame_index = int(frame_index)
        self.class_id = int(class_id)
        self.width = float(width)
        self.height = float(height)
        self.entries = list(entries)
        self.validate(source)

    def __repr__(self):
        return f"KeypointRecord(video_id='{self.video_id}', frame_index={self.frame_index}, points={len(self.points)})"

    @property
    def points(self):
        """Points of the non-corrupt entries."""
        return [e.point for e in self.entries if e.has_point]

    @property
    def valid_entries(self):
        return [e for e in self.entries if not e.corrupt]

    def validate(self, source='<memory>'):
        if len(self.entries) > MAX_ANNOTATORS:
            raise SchemaError(source, f"at most {MAX_ANNOTATORS} annotator entries, got {len(self.entries)}")
        if self.width <= 0 or self.height <= 0:
            raise SchemaError(source, 'frame geometry must be positive')
        for e in self.entries:
            if e.point is not None and e.cant_solve:
                raise SchemaError(source, 'an entry cannot carry both a point and `cant_solve`')
            if e.point is not None:
                x, y = e.point
                if not (0 <= x <= self.width and 0 <= y <= self.height):
                    raise SchemaError(source, f"point {e.point} outside the {self.width}x{self.height} frame")

    def to_dict(self):
        return {
            'video_id': self.video_id,
            'frame_index': self.frame_index,
            'class_id': self.class_id,
            'width': self.width,
            'height': self.height,
            'entries': [e.to_dict() for e in self.entries],
        }

    @classmethod
    def from_dict(cls, d, source='<memory>', line=None):
        req = lambda field: cls.require(d, field, source, line)
        entries = [
            AnnotatorEntry(e.get('point'), e.get('cant_solve', False), e.get('corrupt', False))
            for e in req('entries')
        ]
        where = source if line is None else f"{source}:{line}"
        return cls(req('video_id'), req('frame_index'), req('class_id'), req('width'), req('height'), entries, source=where)


class FrameAggregate:
    def __init__(self, present, points, centroid):
        self.present = present
        self.points = points
        self.centroid = centroid

    def __repr__(self):
        return f"FrameAggregate(present={self.present}, points={len(self.points)})"

    def to_dict(self):
        return {
            'present': self.present,
            'points': [list(p) for p in self.points],
            'centroid': None if self.centroid is None else list(self.centroid),
        }


def aggregate_frame(record, cfg):
    """Majority vote: present when at least `majority_k` non-corrupt annotators placed a point."""
    points = record.points
    present = len(points) >= cfg.majority_k
    centroid = tuple(float(v) for v in np.mean(points, axis=0)) if present else None
    return FrameAggregate(present, points, centroid)


def load_keypoints(path):
    return load_jsonl(KeypointRecord, path)


def save_keypoints(records, path, run_config=None):
    save_jsonl(records, path, run_config)
