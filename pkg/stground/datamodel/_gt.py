from .._constants import BACKGROUND
from ..exceptions import SchemaError
from ._grid import box_area, rasterize_box
from ._records import Record, load_jsonl, save_jsonl


class GtSegment:
    def __init__(self, class_id, start_frame, end_frame, boxes):
        self.class_id = int(class_id)
        self.start_frame = int(start_frame)
        self.end_frame = int(end_frame)
        self.boxes = [[float(v) for v in b] for b in boxes]

    def __repr__(self):
        return f"GtSegment(class_id={self.class_id}, frames=[{self.start_frame},{self.end_frame}))"

    def __len__(self):
        return self.end_frame - self.start_frame

    @property
    def frames(self):
        return range(self.start_frame, self.end_frame)

    def box_at(self, frame):
        return self.boxes[frame - self.start_frame]

    @property
    def mean_area(self):
        return sum(box_area(b) for b in self.boxes)/len(self.boxes)

    def to_dict(self):
        return {
            'class_id': self.class_id,
            'start_frame': self.start_frame,
            'end_frame': self.end_frame,
            'boxes': self.boxes,
        }


class VideoGt(Record):
    """Ground truth of one video: action segments with one pixel box per frame."""

    def __init__(self, video_id, width, height, num_frames, segments, ordered_transcript=None, source='<memory>'):
        self.video_id = str(video_id)
        self.width = float(width)
        self.height = float(height)
        self.num_frames = int(num_frames)
        self.segments = sorted(segments, key=lambda s: (s.start_frame, s.class_id))
        if ordered_transcript is None:
            ordered_transcript = self.transcript_from_segments()
        self.ordered_transcript = [int(c) for c in ordered_transcript]
        self.validate(source)

    def __repr__(self):
        return f"VideoGt(video_id='{self.video_id}', segments={self.segments})"

    def transcript_from_segments(self):
        transcript = []
        cursor = 0
        for s in self.segments:
            if s.start_frame > cursor:
                transcript.append(BACKGROUND)
            transcript.append(s.class_id)
            cursor = s.end_frame
        if cursor < self.num_frames:
            transcript.append(BACKGROUND)
        return transcript

    def validate(self, source='<memory>'):
        if self.width <= 0 or self.height <= 0:
            raise SchemaError(source, 'frame geometry must be positive')
        for s in self.segments:
            if not 0 <= s.start_frame < s.end_frame <= self.num_frames:
                raise SchemaError(source, f"segment {s} outside 0..{self.num_frames}")
            if len(s.boxes) != len(s):
                raise SchemaError(source, f"segment {s} needs one box per frame")
            for x0, y0, x1, y1 in s.boxes:
                if not (0 <= x0 <= x1 <= self.width and 0 <= y0 <= y1 <= self.height):
                    raise SchemaError(source, f"box {[x0, y0, x1, y1]} outside the frame")

    def frame_labels(self):
        labels = [BACKGROUND]*self.num_frames
        for s in self.segments:
            for f in s.frames:
                labels[f] = s.class_id
        return labels

    def frame_boxes(self):
        """`{frame: (class_id, box)}` for every annotated frame."""
        return {f: (s.class_id, s.box_at(f)) for s in self.segments for f in s.frames}

    def tube(self, segment, num_cells):
        """Voxel set `{(frame, cell)}` of a segment rasterized on the token grid."""
        voxels = set()
        for f in segment.frames:
            mask = rasterize_box(segment.box_at(f), num_cells, self.width, self.height)
            voxels.update((f, int(c)) for c in mask.nonzero()[0])
        return voxels

    def to_dict(self):
        return {
            'video_id': self.video_id,
            'width': self.width,
            'height': self.height,
            'num_frames': self.num_frames,
            'segments': [s.to_dict() for s in self.segments],
            'ordered_transcript': self.ordered_transcript,
        }

    @classmethod
    def from_dict(cls, d, source='<memory>', line=None):
        req = lambda field: cls.require(d, field, source, line)
        segments = []
        for s in req('segments'):
            r = lambda field: cls.require(s, field, source, line)
            segments.append(GtSegment(r('class_id'), r('start_frame'), r('end_frame'), r('boxes')))
        return cls(
            req('video_id'), req('width'), req('height'), req('num_frames'), segments,
            d.get('ordered_transcript'),
            source=source if line is None else f"{source}:{line}",
        )


def load_gt(path):
    return load_jsonl(VideoGt, path)


def save_gt(gts, path, run_config=None):
    save_jsonl(gts, path, run_config)
